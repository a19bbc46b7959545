#pragma once

#include <stdexcept>
#include <string>

namespace dccc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model: bad domains, cyclic graph, non-total equation tables.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Missing, malformed or unnormalized evidence tables.
class EvidenceError : public Error {
 public:
  using Error::Error;
};

/// A query that the given model cannot answer (e.g. intervening on a
/// component of a merged endogenous variable).
class NotComputable : public Error {
 public:
  using Error::Error;
};

/// Evidence admits no exogenous distribution at all.
class InfeasibleEvidence : public Error {
 public:
  using Error::Error;
};

/// Configured work limit exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace dccc
