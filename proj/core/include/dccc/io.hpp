#pragma once

// JSON documents for models, evidence and results; number formatting shared
// by every text output.

#include <filesystem>
#include <map>
#include <string>

#include "dccc/evidence.hpp"
#include "dccc/query.hpp"
#include "dccc/scm.hpp"
#include "dccc/search.hpp"

namespace dccc {

/// Shortest decimal text that reads back to the same double.
[[nodiscard]] std::string format_double(double value);

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Model document: {"variables": [{id, kind, domain_size}], "equations":
/// [{child, parents, table | canonical: true}], "priors": {id: [p...]}}.
[[nodiscard]] PartialScm parse_model(const std::string& text);
[[nodiscard]] std::string dump_model(const PartialScm& model);

/// Evidence document: {"observational": [{targets, context, table}],
/// "experimental": [{target, do, table}]}. Axis sizes come from the model.
[[nodiscard]] Evidence parse_evidence(const std::string& text, const PartialScm& model);
[[nodiscard]] std::string dump_evidence(const Evidence& evidence);

[[nodiscard]] std::string dump_solutions(const std::map<std::string, SolutionSet>& solutions,
                                         const std::string& regime);
[[nodiscard]] std::map<std::string, SolutionSet> parse_solutions(const std::string& text);

[[nodiscard]] std::string dump_interval(const QueryInterval& interval, const Query& query, const std::string& regime,
                                        const std::map<std::string, SolutionSet>& solutions);

}  // namespace dccc
