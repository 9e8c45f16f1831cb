#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "palms/experiment.hpp"

namespace palms {

inline constexpr int kResultsSchemaVersion = 1;

/// Pretty-printed JSON results document. Output is a pure function of the
/// result, so identical runs give byte-identical documents.
std::string results_to_json(const ExperimentResult& result);
ExperimentResult results_from_json(const std::string& text);

/// `budget,mean,std` table for one method.
std::string plot_table(const ExperimentResult& result, MethodId method);

/// Writes results.json and <METHOD>.csv plot tables into out_dir (created if
/// needed). Returns the written paths.
std::vector<std::filesystem::path> emit_results(const ExperimentResult& result,
                                                const std::filesystem::path& out_dir);

ExperimentResult read_results(const std::filesystem::path& results_json);

}  // namespace palms
