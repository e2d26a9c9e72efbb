#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yfstab/config.hpp"
#include "yfstab/error.hpp"

namespace yfstab {

inline constexpr const char* kToolName = "yfstab";
inline constexpr const char* kToolVersion = YFSTAB_VERSION;

struct RunResult {
  std::optional<StabilityReport> stability;
  std::vector<std::pair<std::string, DecayResult>> amplitudes;  // labelled records
  std::vector<GramResult> grams;
  nlohmann::json summary;
  std::vector<std::string> files;  // written paths, in order
};

/// Runs the computations selected by config.mode and writes reports plus
/// summary.json into config.output_directory.
RunResult run(const RunConfig& config);

/// Ladder diagnostics: per-n pairing drift and kl_norm ratios, and the
/// per-width decay estimates behind the extrapolation.
RunResult convergence_report(const RunConfig& config);

/// CLI exit status for a library error: 2 config, 3 numerical, 4 internal.
int exit_code_for(ErrorCode code);

}  // namespace yfstab
