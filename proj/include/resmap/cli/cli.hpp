#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace resmap::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

/// Directory names of the stages inside a run directory.
inline constexpr const char* kDatasetDir = "dataset";
inline constexpr const char* kLabelsDir = "labels";
inline constexpr const char* kModelDir = "model";
inline constexpr const char* kSamplesDir = "samples";
inline constexpr const char* kMapsDir = "maps";
inline constexpr const char* kCarbonDir = "carbon";
inline constexpr const char* kEvalDir = "eval";

/// Runs `resmap <subcommand> [flags]`; args excludes the program name.
/// Diagnostics go to `err`, progress to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resmap::cli
