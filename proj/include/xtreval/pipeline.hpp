#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "xtreval/errors.hpp"
#include "xtreval/synth.hpp"

namespace xtreval::pipeline {

using nlohmann::json;
using std::filesystem::path;

/// Command-line values; a set field wins over the config file.
struct StageOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<path> out_dir;
};

struct StageResult {
  int exit_code = exit_code::kOk;
  bool cached = false;               // outputs were already current, nothing recomputed
  std::vector<std::string> outputs;  // file names relative to the output directory
  std::vector<std::string> warnings;
};

/// Runs one stage from a JSON config file. Relative input paths resolve
/// against the config file's directory; outputs land in the output
/// directory (--out, else the config's out_dir, else the working
/// directory). Every stage writes a <name>.run.json manifest recording the
/// tool version, canonical config, input checksums, seed and output
/// checksums. Re-running with an unchanged manifest key and intact outputs
/// is a no-op. Worker count and output directory never enter manifests or
/// outputs, so reruns are byte-identical regardless of either.
StageResult run_stage(const std::string& stage, const path& config_file,
                      const StageOverrides& overrides = {});

StageResult run_remap(const json& config, const path& config_dir,
                      const StageOverrides& overrides = {});
StageResult run_rx5day(const json& config, const path& config_dir,
                       const StageOverrides& overrides = {});
StageResult run_fit(const json& config, const path& config_dir,
                    const StageOverrides& overrides = {});
StageResult run_mask(const json& config, const path& config_dir,
                     const StageOverrides& overrides = {});
StageResult run_evaluate(const json& config, const path& config_dir,
                         const StageOverrides& overrides = {});
StageResult run_synth(const json& config, const path& config_dir,
                      const StageOverrides& overrides = {});

/// Scenario spec from JSON. A "preset" key ("ridge-undersampled" or
/// "flat-homogeneous") selects a base scenario; the remaining keys override
/// individual fields. Unknown keys are configuration errors.
SyntheticScenario scenario_from_json(const json& j);

}  // namespace xtreval::pipeline
