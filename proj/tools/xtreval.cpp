#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "xtreval/errors.hpp"
#include "xtreval/pipeline.hpp"
#include "xtreval/version.hpp"

namespace {

struct StageArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

void add_stage(CLI::App& app, const char* name, const char* description, StageArgs& args,
               std::vector<std::pair<std::string, CLI::App*>>& stages) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", args.config, "stage config file (JSON)")->required();
  sub->add_option("--seed", args.seed, "override the config seed");
  sub->add_option("--workers", args.workers, "worker threads (0 = all cores)");
  sub->add_option("--out", args.out, "output directory");
  stages.emplace_back(name, sub);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evaluates gridded precipitation extremes against station-sampled references"};
  app.set_version_flag("--version", std::string(xtreval::kVersion));
  app.require_subcommand(1);

  StageArgs args;
  std::vector<std::pair<std::string, CLI::App*>> stages;
  add_stage(app, "remap", "conservatively regrid a daily store onto a target grid", args, stages);
  add_stage(app, "rx5day", "extract seasonal 5-day maxima from daily stores", args, stages);
  add_stage(app, "fit", "fit cellwise GEV distributions and return values", args, stages);
  add_stage(app, "mask", "build station, all-land and subsampled cell masks", args, stages);
  add_stage(app, "evaluate", "compare model and reference return values under masks", args,
            stages);
  add_stage(app, "synth", "generate a synthetic scenario with known truth", args, stages);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : xtreval::exit_code::kConfig;
  }

  std::string stage;
  for (const auto& [name, sub] : stages) {
    if (sub->parsed()) stage = name;
  }

  xtreval::pipeline::StageOverrides overrides;
  overrides.seed = args.seed;
  overrides.workers = args.workers;
  if (args.out) overrides.out_dir = *args.out;

  try {
    const xtreval::pipeline::StageResult result =
        xtreval::pipeline::run_stage(stage, args.config, overrides);
    for (const std::string& warning : result.warnings) {
      std::cerr << "warning: " << warning << '\n';
    }
    if (result.cached) {
      std::cout << stage << ": up to date (" << result.outputs.size() << " outputs)\n";
    } else {
      for (const std::string& file : result.outputs) std::cout << "wrote " << file << '\n';
    }
    return result.exit_code;
  } catch (const xtreval::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return xtreval::exit_code::kConfig;
  } catch (const xtreval::ProvenanceError& e) {
    std::cerr << "provenance error: " << e.what() << '\n';
    return xtreval::exit_code::kProvenance;
  } catch (const xtreval::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return xtreval::exit_code::kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
