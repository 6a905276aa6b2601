#include "xtreval/pipeline.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <utility>

#include "xtreval/bootstrap.hpp"
#include "xtreval/fit.hpp"
#include "xtreval/io.hpp"
#include "xtreval/metrics.hpp"
#include "xtreval/regions.hpp"
#include "xtreval/remap.hpp"
#include "xtreval/sampling.hpp"
#include "xtreval/seasonal.hpp"
#include "xtreval/version.hpp"

namespace xtreval::pipeline {

namespace {

const json* find(const json& c, const char* key) {
  const auto it = c.find(key);
  return it == c.end() ? nullptr : &*it;
}

[[noreturn]] void bad_key(const std::string& where, const char* key, const char* want) {
  throw ConfigError(where + " config: '" + key + "' must be " + want);
}

std::string require_string(const json& c, const std::string& where, const char* key) {
  const json* v = find(c, key);
  if (!v) throw ConfigError(where + " config: missing '" + key + "'");
  if (!v->is_string()) bad_key(where, key, "a string");
  return v->get<std::string>();
}

std::string get_string(const json& c, const std::string& where, const char* key,
                       const char* def) {
  const json* v = find(c, key);
  if (!v) return def;
  if (!v->is_string()) bad_key(where, key, "a string");
  return v->get<std::string>();
}

double get_double(const json& c, const std::string& where, const char* key, double def) {
  const json* v = find(c, key);
  if (!v) return def;
  if (!v->is_number()) bad_key(where, key, "a number");
  return v->get<double>();
}

std::int64_t get_int(const json& c, const std::string& where, const char* key,
                     std::int64_t def) {
  const json* v = find(c, key);
  if (!v) return def;
  if (!v->is_number_integer() && !v->is_number_unsigned()) bad_key(where, key, "an integer");
  return v->get<std::int64_t>();
}

bool get_bool(const json& c, const std::string& where, const char* key, bool def) {
  const json* v = find(c, key);
  if (!v) return def;
  if (!v->is_boolean()) bad_key(where, key, "a boolean");
  return v->get<bool>();
}

/// Per-invocation bookkeeping: effective seed/workers/output directory, the
/// canonical config (out_dir and workers stripped so manifests never depend
/// on where or how wide the run executed), input checksums, and the cache
/// manifest protocol.
struct StageContext {
  std::string stage;
  std::string name;  // output file prefix
  path config_dir;
  path out;
  std::uint64_t seed = 0;
  bool seed_explicit = false;
  int workers = 0;
  json canonical;
  json inputs = json::object();

  StageContext(std::string stage_name, const json& config, path dir, const StageOverrides& ov,
               const char* default_output)
      : stage(std::move(stage_name)), config_dir(std::move(dir)) {
    if (!config.is_object()) throw ConfigError(stage + " config: expected a JSON object");
    if (const json* s = find(config, "stage")) {
      if (!s->is_string() || s->get<std::string>() != stage) {
        throw ConfigError(stage + " config: 'stage' names a different subcommand");
      }
    }
    name = get_string(config, stage, "output", default_output);
    if (name.empty()) throw ConfigError(stage + " config: 'output' must not be empty");

    if (ov.out_dir) {
      out = *ov.out_dir;
    } else if (find(config, "out_dir")) {
      out = resolve(require_string(config, stage, "out_dir"));
    } else {
      out = ".";
    }
    workers = ov.workers ? *ov.workers
                         : static_cast<int>(get_int(config, stage, "workers", 0));
    if (ov.seed) {
      seed = *ov.seed;
      seed_explicit = true;
    } else if (find(config, "seed")) {
      const std::int64_t s = get_int(config, stage, "seed", 0);
      if (s < 0) throw ConfigError(stage + " config: seed must be non-negative");
      seed = static_cast<std::uint64_t>(s);
      seed_explicit = true;
    }

    canonical = config;
    canonical.erase("out_dir");
    canonical.erase("workers");
    canonical["seed"] = seed;
  }

  path resolve(const std::string& p) const {
    const path q(p);
    return q.is_absolute() ? q : config_dir / q;
  }

  /// Resolves, checks existence, and records the checksum of one input.
  path record_input(const std::string& label, const std::string& as_configured) {
    const path file = resolve(as_configured);
    if (!std::filesystem::exists(file)) {
      throw ConfigError(stage + ": input not found: " + file.string());
    }
    inputs[label] = {{"path", as_configured}, {"hash", io::hash_file(file)}};
    return file;
  }

  path input_file(const json& config, const char* key, const char* label) {
    return record_input(label, require_string(config, stage, key));
  }

  void set_seed(std::uint64_t s) {
    seed = s;
    canonical["seed"] = s;
  }

  std::string stage_key() const {
    return io::hash_string(stage + "\n" + kVersion + "\n" + canonical.dump() + "\n" +
                           inputs.dump());
  }

  path manifest_path() const { return out / (name + ".run.json"); }

  /// A hit requires the manifest key to match and every recorded output to
  /// exist with its recorded checksum; anything stale or corrupt recomputes.
  std::optional<StageResult> cached() const {
    if (!std::filesystem::exists(manifest_path())) return std::nullopt;
    try {
      const json m = io::load_json(manifest_path());
      if (m.value("stage_key", std::string()) != stage_key()) return std::nullopt;
      StageResult r;
      r.cached = true;
      r.exit_code = m.value("exit_code", exit_code::kOk);
      for (const auto& [file, hash] : m.at("outputs").items()) {
        const path f = out / file;
        if (!std::filesystem::exists(f) || io::hash_file(f) != hash.get<std::string>()) {
          return std::nullopt;
        }
        r.outputs.push_back(file);
      }
      if (const json* w = find(m, "warnings")) {
        for (const json& msg : *w) r.warnings.push_back(msg.get<std::string>());
      }
      return r;
    } catch (const Error&) {
      return std::nullopt;
    } catch (const json::exception&) {
      return std::nullopt;
    }
  }

  void finish(StageResult& r) const {
    json m;
    m["stage"] = stage;
    m["version"] = kVersion;
    m["stage_key"] = stage_key();
    m["config"] = canonical;
    m["config_hash"] = io::hash_string(canonical.dump());
    m["inputs"] = inputs;
    m["seed"] = seed;
    json outs = json::object();
    for (const std::string& file : r.outputs) outs[file] = io::hash_file(out / file);
    m["outputs"] = outs;
    m["warnings"] = r.warnings;
    m["exit_code"] = r.exit_code;
    io::save_json(manifest_path(), m);
  }

  /// Provenance block embedded in store descriptors.
  json run_meta() const {
    json meta;
    meta["stage"] = stage;
    meta["config_hash"] = io::hash_string(canonical.dump());
    meta["inputs"] = inputs;
    meta["seed"] = seed;
    return meta;
  }
};

RegularGrid load_grid(const path& file) {
  return io::grid_from_json(io::load_json(file), file.parent_path());
}

SyntheticScenario preset_scenario(const std::string& name) {
  if (name == "ridge-undersampled") return ridge_undersampled_scenario();
  if (name == "flat-homogeneous") return flat_homogeneous_scenario();
  throw ConfigError("synth config: unknown scenario preset '" + name + "'");
}

void apply_grid(const json& j, ScenarioGridSpec& g) {
  for (const auto& [key, value] : j.items()) {
    if (key == "lat_start") g.lat_start = value.get<double>();
    else if (key == "lat_step") g.lat_step = value.get<double>();
    else if (key == "n_lat") g.n_lat = value.get<Index>();
    else if (key == "lon_start") g.lon_start = value.get<double>();
    else if (key == "lon_step") g.lon_step = value.get<double>();
    else if (key == "n_lon") g.n_lon = value.get<Index>();
    else if (key == "land_fraction") g.land_fraction = value.get<double>();
    else throw ConfigError("synth scenario grid: unknown key '" + key + "'");
  }
}

void apply_elevation(const json& j, ElevationSpec& e) {
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") e.kind = value.get<std::string>();
    else if (key == "value_m") e.value_m = value.get<double>();
    else if (key == "base_m") e.base_m = value.get<double>();
    else if (key == "peak_m") e.peak_m = value.get<double>();
    else if (key == "axis") e.axis = value.get<std::string>();
    else throw ConfigError("synth scenario elevation: unknown key '" + key + "'");
  }
}

void apply_stations(const json& j, StationSpec& s) {
  for (const auto& [key, value] : j.items()) {
    if (key == "per_cell") s.per_cell = value.get<double>();
    else if (key == "max_elevation_percentile") s.max_elevation_percentile = value.get<double>();
    else if (key == "completeness_min") s.completeness_min = value.get<double>();
    else if (key == "completeness_max") s.completeness_max = value.get<double>();
    else throw ConfigError("synth scenario stations: unknown key '" + key + "'");
  }
}

void apply_truth(const json& j, TruthSpec& t) {
  for (const auto& [key, value] : j.items()) {
    if (key == "mu0_base") t.mu0_base = value.get<double>();
    else if (key == "mu0_per_km") t.mu0_per_km = value.get<double>();
    else if (key == "mu1") t.mu1 = value.get<double>();
    else if (key == "sigma_base") t.sigma_base = value.get<double>();
    else if (key == "sigma_per_km") t.sigma_per_km = value.get<double>();
    else if (key == "xi") t.xi = value.get<double>();
    else throw ConfigError("synth scenario truth: unknown key '" + key + "'");
  }
}

void apply_model_error(const json& j, ModelErrorSpec& m) {
  for (const auto& [key, value] : j.items()) {
    if (key == "mu0_offset") m.mu0_offset = value.get<double>();
    else if (key == "mu0_per_km") m.mu0_per_km = value.get<double>();
    else if (key == "mu1_offset") m.mu1_offset = value.get<double>();
    else if (key == "sigma_scale") m.sigma_scale = value.get<double>();
    else throw ConfigError("synth scenario model_error: unknown key '" + key + "'");
  }
}

void apply_process(const json& j, DailyProcessSpec& p) {
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") p.kind = value.get<std::string>();
    else if (key == "wet_prob") p.wet_prob = value.get<double>();
    else if (key == "gamma_shape") p.gamma_shape = value.get<double>();
    else if (key == "scale_mm") p.scale_mm = value.get<double>();
    else if (key == "model_amount_scale") p.model_amount_scale = value.get<double>();
    else if (key == "model_amount_scale_per_km") {
      p.model_amount_scale_per_km = value.get<double>();
    } else {
      throw ConfigError("synth scenario process: unknown key '" + key + "'");
    }
  }
}

void apply_covariate(const json& j, CovariateSpec& c) {
  for (const auto& [key, value] : j.items()) {
    if (key == "base") c.base = value.get<double>();
    else if (key == "slope_per_year") c.slope_per_year = value.get<double>();
    else throw ConfigError("synth scenario covariate: unknown key '" + key + "'");
  }
}

void write_params_csv(const path& file, const RegularGrid& grid,
                      const std::vector<GevParams>& params) {
  std::ostringstream text;
  text << "row,col,mu0,mu1,sigma,xi\n";
  for (Index c = 0; c < grid.n_cells(); ++c) {
    const CellId id = grid.cell_id(c);
    const GevParams& g = params[static_cast<std::size_t>(c)];
    text << id.row << ',' << id.col << ',' << io::format_double(g.mu0) << ','
         << io::format_double(g.mu1) << ',' << io::format_double(g.sigma) << ','
         << io::format_double(g.xi) << '\n';
  }
  io::write_text(file, text.str());
}

}  // namespace

StageResult run_remap(const json& config, const path& config_dir, const StageOverrides& ov) {
  StageContext ctx("remap", config, config_dir, ov, "remapped");
  const path input = ctx.input_file(config, "input", "input");
  const path grid_file = ctx.input_file(config, "target_grid", "target_grid");
  const double coverage = get_double(config, ctx.stage, "coverage_threshold", 0.5);
  if (!(coverage >= 0.0 && coverage <= 1.0)) {
    throw ConfigError("remap config: coverage_threshold outside [0, 1]");
  }
  if (io::load_json(input).value("kind", std::string()) == "season_max") {
    throw ProvenanceError(
        "remap: refusing to regrid season maxima; regrid the daily field, then extract maxima");
  }
  if (auto hit = ctx.cached()) return *hit;

  const DailyField daily = io::read_daily_store(input);
  const DailyField mapped =
      apply_plan(build_plan(daily.grid, load_grid(grid_file)), daily, coverage, ctx.workers);

  StageResult r;
  io::write_daily_store(ctx.out / (ctx.name + ".json"), mapped, ctx.run_meta());
  r.outputs = {ctx.name + ".json", ctx.name + ".f32"};
  ctx.finish(r);
  return r;
}

StageResult run_rx5day(const json& config, const path& config_dir, const StageOverrides& ov) {
  StageContext ctx("rx5day", config, config_dir, ov, "rx5day");
  const json* in = find(config, "input");
  if (!in) throw ConfigError("rx5day config: missing 'input'");
  std::vector<path> files;
  if (in->is_string()) {
    files.push_back(ctx.record_input("input", in->get<std::string>()));
  } else if (in->is_array() && !in->empty()) {
    Index i = 0;
    for (const json& e : *in) {
      if (!e.is_string()) bad_key(ctx.stage, "input", "a path or a non-empty array of paths");
      files.push_back(ctx.record_input("input:" + std::to_string(i++), e.get<std::string>()));
    }
  } else {
    bad_key(ctx.stage, "input", "a path or a non-empty array of paths");
  }
  const std::string season_name = get_string(config, ctx.stage, "season", "DJF");
  if (auto hit = ctx.cached()) return *hit;

  const Season season = Season::from_name(season_name);
  std::vector<SeasonMaxSeries> members;
  members.reserve(files.size());
  for (const path& f : files) {
    members.push_back(running_total_max(io::read_daily_store(f), season, 5));
  }
  const SeasonMaxSeries series =
      members.size() == 1 ? std::move(members.front()) : pool_ensemble(members);

  StageResult r;
  io::write_season_max_store(ctx.out / (ctx.name + ".json"), series, ctx.run_meta());
  r.outputs = {ctx.name + ".json", ctx.name + ".f32"};
  ctx.finish(r);
  return r;
}

StageResult run_fit(const json& config, const path& config_dir, const StageOverrides& ov) {
  StageContext ctx("fit", config, config_dir, ov, "fit");
  const path maxima_file = ctx.input_file(config, "maxima", "maxima");
  const path gmt_file = ctx.input_file(config, "gmt", "gmt");
  const double r_years = get_double(config, ctx.stage, "r_years", 20.0);
  if (!(r_years > 1.0)) throw ConfigError("fit config: r_years must exceed 1");
  const std::int64_t min_obs = get_int(config, ctx.stage, "min_obs", 10);
  if (min_obs < 2) throw ConfigError("fit config: min_obs must be at least 2");
  const bool smooth = get_bool(config, ctx.stage, "smooth", true);

  int B = 0;
  double max_fail = 0.10;
  if (const json* b = find(config, "bootstrap")) {
    if (b->is_object()) {
      B = static_cast<int>(get_int(*b, "fit bootstrap", "B", 250));
      max_fail = get_double(*b, "fit bootstrap", "max_failure_fraction", 0.10);
    } else if (b->is_number_integer() || b->is_number_unsigned()) {
      B = static_cast<int>(b->get<std::int64_t>());
    } else {
      bad_key(ctx.stage, "bootstrap", "an integer or an object");
    }
    if (B < 30) throw ConfigError("fit config: bootstrap B must be at least 30");
  }

  const json* baseline = find(config, "baseline");
  if (baseline && (!baseline->is_array() || baseline->size() != 2 ||
                   !(*baseline)[0].is_number_integer() || !(*baseline)[1].is_number_integer())) {
    bad_key(ctx.stage, "baseline", "a [start_year, end_year] pair");
  }
  if (auto hit = ctx.cached()) return *hit;

  const SeasonMaxSeries series = io::read_season_max_store(maxima_file);
  const auto& prov = series.provenance;
  const auto rx = std::find(prov.begin(), prov.end(), provenance::kRx5day);
  if (rx != prov.end() && std::find(rx, prov.end(), provenance::kRemap) != prov.end()) {
    throw ProvenanceError(
        "fit: maxima were extracted before regridding; regrid the daily field first, then "
        "extract maxima");
  }

  const auto gmt = io::read_gmt_csv(gmt_file);
  if (gmt.empty()) throw DataError(gmt_file.string() + ": empty series");
  std::vector<int> years(gmt.size());
  ArrayXd anomalies(static_cast<Index>(gmt.size()));
  for (std::size_t i = 0; i < gmt.size(); ++i) {
    years[i] = gmt[i].first;
    anomalies[static_cast<Index>(i)] = gmt[i].second;
  }
  int base_start = years.front();
  int base_end = years.back();
  if (baseline) {
    base_start = (*baseline)[0].get<int>();
    base_end = (*baseline)[1].get<int>();
  }

  CovariateSeries covariate;
  if (smooth) {
    covariate = smooth_gmt(years, anomalies, base_start, base_end);
  } else {
    covariate.years = years;
    covariate.x = anomalies;
    covariate.baseline_start = base_start;
    covariate.baseline_end = base_end;
    double sum = 0.0;
    Index n = 0;
    for (std::size_t i = 0; i < years.size(); ++i) {
      if (years[i] >= base_start && years[i] <= base_end) {
        sum += anomalies[static_cast<Index>(i)];
        ++n;
      }
    }
    if (n == 0) throw ConfigError("fit config: baseline years are not covered by the GMT series");
    covariate.xbar = sum / static_cast<double>(n);
    covariate.validate();
  }

  FitOptions fit_opts;
  fit_opts.min_obs = min_obs;
  fit_opts.seed = ctx.seed;
  fit_opts.workers = ctx.workers;
  const FieldFit fit = fit_field(series, covariate, r_years, fit_opts);

  StageResult r;
  Index attempted = 0;
  Index failed = 0;
  for (const GevFit& cell : fit.cells) {
    if (cell.n_effective >= min_obs) {
      ++attempted;
      if (!cell.converged) ++failed;
    }
  }
  if (failed > 0) {
    r.warnings.push_back(std::to_string(failed) + " of " + std::to_string(attempted) +
                         " fitted cells did not converge");
  }

  io::RvBundle bundle{series.grid, r_years,        covariate.xbar,    ctx.seed,
                      fit.rv,      ArrayXXd(0, 0), series.provenance};
  bundle.provenance.push_back(provenance::kFit);
  if (B > 0) {
    BootstrapOptions boot_opts;
    boot_opts.B = B;
    boot_opts.seed = ctx.seed;
    boot_opts.workers = ctx.workers;
    boot_opts.max_failure_fraction = max_fail;
    const BootstrapFitField boot = bootstrap_fit_field(series, covariate, fit, fit_opts, boot_opts);
    bundle.replicates = boot.rv;
    if (boot.warning) {
      r.warnings.push_back("bootstrap refit failures exceed the tolerated fraction");
    }
  }

  io::write_fit_csv(ctx.out / (ctx.name + ".csv"), series.grid, fit);
  io::write_rv_bundle(ctx.out / (ctx.name + "_rv.json"), bundle, ctx.run_meta());
  r.outputs = {ctx.name + ".csv", ctx.name + "_rv.json", ctx.name + "_rv.point.f32"};
  if (B > 0) r.outputs.push_back(ctx.name + "_rv.boot.f32");
  if (!r.warnings.empty()) r.exit_code = exit_code::kConvergenceWarning;
  ctx.finish(r);
  return r;
}

StageResult run_mask(const json& config, const path& config_dir, const StageOverrides& ov) {
  StageContext ctx("mask", config, config_dir, ov, "mask");
  const path grid_file = ctx.input_file(config, "grid", "grid");
  const path station_file = ctx.input_file(config, "stations", "stations");
  const double completeness = get_double(config, ctx.stage, "completeness_threshold", 0.90);
  if (!(completeness >= 0.0 && completeness <= 1.0)) {
    throw ConfigError("mask config: completeness_threshold outside [0, 1]");
  }
  const double land =
      get_double(config, ctx.stage, "land_threshold", RegularGrid::kDefaultLandThreshold);
  if (!(land > 0.0 && land <= 1.0)) {
    throw ConfigError("mask config: land_threshold outside (0, 1]");
  }
  std::optional<path> elevation_file;
  if (find(config, "elevation")) {
    elevation_file = ctx.input_file(config, "elevation", "elevation");
  }
  std::optional<double> subsample;
  if (const json* s = find(config, "subsample")) {
    if (s->is_number()) {
      subsample = s->get<double>();
    } else if (s->is_object()) {
      subsample = get_double(*s, "mask subsample", "proportion", kMissing);
      if (is_missing(*subsample)) {
        throw ConfigError("mask config: subsample object needs a 'proportion'");
      }
    } else {
      bad_key(ctx.stage, "subsample", "a number or an object with 'proportion'");
    }
    if (!(*subsample > 0.0 && *subsample <= 1.0)) {
      throw ConfigError("mask config: subsample proportion outside (0, 1]");
    }
  }
  if (auto hit = ctx.cached()) return *hit;

  const RegularGrid grid = load_grid(grid_file);
  const auto stations = high_quality_filter(io::read_station_csv(station_file), completeness);
  std::vector<CellMask> masks;
  masks.push_back(build_a1_mask(grid, stations, land));
  masks.push_back(all_land_mask(grid, land));
  if (subsample) masks.push_back(subsample_mask(masks[0], *subsample, ctx.seed));
  if (elevation_file) {
    masks.push_back(elevation_threshold_mask(masks[1], masks[0],
                                             io::read_elevation_csv(*elevation_file, grid)));
  }

  StageResult r;
  std::vector<std::pair<std::string, MaskSummary>> summaries;
  for (const CellMask& m : masks) {
    const std::string file = ctx.name + "_" + m.provenance + ".csv";
    io::write_mask_csv(ctx.out / file, m);
    r.outputs.push_back(file);
    summaries.emplace_back(m.provenance, mask_summary(m, land));
  }
  io::write_mask_summary_json(ctx.out / (ctx.name + "_summary.json"), summaries);
  r.outputs.push_back(ctx.name + "_summary.json");
  ctx.finish(r);
  return r;
}

StageResult run_evaluate(const json& config, const path& config_dir, const StageOverrides& ov) {
  StageContext ctx("evaluate", config, config_dir, ov, "eval");
  const path model_file = ctx.input_file(config, "model_rv", "model_rv");
  const path ref_file = ctx.input_file(config, "reference_rv", "reference_rv");
  const json* mk = find(config, "masks");
  if (!mk || !mk->is_array() || mk->empty()) {
    bad_key(ctx.stage, "masks", "a non-empty array of paths");
  }
  std::vector<path> mask_files;
  {
    Index i = 0;
    for (const json& e : *mk) {
      if (!e.is_string()) bad_key(ctx.stage, "masks", "a non-empty array of paths");
      mask_files.push_back(ctx.record_input("mask:" + std::to_string(i++), e.get<std::string>()));
    }
  }
  std::optional<path> region_file;
  if (find(config, "regions")) region_file = ctx.input_file(config, "regions", "regions");
  const double level = get_double(config, ctx.stage, "level", 0.95);
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("evaluate config: level outside (0, 1)");
  }
  const bool absolute = get_bool(config, ctx.stage, "absolute", false);
  if (auto hit = ctx.cached()) return *hit;

  const io::RvBundle model = io::read_rv_bundle(model_file);
  const io::RvBundle ref = io::read_rv_bundle(ref_file);
  if (!model.grid.same_geometry(ref.grid)) {
    throw DataError("evaluate: model and reference grids differ");
  }
  if (model.r_years != ref.r_years) {
    throw DataError("evaluate: model and reference use different return periods");
  }
  if (model.replicates.rows() != ref.replicates.rows()) {
    throw DataError("evaluate: model and reference carry different bootstrap replicate counts");
  }
  if (model.replicates.rows() > 0 && model.seed != ref.seed) {
    throw DataError(
        "evaluate: bootstrap replicates are unpaired; refit model and reference with the same "
        "seed");
  }

  std::vector<CellMask> masks;
  masks.reserve(mask_files.size());
  for (const path& f : mask_files) masks.push_back(io::read_mask_csv(f, model.grid));
  std::vector<std::pair<std::string, ArrayXb>> regions;
  if (region_file) {
    for (const RegionSpec& spec : io::read_regions_json(*region_file)) {
      regions.emplace_back(spec.id, region_mask(spec, model.grid));
    }
  } else {
    regions.emplace_back("all", ArrayXb::Constant(model.grid.n_cells(), true));
  }

  const ApproachComparison comp =
      compare_approaches(model.point, ref.point, model.replicates, ref.replicates, masks,
                         regions, model.grid.area_weights(), level, absolute);

  StageResult r;
  io::write_eval_csv(ctx.out / (ctx.name + ".csv"), comp.reports);
  io::write_taylor_csv(ctx.out / (ctx.name + "_taylor.csv"), comp.reports);
  io::write_change_csv(ctx.out / (ctx.name + "_changes.csv"), comp.changes);
  r.outputs = {ctx.name + ".csv", ctx.name + "_taylor.csv", ctx.name + "_changes.csv"};
  r.warnings = comp.warnings;
  if (!r.warnings.empty()) r.exit_code = exit_code::kConvergenceWarning;
  ctx.finish(r);
  return r;
}

StageResult run_synth(const json& config, const path& config_dir, const StageOverrides& ov) {
  StageContext ctx("synth", config, config_dir, ov, "synth");
  const json* sc = find(config, "scenario");
  if (!sc) throw ConfigError("synth config: missing 'scenario'");
  SyntheticScenario scenario;
  if (sc->is_string()) {
    scenario = preset_scenario(sc->get<std::string>());
  } else {
    scenario = scenario_from_json(*sc);
  }
  const double r_years = get_double(config, ctx.stage, "r_years", 20.0);
  if (!(r_years > 1.0)) throw ConfigError("synth config: r_years must exceed 1");
  if (ctx.seed_explicit) {
    scenario.seed = ctx.seed;
  } else {
    ctx.set_seed(scenario.seed);
  }
  if (auto hit = ctx.cached()) return *hit;

  const ScenarioData data = generate_scenario(scenario, r_years);
  const std::string p = ctx.name + "_";
  StageResult r;

  io::save_json(ctx.out / (p + "grid.json"), io::grid_to_json(data.grid));
  r.outputs.push_back(p + "grid.json");
  io::write_elevation_csv(ctx.out / (p + "elevation.csv"), data.elevation);
  r.outputs.push_back(p + "elevation.csv");
  io::write_station_csv(ctx.out / (p + "stations.csv"), data.stations);
  r.outputs.push_back(p + "stations.csv");

  std::vector<std::pair<int, double>> gmt;
  gmt.reserve(data.covariate.years.size());
  for (std::size_t i = 0; i < data.covariate.years.size(); ++i) {
    gmt.emplace_back(data.covariate.years[i], data.covariate.x[static_cast<Index>(i)]);
  }
  io::write_gmt_csv(ctx.out / (p + "gmt.csv"), gmt);
  r.outputs.push_back(p + "gmt.csv");

  write_params_csv(ctx.out / (p + "truth_params.csv"), data.grid, data.truth_params);
  r.outputs.push_back(p + "truth_params.csv");
  write_params_csv(ctx.out / (p + "model_params.csv"), data.grid, data.model_params);
  r.outputs.push_back(p + "model_params.csv");

  const io::RvBundle truth{data.grid, r_years,        data.covariate.xbar,  scenario.seed,
                           data.truth_rv, ArrayXXd(0, 0), {provenance::kSynth}};
  io::write_rv_bundle(ctx.out / (p + "truth_rv.json"), truth, ctx.run_meta());
  r.outputs.push_back(p + "truth_rv.json");
  r.outputs.push_back(p + "truth_rv.point.f32");
  const io::RvBundle model_truth{data.grid, r_years,        data.covariate.xbar,  scenario.seed,
                                 data.model_rv, ArrayXXd(0, 0), {provenance::kSynth}};
  io::write_rv_bundle(ctx.out / (p + "model_truth_rv.json"), model_truth, ctx.run_meta());
  r.outputs.push_back(p + "model_truth_rv.json");
  r.outputs.push_back(p + "model_truth_rv.point.f32");

  if (data.reference_maxima) {
    io::write_season_max_store(ctx.out / (p + "reference_maxima.json"), *data.reference_maxima,
                               ctx.run_meta());
    r.outputs.push_back(p + "reference_maxima.json");
    r.outputs.push_back(p + "reference_maxima.f32");
  }
  if (data.model_maxima) {
    io::write_season_max_store(ctx.out / (p + "model_maxima.json"), *data.model_maxima,
                               ctx.run_meta());
    r.outputs.push_back(p + "model_maxima.json");
    r.outputs.push_back(p + "model_maxima.f32");
  }
  if (data.reference_daily) {
    io::write_daily_store(ctx.out / (p + "reference_daily.json"), *data.reference_daily,
                          ctx.run_meta());
    r.outputs.push_back(p + "reference_daily.json");
    r.outputs.push_back(p + "reference_daily.f32");
  }
  if (data.model_daily) {
    io::write_daily_store(ctx.out / (p + "model_daily.json"), *data.model_daily, ctx.run_meta());
    r.outputs.push_back(p + "model_daily.json");
    r.outputs.push_back(p + "model_daily.f32");
  }
  ctx.finish(r);
  return r;
}

SyntheticScenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("synth scenario: expected a JSON object");
  SyntheticScenario s;
  try {
    if (const json* preset = find(j, "preset")) {
      s = preset_scenario(preset->get<std::string>());
    }
    for (const auto& [key, value] : j.items()) {
      if (key == "preset") continue;
      if (key == "name") s.name = value.get<std::string>();
      else if (key == "year_start") s.year_start = value.get<int>();
      else if (key == "year_end") s.year_end = value.get<int>();
      else if (key == "n_replicates") s.n_replicates = value.get<Index>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else if (key == "grid") apply_grid(value, s.grid);
      else if (key == "elevation") apply_elevation(value, s.elevation);
      else if (key == "stations") apply_stations(value, s.stations);
      else if (key == "truth") apply_truth(value, s.truth);
      else if (key == "model_error") apply_model_error(value, s.model_error);
      else if (key == "process") apply_process(value, s.process);
      else if (key == "covariate") apply_covariate(value, s.covariate);
      else throw ConfigError("synth scenario: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synth scenario: ") + e.what());
  }
  s.validate();
  return s;
}

StageResult run_stage(const std::string& stage, const path& config_file,
                      const StageOverrides& overrides) {
  json config;
  try {
    config = io::load_json(config_file);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  const path dir = config_file.parent_path();
  if (stage == "remap") return run_remap(config, dir, overrides);
  if (stage == "rx5day") return run_rx5day(config, dir, overrides);
  if (stage == "fit") return run_fit(config, dir, overrides);
  if (stage == "mask") return run_mask(config, dir, overrides);
  if (stage == "evaluate") return run_evaluate(config, dir, overrides);
  if (stage == "synth") return run_synth(config, dir, overrides);
  throw ConfigError("unknown stage '" + stage + "'");
}

}  // namespace xtreval::pipeline
