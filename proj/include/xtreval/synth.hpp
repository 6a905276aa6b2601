#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xtreval/field.hpp"
#include "xtreval/gev.hpp"
#include "xtreval/grid.hpp"

namespace xtreval {

/// Uniform grid laid out from a corner with fixed steps.
struct ScenarioGridSpec {
  double lat_start = 35.0;
  double lat_step = 0.5;
  Index n_lat = 10;
  double lon_start = -110.0;
  double lon_step = 0.5;
  Index n_lon = 20;
  double land_fraction = 1.0;
};

/// Terrain: "flat" holds value_m everywhere; "ridge" climbs linearly from
/// base_m at the western (axis "lon") or southern (axis "lat") edge to
/// peak_m at the opposite edge.
struct ElevationSpec {
  std::string kind = "flat";
  double value_m = 300.0;
  double base_m = 1300.0;
  double peak_m = 3400.0;
  std::string axis = "lon";
};

/// Station placement. Expected density is stations per eligible cell;
/// eligibility caps cell elevation at the given percentile of land-cell
/// elevations (1 = no cap). Completeness is drawn uniformly per station.
struct StationSpec {
  double per_cell = 1.0;
  double max_elevation_percentile = 1.0;
  double completeness_min = 0.92;
  double completeness_max = 1.0;
};

/// Cellwise distribution truth: each coefficient rises linearly with cell
/// elevation (per-kilometer slopes), coupling extremes to terrain.
struct TruthSpec {
  double mu0_base = 40.0;
  double mu0_per_km = 20.0;
  double mu1 = 2.0;
  double sigma_base = 12.0;
  double sigma_per_km = 5.0;
  double xi = 0.1;
};

/// Distortion applied to the truth to produce the "model" distribution.
/// All-zero offsets with unit scale leave the model statistically identical
/// to the reference (sampled with an independent stream).
struct ModelErrorSpec {
  double mu0_offset = 0.0;
  double mu0_per_km = 0.0;
  double mu1_offset = 0.0;
  double sigma_scale = 1.0;
};

/// How observations are produced: "gev-maxima" draws season maxima straight
/// from the truth distribution; "gamma-daily" simulates Bernoulli-gamma
/// daily rain whose seasonal maxima must then be extracted downstream. The
/// model's wet-day amounts are rescaled by amount_scale (plus a per-km
/// elevation term) relative to the reference.
struct DailyProcessSpec {
  std::string kind = "gev-maxima";
  double wet_prob = 0.4;
  double gamma_shape = 0.7;
  double scale_mm = 8.0;
  double model_amount_scale = 1.0;
  double model_amount_scale_per_km = 0.0;
};

/// Synthetic smoothed GMT anomaly: base + slope_per_year * (year - start).
struct CovariateSpec {
  double base = -0.3;
  double slope_per_year = 0.02;
};

struct SyntheticScenario {
  std::string name = "scenario";
  ScenarioGridSpec grid;
  int year_start = 1951;
  int year_end = 2014;  // inclusive season labels
  Index n_replicates = 1;
  std::uint64_t seed = 0;
  ElevationSpec elevation;
  StationSpec stations;
  TruthSpec truth;
  ModelErrorSpec model_error;
  DailyProcessSpec process;
  CovariateSpec covariate;

  void validate() const;
};

/// Everything a pipeline run needs, plus the truth to score it against.
/// Daily fields are only present in gamma-daily mode; maxima only in
/// gev-maxima mode (gamma-daily maxima are extracted downstream so the
/// extraction path is exercised).
struct ScenarioData {
  RegularGrid grid;
  ElevationField elevation;
  std::vector<StationRecord> stations;
  CovariateSeries covariate;
  std::vector<GevParams> truth_params;  // per cell
  std::vector<GevParams> model_params;  // truth with the model error applied
  ArrayXd truth_rv;                     // r-year return value of the truth at xbar
  ArrayXd model_rv;                     // same for the distorted model
  std::optional<SeasonMaxSeries> reference_maxima;
  std::optional<SeasonMaxSeries> model_maxima;
  std::optional<DailyField> reference_daily;
  std::optional<DailyField> model_daily;
};

/// Ridge terrain with stations restricted below the 60th elevation
/// percentile and a model whose dry bias grows with elevation, so the
/// station-conditioned bias estimate is optimistic while the all-land one
/// is not.
SyntheticScenario ridge_undersampled_scenario();

/// Flat terrain, stations scattered uniformly, spatially uniform model
/// error; station-conditioned and all-land evaluations agree up to noise.
SyntheticScenario flat_homogeneous_scenario();

/// Deterministic expansion of a scenario; every random draw is keyed by
/// (seed, role, cell, time) so output is identical for any worker count.
ScenarioData generate_scenario(const SyntheticScenario& scenario, double r_years = 20.0);

/// Exhaustive maximum running 5-day total of one cell-season; reference
/// implementation for the extraction module. Missing days invalidate the
/// windows containing them; all windows missing yields NaN. Throws DataError
/// on fewer than 5 days.
double brute_force_rx5day(const ArrayXd& daily);

}  // namespace xtreval
