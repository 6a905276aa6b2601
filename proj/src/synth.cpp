#include "xtreval/synth.hpp"

#include <cmath>
#include <limits>

#include "xtreval/bootstrap.hpp"
#include "xtreval/rng.hpp"

namespace xtreval {

namespace {

constexpr std::uint64_t kStationTag = 0x7374617469ULL;
constexpr std::uint64_t kMaximaTag = 0x6d6178696dULL;
constexpr std::uint64_t kDailyTag = 0x6461696c79ULL;

constexpr std::uint64_t kReferenceRole = 0;
constexpr std::uint64_t kModelRole = 1;

ArrayXd linspace_edges(double start, double step, Index n) {
  ArrayXd edges(n + 1);
  for (Index i = 0; i <= n; ++i) edges[i] = start + step * static_cast<double>(i);
  return edges;
}

}  // namespace

void SyntheticScenario::validate() const {
  if (grid.n_lat < 1 || grid.n_lon < 1) throw ConfigError("scenario: empty grid");
  if (!(grid.lat_step > 0.0) || !(grid.lon_step > 0.0)) {
    throw ConfigError("scenario: grid steps must be positive");
  }
  if (!(grid.land_fraction >= 0.0 && grid.land_fraction <= 1.0)) {
    throw ConfigError("scenario: land fraction outside [0, 1]");
  }
  if (year_end < year_start) throw ConfigError("scenario: year_end precedes year_start");
  if (n_replicates < 1) throw ConfigError("scenario: need at least one replicate");
  if (elevation.kind != "flat" && elevation.kind != "ridge") {
    throw ConfigError("scenario: unknown elevation kind '" + elevation.kind + "'");
  }
  if (elevation.axis != "lat" && elevation.axis != "lon") {
    throw ConfigError("scenario: elevation axis must be 'lat' or 'lon'");
  }
  if (stations.per_cell < 0.0) throw ConfigError("scenario: negative station density");
  if (!(stations.max_elevation_percentile > 0.0 && stations.max_elevation_percentile <= 1.0)) {
    throw ConfigError("scenario: station elevation percentile outside (0, 1]");
  }
  if (!(stations.completeness_min >= 0.0 && stations.completeness_max <= 1.0 &&
        stations.completeness_min <= stations.completeness_max)) {
    throw ConfigError("scenario: bad completeness range");
  }
  if (!(truth.sigma_base > 0.0)) throw ConfigError("scenario: sigma_base must be positive");
  if (!(model_error.sigma_scale > 0.0)) {
    throw ConfigError("scenario: sigma_scale must be positive");
  }
  if (process.kind != "gev-maxima" && process.kind != "gamma-daily") {
    throw ConfigError("scenario: unknown process kind '" + process.kind + "'");
  }
  if (process.kind == "gamma-daily") {
    if (!(process.wet_prob > 0.0 && process.wet_prob <= 1.0)) {
      throw ConfigError("scenario: wet probability outside (0, 1]");
    }
    if (!(process.gamma_shape > 0.0) || !(process.scale_mm > 0.0)) {
      throw ConfigError("scenario: gamma shape and scale must be positive");
    }
  }
}

SyntheticScenario ridge_undersampled_scenario() {
  SyntheticScenario s;
  s.name = "ridge-undersampled";
  s.elevation.kind = "ridge";
  s.stations.max_elevation_percentile = 0.60;
  s.model_error.mu0_per_km = -8.0;
  return s;
}

SyntheticScenario flat_homogeneous_scenario() {
  SyntheticScenario s;
  s.name = "flat-homogeneous";
  s.stations.per_cell = 0.7;
  s.model_error.mu0_offset = -5.0;
  return s;
}

ScenarioData generate_scenario(const SyntheticScenario& scenario, double r_years) {
  scenario.validate();
  const ScenarioGridSpec& g = scenario.grid;
  const Index n_cells = g.n_lat * g.n_lon;

  RegularGrid grid(linspace_edges(g.lat_start, g.lat_step, g.n_lat),
                   linspace_edges(g.lon_start, g.lon_step, g.n_lon),
                   ArrayXd::Constant(n_cells, g.land_fraction));

  // Terrain.
  ArrayXd elev(n_cells);
  for (Index row = 0; row < g.n_lat; ++row) {
    for (Index col = 0; col < g.n_lon; ++col) {
      double value = scenario.elevation.value_m;
      if (scenario.elevation.kind == "ridge") {
        const Index along = scenario.elevation.axis == "lon" ? col : row;
        const Index extent = scenario.elevation.axis == "lon" ? g.n_lon : g.n_lat;
        const double frac =
            extent > 1 ? static_cast<double>(along) / static_cast<double>(extent - 1) : 0.0;
        value = scenario.elevation.base_m +
                (scenario.elevation.peak_m - scenario.elevation.base_m) * frac;
      }
      elev[grid.cell_index(row, col)] = value;
    }
  }

  ScenarioData data{grid,
                    ElevationField{grid, elev},
                    {},
                    {},
                    {},
                    {},
                    ArrayXd(n_cells),
                    ArrayXd(n_cells),
                    std::nullopt,
                    std::nullopt,
                    std::nullopt,
                    std::nullopt};

  // Stations go only to land cells at or below the elevation cutoff.
  const ArrayXb land = grid.land_mask();
  std::vector<double> land_elevations;
  for (Index c = 0; c < n_cells; ++c) {
    if (land[c]) land_elevations.push_back(elev[c]);
  }
  double cutoff = std::numeric_limits<double>::infinity();
  if (!land_elevations.empty() && scenario.stations.max_elevation_percentile < 1.0) {
    const ArrayXd sample = Eigen::Map<const ArrayXd>(land_elevations.data(),
                                                     static_cast<Index>(land_elevations.size()));
    cutoff = quantile(sample, scenario.stations.max_elevation_percentile);
  }
  const double whole_stations = std::floor(scenario.stations.per_cell);
  const double extra_station_prob = scenario.stations.per_cell - whole_stations;
  for (Index c = 0; c < n_cells; ++c) {
    if (!land[c] || elev[c] > cutoff) continue;
    CounterRng rng(scenario.seed, {kStationTag, static_cast<std::uint64_t>(c)});
    Index count = static_cast<Index>(whole_stations);
    if (rng.uniform() < extra_station_prob) ++count;
    const CellId id = grid.cell_id(c);
    for (Index k = 0; k < count; ++k) {
      StationRecord st;
      st.id = scenario.name + "-" + std::to_string(c) + "-" + std::to_string(k);
      st.lat = grid.lat_edges()[id.row] +
               rng.uniform() * (grid.lat_edges()[id.row + 1] - grid.lat_edges()[id.row]);
      st.lon = normalize_lon(grid.lon_edges()[id.col] +
                             rng.uniform() *
                                 (grid.lon_edges()[id.col + 1] - grid.lon_edges()[id.col]));
      st.elevation_m = elev[c];
      st.completeness =
          scenario.stations.completeness_min +
          rng.uniform() * (scenario.stations.completeness_max - scenario.stations.completeness_min);
      data.stations.push_back(std::move(st));
    }
  }

  // Covariate.
  const int n_years = scenario.year_end - scenario.year_start + 1;
  data.covariate.years.resize(static_cast<std::size_t>(n_years));
  data.covariate.x.resize(n_years);
  for (int t = 0; t < n_years; ++t) {
    data.covariate.years[static_cast<std::size_t>(t)] = scenario.year_start + t;
    data.covariate.x[t] =
        scenario.covariate.base + scenario.covariate.slope_per_year * static_cast<double>(t);
  }
  data.covariate.baseline_start = scenario.year_start;
  data.covariate.baseline_end = scenario.year_end;
  data.covariate.xbar = data.covariate.x.mean();
  data.covariate.validate();

  // Truth and distorted-model coefficients, tied to terrain.
  data.truth_params.resize(static_cast<std::size_t>(n_cells));
  data.model_params.resize(static_cast<std::size_t>(n_cells));
  for (Index c = 0; c < n_cells; ++c) {
    const double km = elev[c] / 1000.0;
    GevParams truth;
    truth.mu0 = scenario.truth.mu0_base + scenario.truth.mu0_per_km * km;
    truth.mu1 = scenario.truth.mu1;
    truth.sigma = scenario.truth.sigma_base + scenario.truth.sigma_per_km * km;
    truth.xi = scenario.truth.xi;
    if (!(truth.sigma > 0.0)) {
      throw ConfigError("scenario: truth sigma is not positive at elevation " +
                        std::to_string(elev[c]) + " m");
    }
    GevParams model = truth;
    model.mu0 += scenario.model_error.mu0_offset + scenario.model_error.mu0_per_km * km;
    model.mu1 += scenario.model_error.mu1_offset;
    model.sigma *= scenario.model_error.sigma_scale;
    data.truth_params[static_cast<std::size_t>(c)] = truth;
    data.model_params[static_cast<std::size_t>(c)] = model;
    data.truth_rv[c] = return_value(truth, r_years, data.covariate.xbar);
    data.model_rv[c] = return_value(model, r_years, data.covariate.xbar);
  }

  if (scenario.process.kind == "gev-maxima") {
    for (const std::uint64_t role : {kReferenceRole, kModelRole}) {
      SeasonMaxSeries series{grid, {}, 1, {}, "DJF", {}};
      series.season_years = data.covariate.years;
      series.n_replicates = scenario.n_replicates;
      series.values.resize(static_cast<Index>(n_years) * scenario.n_replicates, n_cells);
      series.provenance = {provenance::kSynth};
      const auto& params = role == kModelRole ? data.model_params : data.truth_params;
      for (Index c = 0; c < n_cells; ++c) {
        const GevParams& p = params[static_cast<std::size_t>(c)];
        for (Index t = 0; t < n_years; ++t) {
          for (Index m = 0; m < scenario.n_replicates; ++m) {
            CounterRng rng(scenario.seed,
                           {kMaximaTag, role, static_cast<std::uint64_t>(c),
                            static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(m)});
            series.values(t * scenario.n_replicates + m, c) =
                gev_sample(p, data.covariate.x[t], rng);
          }
        }
      }
      if (role == kModelRole) {
        data.model_maxima = std::move(series);
      } else {
        data.reference_maxima = std::move(series);
      }
    }
    return data;
  }

  // Bernoulli-gamma daily rain covering every season in the year range.
  const CivilDate start{scenario.year_start - 1, 12, 1};
  const CivilDate end{scenario.year_end, 2, days_in_month(scenario.year_end, 2)};
  const Index n_days = static_cast<Index>(days_from_civil(end) - days_from_civil(start)) + 1;
  for (const std::uint64_t role : {kReferenceRole, kModelRole}) {
    DailyField field{grid, start, ArrayXXd::Zero(n_days, n_cells), {provenance::kSynth}};
    for (Index c = 0; c < n_cells; ++c) {
      double scale = scenario.process.scale_mm;
      if (role == kModelRole) {
        const double factor = scenario.process.model_amount_scale +
                              scenario.process.model_amount_scale_per_km * elev[c] / 1000.0;
        if (!(factor > 0.0)) {
          throw ConfigError("scenario: model amount scale is not positive at elevation " +
                            std::to_string(elev[c]) + " m");
        }
        scale *= factor;
      }
      for (Index d = 0; d < n_days; ++d) {
        CounterRng rng(scenario.seed, {kDailyTag, role, static_cast<std::uint64_t>(c),
                                       static_cast<std::uint64_t>(d)});
        if (rng.uniform() >= scenario.process.wet_prob) continue;
        field.values(d, c) = scale * rng.gamma(scenario.process.gamma_shape);
      }
    }
    if (role == kModelRole) {
      data.model_daily = std::move(field);
    } else {
      data.reference_daily = std::move(field);
    }
  }
  return data;
}

double brute_force_rx5day(const ArrayXd& daily) {
  if (daily.size() < 5) throw DataError("brute_force_rx5day: need at least 5 days");
  double best = -std::numeric_limits<double>::infinity();
  for (Index w = 0; w + 4 < daily.size(); ++w) {
    double sum = 0.0;
    for (Index k = 0; k < 5; ++k) sum += daily[w + k];
    if (std::isnan(sum)) continue;
    if (sum > best) best = sum;
  }
  return std::isfinite(best) ? best : kMissing;
}

}  // namespace xtreval
