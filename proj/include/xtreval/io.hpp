#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xtreval/field.hpp"
#include "xtreval/fit.hpp"
#include "xtreval/metrics.hpp"
#include "xtreval/regions.hpp"
#include "xtreval/remap.hpp"
#include "xtreval/sampling.hpp"

namespace xtreval::io {

using nlohmann::json;
using std::filesystem::path;

/// FNV-1a 64-bit content hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_string(std::string_view bytes);  // "fnv1a64:<16 hex digits>"
std::string hash_file(const path& file);

/// Shortest round-tripping decimal text; integers print without an exponent.
std::string format_double(double value);

std::string read_text(const path& file);
void write_text(const path& file, std::string_view content);
json load_json(const path& file);
void save_json(const path& file, const json& j);

/// Grid descriptor: {"crs": "WGS84-degrees", "lat_edges": [...],
/// "lon_edges": [...], "land_fraction": ...}. land_fraction may be an inline
/// per-cell array, a single number applied everywhere, or a relative path to
/// a float32-LE per-cell file.
json grid_to_json(const RegularGrid& grid);
RegularGrid grid_from_json(const json& j, const path& base_dir);

/// Stores pair a JSON descriptor with float32-LE payload files next to it;
/// payload entries record content hashes so stages can detect staleness.
/// `run` is merged into the descriptor under "run" (config hash, seed, input
/// hashes) when non-null.

/// Daily field: payload laid out [time][lat][lon], NaN = missing.
void write_daily_store(const path& json_file, const DailyField& field, const json& run = nullptr);
DailyField read_daily_store(const path& json_file);

/// Season maxima: payload laid out [year][replicate][cell].
void write_season_max_store(const path& json_file, const SeasonMaxSeries& series,
                            const json& run = nullptr);
SeasonMaxSeries read_season_max_store(const path& json_file);

/// Point return values plus optional bootstrap replicate fields
/// ([replicate][cell] payload). The seed is the bootstrap base seed.
struct RvBundle {
  RegularGrid grid;
  double r_years = 20.0;
  double xbar = 0.0;
  std::uint64_t seed = 0;
  ArrayXd point;        // n_cells
  ArrayXXd replicates;  // B x n_cells; zero rows when no bootstrap was run
  Provenance provenance;
};
void write_rv_bundle(const path& json_file, const RvBundle& bundle, const json& run = nullptr);
RvBundle read_rv_bundle(const path& json_file);

/// Station table CSV: `id,lat,lon,elev_m,completeness`.
std::vector<StationRecord> read_station_csv(const path& file);
void write_station_csv(const path& file, const std::vector<StationRecord>& stations);

/// Raw annual GMT anomaly CSV: `year,anomaly_K`.
std::vector<std::pair<int, double>> read_gmt_csv(const path& file);
void write_gmt_csv(const path& file, const std::vector<std::pair<int, double>>& series);

/// Per-cell mean elevation CSV: `row,col,elev_m`. Cells absent from the file
/// are NaN (allowed off land only).
ElevationField read_elevation_csv(const path& file, const RegularGrid& grid);
void write_elevation_csv(const path& file, const ElevationField& elevation);

/// Region file: {"regions": [{"id": ..., "kind": "cells"|"bbox"|"polygon",
/// ...}]} with "cells": [[row, col], ...], bbox bounds lat_min/lat_max/
/// lon_min/lon_max, or "vertices": [[lat, lon], ...].
std::vector<RegionSpec> read_regions_json(const path& file);

/// Fit table CSV: `row,col,mu0,mu1,sigma,xi,rv20,converged,n_eff`.
void write_fit_csv(const path& file, const RegularGrid& grid, const FieldFit& fit);

/// Mask CSV: `row,col,included,station_count,provenance`, one row per cell.
void write_mask_csv(const path& file, const CellMask& mask);
CellMask read_mask_csv(const path& file, const RegularGrid& grid);

void write_mask_summary_json(const path& file,
                             const std::vector<std::pair<std::string, MaskSummary>>& summaries);

/// Evaluation CSVs.
void write_eval_csv(const path& file, const std::vector<EvalReport>& reports);
void write_taylor_csv(const path& file, const std::vector<EvalReport>& reports);
void write_change_csv(const path& file, const std::vector<BiasChange>& changes);

/// Remap plan CSV: `target_row,target_col,source_row,source_col,weight`.
void write_plan_csv(const path& file, const RemapPlan& plan);

/// Replicate dump CSV: `replicate,statistic_name,value`.
void write_replicate_csv(const path& file, const std::string& statistic_name,
                         const ArrayXd& replicates);

}  // namespace xtreval::io
