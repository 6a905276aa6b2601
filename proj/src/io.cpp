#include "xtreval/io.hpp"

#include "xtreval/version.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace xtreval::io {

namespace {

std::string fmt(double v) { return format_double(v); }

void ensure_parent(const path& file) {
  const path dir = file.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::ofstream open_out(const path& file, std::ios_base::openmode mode = std::ios_base::out) {
  ensure_parent(file);
  std::ofstream out(file, mode);
  if (!out) throw ConfigError("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const path& file, std::ios_base::openmode mode = std::ios_base::in) {
  std::ifstream in(file, mode);
  if (!in) throw ConfigError("cannot open " + file.string());
  return in;
}

/// Row-major float32 payload (native little-endian byte order).
void write_matrix_f32(const path& file, const ArrayXXd& m) {
  std::vector<float> buf(static_cast<std::size_t>(m.rows()) * static_cast<std::size_t>(m.cols()));
  std::size_t k = 0;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) buf[k++] = static_cast<float>(m(r, c));
  }
  auto out = open_out(file, std::ios_base::binary);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) throw ConfigError("short write to " + file.string());
}

ArrayXXd read_matrix_f32(const path& file, Index rows, Index cols) {
  auto in = open_in(file, std::ios_base::binary);
  std::vector<float> buf(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float))) {
    throw DataError(file.string() + ": payload shorter than the descriptor promises");
  }
  in.peek();
  if (!in.eof()) throw DataError(file.string() + ": payload longer than the descriptor promises");
  ArrayXXd m(rows, cols);
  std::size_t k = 0;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = static_cast<double>(buf[k++]);
  }
  return m;
}

ArrayXd json_to_array(const json& j, const char* what) {
  if (!j.is_array()) throw DataError(std::string(what) + " must be an array");
  ArrayXd a(static_cast<Index>(j.size()));
  Index i = 0;
  for (const auto& v : j) a[i++] = v.get<double>();
  return a;
}

json array_to_json(const ArrayXd& a) {
  json j = json::array();
  for (Index i = 0; i < a.size(); ++i) j.push_back(a[i]);
  return j;
}

double parse_double(const std::string& s, const path& file) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    if (s == "nan" || s == "-nan") return kMissing;
    throw DataError(file.string() + ": bad number '" + s + "'");
  }
}

long parse_long(const std::string& s, const path& file) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(file.string() + ": bad integer '" + s + "'");
  }
}

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

/// Reads a CSV with an exact expected header; returns data rows, split.
std::vector<std::vector<std::string>> read_csv(const path& file, const std::string& header) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line)) throw DataError(file.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw DataError(file.string() + ": expected header '" + header + "', got '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_line(std::move(line)));
  }
  return rows;
}

void check_fields(const std::vector<std::string>& fields, std::size_t n, const path& file) {
  if (fields.size() != n) {
    throw DataError(file.string() + ": expected " + std::to_string(n) + " fields, got " +
                    std::to_string(fields.size()));
  }
}

json base_meta(const json& run) {
  json j;
  j["version"] = kVersion;
  if (!run.is_null()) j["run"] = run;
  return j;
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  for (const auto& tag : j) p.push_back(tag.get<std::string>());
  return p;
}

void check_payload_hash(const json& j, const char* key, const path& payload) {
  if (!j.contains(key)) return;
  if (hash_file(payload) != j.at(key).get<std::string>()) {
    throw DataError(payload.string() + ": payload does not match its recorded checksum");
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  // Moderate integers print without an exponent ("%.1g" would turn 10 into 1e+01).
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    std::snprintf(buf, sizeof(buf), "%.0f", value);
    return buf;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hash_string(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string hash_file(const path& file) {
  return hash_string(read_text(file));
}

std::string read_text(const path& file) {
  auto in = open_in(file, std::ios_base::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_text(const path& file, std::string_view content) {
  auto out = open_out(file, std::ios_base::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("short write to " + file.string());
}

json load_json(const path& file) {
  try {
    return json::parse(read_text(file));
  } catch (const json::parse_error& e) {
    throw DataError(file.string() + ": " + e.what());
  }
}

void save_json(const path& file, const json& j) {
  write_text(file, j.dump(2) + "\n");
}

json grid_to_json(const RegularGrid& grid) {
  json j;
  j["crs"] = "WGS84-degrees";
  j["lat_edges"] = array_to_json(grid.lat_edges());
  j["lon_edges"] = array_to_json(grid.lon_edges());
  j["land_fraction"] = array_to_json(grid.land_fraction());
  return j;
}

RegularGrid grid_from_json(const json& j, const path& base_dir) {
  try {
    if (j.contains("crs") && j.at("crs").get<std::string>() != "WGS84-degrees") {
      throw DataError("grid descriptor: unsupported crs '" + j.at("crs").get<std::string>() + "'");
    }
    const ArrayXd lat = json_to_array(j.at("lat_edges"), "lat_edges");
    const ArrayXd lon = json_to_array(j.at("lon_edges"), "lon_edges");
    const Index n_cells = (lat.size() - 1) * (lon.size() - 1);

    ArrayXd land;
    const json& lf = j.at("land_fraction");
    if (lf.is_number()) {
      land = ArrayXd::Constant(n_cells, lf.get<double>());
    } else if (lf.is_array()) {
      land = json_to_array(lf, "land_fraction");
    } else if (lf.is_string()) {
      const ArrayXXd m = read_matrix_f32(base_dir / lf.get<std::string>(), 1, n_cells);
      land = m.row(0);
    } else {
      throw DataError("grid descriptor: land_fraction must be a number, array or path");
    }
    return RegularGrid(lat, lon, land);
  } catch (const json::exception& e) {
    throw DataError(std::string("grid descriptor: ") + e.what());
  }
}

void write_daily_store(const path& json_file, const DailyField& field, const json& run) {
  field.validate();
  const path payload = json_file.parent_path() / (json_file.stem().string() + ".f32");
  write_matrix_f32(payload, field.values);

  json j = base_meta(run);
  j["kind"] = "daily_field";
  j["format"] = "float32-le";
  j["layout"] = "[time][lat][lon]";
  j["grid"] = grid_to_json(field.grid);
  j["start_date"] = format_date(field.start);
  j["n_days"] = field.n_days();
  j["payload"] = payload.filename().string();
  j["payload_hash"] = hash_file(payload);
  j["provenance"] = field.provenance;
  save_json(json_file, j);
}

DailyField read_daily_store(const path& json_file) {
  const json j = load_json(json_file);
  try {
    if (j.at("kind").get<std::string>() != "daily_field") {
      throw DataError(json_file.string() + ": not a daily field store");
    }
    const path base = json_file.parent_path();
    RegularGrid grid = grid_from_json(j.at("grid"), base);
    const Index n_days = j.at("n_days").get<Index>();
    DailyField field{std::move(grid), parse_date(j.at("start_date").get<std::string>()),
                     ArrayXXd(), provenance_from_json(j.at("provenance"))};
    const path payload = base / j.at("payload").get<std::string>();
    check_payload_hash(j, "payload_hash", payload);
    field.values = read_matrix_f32(payload, n_days, field.grid.n_cells());
    field.validate();
    return field;
  } catch (const json::exception& e) {
    throw DataError(json_file.string() + ": " + e.what());
  }
}

void write_season_max_store(const path& json_file, const SeasonMaxSeries& series,
                            const json& run) {
  series.validate();
  const path payload = json_file.parent_path() / (json_file.stem().string() + ".f32");
  write_matrix_f32(payload, series.values);

  json j = base_meta(run);
  j["kind"] = "season_max";
  j["format"] = "float32-le";
  j["layout"] = "[year][replicate][cell]";
  j["grid"] = grid_to_json(series.grid);
  j["season"] = series.season;
  j["season_years"] = series.season_years;
  j["n_replicates"] = series.n_replicates;
  j["payload"] = payload.filename().string();
  j["payload_hash"] = hash_file(payload);
  j["provenance"] = series.provenance;
  save_json(json_file, j);
}

SeasonMaxSeries read_season_max_store(const path& json_file) {
  const json j = load_json(json_file);
  try {
    if (j.at("kind").get<std::string>() != "season_max") {
      throw DataError(json_file.string() + ": not a season maxima store");
    }
    const path base = json_file.parent_path();
    SeasonMaxSeries series{grid_from_json(j.at("grid"), base),
                           j.at("season_years").get<std::vector<int>>(),
                           j.at("n_replicates").get<Index>(),
                           {},
                           j.at("season").get<std::string>(),
                           provenance_from_json(j.at("provenance"))};
    const path payload = base / j.at("payload").get<std::string>();
    check_payload_hash(j, "payload_hash", payload);
    series.values =
        read_matrix_f32(payload, series.n_years() * series.n_replicates, series.grid.n_cells());
    series.validate();
    return series;
  } catch (const json::exception& e) {
    throw DataError(json_file.string() + ": " + e.what());
  }
}

void write_rv_bundle(const path& json_file, const RvBundle& bundle, const json& run) {
  if (bundle.point.size() != bundle.grid.n_cells()) {
    throw DataError("rv bundle: point field is not on the grid");
  }
  if (bundle.replicates.rows() > 0 && bundle.replicates.cols() != bundle.grid.n_cells()) {
    throw DataError("rv bundle: replicate fields are not on the grid");
  }
  const std::string stem = json_file.stem().string();
  const path point_payload = json_file.parent_path() / (stem + ".point.f32");
  write_matrix_f32(point_payload, bundle.point.transpose());

  json j = base_meta(run);
  j["kind"] = "rv_bundle";
  j["format"] = "float32-le";
  j["grid"] = grid_to_json(bundle.grid);
  j["r_years"] = bundle.r_years;
  j["xbar"] = bundle.xbar;
  j["seed"] = bundle.seed;
  j["B"] = bundle.replicates.rows();
  j["point_payload"] = point_payload.filename().string();
  j["point_hash"] = hash_file(point_payload);
  if (bundle.replicates.rows() > 0) {
    const path boot_payload = json_file.parent_path() / (stem + ".boot.f32");
    write_matrix_f32(boot_payload, bundle.replicates);
    j["boot_payload"] = boot_payload.filename().string();
    j["boot_hash"] = hash_file(boot_payload);
  }
  j["provenance"] = bundle.provenance;
  save_json(json_file, j);
}

RvBundle read_rv_bundle(const path& json_file) {
  const json j = load_json(json_file);
  try {
    if (j.at("kind").get<std::string>() != "rv_bundle") {
      throw DataError(json_file.string() + ": not a return-value bundle");
    }
    const path base = json_file.parent_path();
    RvBundle bundle{grid_from_json(j.at("grid"), base),
                    j.at("r_years").get<double>(),
                    j.at("xbar").get<double>(),
                    j.at("seed").get<std::uint64_t>(),
                    {},
                    ArrayXXd(0, 0),
                    provenance_from_json(j.at("provenance"))};
    const Index n_cells = bundle.grid.n_cells();
    const path point_payload = base / j.at("point_payload").get<std::string>();
    check_payload_hash(j, "point_hash", point_payload);
    bundle.point = read_matrix_f32(point_payload, 1, n_cells).row(0);
    const Index B = j.at("B").get<Index>();
    if (B > 0) {
      const path boot_payload = base / j.at("boot_payload").get<std::string>();
      check_payload_hash(j, "boot_hash", boot_payload);
      bundle.replicates = read_matrix_f32(boot_payload, B, n_cells);
    }
    return bundle;
  } catch (const json::exception& e) {
    throw DataError(json_file.string() + ": " + e.what());
  }
}

std::vector<StationRecord> read_station_csv(const path& file) {
  std::vector<StationRecord> stations;
  for (const auto& fields : read_csv(file, "id,lat,lon,elev_m,completeness")) {
    check_fields(fields, 5, file);
    StationRecord s;
    s.id = fields[0];
    s.lat = parse_double(fields[1], file);
    s.lon = parse_double(fields[2], file);
    s.elevation_m = parse_double(fields[3], file);
    s.completeness = parse_double(fields[4], file);
    s.validate();
    stations.push_back(std::move(s));
  }
  return stations;
}

void write_station_csv(const path& file, const std::vector<StationRecord>& stations) {
  auto out = open_out(file);
  out << "id,lat,lon,elev_m,completeness\n";
  for (const StationRecord& s : stations) {
    out << s.id << ',' << fmt(s.lat) << ',' << fmt(s.lon) << ',' << fmt(s.elevation_m) << ','
        << fmt(s.completeness) << '\n';
  }
}

std::vector<std::pair<int, double>> read_gmt_csv(const path& file) {
  std::vector<std::pair<int, double>> series;
  for (const auto& fields : read_csv(file, "year,anomaly_K")) {
    check_fields(fields, 2, file);
    series.emplace_back(static_cast<int>(parse_long(fields[0], file)),
                        parse_double(fields[1], file));
  }
  return series;
}

void write_gmt_csv(const path& file, const std::vector<std::pair<int, double>>& series) {
  auto out = open_out(file);
  out << "year,anomaly_K\n";
  for (const auto& [year, anomaly] : series) out << year << ',' << fmt(anomaly) << '\n';
}

ElevationField read_elevation_csv(const path& file, const RegularGrid& grid) {
  ElevationField elevation{grid, ArrayXd::Constant(grid.n_cells(), kMissing)};
  for (const auto& fields : read_csv(file, "row,col,elev_m")) {
    check_fields(fields, 3, file);
    const long row = parse_long(fields[0], file);
    const long col = parse_long(fields[1], file);
    if (row < 0 || row >= grid.n_lat() || col < 0 || col >= grid.n_lon()) {
      throw DataError(file.string() + ": cell (" + fields[0] + ", " + fields[1] +
                      ") is outside the grid");
    }
    elevation.mean_elevation[grid.cell_index(row, col)] = parse_double(fields[2], file);
  }
  elevation.validate();
  return elevation;
}

void write_elevation_csv(const path& file, const ElevationField& elevation) {
  auto out = open_out(file);
  out << "row,col,elev_m\n";
  for (Index c = 0; c < elevation.grid.n_cells(); ++c) {
    if (is_missing(elevation.mean_elevation[c])) continue;
    const CellId id = elevation.grid.cell_id(c);
    out << id.row << ',' << id.col << ',' << fmt(elevation.mean_elevation[c]) << '\n';
  }
}

std::vector<RegionSpec> read_regions_json(const path& file) {
  const json j = load_json(file);
  std::vector<RegionSpec> regions;
  try {
    for (const json& r : j.at("regions")) {
      RegionSpec spec;
      spec.id = r.at("id").get<std::string>();
      const std::string kind = r.at("kind").get<std::string>();
      if (kind == "cells") {
        spec.kind = RegionSpec::Kind::Cells;
        for (const json& cell : r.at("cells")) {
          spec.cells.push_back(CellId{cell.at(0).get<Index>(), cell.at(1).get<Index>()});
        }
      } else if (kind == "bbox") {
        spec.kind = RegionSpec::Kind::Bbox;
        spec.lat_min = r.at("lat_min").get<double>();
        spec.lat_max = r.at("lat_max").get<double>();
        spec.lon_min = r.at("lon_min").get<double>();
        spec.lon_max = r.at("lon_max").get<double>();
      } else if (kind == "polygon") {
        spec.kind = RegionSpec::Kind::Polygon;
        for (const json& v : r.at("vertices")) {
          spec.polygon.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
      } else {
        throw DataError(file.string() + ": unknown region kind '" + kind + "'");
      }
      regions.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw DataError(file.string() + ": " + e.what());
  }
  if (regions.empty()) throw DataError(file.string() + ": no regions defined");
  return regions;
}

void write_fit_csv(const path& file, const RegularGrid& grid, const FieldFit& fit) {
  auto out = open_out(file);
  out << "row,col,mu0,mu1,sigma,xi,rv20,converged,n_eff\n";
  for (Index c = 0; c < grid.n_cells(); ++c) {
    const CellId id = grid.cell_id(c);
    const GevFit& cell = fit.cells[static_cast<std::size_t>(c)];
    out << id.row << ',' << id.col << ',' << fmt(cell.params.mu0) << ',' << fmt(cell.params.mu1)
        << ',' << fmt(cell.params.sigma) << ',' << fmt(cell.params.xi) << ',' << fmt(fit.rv[c])
        << ',' << (cell.converged ? 1 : 0) << ',' << cell.n_effective << '\n';
  }
}

void write_mask_csv(const path& file, const CellMask& mask) {
  auto out = open_out(file);
  out << "row,col,included,station_count,provenance\n";
  for (Index c = 0; c < mask.grid.n_cells(); ++c) {
    const CellId id = mask.grid.cell_id(c);
    out << id.row << ',' << id.col << ',' << (mask.included[c] ? 1 : 0) << ','
        << mask.station_count[c] << ',' << mask.provenance << '\n';
  }
}

CellMask read_mask_csv(const path& file, const RegularGrid& grid) {
  CellMask mask{grid, ArrayXb::Constant(grid.n_cells(), false), "",
                Eigen::ArrayXi::Zero(grid.n_cells())};
  for (const auto& fields : read_csv(file, "row,col,included,station_count,provenance")) {
    check_fields(fields, 5, file);
    const long row = parse_long(fields[0], file);
    const long col = parse_long(fields[1], file);
    if (row < 0 || row >= grid.n_lat() || col < 0 || col >= grid.n_lon()) {
      throw DataError(file.string() + ": cell (" + fields[0] + ", " + fields[1] +
                      ") is outside the grid");
    }
    const Index cell = grid.cell_index(row, col);
    mask.included[cell] = parse_long(fields[2], file) != 0;
    mask.station_count[cell] = static_cast<int>(parse_long(fields[3], file));
    if (mask.provenance.empty()) {
      mask.provenance = fields[4];
    } else if (mask.provenance != fields[4]) {
      throw DataError(file.string() + ": mixed provenance values");
    }
  }
  mask.validate();
  return mask;
}

void write_mask_summary_json(const path& file,
                             const std::vector<std::pair<std::string, MaskSummary>>& summaries) {
  json j;
  j["version"] = kVersion;
  j["summaries"] = json::array();
  for (const auto& [id, s] : summaries) {
    j["summaries"].push_back({{"id", id},
                              {"n_land_cells", s.n_land},
                              {"n_station_cells", s.n_sampled},
                              {"proportion", s.proportion}});
  }
  save_json(file, j);
}

void write_eval_csv(const path& file, const std::vector<EvalReport>& reports) {
  auto out = open_out(file);
  out << "region,approach,bias_mm,bias_lo,bias_hi,r,ratio,skill,n_cells\n";
  for (const EvalReport& r : reports) {
    out << r.region << ',' << r.approach << ',' << fmt(r.bias) << ',' << fmt(r.bias_ci.lo) << ','
        << fmt(r.bias_ci.hi) << ',' << fmt(r.taylor.r) << ',' << fmt(r.taylor.ratio) << ','
        << fmt(r.taylor.skill) << ',' << r.n_cells << '\n';
  }
}

void write_taylor_csv(const path& file, const std::vector<EvalReport>& reports) {
  auto out = open_out(file);
  out << "region,approach,radius,angle_rad,skill\n";
  for (const EvalReport& r : reports) {
    const TaylorCoordinates c = taylor_coordinates(r.taylor);
    out << r.region << ',' << r.approach << ',' << fmt(c.radius) << ',' << fmt(c.angle_rad) << ','
        << fmt(c.skill) << '\n';
  }
}

void write_change_csv(const path& file, const std::vector<BiasChange>& changes) {
  auto out = open_out(file);
  out << "region,approach,delta_bias_mm,delta_lo,delta_hi\n";
  for (const BiasChange& c : changes) {
    out << c.region << ',' << c.approach << ',' << fmt(c.delta) << ',' << fmt(c.ci.lo) << ','
        << fmt(c.ci.hi) << '\n';
  }
}

void write_plan_csv(const path& file, const RemapPlan& plan) {
  auto out = open_out(file);
  out << "target_row,target_col,source_row,source_col,weight\n";
  for (Index t = 0; t < plan.n_targets(); ++t) {
    const CellId target = plan.target.cell_id(t);
    for (Index k = plan.offsets[static_cast<std::size_t>(t)];
         k < plan.offsets[static_cast<std::size_t>(t) + 1]; ++k) {
      const CellId source = plan.source.cell_id(plan.source_cells[static_cast<std::size_t>(k)]);
      out << target.row << ',' << target.col << ',' << source.row << ',' << source.col << ','
          << fmt(plan.weights[static_cast<std::size_t>(k)]) << '\n';
    }
  }
}

void write_replicate_csv(const path& file, const std::string& statistic_name,
                         const ArrayXd& replicates) {
  auto out = open_out(file);
  out << "replicate,statistic_name,value\n";
  for (Index b = 0; b < replicates.size(); ++b) {
    out << b << ',' << statistic_name << ',' << fmt(replicates[b]) << '\n';
  }
}

}  // namespace xtreval::io
