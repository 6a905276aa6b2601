#include "doctest.h"

#include <cstring>
#include <filesystem>

#include "xtreval/io.hpp"
#include "xtreval/version.hpp"

using namespace xtreval;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("xtreval-io-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ArrayXd edges(std::initializer_list<double> v) {
  ArrayXd e(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) e[i++] = x;
  return e;
}

RegularGrid small_grid() {
  ArrayXd land(4);
  land << 1.0, 0.0, 1.0, 0.25;
  return RegularGrid(edges({0, 10, 20}), edges({0, 10, 20}), land);
}

/// Little-endian float32 payload bytes for raw-file fixtures.
std::string f32_bytes(std::initializer_list<float> values) {
  std::string bytes;
  for (float v : values) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    bytes.append(buf, 4);
  }
  return bytes;
}

}  // namespace

TEST_CASE("content hashes are stable") {
  CHECK(io::fnv1a64("") == 0xCBF29CE484222325ull);
  CHECK(io::fnv1a64("a") == 0xAF63DC4C8601EC8Cull);
  CHECK(io::hash_string("") == "fnv1a64:cbf29ce484222325");
  CHECK(io::hash_string("abc") != io::hash_string("abd"));

  const fs::path dir = fresh_dir("hash");
  io::write_text(dir / "x.txt", "abc");
  CHECK(io::hash_file(dir / "x.txt") == io::hash_string("abc"));
}

TEST_CASE("doubles survive the text round trip") {
  for (double v : {0.0, -1.5, 1.0 / 3.0, 1e-300, 6.02e23, 0.1353352832366127}) {
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("grid descriptors round trip") {
  const RegularGrid g = small_grid();
  const fs::path dir = fresh_dir("grid");
  const io::json j = io::grid_to_json(g);
  CHECK(j.at("crs") == "WGS84-degrees");
  const RegularGrid back = io::grid_from_json(j, dir);
  CHECK(back.same_geometry(g));
  CHECK((back.land_fraction() == g.land_fraction()).all());

  // Scalar land fraction.
  io::json scalar = j;
  scalar["land_fraction"] = 1.0;
  CHECK(io::grid_from_json(scalar, dir).land_fraction().minCoeff() == 1.0);

  // Payload-file land fraction.
  io::write_text(dir / "land.f32", f32_bytes({1.0f, 0.0f, 1.0f, 0.25f}));
  io::json by_path = j;
  by_path["land_fraction"] = "land.f32";
  CHECK((io::grid_from_json(by_path, dir).land_fraction() == g.land_fraction()).all());

  io::json bad = j;
  bad["crs"] = "EPSG:3857";
  CHECK_THROWS_AS(io::grid_from_json(bad, dir), DataError);
}

TEST_CASE("daily store round trip and tamper detection") {
  const fs::path dir = fresh_dir("daily");
  DailyField f{small_grid(), CivilDate{1999, 12, 1}, ArrayXXd(3, 4), {provenance::kIngest}};
  // float-exact values survive the float32 payload untouched
  for (Index t = 0; t < 3; ++t) {
    for (Index c = 0; c < 4; ++c) f.values(t, c) = 0.25 * static_cast<double>(t * 4 + c);
  }
  f.values(1, 2) = kMissing;

  io::json run;
  run["config_hash"] = "fnv1a64:0000000000000000";
  io::write_daily_store(dir / "d.json", f, run);
  CHECK(fs::exists(dir / "d.f32"));

  const DailyField back = io::read_daily_store(dir / "d.json");
  CHECK(back.start == f.start);
  CHECK(back.grid.same_geometry(f.grid));
  CHECK(back.provenance == f.provenance);
  for (Index t = 0; t < 3; ++t) {
    for (Index c = 0; c < 4; ++c) {
      if (is_missing(f.values(t, c))) {
        CHECK(is_missing(back.values(t, c)));
      } else {
        CHECK(back.values(t, c) == f.values(t, c));
      }
    }
  }
  CHECK(io::load_json(dir / "d.json").at("run").at("config_hash") ==
        "fnv1a64:0000000000000000");

  // Corrupting the payload is caught by the recorded hash.
  std::string bytes = io::read_text(dir / "d.f32");
  bytes[0] = static_cast<char>(bytes[0] ^ 0x01);
  io::write_text(dir / "d.f32", bytes);
  CHECK_THROWS_AS(io::read_daily_store(dir / "d.json"), DataError);

  // Truncated payloads are rejected even with a matching descriptor.
  io::write_daily_store(dir / "d.json", f);
  io::write_text(dir / "d.f32", io::read_text(dir / "d.f32").substr(0, 10));
  CHECK_THROWS_AS(io::read_daily_store(dir / "d.json"), DataError);

  // A store of the wrong kind is refused.
  CHECK_THROWS_AS(io::read_season_max_store(dir / "d.json"), DataError);
}

TEST_CASE("season maxima store keeps the replicate layout") {
  const fs::path dir = fresh_dir("smax");
  SeasonMaxSeries s{small_grid(), {2001, 2002, 2003}, 2, {}, "DJF", {}};
  s.values.resize(6, 4);
  for (Index i = 0; i < 6; ++i) {
    for (Index c = 0; c < 4; ++c) s.values(i, c) = static_cast<double>(i * 4 + c) * 0.5;
  }
  s.provenance = {provenance::kIngest, provenance::kRemap, provenance::kRx5day};

  io::write_season_max_store(dir / "s.json", s);
  const SeasonMaxSeries back = io::read_season_max_store(dir / "s.json");
  CHECK(back.season_years == s.season_years);
  CHECK(back.n_replicates == 2);
  CHECK(back.season == "DJF");
  CHECK(back.provenance == s.provenance);
  CHECK((back.values == s.values).all());
  CHECK(back.value(1, 1, 3) == s.values(3, 3));
}

TEST_CASE("return-value bundles with and without replicates") {
  const fs::path dir = fresh_dir("rv");
  io::RvBundle b{small_grid(), 20.0, 0.375, 77, {}, {}, {}};
  b.point = (ArrayXd(4) << 10.5, kMissing, 30.25, 40.0).finished();
  b.replicates.resize(2, 4);
  b.replicates << 1, 2, 3, 4, 5, 6, 7, 8;
  b.provenance = {provenance::kSynth, provenance::kFit};

  io::write_rv_bundle(dir / "rv.json", b);
  CHECK(fs::exists(dir / "rv.point.f32"));
  CHECK(fs::exists(dir / "rv.boot.f32"));
  const io::RvBundle back = io::read_rv_bundle(dir / "rv.json");
  CHECK(back.r_years == 20.0);
  CHECK(back.xbar == 0.375);
  CHECK(back.seed == 77);
  CHECK(back.point[0] == 10.5);
  CHECK(is_missing(back.point[1]));
  CHECK(back.replicates.rows() == 2);
  CHECK((back.replicates == b.replicates).all());
  CHECK(back.provenance == b.provenance);

  io::RvBundle lean = b;
  lean.replicates.resize(0, 0);
  io::write_rv_bundle(dir / "lean.json", lean);
  CHECK_FALSE(fs::exists(dir / "lean.boot.f32"));
  CHECK(io::read_rv_bundle(dir / "lean.json").replicates.rows() == 0);
}

TEST_CASE("station table round trip and validation") {
  const fs::path dir = fresh_dir("stations");
  const std::vector<StationRecord> stations = {
      {"alpha", 42.5, -103.25, 1250.0, 0.97}, {"beta", 36.0, -110.0, 301.5, 0.925}};
  io::write_station_csv(dir / "st.csv", stations);
  const auto back = io::read_station_csv(dir / "st.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].id == "alpha");
  CHECK(back[0].lat == 42.5);
  CHECK(back[0].lon == -103.25);
  CHECK(back[1].elevation_m == 301.5);
  CHECK(back[1].completeness == 0.925);

  io::write_text(dir / "bad_header.csv", "id,lat,lon\n");
  CHECK_THROWS_AS(io::read_station_csv(dir / "bad_header.csv"), DataError);
  io::write_text(dir / "bad_row.csv",
                 "id,lat,lon,elev_m,completeness\na,1,2,3\n");
  CHECK_THROWS_AS(io::read_station_csv(dir / "bad_row.csv"), DataError);
  io::write_text(dir / "bad_num.csv",
                 "id,lat,lon,elev_m,completeness\na,1,2,3,high\n");
  CHECK_THROWS_AS(io::read_station_csv(dir / "bad_num.csv"), DataError);
}

TEST_CASE("gmt series round trip") {
  const fs::path dir = fresh_dir("gmt");
  const std::vector<std::pair<int, double>> series = {
      {1951, -0.07}, {1952, 0.01}, {1953, 0.08}};
  io::write_gmt_csv(dir / "gmt.csv", series);
  CHECK(io::read_gmt_csv(dir / "gmt.csv") == series);
}

TEST_CASE("elevation table round trip with missing water cells") {
  const fs::path dir = fresh_dir("elev");
  const RegularGrid g = small_grid();  // cells 1 and 3 are not land
  ElevationField e{g, (ArrayXd(4) << 120.5, kMissing, 890.0, kMissing).finished()};
  io::write_elevation_csv(dir / "e.csv", e);
  const ElevationField back = io::read_elevation_csv(dir / "e.csv", g);
  CHECK(back.mean_elevation[0] == 120.5);
  CHECK(is_missing(back.mean_elevation[1]));
  CHECK(back.mean_elevation[2] == 890.0);

  // A land cell left without elevation fails validation.
  io::write_text(dir / "sparse.csv", "row,col,elev_m\n0,0,120.5\n");
  CHECK_THROWS_AS(io::read_elevation_csv(dir / "sparse.csv", g), DataError);
}

TEST_CASE("mask table round trip") {
  const fs::path dir = fresh_dir("mask");
  const RegularGrid g = small_grid();
  CellMask m{g, ArrayXb::Constant(4, false), approach::kA1, Eigen::ArrayXi::Zero(4)};
  m.included[0] = true;
  m.station_count[0] = 3;
  io::write_mask_csv(dir / "m.csv", m);
  const CellMask back = io::read_mask_csv(dir / "m.csv", g);
  CHECK((back.included == m.included).all());
  CHECK(back.station_count[0] == 3);
  CHECK(back.provenance == approach::kA1);

  io::write_text(dir / "mixed.csv",
                 "row,col,included,station_count,provenance\n"
                 "0,0,1,1,A1-station\n0,1,0,0,A2-all-land\n");
  CHECK_THROWS_AS(io::read_mask_csv(dir / "mixed.csv", g), DataError);
}

TEST_CASE("region file parsing") {
  const fs::path dir = fresh_dir("regions");
  io::write_text(dir / "r.json", R"({"regions": [
    {"id": "picked", "kind": "cells", "cells": [[0, 1], [1, 0]]},
    {"id": "box", "kind": "bbox", "lat_min": 0, "lat_max": 20, "lon_min": 5, "lon_max": 15},
    {"id": "tri", "kind": "polygon", "vertices": [[0, 0], [20, 0], [0, 20]]}
  ]})");
  const auto regions = io::read_regions_json(dir / "r.json");
  REQUIRE(regions.size() == 3);
  CHECK(regions[0].kind == RegionSpec::Kind::Cells);
  CHECK(regions[0].cells.size() == 2);
  CHECK(regions[0].cells[1] == CellId{1, 0});
  CHECK(regions[1].kind == RegionSpec::Kind::Bbox);
  CHECK(regions[1].lon_min == 5.0);
  CHECK(regions[2].kind == RegionSpec::Kind::Polygon);
  CHECK(regions[2].polygon.size() == 3);

  io::write_text(dir / "bad.json", R"({"regions": [{"id": "x", "kind": "circle"}]})");
  CHECK_THROWS_AS(io::read_regions_json(dir / "bad.json"), DataError);
  io::write_text(dir / "empty.json", R"({"regions": []})");
  CHECK_THROWS_AS(io::read_regions_json(dir / "empty.json"), DataError);
}

TEST_CASE("report tables are written with exact headers") {
  const fs::path dir = fresh_dir("tables");

  EvalReport rep;
  rep.region = "all";
  rep.approach = approach::kA2;
  rep.bias = -12.5;
  rep.bias_ci = Interval{-15.0, -10.0};
  rep.taylor = TaylorStats{0.95, 3.0, 2.0, 1.5, 0.875};
  rep.n_cells = 42;
  io::write_eval_csv(dir / "eval.csv", {rep});
  CHECK(io::read_text(dir / "eval.csv") ==
        "region,approach,bias_mm,bias_lo,bias_hi,r,ratio,skill,n_cells\n"
        "all,A2-all-land,-12.5,-15,-10,0.95,1.5,0.875,42\n");

  io::write_taylor_csv(dir / "taylor.csv", {rep});
  const std::string taylor = io::read_text(dir / "taylor.csv");
  CHECK(taylor.substr(0, taylor.find('\n')) == "region,approach,radius,angle_rad,skill");

  BiasChange change;
  change.region = "all";
  change.approach = approach::kA2;
  change.delta = -4.25;
  change.ci = Interval{-6.0, -2.5};
  io::write_change_csv(dir / "chg.csv", {change});
  CHECK(io::read_text(dir / "chg.csv") ==
        "region,approach,delta_bias_mm,delta_lo,delta_hi\n"
        "all,A2-all-land,-4.25,-6,-2.5\n");

  io::write_replicate_csv(dir / "reps.csv", "bias", (ArrayXd(2) << 0.5, kMissing).finished());
  CHECK(io::read_text(dir / "reps.csv") ==
        "replicate,statistic_name,value\n0,bias,0.5\n1,bias,nan\n");
}

TEST_CASE("json files parse strictly") {
  const fs::path dir = fresh_dir("json");
  io::write_text(dir / "broken.json", "{\"a\": ");
  CHECK_THROWS_AS(io::load_json(dir / "broken.json"), DataError);
  CHECK_THROWS_AS(io::load_json(dir / "absent.json"), ConfigError);

  io::save_json(dir / "out.json", io::json{{"k", 1}});
  CHECK(io::load_json(dir / "out.json").at("k") == 1);
  const std::string text = io::read_text(dir / "out.json");
  CHECK(text.back() == '\n');
}
