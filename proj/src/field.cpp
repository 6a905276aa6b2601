#include "xtreval/field.hpp"

#include <cmath>

#include "xtreval/errors.hpp"

namespace xtreval {

void DailyField::validate() const {
  if (values.cols() != grid.n_cells()) {
    throw DataError("daily field: value columns do not match grid cells");
  }
  if (!valid_date(start)) {
    throw DataError("daily field: invalid start date");
  }
  if ((values < 0.0).any()) {
    throw DataError("daily field: negative precipitation value");
  }
}

void SeasonMaxSeries::validate() const {
  if (values.cols() != grid.n_cells()) {
    throw DataError("season maxima: value columns do not match grid cells");
  }
  if (n_replicates < 1) {
    throw DataError("season maxima: replicate count must be >= 1");
  }
  if (values.rows() != n_years() * n_replicates) {
    throw DataError("season maxima: value rows do not match years x replicates");
  }
  for (std::size_t i = 1; i < season_years.size(); ++i) {
    if (season_years[i] <= season_years[i - 1]) {
      throw DataError("season maxima: season years must be strictly increasing");
    }
  }
  if ((values < 0.0).any()) {
    throw DataError("season maxima: negative value");
  }
}

void ElevationField::validate() const {
  if (mean_elevation.size() != grid.n_cells()) {
    throw DataError("elevation field: size does not match grid cells");
  }
  const ArrayXb land = grid.land_mask();
  for (Index i = 0; i < mean_elevation.size(); ++i) {
    if (land[i] && !std::isfinite(mean_elevation[i])) {
      throw DataError("elevation field: non-finite value on land cell");
    }
  }
}

void StationRecord::validate() const {
  if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0) {
    throw DataError("station " + id + ": coordinates out of range");
  }
  if (!(completeness >= 0.0 && completeness <= 1.0)) {
    throw DataError("station " + id + ": completeness must lie in [0, 1]");
  }
}

double CovariateSeries::at_year(int year) const {
  if (years.empty() || year < years.front() || year > years.back()) {
    throw DataError("covariate: year " + std::to_string(year) + " not covered");
  }
  return x[year - years.front()];
}

void CovariateSeries::validate() const {
  if (static_cast<Index>(years.size()) != x.size()) {
    throw DataError("covariate: year axis and values differ in length");
  }
  for (std::size_t i = 1; i < years.size(); ++i) {
    if (years[i] != years[i - 1] + 1) {
      throw DataError("covariate: years must be contiguous");
    }
  }
  if (!x.isFinite().all()) {
    throw DataError("covariate: non-finite anomaly");
  }
}

}  // namespace xtreval
