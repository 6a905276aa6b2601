#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace xtreval {

using Index = Eigen::Index;

using ArrayXd = Eigen::ArrayXd;
using ArrayXXd = Eigen::ArrayXXd;
using ArrayXf = Eigen::ArrayXf;
using ArrayXi = Eigen::ArrayXi;
using ArrayXXi = Eigen::ArrayXXi;
using ArrayXb = Eigen::Array<bool, Eigen::Dynamic, 1>;
using VectorXd = Eigen::VectorXd;

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Missing values are carried as NaN throughout (matching the float32
/// payload convention).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }

}  // namespace xtreval
