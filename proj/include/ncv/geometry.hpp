#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <vector>

namespace ncv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Point in R^m for m in {1, 2}; fixed capacity, no heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2, 1>;

inline Vec vec1(double x) {
  Vec v(1);
  v << x;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

/// Axis-aligned box, one interval per coordinate.
using Box = std::vector<Interval>;

inline bool box_contains(const Box& box, const Vec& x, double tol = 0.0) {
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (!box[i].contains(x[static_cast<Eigen::Index>(i)], tol)) return false;
  }
  return true;
}

}  // namespace ncv
