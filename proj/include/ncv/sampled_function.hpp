#pragma once

#include "ncv/geometry.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace ncv {

/// A possibly non-convex integrand f: R^m -> R u {+inf} tabulated on a uniform
/// grid over a closed box (m in {1, 2}). Values of +inf mark points outside
/// dom f. Node ordering is x-fastest: flat = i + count(0) * j.
class SampledFunction {
 public:
  SampledFunction(Box box, std::vector<double> step, std::vector<double> values);

  /// Tabulates `fn` on the grid; non-finite results are stored as +inf.
  static SampledFunction sample(Box box, std::vector<double> step,
                                const std::function<double(const Vec&)>& fn);

  int dim() const { return static_cast<int>(box_.size()); }
  const Box& box() const { return box_; }
  const std::vector<double>& step() const { return step_; }
  std::size_t count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
  std::size_t size() const { return values_.size(); }

  double coordinate(int axis, std::size_t i) const;
  Vec node(std::size_t flat) const;
  double value(std::size_t flat) const { return values_[flat]; }
  const std::vector<double>& values() const { return values_; }
  std::size_t finite_count() const;

  /// Flat index of the grid node located exactly at x, if any.
  std::optional<std::size_t> node_index(const Vec& x) const;

  /// Linear (m = 1) or bilinear (m = 2) interpolation of the table. Returns the
  /// stored value exactly at grid nodes and +inf outside the box or when a
  /// contributing node is +inf.
  double interpolate(const Vec& x) const;

 private:
  std::size_t cell(int axis, double x, double* frac) const;

  Box box_;
  std::vector<double> step_;
  std::vector<std::size_t> counts_;
  std::vector<double> values_;
};

}  // namespace ncv
