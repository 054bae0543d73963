#include "ncv/sampled_function.hpp"

#include "ncv/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncv {

namespace {

std::size_t grid_count(const Interval& iv, double step) {
  const double span = iv.hi - iv.lo;
  const double n = std::round(span / step);
  if (n < 1.0 || std::abs(n * step - span) > 1e-9 * std::max(span, step)) {
    throw Error(ErrorKind::kInvalidInput,
                "box [" + std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                    "] is not an integer multiple of step " + std::to_string(step));
  }
  return static_cast<std::size_t>(n) + 1;
}

}  // namespace

SampledFunction::SampledFunction(Box box, std::vector<double> step, std::vector<double> values)
    : box_(std::move(box)), step_(std::move(step)), values_(std::move(values)) {
  if (box_.empty() || box_.size() > 2) {
    throw Error(ErrorKind::kInvalidInput, "sampled function dimension must be 1 or 2");
  }
  if (step_.size() == 1 && box_.size() == 2) step_.push_back(step_.front());
  if (step_.size() != box_.size()) {
    throw Error(ErrorKind::kInvalidInput, "step must have one entry per coordinate");
  }
  std::size_t total = 1;
  for (std::size_t a = 0; a < box_.size(); ++a) {
    if (!(box_[a].lo < box_[a].hi)) {
      throw Error(ErrorKind::kInvalidInput, "box must satisfy lo < hi on every coordinate");
    }
    if (!(step_[a] > 0.0)) throw Error(ErrorKind::kInvalidInput, "step must be positive");
    counts_.push_back(grid_count(box_[a], step_[a]));
    total *= counts_.back();
  }
  if (values_.size() != total) {
    throw Error(ErrorKind::kInvalidInput, "expected " + std::to_string(total) +
                                              " grid values, got " +
                                              std::to_string(values_.size()));
  }
  for (double& v : values_) {
    if (std::isnan(v)) throw Error(ErrorKind::kInvalidInput, "grid values must not be NaN");
    if (v == -kInf) throw Error(ErrorKind::kInvalidInput, "grid values must be > -inf");
  }
  if (finite_count() == 0) {
    throw Error(ErrorKind::kInvalidInput, "sampled function has no finite value");
  }
}

SampledFunction SampledFunction::sample(Box box, std::vector<double> step,
                                        const std::function<double(const Vec&)>& fn) {
  // Values are filled in a second pass, once the grid geometry is validated.
  std::size_t total = 1;
  if (step.size() == 1 && box.size() == 2) step.push_back(step.front());
  for (std::size_t a = 0; a < box.size() && a < step.size(); ++a) {
    total *= grid_count(box[a], step[a]);
  }
  SampledFunction f(std::move(box), std::move(step), std::vector<double>(total, 0.0));
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = fn(f.node(k));
    f.values_[k] = std::isfinite(v) ? v : kInf;
  }
  if (f.finite_count() == 0) {
    throw Error(ErrorKind::kInvalidInput, "sampled function has no finite value");
  }
  return f;
}

double SampledFunction::coordinate(int axis, std::size_t i) const {
  const auto a = static_cast<std::size_t>(axis);
  if (i + 1 == counts_[a]) return box_[a].hi;
  return box_[a].lo + static_cast<double>(i) * step_[a];
}

Vec SampledFunction::node(std::size_t flat) const {
  if (dim() == 1) return vec1(coordinate(0, flat));
  return vec2(coordinate(0, flat % counts_[0]), coordinate(1, flat / counts_[0]));
}

std::size_t SampledFunction::finite_count() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }));
}

std::size_t SampledFunction::cell(int axis, double x, double* frac) const {
  const auto a = static_cast<std::size_t>(axis);
  const double pos = (x - box_[a].lo) / step_[a];
  auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                               static_cast<double>(counts_[a] - 2)));
  const double x0 = coordinate(axis, i);
  const double x1 = coordinate(axis, i + 1);
  if (x == x1) {
    // Landing exactly on the right node of the cell.
    *frac = 1.0;
  } else {
    *frac = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
  }
  return i;
}

std::optional<std::size_t> SampledFunction::node_index(const Vec& x) const {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (int a = 0; a < dim(); ++a) {
    if (!box_[static_cast<std::size_t>(a)].contains(x[a])) return std::nullopt;
    double frac = 0.0;
    const std::size_t i = cell(a, x[a], &frac);
    std::size_t k;
    if (x[a] == coordinate(a, i)) {
      k = i;
    } else if (x[a] == coordinate(a, i + 1)) {
      k = i + 1;
    } else {
      return std::nullopt;
    }
    flat += k * stride;
    stride *= counts_[static_cast<std::size_t>(a)];
  }
  return flat;
}

double SampledFunction::interpolate(const Vec& x) const {
  const double slack = 1e-12;
  for (int a = 0; a < dim(); ++a) {
    const Interval& iv = box_[static_cast<std::size_t>(a)];
    if (!iv.contains(x[a], slack * (1.0 + iv.width()))) return kInf;
  }
  if (auto k = node_index(x)) return values_[*k];

  if (dim() == 1) {
    double t = 0.0;
    const std::size_t i = cell(0, x[0], &t);
    if (t == 0.0) return values_[i];
    if (t == 1.0) return values_[i + 1];
    const double y0 = values_[i];
    const double y1 = values_[i + 1];
    if (!std::isfinite(y0) || !std::isfinite(y1)) return kInf;
    return y0 + t * (y1 - y0);
  }

  double tx = 0.0;
  double ty = 0.0;
  const std::size_t i = cell(0, x[0], &tx);
  const std::size_t j = cell(1, x[1], &ty);
  const std::size_t nx = counts_[0];
  double acc = 0.0;
  for (int dj = 0; dj <= 1; ++dj) {
    const double wy = dj ? ty : 1.0 - ty;
    if (wy == 0.0) continue;
    for (int di = 0; di <= 1; ++di) {
      const double wx = di ? tx : 1.0 - tx;
      if (wx == 0.0) continue;
      const double v = values_[(i + static_cast<std::size_t>(di)) +
                               nx * (j + static_cast<std::size_t>(dj))];
      if (!std::isfinite(v)) return kInf;
      acc += wx * wy * v;
    }
  }
  return acc;
}

}  // namespace ncv
