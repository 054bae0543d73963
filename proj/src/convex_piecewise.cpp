#include "ncv/convex_piecewise.hpp"

#include "ncv/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ncv {

double Face::diameter() const {
  double d = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < vertices.size(); ++j) {
      d = std::max(d, (vertices[i] - vertices[j]).norm());
    }
  }
  return d;
}

ConvexPiecewise1D::ConvexPiecewise1D(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.empty() || x_.size() != y_.size()) {
    throw Error(ErrorKind::kInvalidInput, "breakpoint and value lists must be non-empty and match");
  }
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!std::isfinite(x_[k]) || !std::isfinite(y_[k])) {
      throw Error(ErrorKind::kInvalidInput, "breakpoints and values must be finite");
    }
    if (k > 0 && !(x_[k] > x_[k - 1])) {
      throw Error(ErrorKind::kInvalidInput, "breakpoints must be strictly increasing");
    }
  }
  slopes_.reserve(x_.size());
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    slopes_.push_back((y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]));
  }
  for (std::size_t k = 1; k < slopes_.size(); ++k) {
    const double tol = 1e-9 * (1.0 + std::abs(slopes_[k]));
    if (slopes_[k] < slopes_[k - 1] - tol) {
      throw Error(ErrorKind::kInvalidInput,
                  "piecewise function is not convex at breakpoint " + std::to_string(x_[k]));
    }
  }
}

std::size_t ConvexPiecewise1D::locate(double x) const {
  if (x_.size() < 2) return 0;
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  auto k = static_cast<std::size_t>(std::distance(x_.begin(), it));
  if (k == 0) return 0;
  return std::min(k - 1, piece_count() - 1);
}

void ConvexPiecewise1D::pin(std::vector<double> x, std::vector<double> y) {
  pin_x_ = std::move(x);
  pin_y_ = std::move(y);
}

double ConvexPiecewise1D::operator()(double x) const {
  if (!pin_x_.empty()) {
    const auto it = std::lower_bound(pin_x_.begin(), pin_x_.end(), x);
    if (it != pin_x_.end() && *it == x) return pin_y_[static_cast<std::size_t>(it - pin_x_.begin())];
  }
  const double slack = 1e-13 * (1.0 + std::max(std::abs(x_.front()), std::abs(x_.back())));
  if (x < x_.front()) {
    if (x < x_.front() - slack) return kInf;
    return y_.front();
  }
  if (x > x_.back()) {
    if (x > x_.back() + slack) return kInf;
    return y_.back();
  }
  if (x_.size() == 1) return y_.front();
  const std::size_t k = locate(x);
  if (x == x_[k]) return y_[k];
  if (x == x_[k + 1]) return y_[k + 1];
  return y_[k] + slopes_[k] * (x - x_[k]);
}

ConvexPiecewise2D::ConvexPiecewise2D(std::vector<Eigen::Vector3d> vertices,
                                     std::vector<Facet> facets,
                                     std::vector<Eigen::Vector2d> domain)
    : vertices_(std::move(vertices)), facets_(std::move(facets)), domain_(std::move(domain)) {
  if (vertices_.empty() || facets_.empty() || domain_.size() < 3) {
    throw Error(ErrorKind::kInvalidInput, "two-variable piecewise function needs facets");
  }
  for (const auto& v : vertices_) {
    scale_ = std::max({scale_, std::abs(v.x()), std::abs(v.y())});
  }
}

bool ConvexPiecewise2D::in_domain(const Eigen::Vector2d& x, double tol) const {
  const std::size_t n = domain_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& a = domain_[i];
    const Eigen::Vector2d& b = domain_[(i + 1) % n];
    const Eigen::Vector2d e = b - a;
    const Eigen::Vector2d r = x - a;
    const double cross = e.x() * r.y() - e.y() * r.x();
    if (cross < -tol * e.norm()) return false;
  }
  return true;
}

Box ConvexPiecewise2D::bounding_box() const {
  Box box(2, Interval{kInf, -kInf});
  for (const auto& p : domain_) {
    for (int a = 0; a < 2; ++a) {
      box[static_cast<std::size_t>(a)].lo = std::min(box[static_cast<std::size_t>(a)].lo, p[a]);
      box[static_cast<std::size_t>(a)].hi = std::max(box[static_cast<std::size_t>(a)].hi, p[a]);
    }
  }
  return box;
}

namespace {

bool lex_less(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
}

}  // namespace

void ConvexPiecewise2D::pin(std::vector<Eigen::Vector2d> x, std::vector<double> z) {
  pin_x_ = std::move(x);
  pin_z_ = std::move(z);
}

double ConvexPiecewise2D::operator()(const Eigen::Vector2d& x) const {
  if (!pin_x_.empty()) {
    const auto it = std::lower_bound(pin_x_.begin(), pin_x_.end(), x, lex_less);
    if (it != pin_x_.end() && *it == x) return pin_z_[static_cast<std::size_t>(it - pin_x_.begin())];
  }
  if (!in_domain(x, 1e-12 * scale_)) return kInf;
  for (const auto& v : vertices_) {
    if (v.x() == x.x() && v.y() == x.y()) return v.z();
  }
  double best = -kInf;
  for (const auto& f : facets_) best = std::max(best, f(x));
  return best;
}

double ConvexPiecewise::operator()(const Vec& x) const {
  if (dim() == 1) return one()(x[0]);
  return two()(Eigen::Vector2d(x[0], x[1]));
}

Box ConvexPiecewise::domain() const {
  if (dim() == 1) return {Interval{one().lo(), one().hi()}};
  return two().bounding_box();
}

}  // namespace ncv
