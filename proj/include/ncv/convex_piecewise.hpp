#pragma once

#include "ncv/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace ncv {

/// Exposed face of a convex function: for m = 1 the interval [vertices.front(),
/// vertices.back()] (one entry when a singleton), for m = 2 a convex polygon
/// listed counter-clockwise. `slope` is the slope at which the face is exposed.
struct Face {
  Vec slope;
  std::vector<Vec> vertices;

  bool singleton() const { return vertices.size() == 1; }
  double lower() const { return vertices.front()[0]; }
  double upper() const { return vertices.back()[0]; }
  double diameter() const;
};

/// Convex piecewise-affine function of one variable, +inf outside
/// [breakpoints.front(), breakpoints.back()].
class ConvexPiecewise1D {
 public:
  ConvexPiecewise1D(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  std::span<const double> breakpoints() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::size_t piece_count() const { return x_.size() - 1; }
  double slope(std::size_t piece) const { return slopes_[piece]; }
  std::span<const double> slopes() const { return slopes_; }
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

  /// Index of the piece containing x (clamped to the domain).
  std::size_t locate(double x) const;

  /// Values returned as-is at the given points (sorted), e.g. grid nodes
  /// where the tabulated function touches the hull.
  void pin(std::vector<double> x, std::vector<double> y);

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slopes_;
  std::vector<double> pin_x_;
  std::vector<double> pin_y_;
};

/// Convex piecewise-affine function of two variables stored as the lower
/// convex hull of lifted vertices: a triangulation with one affine function
/// per facet. +inf outside the domain polygon.
class ConvexPiecewise2D {
 public:
  struct Facet {
    std::array<std::size_t, 3> v;
    Eigen::Vector2d gradient;
    double intercept;

    double operator()(const Eigen::Vector2d& x) const { return gradient.dot(x) + intercept; }
  };

  ConvexPiecewise2D(std::vector<Eigen::Vector3d> vertices, std::vector<Facet> facets,
                    std::vector<Eigen::Vector2d> domain);

  double operator()(const Eigen::Vector2d& x) const;

  const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  /// Counter-clockwise polygon bounding the effective domain.
  const std::vector<Eigen::Vector2d>& domain() const { return domain_; }
  Box bounding_box() const;
  bool in_domain(const Eigen::Vector2d& x, double tol = 0.0) const;

  /// Same as ConvexPiecewise1D::pin; points sorted by (x, y).
  void pin(std::vector<Eigen::Vector2d> x, std::vector<double> z);

 private:
  std::vector<Eigen::Vector3d> vertices_;
  std::vector<Eigen::Vector2d> pin_x_;
  std::vector<double> pin_z_;
  std::vector<Facet> facets_;
  std::vector<Eigen::Vector2d> domain_;
  double scale_ = 1.0;
};

/// f** or f* of a sampled integrand, in one or two variables.
class ConvexPiecewise {
 public:
  ConvexPiecewise(ConvexPiecewise1D g) : rep_(std::move(g)) {}  // NOLINT
  ConvexPiecewise(ConvexPiecewise2D g) : rep_(std::move(g)) {}  // NOLINT

  int dim() const { return rep_.index() == 0 ? 1 : 2; }
  double operator()(const Vec& x) const;
  /// Bounding box of the effective domain.
  Box domain() const;

  const ConvexPiecewise1D& one() const { return std::get<ConvexPiecewise1D>(rep_); }
  const ConvexPiecewise2D& two() const { return std::get<ConvexPiecewise2D>(rep_); }

 private:
  std::variant<ConvexPiecewise1D, ConvexPiecewise2D> rep_;
};

}  // namespace ncv
