#pragma once

#include "ncv/convex_piecewise.hpp"
#include "ncv/geometry.hpp"
#include "ncv/sampled_function.hpp"

#include <vector>

namespace ncv {

/// Default absolute tolerance for deciding that f touches its envelope.
inline constexpr double kTouchTol = 1e-8;

/// Points xi_j of epi f touching the envelope, with convex weights lambda_j,
/// representing `point` = sum lambda_j xi_j and f**(point) = sum lambda_j f(xi_j).
struct CaratheodoryCombo {
  std::vector<Vec> points;
  std::vector<double> weights;
  Vec point;

  std::size_t size() const { return points.size(); }
  Vec combination() const;
};

/// Lower convex hull of the finite samples of f (its biconjugate restricted
/// to the convex hull of dom f). Throws DegenerateInput with fewer than two
/// finite samples.
ConvexPiecewise convex_envelope(const SampledFunction& f);

/// Tabulates g on the grid of `like` (+inf outside dom g).
SampledFunction resample(const ConvexPiecewise& g, const SampledFunction& like);

/// Fenchel conjugate g*(p) = sup_x [p.x - g(x)] computed exactly from the
/// breakpoints/vertices of g. The result lives on a slope box that strictly
/// contains every slope of g, so conjugating twice recovers g on its domain.
ConvexPiecewise legendre_conjugate(const ConvexPiecewise& g);

/// Smallest box containing every slope (gradient) of the affine pieces of g.
/// For g = f**, this is the range where f* is determined by interior data.
Box exposed_slope_box(const ConvexPiecewise& g);

/// Absolute slope tolerance used when `slope_tol` is negative.
double default_slope_tol(const Vec& p);

/// Exposed face argmax_x [p.x - g(x)] over dom g, i.e. the subdifferential of
/// g* at p. Slopes of g within `slope_tol` of p count as exposed.
Face subdifferential(const ConvexPiecewise& g, const Vec& p, double slope_tol = -1.0);

/// Set of slopes of h at x (the subdifferential of h at x).
Face gradient_face(const ConvexPiecewise& h, const Vec& x, double tol = -1.0);

/// Writes x as a convex combination of at most m + 2 points where f touches
/// its envelope `env`. Among admissible faces the one of minimal diameter is
/// used; a point where f already touches env yields the singleton combo.
CaratheodoryCombo caratheodory_decompose(const SampledFunction& f, const ConvexPiecewise& env,
                                         const Vec& x, double touch_tol = kTouchTol);

/// True when f(x) and env(x) agree within `touch_tol` (scaled by max(1, |f|)).
bool touches(double f_value, double env_value, double touch_tol = kTouchTol);

}  // namespace ncv
