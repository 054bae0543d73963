#include "ncv/growth.hpp"

#include "ncv/convex_analysis.hpp"
#include "ncv/error.hpp"

#include <algorithm>
#include <cmath>

namespace ncv {

namespace {

struct Piece {
  double dmin;    // inf of |x| over the piece
  double dmax;    // sup of |x| over the piece
  double g;       // f** - x.grad f** at the piece midpoint
  double cross;   // -f*(grad f**)
};

double segment_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d d = b - a;
  const double t = std::clamp(-a.dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d).norm();
}

std::vector<Piece> pieces_1d(const ConvexPiecewise& env, const ConvexPiecewise& conj) {
  const auto& g = env.one();
  const auto x = g.breakpoints();
  std::vector<Piece> out;
  for (std::size_t k = 0; k < g.piece_count(); ++k) {
    const double a = x[k];
    const double b = x[k + 1];
    const double mid = 0.5 * (a + b);
    const double s = g.slope(k);
    const double dmin = (a <= 0.0 && b >= 0.0) ? 0.0 : std::min(std::abs(a), std::abs(b));
    out.push_back({dmin, std::max(std::abs(a), std::abs(b)), g(mid) - mid * s, -conj(vec1(s))});
  }
  return out;
}

std::vector<Piece> pieces_2d(const ConvexPiecewise& env, const ConvexPiecewise& conj) {
  const auto& g = env.two();
  std::vector<Piece> out;
  for (const auto& f : g.facets()) {
    Eigen::Vector2d v[3];
    for (int i = 0; i < 3; ++i) {
      const auto& p = g.vertices()[f.v[static_cast<std::size_t>(i)]];
      v[i] = Eigen::Vector2d(p.x(), p.y());
    }
    const Eigen::Vector2d c = (v[0] + v[1] + v[2]) / 3.0;
    double dmax = 0.0;
    for (const auto& p : v) dmax = std::max(dmax, p.norm());
    double dmin = std::min({segment_distance(v[0], v[1]), segment_distance(v[1], v[2]),
                            segment_distance(v[2], v[0])});
    // Origin inside the (counter-clockwise) triangle.
    auto side = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
      return a.x() * (b.y() - a.y()) - a.y() * (b.x() - a.x()) <= 0.0;
    };
    if (side(v[0], v[1]) && side(v[1], v[2]) && side(v[2], v[0])) dmin = 0.0;
    out.push_back({dmin, dmax, env(vec2(c.x(), c.y())) - c.dot(f.gradient),
                   -conj(vec2(f.gradient.x(), f.gradient.y()))});
  }
  return out;
}

double tail_value(const std::function<double(const Vec&)>& tail, int dim, double r) {
  const int directions = dim == 1 ? 2 : 8;
  const double h = 1e-6 * r;
  double best = -kInf;
  for (int k = 0; k < directions; ++k) {
    Vec u(dim);
    if (dim == 1) {
      u[0] = k == 0 ? 1.0 : -1.0;
    } else {
      const double th = 2.0 * M_PI * k / directions;
      u << std::cos(th), std::sin(th);
    }
    const Vec x = r * u;
    // Directional derivative along x equals x.grad f for radial direction u.
    const double dfdr = (tail(x + h * u) - tail(x - h * u)) / (2.0 * h);
    best = std::max(best, tail(x) - r * dfdr);
  }
  return best;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kInClassF:
      return "InClassF";
    case Verdict::kNotInClassF:
      return "NotInClassF";
    case Verdict::kInconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

std::vector<double> default_shells(const ConvexPiecewise& env, int count) {
  double reach = 0.0;
  const Box box = env.domain();
  if (box.size() == 1) {
    reach = std::max(std::abs(box[0].lo), std::abs(box[0].hi));
  } else {
    for (double x : {box[0].lo, box[0].hi}) {
      for (double y : {box[1].lo, box[1].hi}) reach = std::max(reach, std::hypot(x, y));
    }
  }
  std::vector<double> radii;
  for (int i = 0; i < count; ++i) radii.push_back(reach * i / count);
  return radii;
}

GrowthProfile growth_profile(const ConvexPiecewise& env, const std::vector<double>& shells,
                             const std::function<double(const Vec&)>& tail, int tail_shells) {
  if (shells.empty()) throw Error(ErrorKind::kInvalidInput, "growth profile needs at least one shell");
  for (std::size_t i = 1; i < shells.size(); ++i) {
    if (!(shells[i] > shells[i - 1])) {
      throw Error(ErrorKind::kInvalidInput, "shell radii must be strictly increasing");
    }
  }
  const ConvexPiecewise conj = legendre_conjugate(env);
  const std::vector<Piece> pieces = env.dim() == 1 ? pieces_1d(env, conj) : pieces_2d(env, conj);

  GrowthProfile profile;
  double lo = kInf;
  double hi = -kInf;
  if (env.dim() == 1) {
    for (double y : env.one().values()) lo = std::min(lo, y), hi = std::max(hi, y);
  } else {
    for (const auto& v : env.two().vertices()) lo = std::min(lo, v.z()), hi = std::max(hi, v.z());
  }
  profile.envelope_range = hi - lo;

  double reach = 0.0;
  for (const auto& p : pieces) reach = std::max(reach, p.dmax);
  for (std::size_t i = 0; i < shells.size(); ++i) {
    GrowthShell shell;
    shell.radius = shells[i];
    shell.outer = i + 1 < shells.size() ? shells[i + 1] : std::max(reach, shells[i]);
    const bool last = i + 1 == shells.size();
    double best = -kInf;
    double best_cross = -kInf;
    for (const auto& p : pieces) {
      // Interiors of pieces are where f** is differentiable.
      const bool meets = p.dmax > shell.radius && (last || p.dmin < shell.outer);
      if (!meets) continue;
      best = std::max(best, p.g);
      best_cross = std::max(best_cross, p.cross);
    }
    shell.empty = !std::isfinite(best);
    shell.g_max = shell.empty ? std::nan("") : best;
    shell.cross_check = shell.empty ? std::nan("") : best_cross;
    if (!shell.empty) {
      profile.max_cross_check_error =
          std::max(profile.max_cross_check_error, std::abs(best - best_cross));
    }
    profile.shells.push_back(shell);
  }
  if (tail) {
    for (int k = 1; k <= tail_shells; ++k) {
      const double r = reach * std::ldexp(1.0, k);
      const double g = tail_value(tail, env.dim(), r);
      profile.shells.push_back({r, r, g, g, false, true});
    }
  }

  std::vector<std::pair<double, double>> pts;
  for (const auto& s : profile.shells) {
    if (!s.empty) pts.emplace_back(s.radius, s.g_max);
  }
  const std::size_t take = std::min<std::size_t>(3, pts.size());
  if (take >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t k = pts.size() - take; k < pts.size(); ++k) mx += pts[k].first, my += pts[k].second;
    mx /= take, my /= take;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = pts.size() - take; k < pts.size(); ++k) {
      sxy += (pts[k].first - mx) * (pts[k].second - my);
      sxx += (pts[k].first - mx) * (pts[k].first - mx);
    }
    profile.divergence_slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  profile.verdict = classify_class_f(profile);
  return profile;
}

Verdict classify_class_f(const GrowthProfile& profile, const ClassifyOptions& options) {
  std::vector<double> values;
  for (const auto& s : profile.shells) {
    if (!s.empty) values.push_back(s.g_max);
  }
  const auto k = static_cast<std::size_t>(std::max(2, options.min_decrease_shells));
  if (values.size() < k) return Verdict::kInconclusive;
  const double threshold =
      options.threshold.value_or(values.front() - 0.1 * profile.envelope_range);
  const auto tail_begin = values.end() - static_cast<std::ptrdiff_t>(k);
  bool decreasing = true;
  for (auto it = tail_begin + 1; it != values.end(); ++it) decreasing = decreasing && *it < *(it - 1);
  if (decreasing && values.back() < threshold) return Verdict::kInClassF;
  const auto [mn, mx] = std::minmax_element(tail_begin, values.end());
  if (*mx - *mn <= options.flat_tol * (1.0 + profile.envelope_range)) return Verdict::kNotInClassF;
  return Verdict::kInconclusive;
}

}  // namespace ncv
