#include "ncv/convex_analysis.hpp"

#include "ncv/error.hpp"
#include "ncv/hull.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace ncv {

namespace {

ConvexPiecewise2D build_2d(const std::vector<Eigen::Vector3d>& lifted) {
  const auto tris = lower_hull_3d(lifted);
  std::map<std::size_t, std::size_t> remap;
  std::vector<Eigen::Vector3d> verts;
  auto id = [&](std::size_t i) {
    auto [it, inserted] = remap.emplace(i, verts.size());
    if (inserted) verts.push_back(lifted[i]);
    return it->second;
  };
  std::vector<ConvexPiecewise2D::Facet> facets;
  for (const auto& t : tris) {
    const Eigen::Vector3d& a = lifted[t[0]];
    const Eigen::Vector3d& b = lifted[t[1]];
    const Eigen::Vector3d& c = lifted[t[2]];
    Eigen::Matrix2d m;
    m << b.x() - a.x(), b.y() - a.y(), c.x() - a.x(), c.y() - a.y();
    const double det = m.determinant();
    if (det == 0.0) continue;
    const Eigen::Vector2d g = m.inverse() * Eigen::Vector2d(b.z() - a.z(), c.z() - a.z());
    facets.push_back({{id(t[0]), id(t[1]), id(t[2])}, g, a.z() - g.x() * a.x() - g.y() * a.y()});
  }
  std::vector<Eigen::Vector2d> xy;
  for (const auto& v : verts) xy.emplace_back(v.x(), v.y());
  std::vector<Eigen::Vector2d> outline;
  for (std::size_t i : convex_hull_2d(xy)) outline.push_back(xy[i]);
  return ConvexPiecewise2D(std::move(verts), std::move(facets), std::move(outline));
}

double conjugate_value_2d(const ConvexPiecewise2D& g, const Eigen::Vector2d& p) {
  double best = -kInf;
  for (const auto& v : g.vertices()) best = std::max(best, p.x() * v.x() + p.y() * v.y() - v.z());
  return best;
}

// Breakpoints t in (lo, hi) of t -> max_k (slope_k t + icpt_k).
std::vector<double> upper_envelope_kinks(std::vector<std::pair<double, double>> lines, double lo,
                                         double hi) {
  std::sort(lines.begin(), lines.end());
  std::vector<std::pair<double, double>> uniq;
  for (const auto& l : lines) {
    if (!uniq.empty() && uniq.back().first == l.first) {
      uniq.back().second = std::max(uniq.back().second, l.second);
    } else {
      uniq.push_back(l);
    }
  }
  // Convex-hull trick: keep lines that are maximal somewhere, in slope order.
  auto bad = [](const auto& l1, const auto& l2, const auto& l3) {
    return (l3.second - l1.second) * (l2.first - l1.first) >=
           (l2.second - l1.second) * (l3.first - l1.first);
  };
  std::vector<std::pair<double, double>> env;
  for (const auto& l : uniq) {
    while (env.size() >= 2 && bad(env[env.size() - 2], env.back(), l)) env.pop_back();
    env.push_back(l);
  }
  std::vector<double> kinks;
  for (std::size_t k = 0; k + 1 < env.size(); ++k) {
    const double t = (env[k].second - env[k + 1].second) / (env[k + 1].first - env[k].first);
    if (t > lo && t < hi) kinks.push_back(t);
  }
  return kinks;
}

ConvexPiecewise conjugate_2d(const ConvexPiecewise2D& g) {
  std::vector<Eigen::Vector2d> grads;
  for (const auto& f : g.facets()) grads.push_back(f.gradient);
  Box box(2, Interval{kInf, -kInf});
  for (const auto& p : grads) {
    for (std::size_t a = 0; a < 2; ++a) {
      box[a].lo = std::min(box[a].lo, p[static_cast<Eigen::Index>(a)]);
      box[a].hi = std::max(box[a].hi, p[static_cast<Eigen::Index>(a)]);
    }
  }
  for (auto& iv : box) {
    const double pad = std::max(1.0, iv.width());
    iv.lo -= pad;
    iv.hi += pad;
  }
  std::vector<Eigen::Vector2d> pts = grads;
  const Eigen::Vector2d corners[4] = {{box[0].lo, box[1].lo},
                                      {box[0].hi, box[1].lo},
                                      {box[0].hi, box[1].hi},
                                      {box[0].lo, box[1].hi}};
  for (const auto& c : corners) pts.push_back(c);
  // Kinks of g* along each edge of the slope box.
  for (int axis = 0; axis < 2; ++axis) {
    const int other = 1 - axis;
    const Interval& run = box[static_cast<std::size_t>(axis)];
    for (double fixed : {box[static_cast<std::size_t>(other)].lo,
                         box[static_cast<std::size_t>(other)].hi}) {
      std::vector<std::pair<double, double>> lines;
      for (const auto& v : g.vertices()) lines.emplace_back(v[axis], fixed * v[other] - v.z());
      for (double t : upper_envelope_kinks(lines, run.lo, run.hi)) {
        Eigen::Vector2d q;
        q[axis] = t;
        q[other] = fixed;
        pts.push_back(q);
      }
    }
  }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& a, const auto& b) {
                          return (a - b).template lpNorm<Eigen::Infinity>() <=
                                 1e-12 * (1.0 + a.template lpNorm<Eigen::Infinity>());
                        }),
            pts.end());
  std::vector<Eigen::Vector3d> lifted;
  for (const auto& p : pts) lifted.emplace_back(p.x(), p.y(), conjugate_value_2d(g, p));
  return build_2d(lifted);
}

ConvexPiecewise conjugate_1d(const ConvexPiecewise1D& g) {
  const auto x = g.breakpoints();
  const auto y = g.values();
  if (g.piece_count() == 0) {
    return ConvexPiecewise1D({-1.0, 1.0}, {-x[0] - y[0], x[0] - y[0]});
  }
  const auto s = g.slopes();
  const double pad = std::max(1.0, s.back() - s.front());
  std::vector<double> px;
  std::vector<double> py;
  px.push_back(s.front() - pad);
  py.push_back(px.back() * x[0] - y[0]);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double value = std::max(s[k] * x[k] - y[k], s[k] * x[k + 1] - y[k + 1]);
    if (s[k] <= px.back()) {
      py.back() = std::max(py.back(), value);
    } else {
      px.push_back(s[k]);
      py.push_back(value);
    }
  }
  px.push_back(s.back() + pad);
  py.push_back(px.back() * x.back() - y.back());
  return ConvexPiecewise1D(std::move(px), std::move(py));
}

Face polygon_face(const Vec& slope, std::vector<Eigen::Vector2d> pts) {
  Face face{slope, {}};
  const auto hull = convex_hull_2d(pts);
  for (std::size_t i : hull) face.vertices.push_back(vec2(pts[i].x(), pts[i].y()));
  if (face.vertices.empty() && !pts.empty()) face.vertices.push_back(vec2(pts[0].x(), pts[0].y()));
  return face;
}

bool barycentric(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                 const Eigen::Vector2d& x, double tol, std::array<double, 3>* w) {
  Eigen::Matrix2d m;
  m << b.x() - a.x(), c.x() - a.x(), b.y() - a.y(), c.y() - a.y();
  const double det = m.determinant();
  if (std::abs(det) <= 1e-300) return false;
  const Eigen::Vector2d st = m.inverse() * (x - a);
  (*w) = {1.0 - st.x() - st.y(), st.x(), st.y()};
  return std::all_of(w->begin(), w->end(), [tol](double v) { return v >= -tol; });
}

CaratheodoryCombo normalized(const Vec& x, std::vector<Vec> pts, std::vector<double> w) {
  CaratheodoryCombo combo{{}, {}, x};
  double total = 0.0;
  for (double& v : w) total += (v = std::max(v, 0.0));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (w[k] / total <= 0.0) continue;
    combo.points.push_back(pts[k]);
    combo.weights.push_back(w[k] / total);
  }
  return combo;
}

CaratheodoryCombo decompose_1d(const SampledFunction& f, const ConvexPiecewise& env,
                               const Vec& x, double touch_tol) {
  double left = -kInf;
  double right = kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fi = f.value(i);
    if (!std::isfinite(fi)) continue;
    const Vec xi = f.node(i);
    if (!touches(fi, env(xi), touch_tol)) continue;
    if (xi[0] <= x[0]) left = std::max(left, xi[0]);
    if (xi[0] >= x[0]) right = std::min(right, xi[0]);
  }
  if (!std::isfinite(left) || !std::isfinite(right)) {
    throw Error(ErrorKind::kDecompositionFailure,
                "no touching points bracket x = " + std::to_string(x[0]));
  }
  if (left == right) return CaratheodoryCombo{{vec1(left)}, {1.0}, x};
  const double lam = (x[0] - left) / (right - left);
  return normalized(x, {vec1(left), vec1(right)}, {1.0 - lam, lam});
}

CaratheodoryCombo decompose_2d(const SampledFunction& f, const ConvexPiecewise& env,
                               const Vec& x, double touch_tol) {
  const auto& g = env.two();
  const Eigen::Vector2d q(x[0], x[1]);
  const double ex = env(x);
  // Supporting planes of env at x.
  std::vector<const ConvexPiecewise2D::Facet*> active;
  for (const auto& fc : g.facets()) {
    if (std::abs(fc(q) - ex) <= touch_tol * std::max(1.0, std::abs(ex))) active.push_back(&fc);
  }
  if (active.empty()) {
    throw Error(ErrorKind::kDecompositionFailure, "no supporting facet at the query point");
  }
  std::vector<Eigen::Vector2d> cand;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double fi = f.value(i);
    if (!std::isfinite(fi)) continue;
    const Vec xi = f.node(i);
    const Eigen::Vector2d p(xi[0], xi[1]);
    if (!touches(fi, env(xi), touch_tol)) continue;
    const bool on_face = std::any_of(active.begin(), active.end(), [&](const auto* fc) {
      return std::abs((*fc)(p) - fi) <= touch_tol * std::max(1.0, std::abs(fi));
    });
    if (on_face) cand.push_back(p);
  }
  constexpr std::size_t kMaxCandidates = 48;
  std::sort(cand.begin(), cand.end(), [&](const auto& a, const auto& b) {
    return (a - q).squaredNorm() < (b - q).squaredNorm();
  });
  if (cand.size() > kMaxCandidates) cand.resize(kMaxCandidates);

  const double geo_tol = 1e-10;
  const double scale = 1.0 + q.lpNorm<Eigen::Infinity>();
  double best_diam = kInf;
  std::vector<Vec> best_pts;
  std::vector<double> best_w;
  const std::size_t n = cand.size();
  for (std::size_t i = 0; i < n; ++i) {
    if ((cand[i] - q).norm() <= geo_tol * scale) {
      return CaratheodoryCombo{{vec2(cand[i].x(), cand[i].y())}, {1.0}, x};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Eigen::Vector2d d = cand[j] - cand[i];
      const double len = d.norm();
      if (len >= best_diam || len == 0.0) continue;
      const double t = d.dot(q - cand[i]) / d.squaredNorm();
      const Eigen::Vector2d foot = cand[i] + t * d;
      if (t < -geo_tol || t > 1.0 + geo_tol || (foot - q).norm() > geo_tol * scale) continue;
      best_diam = len;
      best_pts = {vec2(cand[i].x(), cand[i].y()), vec2(cand[j].x(), cand[j].y())};
      best_w = {1.0 - t, t};
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = (cand[i] - cand[j]).norm();
      if (dij >= best_diam) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        const double diam = std::max({dij, (cand[i] - cand[k]).norm(), (cand[j] - cand[k]).norm()});
        if (diam >= best_diam) continue;
        std::array<double, 3> w{};
        if (!barycentric(cand[i], cand[j], cand[k], q, geo_tol, &w)) continue;
        best_diam = diam;
        best_pts = {vec2(cand[i].x(), cand[i].y()), vec2(cand[j].x(), cand[j].y()),
                    vec2(cand[k].x(), cand[k].y())};
        best_w = {w[0], w[1], w[2]};
      }
    }
  }
  if (best_pts.empty()) {
    throw Error(ErrorKind::kDecompositionFailure, "no touching simplex contains the query point");
  }
  return normalized(x, std::move(best_pts), std::move(best_w));
}

}  // namespace

Vec CaratheodoryCombo::combination() const {
  Vec acc = Vec::Zero(point.size());
  for (std::size_t k = 0; k < points.size(); ++k) acc += weights[k] * points[k];
  return acc;
}

bool touches(double f_value, double env_value, double touch_tol) {
  if (!std::isfinite(f_value) || !std::isfinite(env_value)) return false;
  return std::abs(f_value - env_value) <= touch_tol * std::max(1.0, std::abs(f_value));
}

ConvexPiecewise convex_envelope(const SampledFunction& f) {
  if (f.finite_count() < 2) {
    throw Error(ErrorKind::kDegenerateInput, "convex envelope needs at least two finite samples");
  }
  double scale = 1.0;
  for (double v : f.values()) {
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  }
  const double pin_tol = 1e-12 * scale;
  if (f.dim() == 1) {
    std::vector<Eigen::Vector2d> pts;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (std::isfinite(f.value(i))) pts.emplace_back(f.coordinate(0, i), f.value(i));
    }
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k : lower_chain(pts)) {
      x.push_back(pts[k].x());
      y.push_back(pts[k].y());
    }
    ConvexPiecewise1D g(std::move(x), std::move(y));
    // Nodes on the hull up to rounding report the sample itself.
    std::vector<double> px;
    std::vector<double> py;
    for (const auto& p : pts) {
      if (std::abs(g(p.x()) - p.y()) <= pin_tol) px.push_back(p.x()), py.push_back(p.y());
    }
    g.pin(std::move(px), std::move(py));
    return g;
  }
  std::vector<Eigen::Vector3d> lifted;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f.value(i))) continue;
    const Vec p = f.node(i);
    lifted.emplace_back(p[0], p[1], f.value(i));
  }
  ConvexPiecewise2D g = build_2d(lifted);
  std::sort(lifted.begin(), lifted.end(), [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  std::vector<Eigen::Vector2d> px;
  std::vector<double> pz;
  for (const auto& p : lifted) {
    const Eigen::Vector2d xy(p.x(), p.y());
    if (std::abs(g(xy) - p.z()) <= pin_tol) px.push_back(xy), pz.push_back(p.z());
  }
  g.pin(std::move(px), std::move(pz));
  return g;
}

SampledFunction resample(const ConvexPiecewise& g, const SampledFunction& like) {
  std::vector<double> values(like.size());
  for (std::size_t i = 0; i < like.size(); ++i) values[i] = g(like.node(i));
  return SampledFunction(like.box(), like.step(), std::move(values));
}

ConvexPiecewise legendre_conjugate(const ConvexPiecewise& g) {
  if (g.dim() == 1) return conjugate_1d(g.one());
  return conjugate_2d(g.two());
}

Box exposed_slope_box(const ConvexPiecewise& g) {
  if (g.dim() == 1) {
    const auto s = g.one().slopes();
    if (s.empty()) throw Error(ErrorKind::kDegenerateInput, "function has no affine piece");
    return {Interval{s.front(), s.back()}};
  }
  Box box(2, Interval{kInf, -kInf});
  for (const auto& f : g.two().facets()) {
    for (std::size_t a = 0; a < 2; ++a) {
      box[a].lo = std::min(box[a].lo, f.gradient[static_cast<Eigen::Index>(a)]);
      box[a].hi = std::max(box[a].hi, f.gradient[static_cast<Eigen::Index>(a)]);
    }
  }
  return box;
}

double default_slope_tol(const Vec& p) { return 1e-12 * (1.0 + p.lpNorm<Eigen::Infinity>()); }

Face subdifferential(const ConvexPiecewise& g, const Vec& p, double slope_tol) {
  const double tol = slope_tol < 0.0 ? default_slope_tol(p) : slope_tol;
  if (g.dim() == 1) {
    const auto& h = g.one();
    const auto x = h.breakpoints();
    const auto s = h.slopes();
    const auto first = std::lower_bound(s.begin(), s.end(), p[0] - tol);
    const auto last = std::upper_bound(s.begin(), s.end(), p[0] + tol);
    const auto k1 = static_cast<std::size_t>(std::distance(s.begin(), first));
    const auto k2 = static_cast<std::size_t>(std::distance(s.begin(), last));
    if (k2 > k1) return Face{p, {vec1(x[k1]), vec1(x[k2])}};
    return Face{p, {vec1(x[k1])}};
  }
  const auto& h = g.two();
  const Eigen::Vector2d q(p[0], p[1]);
  double best = -kInf;
  double reach = 0.0;
  for (const auto& v : h.vertices()) {
    best = std::max(best, q.x() * v.x() + q.y() * v.y() - v.z());
    reach = std::max({reach, std::abs(v.x()), std::abs(v.y())});
  }
  const double value_tol = tol * 2.0 * reach + 1e-12 * (1.0 + std::abs(best));
  std::vector<Eigen::Vector2d> pts;
  for (const auto& v : h.vertices()) {
    if (q.x() * v.x() + q.y() * v.y() - v.z() >= best - value_tol) pts.emplace_back(v.x(), v.y());
  }
  return polygon_face(p, std::move(pts));
}

Face gradient_face(const ConvexPiecewise& h, const Vec& x, double tol) {
  if (h.dim() == 1) {
    const auto& g = h.one();
    const double t = tol < 0.0 ? 1e-12 * (1.0 + std::abs(x[0])) : tol;
    const auto bx = g.breakpoints();
    const auto s = g.slopes();
    if (s.empty()) return Face{x, {vec1(0.0)}};
    const std::size_t k = g.locate(x[0]);
    double lo = s[k];
    double hi = s[k];
    if (std::abs(x[0] - bx[k]) <= t && k > 0) lo = s[k - 1];
    if (std::abs(x[0] - bx[k + 1]) <= t && k + 1 < s.size()) hi = s[k + 1];
    if (lo == hi) return Face{x, {vec1(lo)}};
    return Face{x, {vec1(lo), vec1(hi)}};
  }
  const auto& g = h.two();
  const Eigen::Vector2d q(x[0], x[1]);
  const double value = g(q);
  const double t = tol < 0.0 ? 1e-10 * (1.0 + std::abs(value)) : tol;
  std::vector<Eigen::Vector2d> grads;
  for (const auto& f : g.facets()) {
    if (std::abs(f(q) - value) <= t) grads.push_back(f.gradient);
  }
  return polygon_face(x, std::move(grads));
}

CaratheodoryCombo caratheodory_decompose(const SampledFunction& f, const ConvexPiecewise& env,
                                         const Vec& x, double touch_tol) {
  const double ex = env(x);
  if (!std::isfinite(ex)) {
    throw Error(ErrorKind::kDecompositionFailure, "point lies outside the envelope domain");
  }
  if (touches(f.interpolate(x), ex, touch_tol)) return CaratheodoryCombo{{x}, {1.0}, x};
  CaratheodoryCombo combo =
      f.dim() == 1 ? decompose_1d(f, env, x, touch_tol) : decompose_2d(f, env, x, touch_tol);
  double value = 0.0;
  for (std::size_t k = 0; k < combo.size(); ++k) value += combo.weights[k] * f.interpolate(combo.points[k]);
  if (std::abs(value - ex) > 1e-6 * (1.0 + std::abs(ex))) {
    throw Error(ErrorKind::kDecompositionFailure, "touching points do not reproduce the envelope value");
  }
  return combo;
}

}  // namespace ncv
