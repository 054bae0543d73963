#include "ncv/relaxed.hpp"

#include "ncv/convex_analysis.hpp"
#include "ncv/error.hpp"
#include "ncv/hull.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ncv {

double AccumulatedTerm::cell_begin(std::size_t i) const {
  return i == 0 ? s.front() : 0.5 * (s[i - 1] + s[i]);
}

double AccumulatedTerm::cell_end(std::size_t i) const {
  return i + 1 == s.size() ? s.back() : 0.5 * (s[i] + s[i + 1]);
}

AccumulatedTerm accumulate(const ProblemSpec& spec, int nodes) {
  if (nodes < 2) throw Error(ErrorKind::kInvalidInput, "need at least 2 quadrature nodes");
  const auto n = static_cast<std::size_t>(nodes);
  const double T = spec.horizon;
  const double h = T / static_cast<double>(n - 1);
  AccumulatedTerm acc;
  acc.s.resize(n);
  acc.weights.assign(n, h);
  acc.weights.front() = acc.weights.back() = 0.5 * h;
  for (std::size_t i = 0; i < n; ++i) acc.s[i] = i + 1 == n ? T : static_cast<double>(i) * h;

  const int m = spec.dim();
  acc.B.assign(n, Vec::Zero(m));
  if (!spec.a.is_zero()) {
    std::vector<Vec> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = spec.a(acc.s[i]);
    for (std::size_t i = n - 1; i-- > 0;) {
      acc.B[i] = acc.B[i + 1] + 0.5 * (acc.s[i + 1] - acc.s[i]) * (a[i] + a[i + 1]);
    }
  }
  acc.offset = acc.B.front().dot(spec.u0);
  return acc;
}

DualModel DualModel::from_envelope(const ConvexPiecewise& env) {
  return DualModel{env, legendre_conjugate(env), exposed_slope_box(env)};
}

namespace {

double inf_norm(const Vec& x) { return x.lpNorm<Eigen::Infinity>(); }

double max_b_norm(const AccumulatedTerm& acc) {
  double r = 0.0;
  for (const auto& b : acc.B) r = std::max(r, inf_norm(b));
  return r;
}

[[noreturn]] void no_minimizer(const DualOptions& options, const std::string& what) {
  std::string msg = what;
  if (options.verdict) msg += " (growth verdict: " + std::string(to_string(*options.verdict)) + ")";
  throw Error(ErrorKind::kNoMinimizer, msg);
}

// Range of c along `axis` keeping every c - B(s) inside the slope box.
Interval multiplier_range(const DualModel& model, const AccumulatedTerm& acc, int axis) {
  double bmin = kInf;
  double bmax = -kInf;
  for (const auto& b : acc.B) {
    bmin = std::min(bmin, b[axis]);
    bmax = std::max(bmax, b[axis]);
  }
  const Interval& d = model.domain[static_cast<std::size_t>(axis)];
  return {d.lo + bmax, d.hi + bmin};
}

std::vector<Face> faces_at(const DualModel& model, const AccumulatedTerm& acc, const Vec& c,
                           double tol) {
  std::vector<Face> faces;
  faces.reserve(acc.size());
  for (const auto& b : acc.B) faces.push_back(subdifferential(model.envelope, c - b, tol));
  return faces;
}

struct Sums {
  double lo = 0.0;
  double hi = 0.0;
};

Sums axis_sums(const std::vector<Face>& faces, const AccumulatedTerm& acc, int axis) {
  Sums out;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& v : faces[i].vertices) {
      lo = std::min(lo, v[axis]);
      hi = std::max(hi, v[axis]);
    }
    out.lo += acc.weights[i] * lo;
    out.hi += acc.weights[i] * hi;
  }
  return out;
}

// Sum set P = sum_i w_i face_i (m = 2) through its support points: every
// vertex of P is sum_i w_i argmax_{y in face_i} d.y for a direction d strictly
// inside a sector between consecutive edge normals of the faces.
struct SumSet {
  std::vector<Eigen::Vector2d> directions;  // one per polygon vertex
  std::vector<Eigen::Vector2d> polygon;     // counter-clockwise
};

std::size_t support_index(const Face& face, const Eigen::Vector2d& d) {
  std::size_t best = 0;
  double value = -kInf;
  for (std::size_t k = 0; k < face.vertices.size(); ++k) {
    const double s = d.x() * face.vertices[k][0] + d.y() * face.vertices[k][1];
    if (s > value) {
      value = s;
      best = k;
    }
  }
  return best;
}

SumSet sum_set(const std::vector<Face>& faces, const AccumulatedTerm& acc) {
  std::vector<double> angles;
  for (const auto& f : faces) {
    const std::size_t k = f.vertices.size();
    if (k < 2) continue;
    for (std::size_t j = 0; j < k; ++j) {
      const Vec e = f.vertices[(j + 1) % k] - f.vertices[j];
      const double a = std::atan2(-e[0], e[1]);
      angles.push_back(a);
      angles.push_back(a > 0.0 ? a - std::numbers::pi : a + std::numbers::pi);
    }
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end(),
                           [](double a, double b) { return b - a <= 1e-13; }),
               angles.end());

  std::vector<Eigen::Vector2d> dirs;
  if (angles.empty()) {
    dirs.emplace_back(1.0, 0.0);
  } else {
    for (std::size_t k = 0; k < angles.size(); ++k) {
      const double next = k + 1 < angles.size() ? angles[k + 1] : angles.front() + 2.0 * std::numbers::pi;
      const double mid = 0.5 * (angles[k] + next);
      dirs.emplace_back(std::cos(mid), std::sin(mid));
    }
  }
  std::vector<Eigen::Vector2d> pts;
  for (const auto& d : dirs) {
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const Vec& y = faces[i].vertices[support_index(faces[i], d)];
      sum += acc.weights[i] * Eigen::Vector2d(y[0], y[1]);
    }
    pts.push_back(sum);
  }
  SumSet out;
  for (std::size_t k : convex_hull_2d(pts)) {
    out.directions.push_back(dirs[k]);
    out.polygon.push_back(pts[k]);
  }
  return out;
}

struct PolygonPoint {
  Eigen::Vector2d q;
  std::vector<std::pair<std::size_t, double>> weights;  // over polygon vertices
};

PolygonPoint on_segment(const std::vector<Eigen::Vector2d>& p, std::size_t a, std::size_t b,
                        const Eigen::Vector2d& x) {
  const Eigen::Vector2d d = p[b] - p[a];
  const double len = d.squaredNorm();
  const double t = len > 0.0 ? std::clamp((x - p[a]).dot(d) / len, 0.0, 1.0) : 0.0;
  return {p[a] + t * d, {{a, 1.0 - t}, {b, t}}};
}

PolygonPoint closest_point(const std::vector<Eigen::Vector2d>& p, const Eigen::Vector2d& x) {
  if (p.size() == 1) return {p[0], {{0, 1.0}}};
  if (p.size() == 2) return on_segment(p, 0, 1, x);
  double scale = 1.0;
  for (const auto& v : p) scale = std::max(scale, v.lpNorm<Eigen::Infinity>());
  const double eps = 1e-14 * scale * scale;
  for (std::size_t j = 1; j + 1 < p.size(); ++j) {
    Eigen::Matrix2d m;
    m << p[j].x() - p[0].x(), p[j + 1].x() - p[0].x(), p[j].y() - p[0].y(), p[j + 1].y() - p[0].y();
    const double det = m.determinant();
    if (std::abs(det) <= eps) continue;
    const Eigen::Vector2d st = m.inverse() * (x - p[0]);
    const double w0 = 1.0 - st.x() - st.y();
    if (w0 >= -1e-12 && st.x() >= -1e-12 && st.y() >= -1e-12) {
      const double a = std::max(w0, 0.0);
      const double b = std::max(st.x(), 0.0);
      const double c = std::max(st.y(), 0.0);
      const double t = a + b + c;
      return {x, {{0, a / t}, {j, b / t}, {j + 1, c / t}}};
    }
  }
  PolygonPoint best = on_segment(p, 0, 1, x);
  for (std::size_t j = 1; j < p.size(); ++j) {
    PolygonPoint cand = on_segment(p, j, (j + 1) % p.size(), x);
    if ((cand.q - x).squaredNorm() < (best.q - x).squaredNorm()) best = cand;
  }
  return best;
}

// x-range of the polygon on the horizontal line y = level.
std::optional<Interval> slice(const std::vector<Eigen::Vector2d>& p, double level, double tol) {
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const auto& a = p[j];
    const auto& b = p[(j + 1) % p.size()];
    if (std::abs(a.y() - level) <= tol) {
      lo = std::min(lo, a.x());
      hi = std::max(hi, a.x());
    }
    if ((a.y() - level) * (b.y() - level) < 0.0) {
      const double x = a.x() + (level - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (lo > hi) return std::nullopt;
  return Interval{lo, hi};
}

struct AxisRoot {
  double c = 0.0;
  double tol = 0.0;  // extra face tolerance (bracket width)
  int iterations = 0;
  bool contained = false;
};

// Monotone set-valued root-find of target in [F_lo(c), F_hi(c)] along one
// axis, with the other coordinate of `c` fixed.
AxisRoot bisect_axis(const DualModel& model, const AccumulatedTerm& acc, Vec c, int axis,
                     double target, double base_tol, int max_iterations, bool clamp,
                     const DualOptions& options) {
  const Interval range = multiplier_range(model, acc, axis);
  double lo = range.lo;
  double hi = range.hi;
  const double rtol = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
  if (lo > hi) {
    if (lo - hi > rtol) {
      std::ostringstream os;
      os << "dual domain is empty: c must lie in [" << lo << ", " << hi
         << "], so c - B(s) cannot stay within the slopes of the envelope";
      no_minimizer(options, os.str());
    }
    lo = hi = 0.5 * (lo + hi);
  }
  const double eps = 1e-12 * (1.0 + std::abs(target));
  auto sums = [&](double x) {
    c[axis] = x;
    return axis_sums(faces_at(model, acc, c, base_tol), acc, axis);
  };
  const Sums at_lo = sums(lo);
  if (at_lo.lo > target + eps) {
    if (clamp) return {lo, 0.0, 0, false};
    std::ostringstream os;
    os << "displacement " << target << " is below every attainable mean velocity (minimum "
       << at_lo.lo << ") inside the dual domain";
    no_minimizer(options, os.str());
  }
  if (at_lo.hi >= target - eps) return {lo, 0.0, 0, true};
  const Sums at_hi = sums(hi);
  if (at_hi.hi < target - eps) {
    if (clamp) return {hi, 0.0, 0, false};
    std::ostringstream os;
    os << "displacement " << target << " exceeds every attainable mean velocity (maximum "
       << at_hi.hi << ") inside the dual domain";
    no_minimizer(options, os.str());
  }
  if (at_hi.lo <= target + eps) return {hi, 0.0, 0, true};
  int it = 0;
  while (it < max_iterations) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++it;
    const Sums s = sums(mid);
    if (s.lo <= target + eps && s.hi >= target - eps) return {mid, 0.0, it, true};
    if (s.hi < target - eps) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), hi - lo, it, true};
}

}  // namespace

double dual_value(const DualModel& model, const AccumulatedTerm& acc, const Vec& delta,
                  const Vec& c) {
  double integral = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    const Vec p = c - acc.B[i];
    const double tol = 1e-10 * (1.0 + inf_norm(p));
    if (!box_contains(model.domain, p, tol)) {
      std::ostringstream os;
      os << "c - B(s) leaves the slope box at s = " << acc.s[i];
      throw Error(ErrorKind::kDualDomainExceeded, os.str());
    }
    integral += acc.weights[i] * model.conjugate(p);
  }
  return c.dot(delta) - integral;
}

DualSolution maximize_dual(const DualModel& model, const AccumulatedTerm& acc, const Vec& delta,
                           const DualOptions& options) {
  const int m = model.envelope.dim();
  if (delta.size() != m) throw Error(ErrorKind::kInvalidInput, "displacement dimension mismatch");
  DualSolution out;
  if (m == 1) {
    Vec c = Vec::Zero(1);
    const double base = 1e-12 * (1.0 + max_b_norm(acc) +
                                 std::max(std::abs(model.domain[0].lo), std::abs(model.domain[0].hi)));
    const AxisRoot r =
        bisect_axis(model, acc, c, 0, delta[0], base, options.max_iterations, false, options);
    out.c = vec1(r.c);
    out.face_tol = base + r.tol;
    out.iterations = r.iterations;
    out.dual_value = dual_value(model, acc, delta, out.c);
    return out;
  }

  const double base = 1e-12 * (1.0 + max_b_norm(acc) +
                               std::max({std::abs(model.domain[0].lo), std::abs(model.domain[0].hi),
                                         std::abs(model.domain[1].lo), std::abs(model.domain[1].hi)}));
  const double eps = 1e-12 * (1.0 + inf_norm(delta));
  int iterations = 0;
  struct Probe {
    Vec c;
    double tol;
    Interval x;
  };
  // Maximizes over c_1 at fixed c_0 and reports the x-range of the sum set
  // on the line y = delta_1 (the superdifferential of the marginal, shifted).
  auto probe = [&](double c0) {
    Vec c = vec2(c0, 0.0);
    const AxisRoot r =
        bisect_axis(model, acc, c, 1, delta[1], base, options.max_iterations, true, options);
    iterations += r.iterations;
    c[1] = r.c;
    const double tol = base + r.tol;
    const SumSet set = sum_set(faces_at(model, acc, c, tol), acc);
    auto x = slice(set.polygon, delta[1], eps);
    if (!x) {
      const PolygonPoint q = closest_point(set.polygon, Eigen::Vector2d(delta[0], delta[1]));
      x = Interval{q.q.x(), q.q.x()};
    }
    return Probe{c, tol, *x};
  };

  const Interval range = multiplier_range(model, acc, 0);
  double lo = range.lo;
  double hi = range.hi;
  if (lo > hi) {
    if (lo - hi > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi))) {
      no_minimizer(options, "dual domain is empty along the first coordinate");
    }
    lo = hi = 0.5 * (lo + hi);
  }
  auto contains = [&](const Probe& p) {
    return p.x.lo <= delta[0] + eps && p.x.hi >= delta[0] - eps;
  };
  Probe best = probe(lo);
  if (best.x.lo > delta[0] + eps) no_minimizer(options, "displacement outside the attainable set");
  double extra = 0.0;
  if (!contains(best)) {
    best = probe(hi);
    if (best.x.hi < delta[0] - eps) no_minimizer(options, "displacement outside the attainable set");
    if (!contains(best)) {
      bool found = false;
      for (int it = 0; it < options.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        best = probe(mid);
        if (contains(best)) {
          found = true;
          break;
        }
        if (best.x.hi < delta[0] - eps) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      if (!found) {
        best = probe(0.5 * (lo + hi));
        extra = hi - lo;
      }
    }
  }
  out.c = best.c;
  out.face_tol = best.tol + extra;
  const SumSet set = sum_set(faces_at(model, acc, out.c, out.face_tol), acc);
  const PolygonPoint q = closest_point(set.polygon, Eigen::Vector2d(delta[0], delta[1]));
  const double residual = (q.q - Eigen::Vector2d(delta[0], delta[1])).norm();
  if (residual > 1e-8 * (1.0 + inf_norm(delta))) {
    std::ostringstream os;
    os << "dual ascent stalled with supergradient residual " << residual;
    no_minimizer(options, os.str());
  }
  out.iterations = iterations;
  out.dual_value = dual_value(model, acc, delta, out.c);
  return out;
}

RelaxedSolution primal_selection(const DualModel& model, const AccumulatedTerm& acc,
                                 const DualSolution& dual, const Vec& delta) {
  const int m = model.envelope.dim();
  const std::size_t n = acc.size();
  const std::vector<Face> faces = faces_at(model, acc, dual.c, dual.face_tol);
  RelaxedSolution rel;
  rel.c = dual.c;
  rel.face_tol = dual.face_tol;
  rel.iterations = dual.iterations;
  rel.v.resize(n);

  if (m == 1) {
    const Sums s = axis_sums(faces, acc, 0);
    double theta = 0.0;
    if (s.hi > s.lo) {
      theta = (delta[0] - s.lo) / (s.hi - s.lo);
      if (theta < -1e-9 || theta > 1.0 + 1e-9) {
        std::ostringstream os;
        os << "no global fraction reaches the displacement (theta = " << theta << ")";
        throw Error(ErrorKind::kInfeasibleSelection, os.str());
      }
      theta = std::clamp(theta, 0.0, 1.0);
    }
    rel.theta = theta;
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = faces[i].lower();
      const double hi = faces[i].upper();
      rel.v[i] = vec1(faces[i].singleton() ? lo : lo + theta * (hi - lo));
    }
  } else {
    const SumSet set = sum_set(faces, acc);
    const PolygonPoint q = closest_point(set.polygon, Eigen::Vector2d(delta[0], delta[1]));
    for (std::size_t i = 0; i < n; ++i) {
      Vec v = Vec::Zero(2);
      for (const auto& [k, w] : q.weights) {
        if (w == 0.0) continue;
        v += w * faces[i].vertices[support_index(faces[i], set.directions[k])];
      }
      rel.v[i] = v;
    }
  }

  Vec total = Vec::Zero(m);
  double primal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += acc.weights[i] * rel.v[i];
    primal += acc.weights[i] * (acc.B[i].dot(rel.v[i]) + model.envelope(rel.v[i]));
  }
  rel.constraint_residual = inf_norm(total - delta);
  if (rel.constraint_residual > 1e-8 * (1.0 + inf_norm(delta))) {
    std::ostringstream os;
    os << "selection misses the displacement by " << rel.constraint_residual;
    throw Error(ErrorKind::kInfeasibleSelection, os.str());
  }
  rel.relaxed_cost = acc.offset + primal;
  rel.dual_value = acc.offset + dual.dual_value;

  for (std::size_t i = 0; i < n;) {
    if (faces[i].singleton()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && faces[j + 1].vertices == faces[i].vertices) ++j;
    rel.multivalued_segments.push_back({acc.cell_begin(i), acc.cell_end(j), i, j, faces[i]});
    i = j + 1;
  }
  return rel;
}

}  // namespace ncv
