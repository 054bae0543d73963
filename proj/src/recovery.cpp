#include "ncv/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ncv {

namespace {

double inf_norm(const Vec& x) { return x.lpNorm<Eigen::Infinity>(); }

void integrate(Trajectory& traj, const Vec& u0) {
  traj.u.assign(traj.t.size(), u0);
  for (std::size_t k = 0; k < traj.v.size(); ++k) {
    traj.u[k + 1] = traj.u[k] + (traj.t[k + 1] - traj.t[k]) * traj.v[k];
  }
}

}  // namespace

Vec Trajectory::u_at(double time) const {
  if (time <= t.front()) return u.front();
  if (time >= t.back()) return u.back();
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const auto k = static_cast<std::size_t>(std::distance(t.begin(), it)) - 1;
  const double len = t[k + 1] - t[k];
  if (len <= 0.0) return u[k];
  const double w = (time - t[k]) / len;
  return (1.0 - w) * u[k] + w * u[k + 1];
}

void evaluate_costs(Trajectory& traj, const ProblemSpec& spec, const ConvexPiecewise& env) {
  double linear = 0.0;
  double with_f = 0.0;
  double with_env = 0.0;
  if (!spec.a.is_zero()) {
    double prev = spec.a(traj.t.front()).dot(traj.u.front());
    for (std::size_t k = 0; k + 1 < traj.t.size(); ++k) {
      const double next = spec.a(traj.t[k + 1]).dot(traj.u[k + 1]);
      linear += 0.5 * (traj.t[k + 1] - traj.t[k]) * (prev + next);
      prev = next;
    }
  }
  for (std::size_t k = 0; k < traj.v.size(); ++k) {
    const double dt = traj.t[k + 1] - traj.t[k];
    with_f += dt * spec.f.interpolate(traj.v[k]);
    with_env += dt * env(traj.v[k]);
  }
  traj.cost_f = linear + with_f;
  traj.cost_env = linear + with_env;
}

Trajectory relaxed_trajectory(const ProblemSpec& spec, const AccumulatedTerm& acc,
                              const RelaxedSolution& rel, const ConvexPiecewise& env) {
  Trajectory traj;
  const std::size_t n = acc.size();
  traj.t.reserve(n + 1);
  traj.t.push_back(acc.cell_begin(0));
  for (std::size_t i = 0; i < n; ++i) traj.t.push_back(acc.cell_end(i));
  traj.v = rel.v;
  integrate(traj, spec.u0);
  evaluate_costs(traj, spec, env);
  return traj;
}

double default_tol_detach(const SampledFunction& f, double tol) {
  double lo = kInf;
  double hi = -kInf;
  for (double y : f.values()) {
    if (!std::isfinite(y)) continue;
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  return tol * (1.0 + (hi - lo));
}

std::vector<DetachmentInterval> detachment_set(const AccumulatedTerm& acc,
                                               const RelaxedSolution& rel,
                                               const SampledFunction& f,
                                               const ConvexPiecewise& env, double tol_detach) {
  std::vector<DetachmentInterval> out;
  const std::size_t n = rel.v.size();
  std::vector<double> excess(n);
  for (std::size_t i = 0; i < n; ++i) excess[i] = f.interpolate(rel.v[i]) - env(rel.v[i]);
  for (std::size_t i = 0; i < n;) {
    if (!(excess[i] > tol_detach)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && excess[j + 1] > tol_detach && rel.v[j + 1] == rel.v[i]) ++j;
    out.push_back({acc.cell_begin(i), acc.cell_end(j), i, j, rel.v[i], excess[i]});
    i = j + 1;
  }
  return out;
}

Trajectory chatter(const ProblemSpec& spec, const AccumulatedTerm& acc, const RelaxedSolution& rel,
                   const std::vector<DetachmentInterval>& intervals,
                   const std::vector<CaratheodoryCombo>& combos, const ConvexPiecewise& env,
                   int n_chatter) {
  if (combos.size() != intervals.size()) {
    throw Error(ErrorKind::kComboMismatch, "one combo per detachment interval is required");
  }
  if (n_chatter < 1) throw Error(ErrorKind::kInvalidInput, "n_chatter must be >= 1");
  Trajectory traj;
  traj.t.push_back(acc.cell_begin(0));
  const std::size_t n = rel.v.size();
  std::size_t next = 0;
  for (std::size_t i = 0; i < n;) {
    if (next < intervals.size() && intervals[next].first == i) {
      const DetachmentInterval& d = intervals[next];
      const CaratheodoryCombo& combo = combos[next];
      const double scale = 1e-9 * (1.0 + inf_norm(d.v));
      if (combo.size() == 0 || inf_norm(combo.combination() - d.v) > scale ||
          inf_norm(combo.point - d.v) > scale) {
        std::ostringstream os;
        os << "combo does not represent v on [" << d.t0 << ", " << d.t1 << "]";
        throw Error(ErrorKind::kComboMismatch, os.str());
      }
      std::vector<std::size_t> order(combo.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return combo.weights[a] > combo.weights[b];
      });
      const double len = (d.t1 - d.t0) / n_chatter;
      for (int k = 0; k < n_chatter; ++k) {
        const double start = d.t0 + k * len;
        const double end = k + 1 == n_chatter ? d.t1 : d.t0 + (k + 1) * len;
        double acc_w = 0.0;
        for (std::size_t j = 0; j < order.size(); ++j) {
          acc_w += combo.weights[order[j]];
          const double stop = j + 1 == order.size() ? end : start + acc_w * (end - start);
          if (stop <= traj.t.back()) continue;
          traj.t.push_back(stop);
          traj.v.push_back(combo.points[order[j]]);
        }
      }
      i = d.last + 1;
      ++next;
      continue;
    }
    traj.t.push_back(acc.cell_end(i));
    traj.v.push_back(rel.v[i]);
    ++i;
  }
  integrate(traj, spec.u0);
  evaluate_costs(traj, spec, env);
  return traj;
}

double sup_distance(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.t.size(); ++k) d = std::max(d, inf_norm(a.u[k] - b.u_at(a.t[k])));
  for (std::size_t k = 0; k < b.t.size(); ++k) d = std::max(d, inf_norm(b.u[k] - a.u_at(b.t[k])));
  return d;
}

SolveReport assemble(const ProblemSpec& spec, const RelaxedSolution& rel, const Trajectory& traj,
                     const AssembleOptions& options) {
  SolveReport r;
  r.c = rel.c;
  r.relaxed_cost = rel.relaxed_cost;
  r.dual_value = rel.dual_value;
  r.cost_f = traj.cost_f;
  r.cost_env = traj.cost_env;
  r.gap = traj.cost_f - rel.relaxed_cost;
  r.duality_gap = rel.relaxed_cost - rel.dual_value;
  r.endpoint_residual = inf_norm(traj.u.back() - spec.u1);
  r.tol_cert = options.tol_cert.value_or(1e-4 * (1.0 + std::abs(rel.relaxed_cost)));
  r.tol_gap = options.tol_gap.value_or(1e-5 * (1.0 + std::abs(rel.dual_value)));
  r.theta = rel.theta;
  r.verdict = options.verdict;
  r.is_minimizer = r.gap <= r.tol_cert && r.duality_gap <= r.tol_gap;
  if (!r.is_minimizer) {
    std::ostringstream os;
    os << "trajectory cost " << r.cost_f << " exceeds the relaxed cost " << r.relaxed_cost
       << " by " << r.gap << " (tol " << r.tol_cert << "), duality gap " << r.duality_gap
       << " (tol " << r.tol_gap << ")";
    throw CertificateError(os.str(), r);
  }
  return r;
}

}  // namespace ncv
