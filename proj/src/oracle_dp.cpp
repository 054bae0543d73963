#include "ncv/oracle_dp.hpp"

#include "ncv/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace ncv {

DPResult dp_minimize(const ProblemSpec& spec, const DPGrid& grid) {
  spec.validate();
  if (spec.dim() != 1) throw Error(ErrorKind::kInvalidInput, "the DP oracle handles m = 1 only");
  if (grid.time_steps < 1 || grid.velocity_levels < 2 || grid.quadrature_substeps < 1) {
    throw Error(ErrorKind::kInvalidInput, "DP grid needs >= 1 step, >= 2 levels, >= 1 substep");
  }
  if (grid.velocity_levels > 65535) throw Error(ErrorKind::kInvalidInput, "too many velocity levels");
  const auto nt = static_cast<std::size_t>(grid.time_steps);
  const auto nl = static_cast<std::size_t>(grid.velocity_levels);
  const double T = spec.horizon;
  const double dt = T / static_cast<double>(nt);
  const Interval box = spec.f.box()[0];
  const double dv = box.width() / static_cast<double>(nl - 1);

  std::vector<double> level(nl);
  std::vector<double> fv(nl);
  for (std::size_t j = 0; j < nl; ++j) {
    level[j] = j + 1 == nl ? box.hi : box.lo + static_cast<double>(j) * dv;
    fv[j] = spec.f.interpolate(vec1(level[j]));
  }

  // B(t) = int_t^T a on a fine trapezoid grid, then beta_k = int over step k of B.
  const auto sub = static_cast<std::size_t>(grid.quadrature_substeps);
  const std::size_t fine = nt * sub;
  const double h = T / static_cast<double>(fine);
  std::vector<double> a(fine + 1);
  for (std::size_t i = 0; i <= fine; ++i) a[i] = spec.a(i == fine ? T : static_cast<double>(i) * h)[0];
  std::vector<double> B(fine + 1, 0.0);
  for (std::size_t i = fine; i-- > 0;) B[i] = B[i + 1] + 0.5 * h * (a[i] + a[i + 1]);
  std::vector<double> beta(nt, 0.0);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t i = k * sub; i < (k + 1) * sub; ++i) beta[k] += 0.5 * h * (B[i] + B[i + 1]);
  }
  const double bmax = std::max(std::abs(*std::min_element(B.begin(), B.end())),
                               std::abs(*std::max_element(B.begin(), B.end())));

  const double delta = spec.u1[0] - spec.u0[0];
  const double cell = dt * dv;
  const double target_real = (delta - T * box.lo) / cell;
  const auto smax = static_cast<std::int64_t>(nt * (nl - 1));
  const auto target = static_cast<std::int64_t>(std::llround(target_real));
  if (!std::isfinite(target_real) || target < 0 || target > smax) {
    std::ostringstream os;
    os << "displacement " << delta << " is outside [" << T * box.lo << ", " << T * box.hi
       << "] reachable with velocities in the box";
    throw Error(ErrorKind::kInfeasibleGrid, os.str());
  }
  const auto S = static_cast<std::size_t>(target);
  const std::size_t width = nl - 1;

  // Forward min-plus sweep; arg[k][s] is the level entering state s at step k + 1.
  std::vector<double> cur(S + 1, kInf);
  std::vector<double> nxt(S + 1, kInf);
  std::vector<std::uint16_t> arg(nt * (S + 1), 0);
  cur[0] = 0.0;
  for (std::size_t k = 0; k < nt; ++k) {
    const std::size_t lo = S > (nt - k) * width ? S - (nt - k) * width : 0;
    const std::size_t hi = std::min(k * width, S);
    std::fill(nxt.begin(), nxt.end(), kInf);
    std::uint16_t* out = arg.data() + k * (S + 1);
    for (std::size_t j = 0; j < nl; ++j) {
      if (!std::isfinite(fv[j])) continue;
      const double c = beta[k] * level[j] + dt * fv[j];
      const std::size_t top = std::min(hi, S - std::min(S, j));
      if (j > S) break;
      const auto code = static_cast<std::uint16_t>(j);
      for (std::size_t s = lo; s <= top; ++s) {
        const double cand = cur[s] + c;
        const bool better = cand < nxt[s + j];
        nxt[s + j] = better ? cand : nxt[s + j];
        out[s + j] = better ? code : out[s + j];
      }
    }
    std::swap(cur, nxt);
  }
  if (!std::isfinite(cur[S])) {
    throw Error(ErrorKind::kInfeasibleGrid, "no finite-cost path reaches the displacement cell");
  }

  DPResult r;
  r.cell = cell;
  r.levels.assign(nt, 0);
  std::size_t s = S;
  for (std::size_t k = nt; k-- > 0;) {
    const std::uint16_t j = arg[k * (S + 1) + s];
    r.levels[k] = j;
    s -= j;
  }
  const double offset = B[0] * spec.u0[0];
  r.cost = cur[S] + offset;
  r.displacement = T * box.lo + cell * static_cast<double>(S);

  double lip = 0.0;
  for (std::size_t j = 0; j + 1 < nl; ++j) {
    if (std::isfinite(fv[j]) && std::isfinite(fv[j + 1])) {
      lip = std::max(lip, std::abs(fv[j + 1] - fv[j]) / dv);
    }
  }
  r.allowance = (lip + bmax) * std::abs(r.displacement - delta);

  Trajectory& traj = r.trajectory;
  traj.t.resize(nt + 1);
  for (std::size_t k = 0; k <= nt; ++k) traj.t[k] = k == nt ? T : static_cast<double>(k) * dt;
  for (std::size_t k = 0; k < nt; ++k) traj.v.push_back(vec1(level[static_cast<std::size_t>(r.levels[k])]));
  traj.u.assign(nt + 1, spec.u0);
  for (std::size_t k = 0; k < nt; ++k) traj.u[k + 1] = traj.u[k] + dt * traj.v[k];
  traj.cost_f = r.cost;
  traj.cost_env = r.cost;
  return r;
}

}  // namespace ncv
