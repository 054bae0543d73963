#pragma once

#include "ncv/problem.hpp"
#include "ncv/recovery.hpp"

#include <vector>

namespace ncv {

/// Velocity levels are uniform over the box of f; the displacement state is
/// the running sum of level indices, so every reachable displacement is exact.
struct DPGrid {
  int time_steps = 200;
  int velocity_levels = 401;
  int quadrature_substeps = 16;  // per time step, for B and its step integrals
};

struct DPResult {
  double cost = 0.0;           // min of B(0).u0 + sum_k [beta_k.v_k + dt f(v_k)]
  double allowance = 0.0;      // Lipschitz slack for hitting the displacement cell
  double displacement = 0.0;   // attained u(T) - u(0)
  double cell = 0.0;           // displacement resolution dt * dv
  std::vector<int> levels;     // chosen velocity index per step
  Trajectory trajectory;
};

/// Exhaustive minimization over piecewise-constant v on the grid (m = 1).
/// Ties go to the smallest velocity index. Throws InfeasibleGrid when the
/// displacement cell of u1 - u0 cannot be reached.
DPResult dp_minimize(const ProblemSpec& spec, const DPGrid& grid = {});

}  // namespace ncv
