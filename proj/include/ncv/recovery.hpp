#pragma once

#include "ncv/convex_analysis.hpp"
#include "ncv/convex_piecewise.hpp"
#include "ncv/error.hpp"
#include "ncv/growth.hpp"
#include "ncv/problem.hpp"
#include "ncv/relaxed.hpp"
#include "ncv/sampled_function.hpp"

#include <optional>
#include <vector>

namespace ncv {

/// Piecewise-linear u on a non-uniform grid; v[k] is the constant slope on
/// [t[k], t[k+1]].
struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> u;
  std::vector<Vec> v;
  double cost_f = 0.0;    // int a.u + f(v), f by grid interpolation
  double cost_env = 0.0;  // int a.u + f**(v)

  std::size_t intervals() const { return v.size(); }
  /// Linear interpolation of u (clamped to [0, T]).
  Vec u_at(double time) const;
};

/// Trapezoid for a.u on the nodes, exact sums for the piecewise-constant v.
void evaluate_costs(Trajectory& traj, const ProblemSpec& spec, const ConvexPiecewise& env);

/// v constant on the dual cell of each quadrature node, u its running integral.
Trajectory relaxed_trajectory(const ProblemSpec& spec, const AccumulatedTerm& acc,
                              const RelaxedSolution& rel, const ConvexPiecewise& env);

struct DetachmentInterval {
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t first = 0;  // node range [first, last]
  std::size_t last = 0;
  Vec v;                  // common relaxed velocity on the interval
  double excess = 0.0;    // f(v) - f**(v)
};

/// tol * (1 + max f - min f) over the finite samples.
double default_tol_detach(const SampledFunction& f, double tol = 1e-6);

/// Maximal runs of nodes with f(v) - f**(v) > tol_detach and a common v.
std::vector<DetachmentInterval> detachment_set(const AccumulatedTerm& acc,
                                               const RelaxedSolution& rel,
                                               const SampledFunction& f,
                                               const ConvexPiecewise& env, double tol_detach);

/// Replaces v on every detachment interval by the combo's points: the
/// interval is cut into n_chatter equal pieces and each piece into
/// sub-intervals of lengths proportional to the weights, largest first.
/// Throws ComboMismatch when a combo does not represent its interval's v.
Trajectory chatter(const ProblemSpec& spec, const AccumulatedTerm& acc, const RelaxedSolution& rel,
                   const std::vector<DetachmentInterval>& intervals,
                   const std::vector<CaratheodoryCombo>& combos, const ConvexPiecewise& env,
                   int n_chatter);

/// max_t |u_a(t) - u_b(t)| over the union of both node sets.
double sup_distance(const Trajectory& a, const Trajectory& b);

struct SolveReport {
  Vec c;
  double relaxed_cost = 0.0;
  double dual_value = 0.0;
  double cost_f = 0.0;
  double cost_env = 0.0;
  double gap = 0.0;           // cost_f - relaxed_cost
  double duality_gap = 0.0;   // relaxed_cost - dual_value
  double endpoint_residual = 0.0;
  double tol_cert = 0.0;
  double tol_gap = 0.0;
  double theta = 0.0;
  std::size_t detachment_intervals = 0;
  double sup_deviation = 0.0;  // ||u - u_relaxed||_inf
  Verdict verdict = Verdict::kInconclusive;
  bool is_minimizer = false;
};

/// Carries the full report of a run whose certificate failed.
class CertificateError : public Error {
 public:
  CertificateError(const std::string& message, SolveReport report)
      : Error(ErrorKind::kCertificateFailure, message), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

struct AssembleOptions {
  Verdict verdict = Verdict::kInconclusive;
  std::optional<double> tol_cert;  // default 1e-4 (1 + |relaxed_cost|)
  std::optional<double> tol_gap;   // default 1e-5 (1 + |dual_value|)
};

/// Builds the report and the certificate; throws CertificateError when the
/// trajectory does not match the relaxed/dual values.
SolveReport assemble(const ProblemSpec& spec, const RelaxedSolution& rel, const Trajectory& traj,
                     const AssembleOptions& options = {});

}  // namespace ncv
