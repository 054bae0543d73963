#include "ncv/solver.hpp"

#include "ncv/error.hpp"

namespace ncv {

GrowthProfile check_growth(const ProblemSpec& spec, const ConvexPiecewise& env,
                           const Numerics& numerics) {
  const std::vector<double> shells =
      numerics.shells.empty() ? default_shells(env) : numerics.shells;
  GrowthProfile profile = growth_profile(env, shells, spec.tail);
  ClassifyOptions options;
  options.threshold = numerics.threshold;
  options.min_decrease_shells = numerics.min_decrease_shells;
  profile.verdict = classify_class_f(profile, options);
  return profile;
}

RelaxedStage solve_relaxed(const ProblemSpec& spec, const Numerics& numerics) {
  spec.validate();
  const ConvexPiecewise env = convex_envelope(spec.f);
  GrowthProfile growth = check_growth(spec, env, numerics);
  DualModel model = DualModel::from_envelope(env);
  AccumulatedTerm acc = accumulate(spec, numerics.nodes);
  DualOptions options;
  options.verdict = growth.verdict;
  DualSolution dual;
  try {
    dual = maximize_dual(model, acc, spec.delta(), options);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kDualDomainExceeded) throw;
    throw Error(ErrorKind::kNoMinimizer, e.detail() + " (growth verdict: " +
                                             std::string(to_string(growth.verdict)) + ")");
  }
  RelaxedSolution relaxed = primal_selection(model, acc, dual, spec.delta());
  Trajectory traj = relaxed_trajectory(spec, acc, relaxed, env);
  return {std::move(model), std::move(growth), std::move(acc), std::move(relaxed),
          std::move(traj)};
}

SolveResult solve(const ProblemSpec& spec, const Numerics& numerics) {
  RelaxedStage stage = solve_relaxed(spec, numerics);
  const ConvexPiecewise& env = stage.model.envelope;
  const double tol_detach = numerics.tol_detach.value_or(default_tol_detach(spec.f, numerics.tol));
  std::vector<DetachmentInterval> detachment =
      detachment_set(stage.acc, stage.relaxed, spec.f, env, tol_detach);
  std::vector<CaratheodoryCombo> combos;
  combos.reserve(detachment.size());
  for (const auto& d : detachment) combos.push_back(caratheodory_decompose(spec.f, env, d.v));
  Trajectory traj =
      chatter(spec, stage.acc, stage.relaxed, detachment, combos, env, numerics.n_chatter);

  AssembleOptions options;
  options.verdict = stage.growth.verdict;
  options.tol_cert = numerics.tol_cert;
  options.tol_gap = numerics.tol_gap;
  const double deviation = sup_distance(traj, stage.trajectory);
  SolveReport report;
  try {
    report = assemble(spec, stage.relaxed, traj, options);
  } catch (const CertificateError& e) {
    SolveReport r = e.report();
    r.detachment_intervals = detachment.size();
    r.sup_deviation = deviation;
    throw CertificateError(e.detail(), r);
  }
  report.detachment_intervals = detachment.size();
  report.sup_deviation = deviation;
  return {std::move(stage), std::move(detachment), std::move(combos), std::move(traj),
          std::move(report)};
}

}  // namespace ncv
