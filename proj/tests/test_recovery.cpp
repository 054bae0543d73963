#include "ncv/convex_analysis.hpp"
#include "ncv/error.hpp"
#include "ncv/recovery.hpp"
#include "ncv/relaxed.hpp"
#include "ncv/solver.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ncv;

namespace {

double well(const Vec& x) { return (x[0] * x[0] - 1) * (x[0] * x[0] - 1); }

ProblemSpec well_spec(double horizon, double delta, double step = 0.25) {
  return ProblemSpec{horizon, vec1(0.0), vec1(delta), LinearTerm::zero(1),
                     SampledFunction::sample({Interval{-2, 2}}, {step}, well), {}};
}

struct Pipeline {
  ConvexPiecewise env;
  AccumulatedTerm acc;
  RelaxedSolution rel;
  std::vector<DetachmentInterval> detach;
  std::vector<CaratheodoryCombo> combos;
};

Pipeline run(const ProblemSpec& spec, int nodes) {
  auto env = convex_envelope(spec.f);
  const auto model = DualModel::from_envelope(env);
  auto acc = accumulate(spec, nodes);
  auto rel = primal_selection(model, acc, maximize_dual(model, acc, spec.delta()), spec.delta());
  auto detach = detachment_set(acc, rel, spec.f, env, default_tol_detach(spec.f));
  std::vector<CaratheodoryCombo> combos;
  for (const auto& d : detach) combos.push_back(caratheodory_decompose(spec.f, env, d.v));
  return {std::move(env), std::move(acc), std::move(rel), std::move(detach), std::move(combos)};
}

double sup_norm_u(const Trajectory& t) {
  double m = 0.0;
  for (const auto& u : t.u) m = std::max(m, std::abs(u[0]));
  return m;
}

}  // namespace

TEST_CASE("detachment set of the double well") {
  const auto spec = well_spec(1.0, 0.0);
  const auto p = run(spec, 101);
  CHECK(default_tol_detach(spec.f) == doctest::Approx(1e-6 * 10));
  REQUIRE(p.detach.size() == 1);
  CHECK(p.detach[0].t0 == 0.0);
  CHECK(p.detach[0].t1 == 1.0);
  CHECK(p.detach[0].first == 0);
  CHECK(p.detach[0].last == 100);
  CHECK(p.detach[0].v[0] == 0.0);
  CHECK(p.detach[0].excess == 1.0);
}

TEST_CASE("no detachment where f is convex") {
  const ProblemSpec spec{1.0, vec1(0.0), vec1(0.0), LinearTerm::constant(vec1(1.0)),
                         SampledFunction::sample({Interval{-2, 2}}, {0.01}, [](const Vec& x) { return x[0] * x[0]; }),
                         {}};
  const auto p = run(spec, 201);
  CHECK(p.detach.empty());
}

TEST_CASE("chattering with one and four pieces") {
  const auto spec = well_spec(1.0, 0.0);
  const auto p = run(spec, 101);
  const auto one = chatter(spec, p.acc, p.rel, p.detach, p.combos, p.env, 1);
  REQUIRE(one.intervals() == 2);
  CHECK(one.v[0][0] == -1.0);
  CHECK(one.v[1][0] == 1.0);
  CHECK(one.t[1] == 0.5);
  CHECK(one.u.back()[0] == 0.0);
  CHECK(sup_norm_u(one) == 0.5);

  const auto four = chatter(spec, p.acc, p.rel, p.detach, p.combos, p.env, 4);
  CHECK(four.intervals() == 8);
  CHECK(sup_norm_u(four) == 0.125);
  CHECK(four.cost_f == 0.0);
  CHECK(four.cost_env == 0.0);
  const auto relaxed = relaxed_trajectory(spec, p.acc, p.rel, p.env);
  CHECK(relaxed.cost_f == doctest::Approx(1.0));
  CHECK(relaxed.cost_env == 0.0);
  CHECK(sup_distance(four, relaxed) == 0.125);
  CHECK(sup_distance(relaxed, four) == 0.125);
}

TEST_CASE("combos must represent their interval") {
  const auto spec = well_spec(1.0, 0.0);
  auto p = run(spec, 101);
  p.combos[0] = caratheodory_decompose(spec.f, p.env, vec1(0.5));
  try {
    (void)chatter(spec, p.acc, p.rel, p.detach, p.combos, p.env, 4);
    FAIL("expected ComboMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kComboMismatch);
  }
  p.combos.clear();
  CHECK_THROWS_AS(chatter(spec, p.acc, p.rel, p.detach, p.combos, p.env, 4), Error);
}

TEST_CASE("assembled report and certificate") {
  const auto spec = well_spec(1.0, 0.5);
  const auto p = run(spec, 101);
  const auto traj = chatter(spec, p.acc, p.rel, p.detach, p.combos, p.env, 16);
  const auto r = assemble(spec, p.rel, traj, {Verdict::kInClassF, {}, {}});
  CHECK(r.is_minimizer);
  CHECK(std::abs(r.gap) <= 1e-12);
  CHECK(r.theta == doctest::Approx(0.75));
  CHECK(r.endpoint_residual <= 1e-12);
  CHECK(r.tol_cert == doctest::Approx(1e-4));
  CHECK(r.verdict == Verdict::kInClassF);

  const auto relaxed = relaxed_trajectory(spec, p.acc, p.rel, p.env);
  try {
    (void)assemble(spec, p.rel, relaxed);
    FAIL("expected CertificateError");
  } catch (const CertificateError& e) {
    CHECK(e.kind() == ErrorKind::kCertificateFailure);
    CHECK_FALSE(e.report().is_minimizer);
    CHECK(e.report().gap == doctest::Approx(well(vec1(0.5))));
  }
}

TEST_CASE("property: chattering keeps the endpoints, the cost and the 1/(2n) deviation") {
  auto g = oracle::rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const double horizon = oracle::uniform(g, 0.5, 1.5);
    const double delta = oracle::uniform(g, -0.95, 0.95) * horizon;
    const auto spec = well_spec(horizon, delta, 0.125);
    Numerics numerics;
    numerics.nodes = 201;
    numerics.n_chatter = oracle::uniform_int(g, 1, 32);
    const auto result = solve(spec, numerics);
    const auto& traj = result.trajectory;
    CHECK(traj.t.front() == 0.0);
    CHECK(traj.t.back() == doctest::Approx(horizon).epsilon(1e-15));
    CHECK(traj.u.front()[0] == 0.0);
    CHECK(std::abs(traj.u.back()[0] - delta) <= 1e-12);
    CHECK(result.report.is_minimizer);
    CHECK(std::abs(result.report.gap) <= 1e-9);
    CHECK(result.report.sup_deviation <= horizon / (2.0 * numerics.n_chatter) + 1e-12);
    for (const auto& v : traj.v) CHECK(std::abs(std::abs(v[0]) - 1.0) <= 1e-12);
  }
}

namespace {

// Sextic bowl minus a tent on [-2, 2] with a random piecewise-linear drift.
ProblemSpec random_nonconvex(std::mt19937_64& g) {
  const double c6 = oracle::uniform(g, 0.5, 1.5);
  const double c4 = oracle::uniform(g, -1.5, 0.5);
  const double c2 = oracle::uniform(g, -2, 0.5);
  const double height = oracle::uniform(g, 0.5, 2);
  const double center = oracle::uniform(g, -1, 1);
  auto f = [=](const Vec& v) {
    const double x = v[0];
    return ((c6 * x * x + c4) * x * x + c2) * x * x - height * std::max(0.0, 1 - std::abs(x - center) / 0.4);
  };
  const double horizon = oracle::uniform(g, 0.5, 1.5);
  std::vector<double> a;
  for (int k = 0; k < 4; ++k) a.push_back(oracle::uniform(g, -1, 1));
  const double u0 = oracle::uniform(g, -1, 1);
  return ProblemSpec{horizon, vec1(u0), vec1(u0 + horizon * oracle::uniform(g, -1, 1)),
                     LinearTerm::sampled(horizon, {a}), SampledFunction::sample({Interval{-2, 2}}, {0.02}, f), {}};
}

}  // namespace

TEST_CASE("property: chattering preserves the displacement and cost of every detachment interval") {
  auto g = oracle::rng(42);
  int with_detachment = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto spec = random_nonconvex(g);
    const auto p = run(spec, 401);
    const auto traj = chatter(spec, p.acc, p.rel, p.detach, p.combos, p.env, 8);
    with_detachment += p.detach.empty() ? 0 : 1;
    for (std::size_t k = 0; k < p.detach.size(); ++k) {
      const auto& d = p.detach[k];
      double disp = 0.0;
      double cost = 0.0;
      for (std::size_t j = 0; j < traj.intervals(); ++j) {
        if (traj.t[j] >= d.t0 && traj.t[j + 1] <= d.t1) {
          disp += (traj.t[j + 1] - traj.t[j]) * traj.v[j][0];
          cost += (traj.t[j + 1] - traj.t[j]) * spec.f.interpolate(traj.v[j]);
        }
      }
      const double len = d.t1 - d.t0;
      CHECK(std::abs(disp - len * d.v[0]) <= 1e-12 * (1 + len));
      CHECK(std::abs(cost - len * p.env(d.v)) <= static_cast<double>(p.combos[k].size()) * kTouchTol * len);
    }
    for (std::size_t j = 0; j < traj.intervals(); ++j) {
      const Vec step = traj.u[j] + (traj.t[j + 1] - traj.t[j]) * traj.v[j];
      CHECK(std::abs(traj.u[j + 1][0] - step[0]) <= 1e-14 * (1 + std::abs(step[0])));
    }
    CHECK(traj.cost_f >= traj.cost_env - 1e-9);
    CHECK(std::abs(traj.u.back()[0] - spec.u1[0]) <= 1e-8 * (1 + std::abs(spec.u1[0])));
  }
  CHECK(with_detachment >= 10);
}

TEST_CASE("property: certified cost lies within tolerance of the dual bound") {
  auto g = oracle::rng(43);
  int failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto spec = random_nonconvex(g);
    Numerics numerics;
    numerics.nodes = 401;
    try {
      const auto r = solve(spec, numerics).report;
      CHECK(r.cost_f <= r.dual_value + r.tol_cert + r.tol_gap);
      CHECK(r.duality_gap <= r.tol_gap);
    } catch (const CertificateError& e) {
      // A failed certificate is reported, never returned as a minimizer.
      ++failures;
      const auto& r = e.report();
      CHECK_FALSE(r.is_minimizer);
      CHECK((r.gap > r.tol_cert || r.duality_gap > r.tol_gap));
    }
  }
  CHECK(failures == 0);
}
