#include "ncv/convex_analysis.hpp"
#include "ncv/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace ncv;

namespace {

double double_well(const Vec& x) { return (x[0] * x[0] - 1) * (x[0] * x[0] - 1); }

SampledFunction sample1(double lo, double hi, double step, double (*fn)(const Vec&)) {
  return SampledFunction::sample({Interval{lo, hi}}, {step}, fn);
}

// Random integrand: integer values in [0, 20] at every node, some nodes +inf.
SampledFunction random_integrand(std::mt19937_64& g, int nodes, bool holes) {
  std::vector<double> y(static_cast<std::size_t>(nodes));
  for (auto& v : y) v = oracle::uniform_int(g, 0, 20);
  if (holes) {
    for (int k = 0; k < nodes / 5; ++k) y[static_cast<std::size_t>(oracle::uniform_int(g, 1, nodes - 2))] = kInf;
  }
  return SampledFunction({Interval{-0.25 * (nodes - 1) / 2.0, 0.25 * (nodes - 1) / 2.0}}, {0.25}, y);
}

// Convex sample with non-decreasing integer slopes; step 0.5 keeps every
// chord value exactly representable.
SampledFunction random_convex(std::mt19937_64& g, int nodes) {
  std::vector<double> y(static_cast<std::size_t>(nodes));
  int slope = oracle::uniform_int(g, -10, -2);
  y[0] = oracle::uniform_int(g, 0, 10);
  for (std::size_t k = 1; k < y.size(); ++k) {
    y[k] = y[k - 1] + 0.5 * slope;
    slope += oracle::uniform_int(g, 0, 2);
  }
  return SampledFunction({Interval{0, 0.5 * (nodes - 1)}}, {0.5}, y);
}

std::vector<double> grid_x(const SampledFunction& f) {
  std::vector<double> x;
  for (std::size_t i = 0; i < f.size(); ++i) x.push_back(f.coordinate(0, i));
  return x;
}

std::vector<Vec> grid_nodes(const SampledFunction& f) {
  std::vector<Vec> x;
  for (std::size_t i = 0; i < f.size(); ++i) x.push_back(f.node(i));
  return x;
}

}  // namespace

TEST_CASE("double-well envelope breakpoints") {
  const auto f = sample1(-2, 2, 0.5, double_well);
  const auto env = convex_envelope(f);
  const auto& g = env.one();
  const std::vector<double> bx{-2, -1.5, -1, 1, 1.5, 2};
  const std::vector<double> by{9, 1.5625, 0, 0, 1.5625, 9};
  REQUIRE(g.breakpoints().size() == bx.size());
  for (std::size_t k = 0; k < bx.size(); ++k) {
    CHECK(g.breakpoints()[k] == bx[k]);
    CHECK(g.values()[k] == by[k]);
  }
  // Same kinks as the all-chords oracle.
  const auto kinks = oracle::brute_breakpoints(grid_x(f), f.values());
  REQUIRE(kinks.size() == bx.size());
  for (std::size_t k = 0; k < bx.size(); ++k) CHECK(f.coordinate(0, kinks[k]) == bx[k]);
  CHECK(env(vec1(0.0)) == 0.0);
  CHECK(f.interpolate(vec1(0.0)) == 1.0);
}

TEST_CASE("convex samples are a fixed point") {
  const auto f = sample1(-2, 2, 0.5, [](const Vec& x) { return x[0] * x[0]; });
  const auto env = convex_envelope(f);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(env(f.node(i)) == f.value(i));
  const auto again = convex_envelope(resample(env, f));
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(again(f.node(i)) == env(f.node(i)));
}

TEST_CASE("fewer than two finite samples is degenerate") {
  const SampledFunction f({Interval{0, 1}}, {0.5}, {kInf, 3.0, kInf});
  try {
    (void)convex_envelope(f);
    FAIL("expected DegenerateInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateInput);
  }
}

TEST_CASE("conjugate examples") {
  SUBCASE("half square is self-conjugate up to the grid step") {
    const double step = 0.01;
    const auto f = sample1(-2, 2, step, [](const Vec& x) { return 0.5 * x[0] * x[0]; });
    const auto conj = legendre_conjugate(convex_envelope(f));
    double worst = 0.0;
    for (double p = -1.9; p <= 1.9; p += 0.013) worst = std::max(worst, std::abs(conj(vec1(p)) - 0.5 * p * p));
    CHECK(worst <= step * step);
  }
  SUBCASE("double-well flat bottom dualizes to a kink at 0") {
    const auto env = convex_envelope(sample1(-2, 2, 0.5, double_well));
    const auto conj = legendre_conjugate(env);
    CHECK(std::abs(conj(vec1(0.0))) <= 1e-15);
    const Face face = subdifferential(env, vec1(0.0));
    CHECK(face.lower() == -1.0);
    CHECK(face.upper() == 1.0);
    const auto slopes = gradient_face(conj, vec1(0.0));
    CHECK(slopes.lower() == doctest::Approx(-1.0));
    CHECK(slopes.upper() == doctest::Approx(1.0));
  }
  SUBCASE("affine function on an interval") {
    const double s = 0.75;
    const auto f = SampledFunction::sample({Interval{-1, 3}}, {0.5}, [s](const Vec& x) { return s * (x[0] + 1); });
    const auto conj = legendre_conjugate(convex_envelope(f));
    // Stored on the slope 0.75 padded by 1 on each side.
    CHECK(conj.domain()[0].lo == -0.25);
    CHECK(conj.domain()[0].hi == 1.75);
    for (double p = -0.25; p <= 1.75; p += 0.125) {
      const double expect = std::max(p * -1.0 - 0.0, p * 3.0 - 4.0 * s);
      CHECK(conj(vec1(p)) == doctest::Approx(expect).epsilon(1e-12));
    }
    const auto bp = conj.one().breakpoints();
    CHECK(std::find(bp.begin(), bp.end(), s) != bp.end());
  }
}

TEST_CASE("subdifferential examples") {
  const auto env = convex_envelope(sample1(-2, 2, 0.5, double_well));
  const auto& g = env.one();
  // Largest chord slope of the envelope; any larger slope exposes x = 2.
  const double top = g.slopes().back();
  CHECK(top == doctest::Approx((9 - 1.5625) / 0.5));
  const Face beyond = subdifferential(env, vec1(20.0));
  CHECK(beyond.singleton());
  CHECK(beyond.lower() == 2.0);
  const Face at14 = subdifferential(env, vec1(14.0));
  CHECK(at14.singleton());
  CHECK(at14.lower() == 1.5);

  const auto sq = convex_envelope(sample1(-2, 2, 0.001, [](const Vec& x) { return x[0] * x[0]; }));
  const Face f2 = subdifferential(sq, vec1(2.0));
  CHECK(f2.lower() >= 1.0 - 0.001);
  CHECK(f2.upper() <= 1.0 + 0.001);
}

TEST_CASE("caratheodory examples") {
  const auto f = sample1(-2, 2, 0.5, double_well);
  const auto env = convex_envelope(f);
  const auto at0 = caratheodory_decompose(f, env, vec1(0.0));
  REQUIRE(at0.size() == 2);
  CHECK(at0.points[0][0] == -1.0);
  CHECK(at0.points[1][0] == 1.0);
  CHECK(at0.weights[0] == 0.5);
  CHECK(at0.weights[1] == 0.5);
  const auto at05 = caratheodory_decompose(f, env, vec1(0.5));
  REQUIRE(at05.size() == 2);
  CHECK(at05.weights[0] == 0.25);
  CHECK(at05.weights[1] == 0.75);

  const auto sq = sample1(-2, 2, 0.5, [](const Vec& x) { return x[0] * x[0]; });
  const auto senv = convex_envelope(sq);
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const auto c = caratheodory_decompose(sq, senv, sq.node(i));
    REQUIRE(c.size() == 1);
    CHECK(c.points[0][0] == sq.coordinate(0, i));
  }
  try {
    (void)caratheodory_decompose(f, env, vec1(2.5));
    FAIL("expected DecompositionFailure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDecompositionFailure);
  }
}

TEST_CASE("property: envelope domination is exact and matches the chord oracle") {
  auto g = oracle::rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto f = random_integrand(g, 41, trial % 2 == 1);
    const auto env = convex_envelope(f);
    const auto brute = oracle::brute_envelope(grid_x(f), f.values());
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!std::isfinite(f.value(i))) continue;
      CHECK(env(f.node(i)) <= f.value(i));
      CHECK(env(f.node(i)) == doctest::Approx(brute[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: idempotence on convex samples is exact") {
  auto g = oracle::rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_convex(g, oracle::uniform_int(g, 2, 60));
    const auto env = convex_envelope(f);
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(env(f.node(i)) == f.value(i));
    const auto twice = convex_envelope(resample(env, f));
    for (std::size_t i = 0; i < f.size(); ++i) REQUIRE(twice(f.node(i)) == env(f.node(i)));
  }
}

TEST_CASE("property: conjugate agrees with the sample maximum, Fenchel-Young, biconjugation") {
  auto g = oracle::rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_integrand(g, 33, trial % 3 == 0);
    const auto env = convex_envelope(f);
    const auto conj = legendre_conjugate(env);
    const auto nodes = grid_nodes(f);
    const Box xb = env.domain();
    const Box pb = conj.domain();
    int violations = 0;
    for (int k = 0; k < 2000; ++k) {
      const Vec x = vec1(oracle::uniform(g, xb[0].lo, xb[0].hi));
      const Vec p = vec1(oracle::uniform(g, pb[0].lo, pb[0].hi));
      if (env(x) + conj(p) < p.dot(x) - 1e-9) ++violations;
      if (k % 20 == 0) {
        CHECK(conj(p) == doctest::Approx(oracle::brute_conjugate(nodes, f.values(), p)).epsilon(1e-12));
      }
    }
    CHECK(violations == 0);
    const auto bi = legendre_conjugate(conj);
    const auto& e1 = env.one();
    for (std::size_t k = 0; k < e1.breakpoints().size(); ++k) {
      CHECK(std::abs(bi(vec1(e1.breakpoints()[k])) - e1.values()[k]) <= 1e-9);
    }
  }
}

TEST_CASE("property: faces are monotone and attain Fenchel-Young equality") {
  auto g = oracle::rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = random_integrand(g, 33, false);
    const auto env = convex_envelope(f);
    const auto conj = legendre_conjugate(env);
    const Box pb = exposed_slope_box(env);
    for (int k = 0; k < 200; ++k) {
      double p1 = oracle::uniform(g, pb[0].lo - 1, pb[0].hi + 1);
      double p2 = oracle::uniform(g, pb[0].lo - 1, pb[0].hi + 1);
      if (k % 4 == 0) p1 = env.one().slope(static_cast<std::size_t>(oracle::uniform_int(g, 0, static_cast<int>(env.one().piece_count()) - 1)));
      if (p1 > p2) std::swap(p1, p2);
      const Face a = subdifferential(env, vec1(p1));
      const Face b = subdifferential(env, vec1(p2));
      if (p1 < p2) CHECK(a.upper() <= b.lower());
      for (const auto& v : a.vertices) {
        CHECK(std::abs(env(v) + conj(vec1(p1)) - p1 * v[0]) <= 1e-9 * (1 + std::abs(p1 * v[0])));
      }
    }
  }
}

TEST_CASE("property: caratheodory combos satisfy their invariants") {
  auto g = oracle::rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_integrand(g, 41, trial % 2 == 0);
    const auto env = convex_envelope(f);
    const Box dom = env.domain();
    for (int k = 0; k < 50; ++k) {
      const Vec x = vec1(oracle::uniform(g, dom[0].lo, dom[0].hi));
      const auto c = caratheodory_decompose(f, env, x);
      REQUIRE(c.size() >= 1);
      CHECK(c.size() <= 3);
      double wsum = 0.0;
      double fsum = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        CHECK(c.weights[j] >= 0.0);
        wsum += c.weights[j];
        fsum += c.weights[j] * f.interpolate(c.points[j]);
        CHECK(std::abs(f.interpolate(c.points[j]) - env(c.points[j])) <= 1e-8);
      }
      CHECK(std::abs(wsum - 1.0) <= 1e-12);
      CHECK(std::abs(c.combination()[0] - x[0]) <= 1e-8);
      CHECK(std::abs(fsum - env(x)) <= 1e-8 * (1 + std::abs(env(x))));
    }
  }
}

TEST_CASE("property: stored slopes match central differences") {
  auto g = oracle::rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto env = convex_envelope(random_integrand(g, 41, false));
    const auto& e = env.one();
    for (std::size_t k = 0; k < e.piece_count(); ++k) {
      const double a = e.breakpoints()[k];
      const double b = e.breakpoints()[k + 1];
      const double mid = 0.5 * (a + b);
      const double h = 1e-4 * (b - a);
      const double fd = (env(vec1(mid + h)) - env(vec1(mid - h))) / (2 * h);
      CHECK(std::abs(fd - e.slope(k)) <= 1e-6 * std::max(1.0, std::abs(e.slope(k))));
    }
  }
}

namespace {

// 2D envelope value at x: minimum over all sample triangles, segments and
// points that contain x of the interpolated sample values.
double brute_envelope_2d(const std::vector<Vec>& pts, const std::vector<double>& y, const Vec& x) {
  double best = oracle::inf;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) continue;
    if ((pts[i] - x).norm() <= 1e-12) best = std::min(best, y[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!std::isfinite(y[j])) continue;
      const Vec d = pts[j] - pts[i];
      const double t = d.dot(x - pts[i]) / d.squaredNorm();
      if (t >= -1e-12 && t <= 1 + 1e-12 && (pts[i] + t * d - x).norm() <= 1e-12) {
        best = std::min(best, (1 - t) * y[i] + t * y[j]);
      }
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!std::isfinite(y[k])) continue;
        const double det = (pts[j][0] - pts[i][0]) * (pts[k][1] - pts[i][1]) -
                           (pts[k][0] - pts[i][0]) * (pts[j][1] - pts[i][1]);
        if (std::abs(det) < 1e-14) continue;
        const double s = ((x[0] - pts[i][0]) * (pts[k][1] - pts[i][1]) -
                          (pts[k][0] - pts[i][0]) * (x[1] - pts[i][1])) / det;
        const double t = ((pts[j][0] - pts[i][0]) * (x[1] - pts[i][1]) -
                          (x[0] - pts[i][0]) * (pts[j][1] - pts[i][1])) / det;
        if (s < -1e-12 || t < -1e-12 || s + t > 1 + 1e-12) continue;
        best = std::min(best, (1 - s - t) * y[i] + s * y[j] + t * y[k]);
      }
    }
  }
  return best;
}

double well_2d(const Vec& x) { return (x[0] * x[0] - 1) * (x[0] * x[0] - 1) + x[1] * x[1]; }

}  // namespace

TEST_CASE("two-dimensional envelope, conjugate and faces") {
  const auto f = SampledFunction::sample({Interval{-1.5, 1.5}, Interval{-1, 1}}, {0.5, 0.5}, well_2d);
  const auto env = convex_envelope(f);
  const auto nodes = grid_nodes(f);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(env(nodes[i]) <= f.value(i) + 1e-12);
    CHECK(env(nodes[i]) == doctest::Approx(brute_envelope_2d(nodes, f.values(), nodes[i])).epsilon(1e-10));
  }
  CHECK(std::abs(env(vec2(0, 0))) <= 1e-12);
  CHECK(env(vec2(0, 0.5)) == doctest::Approx(0.25));

  const auto conj = legendre_conjugate(env);
  auto g = oracle::rng(21);
  const Box xb = env.domain();
  const Box pb = conj.domain();
  int violations = 0;
  for (int k = 0; k < 5000; ++k) {
    const Vec x = vec2(oracle::uniform(g, xb[0].lo, xb[0].hi), oracle::uniform(g, xb[1].lo, xb[1].hi));
    const Vec p = vec2(oracle::uniform(g, pb[0].lo, pb[0].hi), oracle::uniform(g, pb[1].lo, pb[1].hi));
    const double ex = env(x);
    if (std::isfinite(ex) && ex + conj(p) < p.dot(x) - 1e-9) ++violations;
    if (k % 50 == 0) {
      CHECK(conj(p) == doctest::Approx(oracle::brute_conjugate(nodes, f.values(), p)).epsilon(1e-10));
    }
  }
  CHECK(violations == 0);
  const auto bi = legendre_conjugate(conj);
  for (const auto& v : env.two().vertices()) CHECK(std::abs(bi(vec2(v.x(), v.y())) - v.z()) <= 1e-9);

  // Slope (0, 0) exposes the flat segment between the wells.
  const Face face = subdifferential(env, vec2(0, 0));
  double xmin = 10;
  double xmax = -10;
  for (const auto& v : face.vertices) {
    xmin = std::min(xmin, v[0]);
    xmax = std::max(xmax, v[0]);
    CHECK(std::abs(v[1]) <= 1e-12);
  }
  CHECK(xmin == -1.0);
  CHECK(xmax == 1.0);

  const auto c = caratheodory_decompose(f, env, vec2(0.25, 0.5));
  CHECK(c.size() <= 4);
  CHECK((c.combination() - vec2(0.25, 0.5)).norm() <= 1e-8);
  double fsum = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) fsum += c.weights[j] * f.interpolate(c.points[j]);
  CHECK(fsum == doctest::Approx(env(vec2(0.25, 0.5))).epsilon(1e-8));
}
