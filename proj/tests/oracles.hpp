#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library beyond its plain data types.

#include "ncv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double inf = std::numeric_limits<double>::infinity();

// Lower envelope of the points (x_i, y_i) at every x_i, by minimizing over all
// chords that straddle x_i. O(n^3).
inline std::vector<double> brute_envelope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> env(n, inf);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) continue;
    env[i] = y[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      if (!std::isfinite(y[j])) continue;
      for (std::size_t k = i; k < n; ++k) {
        if (!std::isfinite(y[k]) || j == k) continue;
        const double w = (x[i] - x[j]) / (x[k] - x[j]);
        env[i] = std::min(env[i], (1.0 - w) * y[j] + w * y[k]);
      }
    }
  }
  return env;
}

// Sample points that are kinks of the brute-force envelope: those touching
// it where the left and right chord slopes differ.
inline std::vector<std::size_t> brute_breakpoints(const std::vector<double>& x,
                                                  const std::vector<double>& y) {
  const auto env = brute_envelope(x, y);
  std::vector<std::size_t> dom;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(env[i])) dom.push_back(i);
  }
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < dom.size(); ++a) {
    const std::size_t i = dom[a];
    if (a == 0 || a + 1 == dom.size()) {
      out.push_back(i);
      continue;
    }
    const std::size_t l = dom[a - 1];
    const std::size_t r = dom[a + 1];
    const double sl = (env[i] - env[l]) / (x[i] - x[l]);
    const double sr = (env[r] - env[i]) / (x[r] - x[i]);
    if (sr - sl > 1e-12 * (1.0 + std::abs(sl) + std::abs(sr))) out.push_back(i);
  }
  return out;
}

// sup_i [p.x_i - y_i] over the finite samples.
inline double brute_conjugate(const std::vector<ncv::Vec>& x, const std::vector<double>& y,
                              const ncv::Vec& p) {
  double best = -inf;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isfinite(y[i])) best = std::max(best, p.dot(x[i]) - y[i]);
  }
  return best;
}

// Minimizer of int_0^T [alpha * u + (u')^2] with u(0) = u0, u(T) = u1:
// u'' = alpha / 2, so u = u0 + b t + alpha t^2 / 4.
struct QuadraticDrift {
  double alpha, T, u0, u1;
  double b() const { return (u1 - u0) / T - alpha * T / 4.0; }
  double u(double t) const { return u0 + b() * t + alpha * t * t / 4.0; }
  double v(double t) const { return b() + alpha * t / 2.0; }
  double cost() const {
    // int alpha u + int v^2, both polynomial in t.
    const double bb = b();
    const double lin = alpha * (u0 * T + bb * T * T / 2.0 + alpha * T * T * T / 12.0);
    const double quad = bb * bb * T + bb * alpha * T * T / 2.0 + alpha * alpha * T * T * T / 12.0;
    return lin + quad;
  }
};

// Exhaustive search over every velocity sequence (tiny grids only).
inline double enumerate_paths(int steps, const std::vector<double>& levels,
                              const std::function<double(int, double)>& stage, double dt,
                              double delta, double tol) {
  const auto L = levels.size();
  std::size_t total = 1;
  for (int k = 0; k < steps; ++k) total *= L;
  double best = inf;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    double disp = 0.0;
    double cost = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double v = levels[c % L];
      c /= L;
      disp += dt * v;
      cost += stage(k, v);
    }
    if (std::abs(disp - delta) <= tol) best = std::min(best, cost);
  }
  return best;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline int uniform_int(std::mt19937_64& g, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(g);
}

}  // namespace oracle
