#pragma once

#include "ncv/convex_piecewise.hpp"
#include "ncv/geometry.hpp"
#include "ncv/growth.hpp"
#include "ncv/problem.hpp"

#include <optional>
#include <vector>

namespace ncv {

/// B(s) = int_s^T a(t) dt on a uniform grid, by the trapezoid rule.
struct AccumulatedTerm {
  std::vector<double> s;
  std::vector<double> weights;  // trapezoid weights; also the dual cell lengths
  std::vector<Vec> B;
  double offset = 0.0;          // B(0).u0, the constant part of int a.u

  std::size_t size() const { return s.size(); }
  double horizon() const { return s.back(); }
  /// Cell [cell_begin(i), cell_end(i)] owned by node i: 0, midpoints, T.
  double cell_begin(std::size_t i) const;
  double cell_end(std::size_t i) const;
};

AccumulatedTerm accumulate(const ProblemSpec& spec, int nodes);

/// f**, f* and the slope box on which f* is backed by data of f**.
struct DualModel {
  ConvexPiecewise envelope;
  ConvexPiecewise conjugate;
  Box domain;

  static DualModel from_envelope(const ConvexPiecewise& env);
};

/// h(c) = c.delta - int f*(c - B(s)) ds (trapezoid). Throws DualDomainExceeded
/// when some c - B(s) leaves the slope box.
double dual_value(const DualModel& model, const AccumulatedTerm& acc, const Vec& delta,
                  const Vec& c);

struct DualOptions {
  std::optional<Verdict> verdict;  // quoted in NoMinimizer messages
  int max_iterations = 200;
};

struct DualSolution {
  Vec c;
  double face_tol = 0.0;   // slope tolerance under which the faces contain delta
  double dual_value = 0.0; // h(c), without the offset
  int iterations = 0;
};

/// Maximizes h. m = 1: bisection on the monotone set-valued map
/// c -> int d f*(c - B). m = 2: the same bisection nested over both
/// coordinates. Throws NoMinimizer when no multiplier meets delta inside the
/// dual domain.
DualSolution maximize_dual(const DualModel& model, const AccumulatedTerm& acc, const Vec& delta,
                           const DualOptions& options = {});

struct MultivaluedSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  std::size_t first = 0;  // node range [first, last]
  std::size_t last = 0;
  Face face;
};

struct RelaxedSolution {
  Vec c;
  std::vector<Vec> v;  // one value per quadrature node
  std::vector<MultivaluedSegment> multivalued_segments;
  double relaxed_cost = 0.0;  // includes the offset
  double dual_value = 0.0;    // includes the offset
  double theta = 0.0;         // global face fraction (m = 1)
  double face_tol = 0.0;
  double constraint_residual = 0.0;
  int iterations = 0;

  double duality_gap() const { return relaxed_cost - dual_value; }
};

/// v(s) in d f*(c - B(s)); on multivalued nodes one global convex combination
/// of the face extremes so that int v = delta.
RelaxedSolution primal_selection(const DualModel& model, const AccumulatedTerm& acc,
                                 const DualSolution& dual, const Vec& delta);

}  // namespace ncv
