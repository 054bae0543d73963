#pragma once

#include "ncv/convex_analysis.hpp"
#include "ncv/growth.hpp"
#include "ncv/problem.hpp"
#include "ncv/recovery.hpp"
#include "ncv/relaxed.hpp"

#include <optional>
#include <vector>

namespace ncv {

/// Growth profile of f** with the shells, threshold and tail from `numerics`
/// and the problem.
GrowthProfile check_growth(const ProblemSpec& spec, const ConvexPiecewise& env,
                           const Numerics& numerics);

struct RelaxedStage {
  DualModel model;
  GrowthProfile growth;
  AccumulatedTerm acc;
  RelaxedSolution relaxed;
  Trajectory trajectory;
};

/// Envelope, growth check and relaxed solve. NoMinimizer errors carry the
/// growth verdict.
RelaxedStage solve_relaxed(const ProblemSpec& spec, const Numerics& numerics);

struct SolveResult {
  RelaxedStage stage;
  std::vector<DetachmentInterval> detachment;
  std::vector<CaratheodoryCombo> combos;
  Trajectory trajectory;
  SolveReport report;
};

/// Full pipeline: relaxed solve, chattering recovery and certificate. Throws
/// CertificateError (with the report) when the certificate fails.
SolveResult solve(const ProblemSpec& spec, const Numerics& numerics);

}  // namespace ncv
