#pragma once

#include "ncv/convex_piecewise.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace ncv {

enum class Verdict { kInClassF, kNotInClassF, kInconclusive };

std::string_view to_string(Verdict v);

struct GrowthShell {
  double radius = 0.0;        // inner radius of the shell
  double outer = 0.0;         // outer radius (exclusive, except for the last shell)
  double g_max = 0.0;         // max of f** - x.grad f** over pieces meeting the shell
  double cross_check = 0.0;   // same maximum computed as max of -f*(grad f**)
  bool empty = false;         // no differentiability point in the shell
  bool from_tail = false;     // evaluated from a closed-form tail beyond the box
};

struct GrowthProfile {
  std::vector<GrowthShell> shells;
  Verdict verdict = Verdict::kInconclusive;
  double divergence_slope = 0.0;  // least-squares slope of g_max against radius over the tail
  double max_cross_check_error = 0.0;
  double envelope_range = 0.0;    // max - min of f** over its breakpoints/vertices
};

struct ClassifyOptions {
  std::optional<double> threshold;  // default: first value - 0.1 * envelope_range
  int min_decrease_shells = 3;
  double flat_tol = 1e-6;           // relative to 1 + envelope_range
};

/// Radii 0 = r_0 < r_1 < ... splitting [0, R] into `count` equal shells,
/// R being the largest |x| over the domain box of `env`.
std::vector<double> default_shells(const ConvexPiecewise& env, int count = 8);

/// Evaluates, shell by shell, the maximum of f**(x) - x.grad f**(x) over the
/// affine pieces of `env` meeting {r_i <= |x| < r_{i+1}} (last shell closed at
/// the domain boundary), alongside the conjugate form -f*(grad f**).
/// `tail`, when given, is a closed form of f valid beyond the box; it adds
/// shells at radii R * 2^k, k = 1..tail_shells.
GrowthProfile growth_profile(const ConvexPiecewise& env, const std::vector<double>& shells,
                             const std::function<double(const Vec&)>& tail = {},
                             int tail_shells = 4);

/// InClassF iff the last `min_decrease_shells` non-empty values decrease
/// strictly and the final one is below the threshold; NotInClassF iff those
/// values are constant within tolerance; Inconclusive otherwise.
Verdict classify_class_f(const GrowthProfile& profile, const ClassifyOptions& options = {});

inline Verdict classify_class_f(const GrowthProfile& profile, double threshold,
                                int min_decrease_shells) {
  ClassifyOptions options;
  options.threshold = threshold;
  options.min_decrease_shells = min_decrease_shells;
  return classify_class_f(profile, options);
}

}  // namespace ncv
