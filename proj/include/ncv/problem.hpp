#pragma once

#include "ncv/geometry.hpp"
#include "ncv/sampled_function.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ncv {

/// Coefficient t -> a(t) in R^m of the linear term, either piecewise linear
/// through uniform samples on [0, T] or a closed form.
class LinearTerm {
 public:
  static LinearTerm zero(int dim);
  static LinearTerm constant(Vec value);
  /// `samples[k]` holds component k at t_j = j * T / (n - 1), n >= 2.
  static LinearTerm sampled(double horizon, std::vector<std::vector<double>> samples);
  static LinearTerm closed_form(int dim, std::function<Vec(double)> fn);

  Vec operator()(double t) const;
  int dim() const { return dim_; }
  bool is_zero() const { return zero_; }
  /// Sample count per component (0 for closed forms).
  std::size_t sample_count() const;

 private:
  int dim_ = 1;
  bool zero_ = false;
  double horizon_ = 0.0;
  std::vector<std::vector<double>> samples_;
  std::function<Vec(double)> fn_;
};

struct ProblemSpec {
  double horizon = 1.0;
  Vec u0;
  Vec u1;
  LinearTerm a;
  SampledFunction f;
  std::function<double(const Vec&)> tail;  // optional closed form of f beyond the box

  int dim() const { return f.dim(); }
  Vec delta() const { return u1 - u0; }
  /// Throws InvalidInput on T <= 0, mismatched dimensions or too few samples.
  void validate() const;
};

struct Numerics {
  int nodes = 1001;              // quadrature nodes of the relaxed solve
  int n_chatter = 16;            // equal pieces per detachment interval
  double tol = 1e-6;
  std::vector<double> shells;    // empty: default_shells(env)
  std::optional<double> threshold;
  int min_decrease_shells = 3;
  std::optional<double> tol_detach;
  std::optional<double> tol_cert;
  std::optional<double> tol_gap;
  int dp_time_steps = 200;
  int dp_velocity_levels = 401;
};

}  // namespace ncv
