#include "ncv/problem.hpp"

#include "ncv/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncv {

LinearTerm LinearTerm::zero(int dim) {
  LinearTerm a;
  a.dim_ = dim;
  a.zero_ = true;
  return a;
}

LinearTerm LinearTerm::constant(Vec value) {
  LinearTerm a;
  a.dim_ = static_cast<int>(value.size());
  a.zero_ = value.isZero(0.0);
  a.fn_ = [value](double) { return value; };
  return a;
}

LinearTerm LinearTerm::sampled(double horizon, std::vector<std::vector<double>> samples) {
  if (samples.empty() || samples.size() > 2) {
    throw Error(ErrorKind::kInvalidInput, "linear term needs 1 or 2 components");
  }
  if (!(horizon > 0.0)) throw Error(ErrorKind::kInvalidInput, "linear term horizon must be > 0");
  for (const auto& c : samples) {
    if (c.size() < 2 || c.size() != samples.front().size()) {
      throw Error(ErrorKind::kInvalidInput,
                  "linear term samples need >= 2 values per component, equal counts");
    }
    for (double x : c) {
      if (!std::isfinite(x)) throw Error(ErrorKind::kInvalidInput, "linear term sample not finite");
    }
  }
  LinearTerm a;
  a.dim_ = static_cast<int>(samples.size());
  a.horizon_ = horizon;
  a.zero_ = std::all_of(samples.begin(), samples.end(), [](const auto& c) {
    return std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; });
  });
  a.samples_ = std::move(samples);
  return a;
}

LinearTerm LinearTerm::closed_form(int dim, std::function<Vec(double)> fn) {
  LinearTerm a;
  a.dim_ = dim;
  a.fn_ = std::move(fn);
  return a;
}

std::size_t LinearTerm::sample_count() const {
  return samples_.empty() ? 0 : samples_.front().size();
}

Vec LinearTerm::operator()(double t) const {
  Vec out = Vec::Zero(dim_);
  if (zero_) return out;
  if (fn_) return fn_(t);
  const std::size_t n = samples_.front().size();
  const double pos = std::clamp(t / horizon_, 0.0, 1.0) * static_cast<double>(n - 1);
  const std::size_t j = std::min(static_cast<std::size_t>(pos), n - 2);
  const double w = pos - static_cast<double>(j);
  for (int k = 0; k < dim_; ++k) {
    const auto& c = samples_[static_cast<std::size_t>(k)];
    out[k] = w == 0.0 ? c[j] : (1.0 - w) * c[j] + w * c[j + 1];
  }
  return out;
}

void ProblemSpec::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::kInvalidInput, "horizon must be a positive number");
  }
  const int m = dim();
  if (u0.size() != m) throw Error(ErrorKind::kInvalidInput, "u0 has dimension " +
                                                               std::to_string(u0.size()) +
                                                               ", f has " + std::to_string(m));
  if (u1.size() != m) throw Error(ErrorKind::kInvalidInput, "u1 has dimension " +
                                                               std::to_string(u1.size()) +
                                                               ", f has " + std::to_string(m));
  if (a.dim() != m) throw Error(ErrorKind::kInvalidInput, "linear term has dimension " +
                                                              std::to_string(a.dim()) +
                                                              ", f has " + std::to_string(m));
  if (!u0.allFinite() || !u1.allFinite()) {
    throw Error(ErrorKind::kInvalidInput, "endpoints must be finite");
  }
}

}  // namespace ncv
