#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcsoftmax {

/// Absolute/relative tolerances shared by the solvers and their checks.
namespace tol {
inline constexpr double simplex = 1e-9;  // |sum(y) - 1|
inline constexpr double feas = 1e-12;    // per-coordinate bound slack
inline constexpr double eq = 1e-9;       // cross-algorithm agreement
inline constexpr double obj = 1e-9;      // objective comparisons
}  // namespace tol

/// Raised when inputs fall outside the function's domain (non-finite
/// logits, infeasible bounds, non-positive temperature, size mismatch).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when an internal consistency check fails.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// |a - b| <= tol * max(1, |a|, |b|)
inline bool nearly_equal(double a, double b, double tolerance = tol::eq) {
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) <= tolerance * scale;
}

template <std::floating_point Real = double>
class Temperature {
 public:
  explicit Temperature(Real tau = Real{1}) : tau_(tau) {
    if (!(tau > Real{0}) || !std::isfinite(tau))
      throw DomainError("temperature must be positive and finite");
  }
  Real value() const { return tau_; }

 private:
  Real tau_;
};

namespace detail {

template <std::floating_point Real>
void require_finite(std::span<const Real> v, const char* what) {
  for (Real e : v)
    if (!std::isfinite(e)) throw DomainError(std::string(what) + " must be finite");
}

template <std::floating_point Real>
Real sum(std::span<const Real> v) {
  return std::accumulate(v.begin(), v.end(), Real{0});
}

}  // namespace detail

/// Per-class lower bounds a with 0 <= a_k < 1 and sum(a) <= 1.
template <std::floating_point Real = double>
class LowerBounds {
 public:
  explicit LowerBounds(std::vector<Real> a) : a_(std::move(a)) {
    if (a_.empty()) throw DomainError("lower bounds: K must be >= 1");
    detail::require_finite<Real>(a_, "lower bounds");
    for (Real v : a_)
      if (v < Real{0} || v >= Real{1}) throw DomainError("lower bounds: need 0 <= a_k < 1");
    if (detail::sum<Real>(a_) > Real{1} + static_cast<Real>(tol::simplex))
      throw DomainError("lower bounds: sum(a) exceeds 1");
  }

  static LowerBounds zeros(std::size_t K) { return LowerBounds(std::vector<Real>(K, Real{0})); }
  static LowerBounds uniform(std::size_t K, Real a) { return LowerBounds(std::vector<Real>(K, a)); }

  std::span<const Real> values() const { return a_; }
  std::size_t size() const { return a_.size(); }
  Real operator[](std::size_t i) const { return a_[i]; }
  bool all_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](Real v) { return v == Real{0}; });
  }

 private:
  std::vector<Real> a_;
};

/// Per-class upper bounds b with 0 < b_k <= 1 and sum(b) >= 1.
template <std::floating_point Real = double>
class UpperBounds {
 public:
  explicit UpperBounds(std::vector<Real> b) : b_(std::move(b)) {
    if (b_.empty()) throw DomainError("upper bounds: K must be >= 1");
    detail::require_finite<Real>(b_, "upper bounds");
    for (Real v : b_)
      if (v <= Real{0} || v > Real{1}) throw DomainError("upper bounds: need 0 < b_k <= 1");
    if (detail::sum<Real>(b_) < Real{1} - static_cast<Real>(tol::simplex))
      throw DomainError("upper bounds: sum(b) below 1");
  }

  static UpperBounds ones(std::size_t K) { return UpperBounds(std::vector<Real>(K, Real{1})); }
  static UpperBounds uniform(std::size_t K, Real b) { return UpperBounds(std::vector<Real>(K, b)); }

  std::span<const Real> values() const { return b_; }
  std::size_t size() const { return b_.size(); }
  Real operator[](std::size_t i) const { return b_[i]; }
  bool all_one() const {
    return std::all_of(b_.begin(), b_.end(), [](Real v) { return v == Real{1}; });
  }

 private:
  std::vector<Real> b_;
};

/// A feasible box (a, b): both sides valid and a_k <= b_k.
template <std::floating_point Real = double>
class BoxBounds {
 public:
  BoxBounds(LowerBounds<Real> lower, UpperBounds<Real> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) throw DomainError("box bounds: size mismatch");
    for (std::size_t i = 0; i < lower_.size(); ++i)
      if (lower_[i] > upper_[i]) throw DomainError("box bounds: a_k > b_k");
  }
  BoxBounds(std::vector<Real> a, std::vector<Real> b)
      : BoxBounds(LowerBounds<Real>(std::move(a)), UpperBounds<Real>(std::move(b))) {}

  static BoxBounds unconstrained(std::size_t K) {
    return BoxBounds(LowerBounds<Real>::zeros(K), UpperBounds<Real>::ones(K));
  }
  static BoxBounds uniform(std::size_t K, Real a, Real b) {
    return BoxBounds(LowerBounds<Real>::uniform(K, a), UpperBounds<Real>::uniform(K, b));
  }

  const LowerBounds<Real>& lower() const { return lower_; }
  const UpperBounds<Real>& upper() const { return upper_; }
  std::size_t size() const { return lower_.size(); }

 private:
  LowerBounds<Real> lower_;
  UpperBounds<Real> upper_;
};

/// Which coordinates of a solution sit on a bound, plus the shared
/// normalizer of the free coordinates.
///
/// Free coordinates satisfy y_i = exp(x_i / tau - log_offset) / normalizer,
/// with free_exp_sum = sum over free i of exp(x_i / tau - log_offset) and
/// normalizer = free_exp_sum / free_mass. When nothing is free, free_mass,
/// free_exp_sum and normalizer are all zero.
template <std::floating_point Real = double>
struct ActiveSet {
  std::vector<bool> lower_pinned;
  std::vector<bool> upper_pinned;
  Real free_mass = Real{0};
  Real normalizer = Real{0};
  Real free_exp_sum = Real{0};
  Real log_offset = Real{0};

  std::size_t size() const { return lower_pinned.size(); }
  bool is_free(std::size_t i) const { return !lower_pinned[i] && !upper_pinned[i]; }
  std::size_t num_lower() const {
    return static_cast<std::size_t>(std::count(lower_pinned.begin(), lower_pinned.end(), true));
  }
  std::size_t num_upper() const {
    return static_cast<std::size_t>(std::count(upper_pinned.begin(), upper_pinned.end(), true));
  }
  std::size_t num_free() const { return size() - num_lower() - num_upper(); }
};

/// A point of the simplex together with the active set that produced it.
template <std::floating_point Real = double>
struct Solution {
  std::vector<Real> y;
  ActiveSet<Real> active;
};

}  // namespace bcsoftmax
