#pragma once

// Brute-force reference solvers. They share nothing with core.hpp beyond the
// bound types and are written for clarity, not speed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "bcsoftmax/types.hpp"

namespace bcsoftmax::oracle {

inline constexpr std::size_t max_enumeration_size = 12;

template <std::floating_point Real = double>
struct OracleResult {
  std::vector<Real> y;
  long double objective = -std::numeric_limits<long double>::infinity();
  std::size_t examined = 0;  // candidates generated
  std::size_t feasible = 0;  // candidates that passed the bound checks
};

namespace detail {

inline long double objective(const std::vector<long double>& y, std::span<const long double> x,
                             long double tau) {
  long double v = 0.0L;
  for (std::size_t i = 0; i < y.size(); ++i) {
    v += x[i] * y[i];
    if (y[i] > 0.0L) v -= tau * y[i] * std::log(y[i]);
  }
  return v;
}

template <std::floating_point Real>
std::vector<long double> widen(std::span<const Real> v) {
  return std::vector<long double>(v.begin(), v.end());
}

template <std::floating_point Real>
void keep_best(OracleResult<Real>& best, const std::vector<long double>& y, long double obj) {
  ++best.feasible;
  if (obj > best.objective) {
    best.objective = obj;
    best.y.assign(y.begin(), y.end());
  }
}

}  // namespace detail

/// Tries every assignment of each coordinate to {lower bound, upper bound,
/// free} (3^K of them). Free coordinates share the leftover mass in
/// proportion to exp(x_i / tau). Among the assignments whose point respects
/// the box, returns the one with the largest objective.
template <std::floating_point Real>
OracleResult<Real> solve_enumerate(std::span<const Real> x, const BoxBounds<Real>& bounds,
                                   Temperature<Real> tau = Temperature<Real>{}) {
  const std::size_t K = x.size();
  if (K != bounds.size()) throw DomainError("logits and bounds differ in length");
  if (K == 0) throw DomainError("logits: K must be >= 1");
  if (K > max_enumeration_size)
    throw DomainError("solve_enumerate: K = " + std::to_string(K) + " exceeds " +
                      std::to_string(max_enumeration_size));
  bcsoftmax::detail::require_finite(x, "logits");

  const auto xl = detail::widen(x);
  const auto a = detail::widen(bounds.lower().values());
  const auto b = detail::widen(bounds.upper().values());
  const long double t = tau.value();
  const long double xmax = *std::max_element(xl.begin(), xl.end());
  std::vector<long double> w(K);
  for (std::size_t i = 0; i < K; ++i) w[i] = std::exp((xl[i] - xmax) / t);

  const long double feas = tol::feas;
  OracleResult<Real> best;
  std::vector<int> state(K, 0);  // 0 free, 1 lower, 2 upper
  std::vector<long double> y(K);
  for (;;) {
    ++best.examined;
    long double s = 1.0L;
    long double r = 0.0L;
    for (std::size_t i = 0; i < K; ++i) {
      if (state[i] == 1) s -= a[i];
      else if (state[i] == 2) s -= b[i];
      else r += w[i];
    }
    if (s >= -feas) {
      bool ok = true;
      if (r == 0.0L) {
        ok = std::abs(s) <= static_cast<long double>(tol::simplex);
      }
      for (std::size_t i = 0; i < K && ok; ++i) {
        if (state[i] == 1) y[i] = a[i];
        else if (state[i] == 2) y[i] = b[i];
        else y[i] = std::max(s, 0.0L) * w[i] / r;
        ok = y[i] >= a[i] - feas && y[i] <= b[i] + feas;
      }
      if (ok) detail::keep_best(best, y, detail::objective(y, xl, t));
    }

    std::size_t i = 0;
    while (i < K && state[i] == 2) state[i++] = 0;
    if (i == K) break;
    ++state[i];
  }
  if (best.y.empty()) throw InternalError("solve_enumerate: no feasible candidate");
  return best;
}

/// Upper-bounded softmax by sweeping every threshold: sort by
/// b_i / exp(x_i / tau), pin the first k at b, spread the rest by softmax,
/// and keep the feasible sweep point with the largest objective. O(K^2).
template <std::floating_point Real>
OracleResult<Real> solve_sweep_ub(std::span<const Real> x, const UpperBounds<Real>& upper,
                                  Temperature<Real> tau = Temperature<Real>{}) {
  const std::size_t K = x.size();
  if (K != upper.size()) throw DomainError("logits and bounds differ in length");
  bcsoftmax::detail::require_finite(x, "logits");

  const auto xl = detail::widen(x);
  const auto b = detail::widen(upper.values());
  const long double t = tau.value();
  const long double xmax = *std::max_element(xl.begin(), xl.end());

  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::log(b[i]) - (xl[i] - xmax) / t < std::log(b[j]) - (xl[j] - xmax) / t;
  });

  const long double feas = tol::feas;
  OracleResult<Real> best;
  std::vector<long double> y(K);
  for (std::size_t k = 0; k <= K; ++k) {
    ++best.examined;
    long double s = 1.0L;
    for (std::size_t p = 0; p < k; ++p) s -= b[order[p]];
    if (s < -feas) continue;
    if (k == K && std::abs(s) > static_cast<long double>(tol::simplex)) continue;

    long double m = -std::numeric_limits<long double>::infinity();
    for (std::size_t p = k; p < K; ++p) m = std::max(m, xl[order[p]] / t);
    long double r = 0.0L;
    for (std::size_t p = k; p < K; ++p) r += std::exp(xl[order[p]] / t - m);

    bool ok = true;
    for (std::size_t p = 0; p < K && ok; ++p) {
      const std::size_t i = order[p];
      y[i] = p < k ? b[i] : std::max(s, 0.0L) * std::exp(xl[i] / t - m) / r;
      ok = y[i] >= 0.0L && y[i] <= b[i] + feas;
    }
    if (ok) detail::keep_best(best, y, detail::objective(y, xl, t));
  }
  if (best.y.empty()) throw InternalError("solve_sweep_ub: no feasible candidate");
  return best;
}

}  // namespace bcsoftmax::oracle
