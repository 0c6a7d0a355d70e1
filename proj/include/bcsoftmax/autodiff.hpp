#pragma once

// Closed-form derivatives of bcsoftmax at tau = 1. With p the solution, g/h
// the lower/upper pin flags, q = p on free coordinates (0 elsewhere) and s
// the free mass:
//
//   dp/dx = Diag(q) - q q^T / s
//   dp/da = Diag(g) - q g^T / s
//   dp/db = Diag(h) - q h^T / s
//
// All products below are O(K). For tau != 1, call with x / tau and apply the
// chain rule yourself.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bcsoftmax/core.hpp"

namespace bcsoftmax {

template <std::floating_point Real = double>
struct JacobianFactors {
  std::vector<Real> q;
  Real s = Real{0};
  std::vector<bool> g;  // lower-pinned
  std::vector<bool> h;  // upper-pinned

  std::size_t size() const { return q.size(); }
};

/// Packages a solution's active set. The solution must come from tau = 1.
template <std::floating_point Real>
JacobianFactors<Real> jacobian_factors(const Solution<Real>& sol) {
  JacobianFactors<Real> f;
  const std::size_t K = sol.y.size();
  f.q.assign(K, Real{0});
  f.g = sol.active.lower_pinned;
  f.h = sol.active.upper_pinned;
  for (std::size_t i = 0; i < K; ++i)
    if (sol.active.is_free(i)) f.q[i] = sol.y[i];
  f.s = sol.active.free_mass;
  return f;
}

template <std::floating_point Real>
JacobianFactors<Real> jacobian_factors(std::span<const Real> x, const BoxBounds<Real>& bounds) {
  return jacobian_factors(bcsoftmax(x, bounds, Temperature<Real>{Real{1}}));
}

namespace detail {

template <std::floating_point Real>
void require_tangent(const JacobianFactors<Real>& f, std::span<const Real> v) {
  if (v.size() != f.size()) throw DomainError("tangent and Jacobian differ in length");
}

template <std::floating_point Real>
Real dot(std::span<const Real> u, std::span<const Real> v) {
  Real acc = Real{0};
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

// q.v / s, or 0 when nothing is free
template <std::floating_point Real>
Real weighted_mean(const JacobianFactors<Real>& f, std::span<const Real> v) {
  return f.s > Real{0} ? dot<Real>(f.q, v) / f.s : Real{0};
}

template <std::floating_point Real>
Real masked_sum(const std::vector<bool>& mask, std::span<const Real> v) {
  Real acc = Real{0};
  for (std::size_t i = 0; i < v.size(); ++i)
    if (mask[i]) acc += v[i];
  return acc;
}

template <std::floating_point Real>
std::vector<Real> vjp_pinned(const JacobianFactors<Real>& f, const std::vector<bool>& mask,
                             std::span<const Real> v) {
  require_tangent(f, v);
  const Real m = weighted_mean(f, v);
  std::vector<Real> out(f.size(), Real{0});
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i]) out[i] = v[i] - m;
  return out;
}

}  // namespace detail

/// v^T dp/dx
template <std::floating_point Real>
std::vector<Real> vjp_x(const JacobianFactors<Real>& f, std::span<const Real> v) {
  detail::require_tangent(f, v);
  const Real m = detail::weighted_mean(f, v);
  std::vector<Real> out(f.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.q[i] * (v[i] - m);
  return out;
}

/// v^T dp/da
template <std::floating_point Real>
std::vector<Real> vjp_a(const JacobianFactors<Real>& f, std::span<const Real> v) {
  return detail::vjp_pinned(f, f.g, v);
}

/// v^T dp/db
template <std::floating_point Real>
std::vector<Real> vjp_b(const JacobianFactors<Real>& f, std::span<const Real> v) {
  return detail::vjp_pinned(f, f.h, v);
}

/// dp/dx dx + dp/da da + dp/db db. Pass empty spans for tangents that are zero.
template <std::floating_point Real>
std::vector<Real> jvp(const JacobianFactors<Real>& f, std::span<const Real> dx,
                      std::span<const Real> da, std::span<const Real> db) {
  const std::size_t K = f.size();
  std::vector<Real> out(K, Real{0});
  Real shared = Real{0};  // coefficient of q
  if (!dx.empty()) {
    detail::require_tangent(f, dx);
    for (std::size_t i = 0; i < K; ++i) out[i] += f.q[i] * dx[i];
    shared += detail::weighted_mean(f, dx);
  }
  for (auto [mask, d] : {std::pair{&f.g, da}, std::pair{&f.h, db}}) {
    if (d.empty()) continue;
    detail::require_tangent(f, d);
    for (std::size_t i = 0; i < K; ++i)
      if ((*mask)[i]) out[i] += d[i];
    if (f.s > Real{0}) shared += detail::masked_sum(*mask, d) / f.s;
  }
  for (std::size_t i = 0; i < K; ++i) out[i] -= f.q[i] * shared;
  return out;
}

struct GradientReport {
  double max_dev_x = 0.0;
  double max_dev_a = 0.0;
  double max_dev_b = 0.0;
  std::size_t checked = 0;  // columns compared
  std::size_t skipped = 0;  // columns whose perturbation changed the active set
  bool boundary = false;    // some column was skipped
  bool passed = true;       // every checked column within tolerance

  double max_dev() const { return std::max({max_dev_x, max_dev_a, max_dev_b}); }
};

/// Central differences of bcsoftmax (tau = 1) against the closed-form JVP,
/// column by column. A column is skipped and the report flagged as a
/// boundary when either perturbed point has a different active set or falls
/// outside the feasible bound set.
template <std::floating_point Real>
GradientReport check_gradients(std::span<const Real> x, const BoxBounds<Real>& bounds,
                               Real step = Real{1e-6}, Real tolerance = Real{1e-5}) {
  const std::size_t K = x.size();
  const Temperature<Real> unit{Real{1}};
  const auto base = bcsoftmax(x, bounds, unit, SearchOptions{false});
  const auto f = jacobian_factors(base);
  const std::vector<Real> a0(bounds.lower().values().begin(), bounds.lower().values().end());
  const std::vector<Real> b0(bounds.upper().values().begin(), bounds.upper().values().end());
  const std::vector<Real> x0(x.begin(), x.end());

  auto same_pattern = [&](const ActiveSet<Real>& other) {
    return other.lower_pinned == base.active.lower_pinned &&
           other.upper_pinned == base.active.upper_pinned;
  };

  GradientReport report;
  for (int block = 0; block < 3; ++block) {
    double& dev = block == 0 ? report.max_dev_x : block == 1 ? report.max_dev_a : report.max_dev_b;
    for (std::size_t j = 0; j < K; ++j) {
      Solution<Real> plus, minus;
      try {
        auto eval = [&](Real delta) {
          auto xs = x0;
          auto as = a0;
          auto bs = b0;
          (block == 0 ? xs : block == 1 ? as : bs)[j] += delta;
          return bcsoftmax<Real>(xs, BoxBounds<Real>(as, bs), unit, SearchOptions{false});
        };
        plus = eval(step);
        minus = eval(-step);
      } catch (const DomainError&) {
        ++report.skipped;
        report.boundary = true;
        continue;
      }
      if (!same_pattern(plus.active) || !same_pattern(minus.active)) {
        ++report.skipped;
        report.boundary = true;
        continue;
      }

      std::vector<Real> e(K, Real{0});
      e[j] = Real{1};
      const std::span<const Real> none;
      const auto col = jvp<Real>(f, block == 0 ? std::span<const Real>(e) : none,
                                 block == 1 ? std::span<const Real>(e) : none,
                                 block == 2 ? std::span<const Real>(e) : none);
      for (std::size_t i = 0; i < K; ++i) {
        const double fd = (plus.y[i] - minus.y[i]) / (2 * step);
        dev = std::max(dev, std::abs(fd - static_cast<double>(col[i])));
      }
      ++report.checked;
    }
  }
  report.passed = report.max_dev() <= tolerance;
  return report;
}

}  // namespace bcsoftmax
