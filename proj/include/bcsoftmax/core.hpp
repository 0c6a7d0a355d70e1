#pragma once

// Softmax with box constraints on the output probabilities.
//
// All routines solve
//
//   argmax_{y in simplex, a <= y <= b}  x.y - tau * sum_k y_k log y_k
//
// exactly. The solution pins some coordinates at a_i, some at b_i and sets
// the rest proportional to exp(x_i / tau). Which coordinates are pinned is
// decided by sorting on the ratios b_i / exp(x_i / tau) (upper side) and
// a_i / exp(x_i / tau) (lower side); every ratio comparison is done on log
// keys and every normalizer is a log-sum-exp, so logits spanning more than
// the exp() range are handled.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "bcsoftmax/types.hpp"

#if defined(BCSOFTMAX_CHECK_SEARCH)
#define BCSOFTMAX_CHECK_SEARCH_DEFAULT true
#elif !defined(NDEBUG)
#define BCSOFTMAX_CHECK_SEARCH_DEFAULT true
#else
#define BCSOFTMAX_CHECK_SEARCH_DEFAULT false
#endif

namespace bcsoftmax {

struct SearchOptions {
  /// Re-derive the threshold of bcsoftmax() by a linear scan over every
  /// candidate and throw InternalError if the bisection disagrees.
  bool check_search = BCSOFTMAX_CHECK_SEARCH_DEFAULT;
};

template <std::floating_point Real = double>
struct ClipBounds {
  Real lower;
  Real upper;
};

namespace detail {

template <std::floating_point Real>
inline constexpr Real neg_inf = -std::numeric_limits<Real>::infinity();

/// Streaming log(sum(exp(u))) with a running maximum.
template <std::floating_point Real>
struct LogSumExp {
  Real max = neg_inf<Real>;
  Real acc = Real{0};

  void add(Real u) {
    if (u == neg_inf<Real>) return;
    if (u <= max) {
      acc += std::exp(u - max);
    } else {
      acc = acc * std::exp(max - u) + Real{1};
      max = u;
    }
  }
  Real value() const { return acc > Real{0} ? max + std::log(acc) : neg_inf<Real>; }
};

/// x / tau shifted so that its maximum is zero.
template <std::floating_point Real>
struct ScaledLogits {
  std::vector<Real> u;
  Real shift = Real{0};

  ScaledLogits(std::span<const Real> x, Temperature<Real> tau) : u(x.begin(), x.end()) {
    if (u.empty()) throw DomainError("logits: K must be >= 1");
    require_finite(x, "logits");
    for (Real& v : u) v /= tau.value();
    shift = *std::max_element(u.begin(), u.end());
    for (Real& v : u) v -= shift;
  }
  std::size_t size() const { return u.size(); }
};

/// Indices sorted by (key, index) ascending.
template <std::floating_point Real>
std::vector<std::size_t> ascending_order(const std::vector<Real>& keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return keys[i] < keys[j] || (keys[i] == keys[j] && i < j);
  });
  return order;
}

/// Indices sorted by key descending, ties by index ascending.
template <std::floating_point Real>
std::vector<std::size_t> descending_order(const std::vector<Real>& keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return keys[i] > keys[j] || (keys[i] == keys[j] && i < j);
  });
  return order;
}

template <std::floating_point Real>
std::vector<Real> upper_keys(const ScaledLogits<Real>& sl, std::span<const Real> b) {
  std::vector<Real> keys(sl.size());
  for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = std::log(b[i]) - sl.u[i];
  return keys;
}

template <std::floating_point Real>
std::vector<Real> lower_keys(const ScaledLogits<Real>& sl, std::span<const Real> a) {
  std::vector<Real> keys(sl.size());
  for (std::size_t i = 0; i < keys.size(); ++i)
    keys[i] = a[i] > Real{0} ? std::log(a[i]) - sl.u[i] : neg_inf<Real>;
  return keys;
}

/// Distributes `mass` over the coordinates flagged free in `active`,
/// proportionally to exp(u_i), and records the normalizer.
template <std::floating_point Real>
void fill_free(const ScaledLogits<Real>& sl, Real mass, std::vector<Real>& y,
               ActiveSet<Real>& active) {
  const std::size_t K = sl.size();
  Real m = neg_inf<Real>;
  for (std::size_t i = 0; i < K; ++i)
    if (active.is_free(i)) m = std::max(m, sl.u[i]);
  if (m == neg_inf<Real>) {
    active.free_mass = active.free_exp_sum = active.normalizer = Real{0};
    active.log_offset = sl.shift;
    return;
  }
  Real r = Real{0};
  for (std::size_t i = 0; i < K; ++i) {
    if (!active.is_free(i)) continue;
    y[i] = std::exp(sl.u[i] - m);
    r += y[i];
  }
  const Real scale = mass / r;
  for (std::size_t i = 0; i < K; ++i)
    if (active.is_free(i)) y[i] *= scale;
  active.free_mass = mass;
  active.free_exp_sum = r;
  active.normalizer = r / mass;
  active.log_offset = sl.shift + m;
}

template <std::floating_point Real>
ActiveSet<Real> empty_active_set(std::size_t K) {
  ActiveSet<Real> active;
  active.lower_pinned.assign(K, false);
  active.upper_pinned.assign(K, false);
  return active;
}

/// When sum(a) == 1 (or sum(b) == 1) the box holds a single point. It is
/// returned with every coordinate pinned and zero free mass.
template <std::floating_point Real>
std::optional<Solution<Real>> single_point(const ScaledLogits<Real>& sl, std::span<const Real> a,
                                           std::span<const Real> b) {
  const Real eps = static_cast<Real>(tol::feas);
  const bool lower_tight = !a.empty() && sum(a) >= Real{1} - eps;
  const bool upper_tight = !lower_tight && !b.empty() && sum(b) <= Real{1} + eps;
  if (!lower_tight && !upper_tight) return std::nullopt;
  const std::span<const Real> v = lower_tight ? a : b;
  Solution<Real> out{std::vector<Real>(v.begin(), v.end()), empty_active_set<Real>(sl.size())};
  (lower_tight ? out.active.lower_pinned : out.active.upper_pinned).assign(sl.size(), true);
  out.active.log_offset = sl.shift;
  return out;
}

template <std::floating_point Real>
void require_size(std::size_t K, std::size_t bounds_size) {
  if (K != bounds_size) throw DomainError("logits and bounds differ in length");
}

/// Upper-bounded softmax on an already ratio-sorted order.
template <std::floating_point Real>
Solution<Real> upper_bounded_from_order(const ScaledLogits<Real>& sl, std::span<const Real> b,
                                        const std::vector<std::size_t>& order) {
  const std::size_t K = sl.size();
  // tail[k] = log sum_{p >= k} exp(u_order[p])
  std::vector<Real> tail(K);
  LogSumExp<Real> acc;
  for (std::size_t p = K; p-- > 0;) {
    acc.add(sl.u[order[p]]);
    tail[p] = acc.value();
  }

  std::size_t rho = K - 1;
  Real s = Real{1};
  Real s_rho = Real{0};
  bool found = false;
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t j = order[k];
    if (s > Real{0} && sl.u[j] + std::log(s) <= std::log(b[j]) + tail[k]) {
      rho = k;
      s_rho = s;
      found = true;
      break;
    }
    if (k + 1 == K) s_rho = s;  // fallback: last coordinate takes the remainder
    s -= b[j];
  }
  if (!found) s_rho = std::max(s_rho, Real{0});

  Solution<Real> out{std::vector<Real>(K, Real{0}), empty_active_set<Real>(K)};
  for (std::size_t k = 0; k < rho; ++k) {
    out.y[order[k]] = b[order[k]];
    out.active.upper_pinned[order[k]] = true;
  }
  fill_free(sl, s_rho, out.y, out.active);
  return out;
}

/// Evaluates the candidates y(k) of the box-constrained problem: the first k
/// coordinates in lower-ratio order pinned at their lower bounds, the rest
/// solved as an upper-bounded softmax carrying the remaining mass.
template <std::floating_point Real>
class BoxCandidates {
 public:
  enum class Status {
    feasible,      // a <= y(k) <= b
    under_pinned,  // some free coordinate fell below its lower bound
    over_pinned,   // the remaining coordinates cannot absorb the mass
  };

  BoxCandidates(const ScaledLogits<Real>& sl, const BoxBounds<Real>& bounds)
      : sl_(sl), a_(bounds.lower().values()), b_(bounds.upper().values()) {
    const std::size_t K = sl.size();
    order_a_ = descending_order(lower_keys(sl, a_));
    order_b_ = ascending_order(upper_keys(sl, b_));
    rank_a_.resize(K);
    for (std::size_t p = 0; p < K; ++p) rank_a_[order_a_[p]] = p;

    mass_.resize(K + 1);
    cap_.resize(K + 1);
    mass_[0] = Real{1};
    for (std::size_t p = 0; p < K; ++p) mass_[p + 1] = mass_[p] - a_[order_a_[p]];
    cap_[K] = Real{0};
    for (std::size_t p = K; p-- > 0;) cap_[p] = cap_[p + 1] + b_[order_a_[p]];
    members_.reserve(K);
    tail_.resize(K);

    // Plain sums of exp(u) are exact enough unless some term could underflow.
    const Real umin = *std::min_element(sl.u.begin(), sl.u.end());
    linear_ = umin > Real{0.85} * std::log(std::numeric_limits<Real>::min());
    if (linear_) {
      exp_u_.resize(K);
      for (std::size_t i = 0; i < K; ++i) exp_u_[i] = std::exp(sl.u[i]);
    }
  }

  std::size_t size() const { return sl_.size(); }

  /// Classifies y(k), k in [0, K]; fills `out` when it is non-null.
  Status evaluate(std::size_t k, Solution<Real>* out) {
    const std::size_t K = size();
    const Real s = mass_[k];
    if (out) {
      out->y.assign(K, Real{0});
      out->active = empty_active_set<Real>(K);
      for (std::size_t p = 0; p < k; ++p) {
        out->y[order_a_[p]] = a_[order_a_[p]];
        out->active.lower_pinned[order_a_[p]] = true;
      }
    }

    // No mass left: every remaining coordinate sits at zero.
    if (k == K || s <= static_cast<Real>(tol::feas)) {
      bool ok = s >= -static_cast<Real>(tol::simplex) &&
                (k < K || s <= static_cast<Real>(tol::simplex));
      for (std::size_t p = k; p < K; ++p) {
        const std::size_t j = order_a_[p];
        if (a_[j] > static_cast<Real>(tol::feas)) ok = false;
        if (out) {
          out->y[j] = a_[j];
          out->active.lower_pinned[j] = true;
        }
      }
      if (out) fill_free(sl_, Real{0}, out->y, out->active);
      return ok ? Status::feasible : Status::over_pinned;
    }
    if (cap_[k] < s - static_cast<Real>(tol::feas)) return Status::over_pinned;

    members_.clear();
    for (std::size_t j : order_b_)
      if (rank_a_[j] >= k) members_.push_back(j);
    const std::size_t m = members_.size();
    std::size_t pos = m - 1;
    Real free_mass = s;
    bool found = false;
    Status status = Status::feasible;
    auto classify = [&](Real yj, std::size_t j) {
      if (yj > b_[j] + static_cast<Real>(tol::feas)) {
        status = Status::over_pinned;
        return false;
      }
      if (yj < a_[j] - static_cast<Real>(tol::feas)) status = Status::under_pinned;
      return true;
    };

    if (linear_) {
      // tail_[p] = sum_{q >= p} exp(u_members[q])
      Real acc = Real{0};
      for (std::size_t p = m; p-- > 0;) tail_[p] = acc += exp_u_[members_[p]];
      for (std::size_t p = 0; p < m; ++p) {
        const std::size_t j = members_[p];
        if (free_mass > Real{0} && exp_u_[j] * free_mass <= b_[j] * tail_[p]) {
          pos = p;
          found = true;
          break;
        }
        free_mass -= b_[j];
      }
      if (!found) free_mass = std::max(free_mass + b_[members_[m - 1]], Real{0});
      const Real scale = free_mass / tail_[pos];
      for (std::size_t p = pos; p < m; ++p)
        if (!classify(scale * exp_u_[members_[p]], members_[p])) break;
    } else {
      // same in log space: tail_[p] = log sum_{q >= p} exp(u_members[q])
      LogSumExp<Real> acc;
      for (std::size_t p = m; p-- > 0;) {
        acc.add(sl_.u[members_[p]]);
        tail_[p] = acc.value();
      }
      for (std::size_t p = 0; p < m; ++p) {
        const std::size_t j = members_[p];
        if (free_mass > Real{0} &&
            sl_.u[j] + std::log(free_mass) <= std::log(b_[j]) + tail_[p]) {
          pos = p;
          found = true;
          break;
        }
        free_mass -= b_[j];
      }
      if (!found) free_mass = std::max(free_mass + b_[members_[m - 1]], Real{0});
      const Real lse = tail_[pos];
      for (std::size_t p = pos; p < m; ++p)
        if (!classify(free_mass * std::exp(sl_.u[members_[p]] - lse), members_[p])) break;
    }

    if (out) {
      for (std::size_t p = 0; p < pos; ++p) {
        out->y[members_[p]] = b_[members_[p]];
        out->active.upper_pinned[members_[p]] = true;
      }
      fill_free(sl_, free_mass, out->y, out->active);
    }
    return status;
  }

 private:
  const ScaledLogits<Real>& sl_;
  std::span<const Real> a_;
  std::span<const Real> b_;
  std::vector<std::size_t> order_a_;
  std::vector<std::size_t> order_b_;
  std::vector<std::size_t> rank_a_;
  std::vector<Real> mass_;  // mass_[k] = 1 - sum of the first k lower bounds
  std::vector<Real> cap_;   // cap_[k]  = sum of upper bounds outside the first k
  std::vector<std::size_t> members_;
  std::vector<Real> tail_;
  bool linear_ = false;
  std::vector<Real> exp_u_;
};

}  // namespace detail

/// Softmax_tau(x) computed on x / tau - max(x / tau).
template <std::floating_point Real>
std::vector<Real> softmax(std::span<const Real> x, Temperature<Real> tau = Temperature<Real>{}) {
  detail::ScaledLogits<Real> sl(x, tau);
  std::vector<Real> y(sl.size());
  Real r = Real{0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = std::exp(sl.u[i]);
    r += y[i];
  }
  for (Real& v : y) v /= r;
  return y;
}

/// Upper-bounded softmax by sorting the ratios b_i / exp(x_i / tau).
/// O(K log K).
template <std::floating_point Real>
Solution<Real> ubsoftmax_sorted(std::span<const Real> x, const UpperBounds<Real>& b,
                                Temperature<Real> tau = Temperature<Real>{}) {
  detail::require_size<Real>(x.size(), b.size());
  detail::ScaledLogits<Real> sl(x, tau);
  if (auto p = detail::single_point<Real>(sl, {}, b.values())) return *p;
  const auto order = detail::ascending_order(detail::upper_keys(sl, b.values()));
  return detail::upper_bounded_from_order(sl, b.values(), order);
}

/// Upper-bounded softmax by a quickselect over the ratios: each round
/// partitions the candidate set around a pivot, tests whether the pivot can
/// be the first free coordinate, and keeps only the half that still holds
/// the threshold. The pinned mass and the free log-sum-exp are carried
/// across rounds, so the expected cost is O(K).
template <std::floating_point Real>
Solution<Real> ubsoftmax_select(std::span<const Real> x, const UpperBounds<Real>& b,
                                Temperature<Real> tau = Temperature<Real>{}) {
  detail::require_size<Real>(x.size(), b.size());
  detail::ScaledLogits<Real> sl(x, tau);
  if (auto p = detail::single_point<Real>(sl, {}, b.values())) return *p;
  const std::size_t K = sl.size();
  const auto keys = detail::upper_keys(sl, b.values());
  auto before = [&](std::size_t i, std::size_t j) {
    return keys[i] < keys[j] || (keys[i] == keys[j] && i < j);
  };

  std::vector<std::size_t> work(K);
  std::iota(work.begin(), work.end(), std::size_t{0});
  auto lo = work.begin();
  auto hi = work.end();

  Real pinned_mass_left = Real{1};  // 1 - sum of b over everything ranked before [lo, hi)
  detail::LogSumExp<Real> after;    // over everything ranked after [lo, hi)
  std::size_t first_free = K;
  Real free_mass = Real{0};

  while (lo != hi) {
    const std::size_t pivot = *(lo + (hi - lo) / 2);
    auto mid = std::partition(lo, hi, [&](std::size_t i) { return before(i, pivot); });
    std::iter_swap(mid, std::find(mid, hi, pivot));

    Real s = pinned_mass_left;
    for (auto it = lo; it != mid; ++it) s -= b[*it];
    detail::LogSumExp<Real> tail = after;
    tail.add(sl.u[pivot]);
    for (auto it = mid + 1; it != hi; ++it) tail.add(sl.u[*it]);

    // Monotone in rank: once the pinned mass reaches 1 the test stays true.
    // Mass can only run out after the true threshold, so s <= 0 never ends
    // up as the answer except through rounding.
    if (s <= Real{0} || sl.u[pivot] + std::log(s) <= std::log(b[pivot]) + tail.value()) {
      first_free = pivot;
      free_mass = std::max(s, Real{0});
      after = tail;
      hi = mid;
    } else {
      pinned_mass_left = s - b[pivot];
      lo = mid + 1;
    }
  }

  if (first_free == K) {
    // Rounding left no candidate: free only the top-ranked coordinate.
    first_free = *std::max_element(work.begin(), work.end(), before);
    free_mass = Real{1};
    for (std::size_t i = 0; i < K; ++i)
      if (i != first_free) free_mass -= b[i];
    free_mass = std::max(free_mass, Real{0});
  }

  Solution<Real> out{std::vector<Real>(K, Real{0}), detail::empty_active_set<Real>(K)};
  for (std::size_t i = 0; i < K; ++i) {
    if (before(i, first_free)) {
      out.y[i] = b[i];
      out.active.upper_pinned[i] = true;
    }
  }
  detail::fill_free(sl, free_mass, out.y, out.active);
  return out;
}

/// Lower-bounded softmax: coordinates are pinned at a_i in decreasing order
/// of a_i / exp(x_i / tau) until the next one would receive at least a_i.
template <std::floating_point Real>
Solution<Real> lbsoftmax(std::span<const Real> x, const LowerBounds<Real>& a,
                         Temperature<Real> tau = Temperature<Real>{}) {
  detail::require_size<Real>(x.size(), a.size());
  detail::ScaledLogits<Real> sl(x, tau);
  if (auto p = detail::single_point<Real>(sl, a.values(), {})) return *p;
  const std::size_t K = sl.size();
  const auto order = detail::descending_order(detail::lower_keys(sl, a.values()));

  std::vector<Real> tail(K);
  detail::LogSumExp<Real> acc;
  for (std::size_t p = K; p-- > 0;) {
    acc.add(sl.u[order[p]]);
    tail[p] = acc.value();
  }

  std::size_t rho = K;
  Real s = Real{1};
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t j = order[k];
    if (s <= Real{0}) break;
    if (a[j] == Real{0} || sl.u[j] + std::log(s) >= std::log(a[j]) + tail[k]) {
      rho = k;
      break;
    }
    s -= a[j];
  }

  Solution<Real> out{std::vector<Real>(K, Real{0}), detail::empty_active_set<Real>(K)};
  if (s <= Real{0}) rho = K;
  for (std::size_t k = 0; k < rho; ++k) {
    out.y[order[k]] = a[order[k]];
    out.active.lower_pinned[order[k]] = true;
  }
  detail::fill_free(sl, rho < K ? s : Real{0}, out.y, out.active);
  return out;
}

/// Box-constrained softmax, O(K log K).
///
/// Coordinates are sorted by a_i / exp(x_i / tau) descending; candidate y(k)
/// pins the first k at their lower bounds and solves the rest as an
/// upper-bounded softmax. The answer is the smallest k whose candidate is
/// feasible. Candidates below that k always violate a lower bound, and
/// candidates above it never do (they either stay feasible or run out of
/// upper-bound capacity), so bisecting on "violates a lower bound" finds it.
template <std::floating_point Real>
Solution<Real> bcsoftmax(std::span<const Real> x, const BoxBounds<Real>& bounds,
                         Temperature<Real> tau = Temperature<Real>{},
                         SearchOptions options = {}) {
  using Status = typename detail::BoxCandidates<Real>::Status;
  detail::require_size<Real>(x.size(), bounds.size());
  detail::ScaledLogits<Real> sl(x, tau);
  if (auto p = detail::single_point<Real>(sl, bounds.lower().values(), bounds.upper().values()))
    return *p;
  detail::BoxCandidates<Real> candidates(sl, bounds);
  const std::size_t K = sl.size();

  std::size_t lo = 0;
  std::size_t hi = K - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (candidates.evaluate(mid, nullptr) == Status::under_pinned)
      lo = mid + 1;
    else
      hi = mid;
  }

  auto linear_scan = [&]() -> std::size_t {
    for (std::size_t k = 0; k <= K; ++k)
      if (candidates.evaluate(k, nullptr) == Status::feasible) return k;
    throw InternalError("bcsoftmax: no feasible candidate");
  };

  // y(K) (everything at its lower bound) is only reachable when sum(a) == 1.
  std::size_t rho = lo;
  if (candidates.evaluate(rho, nullptr) != Status::feasible) rho = linear_scan();

  if (options.check_search) {
    const std::size_t expected = linear_scan();
    if (expected != rho)
      throw InternalError("bcsoftmax: bisection threshold " + std::to_string(rho) +
                          " differs from linear scan " + std::to_string(expected));
  }

  Solution<Real> out;
  candidates.evaluate(rho, &out);
  return out;
}

/// Box-constrained softmax by evaluating every candidate y(0), ..., y(K) and
/// taking the first feasible one. O(K^2); used as a cross-check.
template <std::floating_point Real>
Solution<Real> bcsoftmax_quadratic(std::span<const Real> x, const BoxBounds<Real>& bounds,
                                   Temperature<Real> tau = Temperature<Real>{}) {
  using Status = typename detail::BoxCandidates<Real>::Status;
  detail::require_size<Real>(x.size(), bounds.size());
  detail::ScaledLogits<Real> sl(x, tau);
  if (auto p = detail::single_point<Real>(sl, bounds.lower().values(), bounds.upper().values()))
    return *p;
  detail::BoxCandidates<Real> candidates(sl, bounds);
  const std::size_t K = sl.size();

  std::vector<char> feasible(K + 1);
  for (std::size_t k = 0; k <= K; ++k)
    feasible[k] = candidates.evaluate(k, nullptr) == Status::feasible;
  const auto it = std::find(feasible.begin(), feasible.end(), char{1});
  if (it == feasible.end()) throw InternalError("bcsoftmax_quadratic: no feasible candidate");

  Solution<Real> out;
  candidates.evaluate(static_cast<std::size_t>(it - feasible.begin()), &out);
  return out;
}

template <std::floating_point Real>
std::vector<Real> clip(std::span<const Real> x, Real lower, Real upper) {
  std::vector<Real> out(x.begin(), x.end());
  for (Real& v : out) v = std::max(lower, std::min(v, upper));
  return out;
}

/// Logit thresholds (c, C) with softmax(clip(x, c, C), tau) equal to the
/// box-constrained softmax under the uniform bounds (a, b).
template <std::floating_point Real>
ClipBounds<Real> scalar_bounds_to_clip(std::span<const Real> x, Real a, Real b,
                                       Temperature<Real> tau = Temperature<Real>{}) {
  const std::size_t K = x.size();
  const auto sol = bcsoftmax(x, BoxBounds<Real>::uniform(K, a, b), tau, SearchOptions{false});
  const auto& act = sol.active;
  const Real t = tau.value();
  const Real xmin = *std::min_element(x.begin(), x.end());
  const Real xmax = *std::max_element(x.begin(), x.end());
  const bool any_lower = act.num_lower() > 0;
  const bool any_upper = act.num_upper() > 0;

  if (act.num_free() == 0) {
    // Only the ratio between the two clip levels matters.
    if (any_lower && any_upper) {
      Real c = detail::neg_inf<Real>;
      for (std::size_t i = 0; i < K; ++i)
        if (act.lower_pinned[i]) c = std::max(c, x[i]);
      return {c, c + t * std::log(b / a)};
    }
    return any_lower ? ClipBounds<Real>{xmax, xmax} : ClipBounds<Real>{xmin, xmin};
  }
  const Real c = any_lower ? t * (std::log(act.normalizer * a) + act.log_offset) : xmin;
  const Real C = any_upper ? t * (std::log(act.normalizer * b) + act.log_offset) : xmax;
  return {c, C};
}

/// x.y - tau * sum_k y_k log y_k, with 0 log 0 = 0.
template <std::floating_point Real>
Real objective_value(std::span<const Real> y, std::span<const Real> x,
                     Temperature<Real> tau = Temperature<Real>{}) {
  detail::require_size<Real>(x.size(), y.size());
  Real linear = Real{0};
  Real neg_entropy = Real{0};
  for (std::size_t i = 0; i < y.size(); ++i) {
    linear += x[i] * y[i];
    if (y[i] > Real{0}) neg_entropy += y[i] * std::log(y[i]);
  }
  return linear - tau.value() * neg_entropy;
}

}  // namespace bcsoftmax
