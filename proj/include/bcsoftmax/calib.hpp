#pragma once

// Post-hoc calibration of classifier logits.
//
//   TS    softmax(x / tau)
//   PB-*  bcsoftmax(x / tau) with uniform bounds a(x) = sigmoid(a') / K,
//         b(x) = 1/K + (1 - 1/K) sigmoid(b')
//   LB-*  softmax(clip(x, c, C) / tau), c = h(c'), C = h(c' + softplus(C'))
//         with h(e) = |x|_2 tanh(e) for LB-C and h = identity for LB-L
//
// The -C kinds use scalar raw parameters; the -L kinds map a feature vector
// to each raw parameter with a linear head (weights + bias). In all cases
// tau = exp(tau_raw).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bcsoftmax/autodiff.hpp"
#include "bcsoftmax/core.hpp"
#include "bcsoftmax/random.hpp"

namespace bcsoftmax::calib {

/// Bad caller input that is not a numerical domain problem (unknown method,
/// missing features, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double prob_floor = 1e-12;
inline constexpr double initial_tau = 1.5;

struct LabeledLogitSet {
  std::size_t num_classes = 0;
  std::vector<std::vector<double>> logits;
  std::vector<int> labels;                    // may be empty for unlabeled inputs
  std::vector<std::vector<double>> features;  // empty, or one row per sample

  std::size_t size() const { return logits.size(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_features() const { return !features.empty(); }
  std::size_t feature_dim() const { return features.empty() ? 0 : features.front().size(); }
  std::span<const double> feature_row(std::size_t n) const {
    return features.empty() ? std::span<const double>{} : std::span<const double>(features[n]);
  }

  /// Throws UsageError unless the set is a valid labeled dataset.
  void validate() const {
    if (logits.empty()) throw UsageError("dataset is empty");
    if (num_classes == 0) throw UsageError("dataset has no classes");
    if (labels.size() != logits.size()) throw UsageError("dataset needs one label per row");
    for (std::size_t n = 0; n < logits.size(); ++n) {
      if (logits[n].size() != num_classes)
        throw UsageError("row " + std::to_string(n) + ": expected " +
                         std::to_string(num_classes) + " logits");
      for (double v : logits[n])
        if (!std::isfinite(v)) throw UsageError("row " + std::to_string(n) + ": non-finite logit");
      if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= num_classes)
        throw UsageError("row " + std::to_string(n) + ": label out of range");
    }
    if (!features.empty()) {
      if (features.size() != logits.size())
        throw UsageError("dataset needs one feature row per sample");
      for (std::size_t n = 0; n < features.size(); ++n)
        if (features[n].size() != feature_dim())
          throw UsageError("row " + std::to_string(n) + ": inconsistent feature dimension");
    }
  }

  /// Rows [begin, end).
  LabeledLogitSet slice(std::size_t begin, std::size_t end) const {
    LabeledLogitSet out;
    out.num_classes = num_classes;
    end = std::min(end, size());
    begin = std::min(begin, end);
    out.logits.assign(logits.begin() + begin, logits.begin() + end);
    if (has_labels()) out.labels.assign(labels.begin() + begin, labels.begin() + end);
    if (has_features()) out.features.assign(features.begin() + begin, features.begin() + end);
    return out;
  }
};

enum class CalibKind { ts, pb_c, pb_l, lb_c, lb_l };

inline std::string_view to_string(CalibKind kind) {
  switch (kind) {
    case CalibKind::ts: return "ts";
    case CalibKind::pb_c: return "pb-c";
    case CalibKind::pb_l: return "pb-l";
    case CalibKind::lb_c: return "lb-c";
    case CalibKind::lb_l: return "lb-l";
  }
  return "?";
}

inline CalibKind parse_kind(std::string_view name) {
  for (CalibKind k : {CalibKind::ts, CalibKind::pb_c, CalibKind::pb_l, CalibKind::lb_c,
                      CalibKind::lb_l})
    if (to_string(k) == name) return k;
  throw UsageError("unknown calibration method '" + std::string(name) + "'");
}

inline bool is_pb(CalibKind k) { return k == CalibKind::pb_c || k == CalibKind::pb_l; }
inline bool is_lb(CalibKind k) { return k == CalibKind::lb_c || k == CalibKind::lb_l; }
inline bool is_linear(CalibKind k) { return k == CalibKind::pb_l || k == CalibKind::lb_l; }

/// bias + weight . features; an empty weight means a constant.
struct LinearHead {
  double bias = 0.0;
  std::vector<double> weight;

  double operator()(std::span<const double> features) const {
    if (weight.empty()) return bias;
    if (features.size() != weight.size())
      throw UsageError("expected " + std::to_string(weight.size()) + " features, got " +
                       std::to_string(features.size()));
    double v = bias;
    for (std::size_t j = 0; j < weight.size(); ++j) v += weight[j] * features[j];
    return v;
  }
  std::size_t num_params() const { return 1 + weight.size(); }
};

struct FitMeta {
  std::uint64_t seed = 0;
  std::size_t epochs = 0;
  double final_loss = std::numeric_limits<double>::quiet_NaN();
};

struct CalibModel {
  CalibKind kind = CalibKind::ts;
  double tau_raw = std::log(initial_tau);
  LinearHead lower;  // a' for PB, c' for LB
  LinearHead upper;  // b' for PB, C' for LB
  bool use_lower = true;
  bool use_upper = true;
  FitMeta meta;

  double tau() const { return std::exp(tau_raw); }
};

namespace detail {

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }
inline double softplus_inverse(double y) { return y > 30 ? y : std::log(std::expm1(y)); }

inline double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline void require_features(const CalibModel& m, std::span<const double> features) {
  if (is_linear(m.kind) && features.size() != m.lower.weight.size())
    throw UsageError(std::string(to_string(m.kind)) + " needs " +
                     std::to_string(m.lower.weight.size()) + " features per sample, got " +
                     std::to_string(features.size()));
}

}  // namespace detail

/// Starting point of fit(): tau = 1.5 and bounds far from active.
/// LB-L starts its clip window outside the logit range seen in `data`.
inline CalibModel initial_model(CalibKind kind, const LabeledLogitSet& data, bool use_lower = true,
                                bool use_upper = true) {
  CalibModel m;
  m.kind = kind;
  m.use_lower = use_lower;
  m.use_upper = use_upper;
  if (is_linear(kind)) {
    if (!data.has_features()) throw UsageError(std::string(to_string(kind)) + " needs features");
    m.lower.weight.assign(data.feature_dim(), 0.0);
    m.upper.weight.assign(data.feature_dim(), 0.0);
  }
  switch (kind) {
    case CalibKind::ts:
      break;
    case CalibKind::pb_c:
    case CalibKind::pb_l:
      m.lower.bias = -4.0;
      m.upper.bias = 4.0;
      break;
    case CalibKind::lb_c:
      // pre-tanh window (-4, 4)
      m.lower.bias = -4.0;
      m.upper.bias = detail::softplus_inverse(8.0);
      break;
    case CalibKind::lb_l: {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const auto& row : data.logits)
        for (double v : row) lo = std::min(lo, v), hi = std::max(hi, v);
      if (!std::isfinite(lo)) lo = hi = 0.0;
      m.lower.bias = lo - 1.0;
      m.upper.bias = detail::softplus_inverse(hi - lo + 2.0);
      break;
    }
  }
  return m;
}

struct ProbabilityBounds {
  double lower;
  double upper;
};

/// The uniform bounds (a(x), b(x)) of a PB model.
inline ProbabilityBounds pb_bounds(const CalibModel& m, std::size_t K,
                                   std::span<const double> features) {
  detail::require_features(m, features);
  const double inv_k = 1.0 / static_cast<double>(K);
  const double a = m.use_lower ? detail::sigmoid(m.lower(features)) * inv_k : 0.0;
  const double b = m.use_upper ? inv_k + (1.0 - inv_k) * detail::sigmoid(m.upper(features)) : 1.0;
  return {a, b};
}

/// The clip window (c(x), C(x)) of an LB model; infinite on disabled sides.
inline ClipBounds<double> lb_clip(const CalibModel& m, std::span<const double> logits,
                                  std::span<const double> features) {
  detail::require_features(m, features);
  const double cr = m.lower(features);
  const double upper_arg = cr + detail::softplus(m.upper(features));
  const double inf = std::numeric_limits<double>::infinity();
  double c = cr;
  double C = upper_arg;
  if (m.kind == CalibKind::lb_c) {
    const double n = detail::norm2(logits);
    c = n * std::tanh(cr);
    C = n * std::tanh(upper_arg);
  }
  return {m.use_lower ? c : -inf, m.use_upper ? C : inf};
}

inline std::vector<double> predict_ts(const CalibModel& m, std::span<const double> logits) {
  return softmax(logits, Temperature<double>{m.tau()});
}

inline std::vector<double> predict_pb(const CalibModel& m, std::span<const double> logits,
                                      std::span<const double> features = {}) {
  if (!is_pb(m.kind)) throw UsageError("predict_pb needs a PB model");
  const std::size_t K = logits.size();
  if (K == 1) return {1.0};
  const auto [a, b] = pb_bounds(m, K, features);
  return bcsoftmax(logits, BoxBounds<double>::uniform(K, a, b), Temperature<double>{m.tau()},
                   SearchOptions{false})
      .y;
}

inline std::vector<double> predict_lb(const CalibModel& m, std::span<const double> logits,
                                      std::span<const double> features = {}) {
  if (!is_lb(m.kind)) throw UsageError("predict_lb needs an LB model");
  const auto [c, C] = lb_clip(m, logits, features);
  return softmax<double>(clip(logits, c, C), Temperature<double>{m.tau()});
}

inline std::vector<double> predict(const CalibModel& m, std::span<const double> logits,
                                   std::span<const double> features = {}) {
  if (is_pb(m.kind)) return predict_pb(m, logits, features);
  if (is_lb(m.kind)) return predict_lb(m, logits, features);
  return predict_ts(m, logits);
}

inline double ce_loss(std::span<const double> p, int label) {
  return -std::log(std::max(p[static_cast<std::size_t>(label)], prob_floor));
}

inline double mean_loss(const CalibModel& m, const LabeledLogitSet& data) {
  double total = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n)
    total += ce_loss(predict(m, data.logits[n], data.feature_row(n)), data.labels[n]);
  return total / static_cast<double>(data.size());
}

// ---------------------------------------------------------------------------
// Parameters as a flat vector: tau_raw, then (for PB/LB) the lower head's
// bias and weights, then the upper head's.

inline std::vector<double> parameters(const CalibModel& m) {
  std::vector<double> p{m.tau_raw};
  if (m.kind == CalibKind::ts) return p;
  for (const LinearHead* h : {&m.lower, &m.upper}) {
    p.push_back(h->bias);
    p.insert(p.end(), h->weight.begin(), h->weight.end());
  }
  return p;
}

inline void set_parameters(CalibModel& m, std::span<const double> p) {
  std::size_t i = 0;
  m.tau_raw = p[i++];
  if (m.kind == CalibKind::ts) return;
  for (LinearHead* h : {&m.lower, &m.upper}) {
    h->bias = p[i++];
    for (double& w : h->weight) w = p[i++];
  }
}

namespace detail {

// Adds d(loss)/d(raw head output) to the head's bias and weight slots.
inline void add_head_grad(std::vector<double>& grad, std::size_t offset, const LinearHead& head,
                          std::span<const double> features, double d) {
  grad[offset] += d;
  for (std::size_t j = 0; j < head.weight.size(); ++j) grad[offset + 1 + j] += d * features[j];
}

// Softmax(w / tau) cross-entropy gradient shared by TS and LB. Returns the
// loss; writes d(loss)/dw into gw and adds d(loss)/d(tau_raw) to grad[0].
inline double softmax_ce_grad(std::span<const double> w, int label, double tau,
                              std::vector<double>& gw, std::vector<double>& grad) {
  const auto p = softmax(w, Temperature<double>{tau});
  const auto y = static_cast<std::size_t>(label);
  gw.assign(w.size(), 0.0);
  if (p[y] < prob_floor) return -std::log(prob_floor);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double r = p[i] - (i == y ? 1.0 : 0.0);
    gw[i] = r / tau;
    grad[0] -= r * w[i] / tau;
  }
  return -std::log(p[y]);
}

}  // namespace detail

/// Cross-entropy of one sample and its gradient with respect to
/// parameters(m), accumulated into `grad`.
inline double loss_and_grad(const CalibModel& m, std::span<const double> logits,
                            std::span<const double> features, int label,
                            std::vector<double>& grad) {
  const std::size_t K = logits.size();
  const double tau = m.tau();
  const std::size_t lower_at = 1;
  const std::size_t upper_at = 2 + m.lower.weight.size();
  std::vector<double> gw;

  if (m.kind == CalibKind::ts) return detail::softmax_ce_grad(logits, label, tau, gw, grad);

  if (is_lb(m.kind)) {
    const auto [c, C] = lb_clip(m, logits, features);
    const auto w = clip(logits, c, C);
    const double loss = detail::softmax_ce_grad(w, label, tau, gw, grad);
    double gc = 0.0;
    double gC = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      if (logits[i] < c) gc += gw[i];
      else if (logits[i] > C) gC += gw[i];
    }
    const double cr = m.lower(features);
    const double Cr = m.upper(features);
    double dc_dcr = 1.0;
    double dC_darg = 1.0;
    if (m.kind == CalibKind::lb_c) {
      const double n = detail::norm2(logits);
      const double t0 = std::tanh(cr);
      const double t1 = std::tanh(cr + detail::softplus(Cr));
      dc_dcr = n * (1.0 - t0 * t0);
      dC_darg = n * (1.0 - t1 * t1);
    }
    if (!m.use_lower) gc = 0.0;
    if (!m.use_upper) gC = 0.0;
    detail::add_head_grad(grad, lower_at, m.lower, features, gc * dc_dcr + gC * dC_darg);
    detail::add_head_grad(grad, upper_at, m.upper, features,
                          gC * dC_darg * detail::sigmoid(Cr));
    return loss;
  }

  // PB
  if (K == 1) return 0.0;
  const auto [a, b] = pb_bounds(m, K, features);
  std::vector<double> u(logits.begin(), logits.end());
  for (double& v : u) v /= tau;
  const auto sol = bcsoftmax<double>(u, BoxBounds<double>::uniform(K, a, b), Temperature<double>{},
                                     SearchOptions{false});
  const auto y = static_cast<std::size_t>(label);
  if (sol.y[y] < prob_floor) return -std::log(prob_floor);

  const auto f = jacobian_factors(sol);
  std::vector<double> v(K, 0.0);
  v[y] = -1.0 / sol.y[y];
  const auto gu = vjp_x<double>(f, v);
  for (std::size_t i = 0; i < K; ++i) grad[0] -= gu[i] * u[i];

  const double inv_k = 1.0 / static_cast<double>(K);
  if (m.use_lower) {
    const auto ga = vjp_a<double>(f, v);
    const double sa = detail::sigmoid(m.lower(features));
    const double total = std::accumulate(ga.begin(), ga.end(), 0.0);
    detail::add_head_grad(grad, lower_at, m.lower, features, total * sa * (1.0 - sa) * inv_k);
  }
  if (m.use_upper) {
    const auto gb = vjp_b<double>(f, v);
    const double sb = detail::sigmoid(m.upper(features));
    const double total = std::accumulate(gb.begin(), gb.end(), 0.0);
    detail::add_head_grad(grad, upper_at, m.upper, features,
                          total * (1.0 - inv_k) * sb * (1.0 - sb));
  }
  return -std::log(sol.y[y]);
}

struct FitConfig {
  std::size_t epochs = 500;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool use_lower = true;
  bool use_upper = true;
};

/// Thrown when the loss or a parameter stops being finite. Carries the
/// model as it was before the offending step.
class FitDivergence : public std::runtime_error {
 public:
  FitDivergence(const std::string& what, CalibModel last)
      : std::runtime_error(what), last_finite(std::move(last)) {}
  CalibModel last_finite;
};

/// Minimizes mean cross-entropy with Adam over shuffled mini-batches.
inline CalibModel fit(CalibKind kind, const LabeledLogitSet& data, const FitConfig& config = {}) {
  data.validate();
  if (config.batch_size == 0) throw UsageError("batch size must be positive");
  CalibModel model = initial_model(kind, data, config.use_lower, config.use_upper);
  model.meta.seed = config.seed;
  model.meta.epochs = config.epochs;

  auto theta = parameters(model);
  std::vector<double> m1(theta.size(), 0.0);
  std::vector<double> m2(theta.size(), 0.0);
  std::vector<double> grad(theta.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(config.seed, 1);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      for (std::size_t p = start; p < stop; ++p) {
        const std::size_t n = order[p];
        loss += loss_and_grad(model, data.logits[n], data.feature_row(n), data.labels[n], grad);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      if (!std::isfinite(loss))
        throw FitDivergence("non-finite loss at epoch " + std::to_string(epoch), model);

      ++step;
      const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      auto next = theta;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double g = grad[i] * scale;
        m1[i] = config.beta1 * m1[i] + (1.0 - config.beta1) * g;
        m2[i] = config.beta2 * m2[i] + (1.0 - config.beta2) * g * g;
        next[i] -= config.learning_rate * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + config.epsilon);
        if (!std::isfinite(next[i]))
          throw FitDivergence("non-finite parameter at epoch " + std::to_string(epoch), model);
      }
      theta = std::move(next);
      set_parameters(model, theta);
    }
  }
  model.meta.final_loss = mean_loss(model, data);
  if (!std::isfinite(model.meta.final_loss)) throw FitDivergence("non-finite final loss", model);
  return model;
}

// ---------------------------------------------------------------------------
// Expected calibration error over M equal-width confidence bins
// ((m-1)/M, m/M], m = 1..M.

struct EceBin {
  std::size_t count = 0;
  double accuracy = 0.0;
  double confidence = 0.0;
};

struct EceReport {
  double ece = 0.0;
  std::vector<EceBin> per_bin;
  int M = 15;
  double accuracy = 0.0;
  std::size_t n = 0;

  double recompute() const {
    double e = 0.0;
    for (const auto& bin : per_bin)
      if (bin.count > 0)
        e += static_cast<double>(bin.count) / static_cast<double>(n) *
             std::abs(bin.accuracy - bin.confidence);
    return e;
  }
};

/// Index of the largest entry; ties go to the lowest index.
inline std::size_t top_label(std::span<const double> p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

/// Every index attaining the maximum (exact comparison).
inline std::vector<std::size_t> argmax_set(std::span<const double> p) {
  const double best = *std::max_element(p.begin(), p.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] == best) out.push_back(i);
  return out;
}

/// Bin m in 1..M with (m-1)/M < confidence <= m/M. Values <= 0 go to bin 1.
inline std::size_t confidence_bin(double confidence, int M) {
  const double Md = static_cast<double>(M);
  auto m = static_cast<long>(std::ceil(confidence * Md));
  m = std::clamp(m, 1L, static_cast<long>(M));
  while (m > 1 && confidence <= static_cast<double>(m - 1) / Md) --m;
  while (m < M && confidence > static_cast<double>(m) / Md) ++m;
  return static_cast<std::size_t>(m);
}

inline EceReport ece_from_predictions(const std::vector<std::vector<double>>& probs,
                                      std::span<const int> labels, int M = 15) {
  if (M < 1) throw UsageError("number of bins must be >= 1");
  if (probs.size() != labels.size()) throw UsageError("one label per prediction required");
  EceReport r;
  r.M = M;
  r.n = probs.size();
  r.per_bin.assign(static_cast<std::size_t>(M), EceBin{});
  std::vector<std::size_t> correct(static_cast<std::size_t>(M), 0);
  std::vector<double> conf_sum(static_cast<std::size_t>(M), 0.0);
  std::size_t total_correct = 0;
  for (std::size_t n = 0; n < probs.size(); ++n) {
    const std::size_t top = top_label(probs[n]);
    const double conf = probs[n][top];
    const std::size_t bin = confidence_bin(conf, M) - 1;
    const bool hit = static_cast<int>(top) == labels[n];
    ++r.per_bin[bin].count;
    conf_sum[bin] += conf;
    correct[bin] += hit;
    total_correct += hit;
  }
  for (std::size_t m = 0; m < r.per_bin.size(); ++m) {
    auto& bin = r.per_bin[m];
    if (bin.count == 0) continue;
    bin.accuracy = static_cast<double>(correct[m]) / static_cast<double>(bin.count);
    bin.confidence = conf_sum[m] / static_cast<double>(bin.count);
  }
  r.accuracy = r.n ? static_cast<double>(total_correct) / static_cast<double>(r.n) : 0.0;
  r.ece = r.n ? r.recompute() : 0.0;
  return r;
}

inline std::vector<std::vector<double>> predict_all(const CalibModel& m,
                                                    const LabeledLogitSet& data) {
  std::vector<std::vector<double>> out;
  out.reserve(data.size());
  for (std::size_t n = 0; n < data.size(); ++n)
    out.push_back(predict(m, data.logits[n], data.feature_row(n)));
  return out;
}

/// Plain softmax of the raw logits (tau = 1).
inline std::vector<std::vector<double>> uncalibrated(const LabeledLogitSet& data) {
  std::vector<std::vector<double>> out;
  out.reserve(data.size());
  for (const auto& row : data.logits) out.push_back(softmax<double>(row));
  return out;
}

inline EceReport ece(const CalibModel& m, const LabeledLogitSet& data, int M = 15) {
  return ece_from_predictions(predict_all(m, data), data.labels, M);
}

/// Synthetic miscalibrated classifier: true logits z ~ N(0, I_K), label ~
/// softmax(z), reported logits = scale * z, features = z.
inline LabeledLogitSet gen_synthetic(std::size_t N, std::size_t K, double scale,
                                     std::uint64_t seed) {
  if (N < 1 || K < 1) throw UsageError("gen_synthetic needs N >= 1 and K >= 1");
  if (!(scale > 0) || !std::isfinite(scale)) throw UsageError("scale must be positive");
  Rng rng(seed);
  LabeledLogitSet out;
  out.num_classes = K;
  out.logits.reserve(N);
  out.labels.reserve(N);
  out.features.reserve(N);
  std::vector<double> z(K);
  for (std::size_t n = 0; n < N; ++n) {
    for (double& v : z) v = rng.normal();
    const auto p = softmax<double>(z);
    out.labels.push_back(static_cast<int>(rng.categorical(p)));
    std::vector<double> x(K);
    for (std::size_t k = 0; k < K; ++k) x[k] = scale * z[k];
    out.logits.push_back(std::move(x));
    out.features.push_back(z);
  }
  return out;
}

}  // namespace bcsoftmax::calib
