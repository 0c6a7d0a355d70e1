#pragma once

// Random problem instances for tests, verification and benchmarks.
// Logits ~ N(0, 3^2). Upper bounds b_k ~ U(0, 1) rescaled by 1 / min(1, sum b)
// so that sum b >= 1, then clamped to 1. Lower bounds a_k ~ U(0, 1/K), then
// a_k = min(a_k, b_k).

#include <algorithm>
#include <cstddef>
#include <vector>

#include "bcsoftmax/random.hpp"
#include "bcsoftmax/types.hpp"

namespace bcsoftmax {

struct Instance {
  std::vector<double> x;
  std::vector<double> a;
  std::vector<double> b;

  std::size_t size() const { return x.size(); }
  BoxBounds<double> bounds() const { return BoxBounds<double>(a, b); }
};

inline constexpr double instance_logit_stddev = 3.0;

inline std::vector<double> random_logits(Rng& rng, std::size_t K,
                                         double stddev = instance_logit_stddev) {
  std::vector<double> x(K);
  for (double& v : x) v = rng.normal(0.0, stddev);
  return x;
}

inline std::vector<double> random_upper(Rng& rng, std::size_t K) {
  std::vector<double> b(K);
  double total = 0.0;
  for (double& v : b) {
    // U(0, 1) may return exactly 0; b must stay positive
    do v = rng.uniform(); while (v <= 0.0);
    total += v;
  }
  const double denom = std::min(1.0, total);
  for (double& v : b) v = std::min(1.0, v / denom);
  return b;
}

inline Instance random_instance(Rng& rng, std::size_t K, double stddev = instance_logit_stddev) {
  Instance inst;
  inst.x = random_logits(rng, K, stddev);
  inst.b = random_upper(rng, K);
  inst.a.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    inst.a[k] = std::min(rng.uniform(0.0, 1.0 / static_cast<double>(K)), inst.b[k]);
  return inst;
}

}  // namespace bcsoftmax
