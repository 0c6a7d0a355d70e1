#pragma once

// Wall-clock scaling of the solvers over K = kmin, 2 kmin, ..., kmax.
// Each repetition times one pass over a fixed batch of random instances.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "bcsoftmax/core.hpp"
#include "bcsoftmax/instances.hpp"
#include "bcsoftmax/io.hpp"

namespace bcsoftmax::bench {

struct Config {
  std::size_t kmin = 32;
  std::size_t kmax = 1024;
  std::size_t batch = 128;
  std::size_t reps = 11;
  std::size_t warmup = 2;
  std::uint64_t seed = 0;
};

struct Row {
  std::size_t K = 0;
  std::string algo;
  double median_ns = 0.0;  // per batch
  double p10_ns = 0.0;
  double p90_ns = 0.0;
};

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline const std::vector<std::string>& algorithms() {
  static const std::vector<std::string> names{"bcsoftmax", "bcsoftmax_quadratic",
                                              "ubsoftmax_select"};
  return names;
}

namespace detail {

// nearest-rank quantile of sorted values
inline double quantile(const std::vector<double>& sorted, double q) {
  const auto idx = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1) + 0.5);
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace detail

/// Times one algorithm over a batch. `sink` keeps results observable.
inline Row time_batch(const std::string& algo, const std::vector<Instance>& batch,
                      const Config& cfg, double& sink) {
  std::vector<BoxBounds<double>> boxes;
  std::vector<UpperBounds<double>> uppers;
  for (const auto& inst : batch) {
    boxes.push_back(inst.bounds());
    uppers.emplace_back(inst.b);
  }
  const Temperature<double> tau{1.0};
  std::function<double(std::size_t)> run;
  if (algo == "bcsoftmax")
    run = [&](std::size_t i) {
      return bcsoftmax<double>(batch[i].x, boxes[i], tau, SearchOptions{false}).y[0];
    };
  else if (algo == "bcsoftmax_quadratic")
    run = [&](std::size_t i) { return bcsoftmax_quadratic<double>(batch[i].x, boxes[i], tau).y[0]; };
  else if (algo == "ubsoftmax_select")
    run = [&](std::size_t i) { return ubsoftmax_select<double>(batch[i].x, uppers[i], tau).y[0]; };
  else
    throw std::invalid_argument("unknown benchmark algorithm '" + algo + "'");

  std::vector<double> times;
  for (std::size_t r = 0; r < cfg.warmup + cfg.reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < batch.size(); ++i) sink += run(i);
    const auto t1 = std::chrono::steady_clock::now();
    if (r >= cfg.warmup)
      times.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  Row row;
  row.K = batch.empty() ? 0 : batch.front().size();
  row.algo = algo;
  row.median_ns = detail::quantile(times, 0.5);
  row.p10_ns = detail::quantile(times, 0.1);
  row.p90_ns = detail::quantile(times, 0.9);
  return row;
}

inline std::vector<Row> run(const Config& cfg) {
  if (!is_power_of_two(cfg.kmin) || !is_power_of_two(cfg.kmax) || cfg.kmin > cfg.kmax)
    throw std::invalid_argument("kmin and kmax must be powers of two with kmin <= kmax");
  if (cfg.batch == 0 || cfg.reps == 0) throw std::invalid_argument("batch and reps must be >= 1");
  std::vector<Row> rows;
  double sink = 0.0;
  for (std::size_t K = cfg.kmin; K <= cfg.kmax; K *= 2) {
    Rng rng(cfg.seed, K);
    std::vector<Instance> batch;
    for (std::size_t i = 0; i < cfg.batch; ++i) batch.push_back(random_instance(rng, K));
    for (const auto& algo : algorithms()) rows.push_back(time_batch(algo, batch, cfg, sink));
  }
  if (sink == -1.0) rows.clear();  // never true; keeps the work alive
  return rows;
}

inline void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  out << "K,algo,median_ns,p10_ns,p90_ns\n";
  for (const auto& r : rows)
    out << r.K << ',' << r.algo << ',' << io::format_double(r.median_ns) << ','
        << io::format_double(r.p10_ns) << ',' << io::format_double(r.p90_ns) << '\n';
}

}  // namespace bcsoftmax::bench
