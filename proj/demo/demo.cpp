// Small tour of the library: constrained probabilities, active sets,
// gradients and a temperature-scaling fit on synthetic data.

#include <cstdio>
#include <vector>

#include "bcsoftmax/autodiff.hpp"
#include "bcsoftmax/calib.hpp"
#include "bcsoftmax/core.hpp"

using namespace bcsoftmax;

namespace {

void print(const char* label, const std::vector<double>& v) {
  std::printf("%-28s", label);
  for (double e : v) std::printf(" %9.6f", e);
  std::printf("\n");
}

}  // namespace

int main() {
  const std::vector<double> x{-1.5, 1.0, -0.5};
  print("softmax", softmax<double>(x));

  // cap the top class at 0.6
  const BoxBounds<double> cap(std::vector<double>(3, 0.0), std::vector<double>{1.0, 0.6, 0.5});
  const auto capped = bcsoftmax<double>(x, cap);
  print("upper bounds (1, .6, .5)", capped.y);
  std::printf("%-28s %zu lower, %zu upper, %zu free\n", "  active set",
              capped.active.num_lower(), capped.active.num_upper(), capped.active.num_free());

  // every class gets at least 0.2
  const auto floor = bcsoftmax<double>(x, BoxBounds<double>::uniform(3, 0.2, 1.0));
  print("lower bound 0.2", floor.y);

  // scalar bounds are equivalent to clipping the logits
  const auto cb = scalar_bounds_to_clip<double>(x, 0.2, 0.6);
  std::printf("%-28s [%.6f, %.6f]\n", "clip window for (0.2, 0.6)", cb.lower, cb.upper);
  print("  softmax(clip(x))", softmax<double>(clip<double>(x, cb.lower, cb.upper)));

  // vector-Jacobian products for a loss gradient dL/dy = v
  const auto f = jacobian_factors<double>(x, cap);
  const std::vector<double> v{1.0, 0.0, -1.0};
  print("v^T dy/dx", vjp_x<double>(f, v));
  print("v^T dy/db", vjp_b<double>(f, v));

  // temperature scaling on overconfident synthetic logits
  const auto data = calib::gen_synthetic(4000, 10, 3.0, 7);
  const auto train = data.slice(0, 2000);
  const auto test = data.slice(2000, 4000);
  calib::FitConfig cfg;
  cfg.epochs = 100;
  const auto model = calib::fit(calib::CalibKind::ts, train, cfg);
  const auto before = calib::ece_from_predictions(calib::uncalibrated(test), test.labels, 15);
  const auto after = calib::ece(model, test, 15);
  std::printf("temperature scaling: tau %.3f, ECE %.4f -> %.4f, accuracy %.4f\n", model.tau(),
              before.ece, after.ece, after.accuracy);
  return 0;
}
