#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bcsoftmax/calib.hpp"

using namespace bcsoftmax;
using namespace bcsoftmax::calib;
using Vec = std::vector<double>;

namespace {

const Vec kX{-1.5, 1.0, -0.5};

CalibModel model_of(CalibKind kind, double tau = 1.0) {
  CalibModel m;
  m.kind = kind;
  m.tau_raw = std::log(tau);
  return m;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

void expect_vec_near(const Vec& got, const Vec& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << i;
}

}  // namespace

TEST(PredictTs, Values) {
  expect_vec_near(predict_ts(model_of(CalibKind::ts), kX), softmax<double>(kX), 0.0);
  expect_vec_near(predict_ts(model_of(CalibKind::ts, 2.0), kX),
                  {0.162891275092490623, 0.568546414851054102, 0.268562310056455275}, 1e-15);
  expect_vec_near(predict_ts(model_of(CalibKind::ts, 1e9), kX), Vec(3, 1.0 / 3.0), 1e-9);
}

TEST(PredictPb, VanishingBoundsGiveTemperedSoftmax) {
  auto m = model_of(CalibKind::pb_c, 1.7);
  m.lower.bias = -800.0;
  m.upper.bias = 800.0;
  expect_vec_near(predict_pb(m, kX), softmax<double>(kX, Temperature<double>{1.7}), 1e-15);
}

TEST(PredictPb, UpperBoundOnly) {
  auto m = model_of(CalibKind::pb_c);
  m.use_lower = false;
  // 1/3 + (2/3) sigmoid(b') = 0.6
  m.upper.bias = logit(0.4);
  const auto [a, b] = pb_bounds(m, 3, {});
  EXPECT_EQ(a, 0.0);
  EXPECT_NEAR(b, 0.6, 1e-15);
  expect_vec_near(predict_pb(m, kX), {0.107576568547998054, 0.6, 0.292423431452001968}, 1e-12);
}

TEST(PredictPb, BoundsStayInsideOpenIntervals) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    auto m = model_of(CalibKind::pb_c);
    m.lower.bias = rng.normal(0.0, 10.0);
    m.upper.bias = rng.normal(0.0, 10.0);
    const std::size_t K = 2 + rng.index(20);
    const auto [a, b] = pb_bounds(m, K, {});
    const double kinv = 1.0 / static_cast<double>(K);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, kinv);
    EXPECT_GE(b, kinv);
    EXPECT_LE(b, 1.0);
  }
}

TEST(PredictPb, LinearNeedsFeatures) {
  auto m = model_of(CalibKind::pb_l);
  m.lower.weight = {0.1, 0.2};
  m.upper.weight = {0.0, 0.0};
  EXPECT_THROW(predict_pb(m, kX), UsageError);
  EXPECT_THROW(predict_pb(m, kX, Vec{1.0}), UsageError);
  EXPECT_NO_THROW(predict_pb(m, kX, Vec{1.0, -1.0}));
}

TEST(PredictPb, ArgmaxContainmentAndEquality) {
  Rng rng(2);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t K = 2 + rng.index(15);
    Vec x(K);
    for (double& v : x) v = std::round(rng.normal(0.0, 3.0) * 2.0) / 2.0;  // ties happen
    auto m = model_of(CalibKind::pb_c, std::exp(rng.normal(0.0, 0.5)));
    m.lower.bias = rng.normal(0.0, 3.0);
    m.upper.bias = rng.normal(0.0, 3.0);
    const auto raw = argmax_set(softmax<double>(x));
    const auto both = argmax_set(predict_pb(m, x));
    for (std::size_t i : raw) EXPECT_TRUE(std::find(both.begin(), both.end(), i) != both.end());
    m.use_upper = false;
    EXPECT_EQ(argmax_set(predict_pb(m, x)), raw);
  }
}

TEST(PredictLb, VanishingClipGivesTemperedSoftmax) {
  for (CalibKind kind : {CalibKind::lb_c, CalibKind::lb_l}) {
    auto m = model_of(kind, 0.8);
    m.lower.bias = -50.0;
    m.upper.bias = 200.0;
    expect_vec_near(predict_lb(m, kX), softmax<double>(kX, Temperature<double>{0.8}), 1e-15);
  }
}

TEST(PredictLb, ClipWindow) {
  auto m = model_of(CalibKind::lb_l);
  m.lower.bias = 0.0;
  // c' + softplus(C') = ln 2
  m.upper.bias = std::log(std::expm1(std::log(2.0)));
  expect_vec_near(predict_lb(m, Vec{0.0, 0.0, 4.0}), {0.25, 0.25, 0.5}, 1e-15);
}

TEST(PredictLb, ConstantLogitsAreUniform) {
  auto m = model_of(CalibKind::lb_c);
  m.lower.bias = 0.3;
  m.upper.bias = -2.0;
  expect_vec_near(predict_lb(m, Vec(5, 2.5)), Vec(5, 0.2), 1e-15);
}

TEST(PredictLb, ClipOrdering) {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    for (CalibKind kind : {CalibKind::lb_c, CalibKind::lb_l}) {
      auto m = model_of(kind);
      m.lower.bias = rng.normal(0.0, 5.0);
      m.upper.bias = rng.normal(0.0, 5.0);
      Vec x(4);
      for (double& v : x) v = rng.normal(0.0, 3.0);
      const auto cb = lb_clip(m, x, {});
      EXPECT_LE(cb.lower, cb.upper);
    }
  }
}

TEST(CeLoss, Values) {
  EXPECT_EQ(ce_loss(Vec{1.0, 0.0, 0.0}, 0), 0.0);
  EXPECT_NEAR(ce_loss(Vec(4, 0.25), 3), std::log(4.0), 1e-15);
  EXPECT_NEAR(ce_loss(Vec{0.1076, 0.6, 0.2924}, 1), 0.510825623765990683, 1e-15);
  EXPECT_NEAR(ce_loss(Vec{1.0, 0.0}, 1), -std::log(1e-12), 1e-12);
}

// Finite differences of the mean loss with respect to every raw parameter.
TEST(Gradient, MatchesFiniteDifferences) {
  const auto data = gen_synthetic(40, 5, 3.0, 17);
  Rng rng(4);
  for (CalibKind kind :
       {CalibKind::ts, CalibKind::pb_c, CalibKind::pb_l, CalibKind::lb_c, CalibKind::lb_l}) {
    for (int variant = 0; variant < 3; ++variant) {
      CalibModel m = initial_model(kind, data, variant != 1, variant != 2);
      // move away from the initial point so bounds and clips are active
      auto theta = parameters(m);
      theta[0] = std::log(2.0);
      for (std::size_t i = 1; i < theta.size(); ++i) theta[i] = rng.normal(0.0, 0.5);
      if (is_lb(kind) && theta.size() > 1) theta[1] = kind == CalibKind::lb_c ? -0.3 : -2.0;
      set_parameters(m, theta);

      std::vector<double> grad(theta.size(), 0.0);
      for (std::size_t n = 0; n < data.size(); ++n)
        loss_and_grad(m, data.logits[n], data.feature_row(n), data.labels[n], grad);
      for (double& g : grad) g /= static_cast<double>(data.size());

      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double h = 1e-6;
        auto tp = theta, tm = theta;
        tp[i] += h;
        tm[i] -= h;
        CalibModel mp = m, mm = m;
        set_parameters(mp, tp);
        set_parameters(mm, tm);
        const double fd = (mean_loss(mp, data) - mean_loss(mm, data)) / (2 * h);
        EXPECT_NEAR(grad[i], fd, 1e-5 * std::max(1.0, std::abs(fd)))
            << to_string(kind) << " variant " << variant << " param " << i;
      }
    }
  }
}

TEST(Fit, ZeroEpochsReturnsInitialModel) {
  const auto data = gen_synthetic(100, 4, 2.0, 1);
  FitConfig cfg;
  cfg.epochs = 0;
  const auto m = fit(CalibKind::ts, data, cfg);
  EXPECT_DOUBLE_EQ(m.tau(), 1.5);
  const auto pb = fit(CalibKind::pb_c, data, cfg);
  EXPECT_EQ(parameters(pb), parameters(initial_model(CalibKind::pb_c, data)));
}

TEST(Fit, TemperatureRecoversScale) {
  for (double scale : {1.0, 3.0}) {
    const auto data = gen_synthetic(5000, 10, scale, 42);
    FitConfig cfg;
    cfg.seed = 42;
    const auto m = fit(CalibKind::ts, data, cfg);
    if (scale == 1.0) {
      EXPECT_GE(m.tau(), 0.9);
      EXPECT_LE(m.tau(), 1.1);
    } else {
      EXPECT_GE(m.tau(), 2.5);
      EXPECT_LE(m.tau(), 3.5);
    }
  }
}

TEST(Fit, LossDoesNotIncrease) {
  const auto data = gen_synthetic(1000, 6, 3.0, 9);
  for (CalibKind kind :
       {CalibKind::ts, CalibKind::pb_c, CalibKind::pb_l, CalibKind::lb_c, CalibKind::lb_l}) {
    FitConfig cfg;
    cfg.epochs = 60;
    const auto m = fit(kind, data, cfg);
    const double before = mean_loss(initial_model(kind, data), data);
    EXPECT_LE(m.meta.final_loss, before + tol::obj) << to_string(kind);
    EXPECT_NEAR(m.meta.final_loss, mean_loss(m, data), 1e-12);
  }
}

TEST(Fit, Deterministic) {
  const auto data = gen_synthetic(500, 5, 2.0, 5);
  FitConfig cfg;
  cfg.epochs = 20;
  cfg.seed = 3;
  EXPECT_EQ(parameters(fit(CalibKind::pb_c, data, cfg)),
            parameters(fit(CalibKind::pb_c, data, cfg)));
}

TEST(Fit, PbOnCalibratedDataStaysCloseToTs) {
  const auto data = gen_synthetic(3000, 5, 1.0, 8);
  FitConfig cfg;
  cfg.epochs = 100;
  const auto ts = fit(CalibKind::ts, data, cfg);
  const auto pb = fit(CalibKind::pb_c, data, cfg);
  const double pmin = [&] {
    double v = 1.0;
    for (const auto& row : data.logits)
      for (double p : predict_ts(ts, row)) v = std::min(v, p);
    return v;
  }();
  const auto [a, b] = pb_bounds(pb, 5, {});
  const bool inactive = a < pmin;
  EXPECT_TRUE(inactive || pb.meta.final_loss <= 1.01 * ts.meta.final_loss)
      << "a=" << a << " b=" << b << " pb=" << pb.meta.final_loss << " ts=" << ts.meta.final_loss;
}

TEST(Fit, RejectsBadData) {
  LabeledLogitSet bad;
  bad.num_classes = 3;
  bad.logits = {{0.0, 1.0, 2.0}};
  bad.labels = {3};
  EXPECT_THROW(fit(CalibKind::ts, bad), UsageError);
  const auto data = gen_synthetic(10, 3, 1.0, 0);
  auto no_features = data;
  no_features.features.clear();
  EXPECT_THROW(fit(CalibKind::pb_l, no_features), UsageError);
}

TEST(Ece, TwoSampleExample) {
  const std::vector<Vec> probs{{0.65, 0.35}, {0.38, 0.62}};
  const std::vector<int> labels{0, 0};  // second prediction (class 1) is wrong
  const auto r = ece_from_predictions(probs, labels, 15);
  EXPECT_DOUBLE_EQ(r.ece, 0.135);
  EXPECT_EQ(r.per_bin[9].count, 2u);  // (0.6, 0.6667]
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
}

TEST(Ece, PerfectConfidentPredictions) {
  const std::vector<Vec> probs{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};
  const std::vector<int> labels{0, 1, 2};
  const auto r = ece_from_predictions(probs, labels, 15);
  EXPECT_EQ(r.ece, 0.0);
  EXPECT_EQ(r.per_bin[14].count, 3u);
}

TEST(Ece, UniformPredictorAtChance) {
  const std::vector<Vec> probs(10, Vec{0.5, 0.5});
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  EXPECT_EQ(ece_from_predictions(probs, labels, 15).ece, 0.0);
}

TEST(Ece, BinEdges) {
  EXPECT_EQ(confidence_bin(1.0, 15), 15u);
  EXPECT_EQ(confidence_bin(1.0 / 15.0, 15), 1u);
  EXPECT_EQ(confidence_bin(2.0 / 15.0, 15), 2u);
  EXPECT_EQ(confidence_bin(std::nextafter(2.0 / 15.0, 1.0), 15), 3u);
  EXPECT_EQ(confidence_bin(0.5, 2), 1u);
  EXPECT_EQ(confidence_bin(0.5000001, 2), 2u);
  EXPECT_EQ(confidence_bin(0.3, 1), 1u);
}

TEST(Ece, RecomputesFromBins) {
  const auto data = gen_synthetic(2000, 7, 3.0, 12);
  const auto r = ece_from_predictions(uncalibrated(data), data.labels, 15);
  std::size_t total = 0;
  for (const auto& bin : r.per_bin) total += bin.count;
  EXPECT_EQ(total, data.size());
  EXPECT_NEAR(r.ece, r.recompute(), 1e-12);
  EXPECT_GT(r.ece, 0.05);  // scale 3 is overconfident
}

TEST(Synthetic, Deterministic) {
  const auto a = gen_synthetic(50, 4, 3.0, 99);
  const auto b = gen_synthetic(50, 4, 3.0, 99);
  EXPECT_EQ(a.logits, b.logits);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.features, b.features);
  const auto one = gen_synthetic(1, 3, 1.0, 0);
  EXPECT_NO_THROW(one.validate());
  EXPECT_EQ(one.size(), 1u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_DOUBLE_EQ(one.logits[0][k], one.features[0][k]);
}
