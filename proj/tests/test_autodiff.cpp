#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "bcsoftmax/autodiff.hpp"
#include "bcsoftmax/instances.hpp"

using namespace bcsoftmax;
using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;

namespace {

// Dense Jacobians built entry by entry from the pin flags.
struct Dense {
  Matrix jx, ja, jb;
};

Dense dense_jacobians(const JacobianFactors<double>& f) {
  const std::size_t K = f.size();
  Dense d{Matrix(K, Vec(K, 0.0)), Matrix(K, Vec(K, 0.0)), Matrix(K, Vec(K, 0.0))};
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      const double rank1 = f.s > 0 ? f.q[i] / f.s : 0.0;
      d.jx[i][j] = (i == j ? f.q[i] : 0.0) - rank1 * f.q[j];
      d.ja[i][j] = (i == j && f.g[i] ? 1.0 : 0.0) - rank1 * (f.g[j] ? 1.0 : 0.0);
      d.jb[i][j] = (i == j && f.h[i] ? 1.0 : 0.0) - rank1 * (f.h[j] ? 1.0 : 0.0);
    }
  }
  return d;
}

Vec mat_vec(const Matrix& m, const Vec& v) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

Vec vec_mat(const Vec& v, const Matrix& m) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[j] += v[i] * m[i][j];
  return out;
}

Vec random_vec(Rng& rng, std::size_t K) {
  Vec v(K);
  for (double& e : v) e = rng.normal();
  return v;
}

void expect_close(const Vec& got, const Vec& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << i;
}

const Vec kX{-1.5, 1.0, -0.5};
const Vec kB{1.0, 0.6, 0.5};

}  // namespace

TEST(Factors, Unconstrained) {
  const Vec x{0.2, -0.7, 1.1, 0.0};
  const auto f = jacobian_factors<double>(x, BoxBounds<double>::unconstrained(4));
  expect_close(f.q, softmax<double>(x), 1e-15);
  EXPECT_NEAR(f.s, 1.0, 1e-15);
  EXPECT_EQ(std::count(f.g.begin(), f.g.end(), true), 0);
  EXPECT_EQ(std::count(f.h.begin(), f.h.end(), true), 0);
}

TEST(Factors, FullyPinnedByLowerBounds) {
  const Vec a{0.5, 0.25, 0.25};
  const auto f = jacobian_factors<double>(Vec{1, 2, 3}, BoxBounds<double>(a, Vec(3, 1.0)));
  expect_close(f.q, Vec(3, 0.0), 0.0);
  EXPECT_EQ(f.s, 0.0);
  EXPECT_EQ(f.g, (std::vector<bool>{true, true, true}));
}

TEST(Factors, ReferenceInstance) {
  const auto f = jacobian_factors<double>(kX, BoxBounds<double>(Vec(3, 0.0), kB));
  EXPECT_EQ(f.h, (std::vector<bool>{false, true, false}));
  expect_close(f.q, {0.107576568547998054, 0.0, 0.292423431452001968}, 1e-15);
  EXPECT_NEAR(f.s, 0.4, 1e-15);
  const double total = std::accumulate(f.q.begin(), f.q.end(), 0.0);
  EXPECT_NEAR(total, f.s, tol::simplex);
}

TEST(Vjp, UnconstrainedIsSoftmaxVjp) {
  Rng rng(2);
  const Vec x = random_logits(rng, 6);
  const auto f = jacobian_factors<double>(x, BoxBounds<double>::unconstrained(6));
  const auto p = softmax<double>(x);
  const Vec v = random_vec(rng, 6);
  double pv = 0.0;
  for (std::size_t i = 0; i < 6; ++i) pv += p[i] * v[i];
  Vec want(6);
  for (std::size_t i = 0; i < 6; ++i) want[i] = p[i] * v[i] - p[i] * pv;
  expect_close(vjp_x<double>(f, v), want, 1e-15);
}

TEST(Vjp, OnesGiveZero) {
  Rng rng(6);
  std::size_t degenerate = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t K = 2 + rng.index(30);
    const auto inst = random_instance(rng, K);
    const auto f = jacobian_factors<double>(inst.x, inst.bounds());
    const Vec ones(K, 1.0);
    expect_close(vjp_x<double>(f, ones), Vec(K, 0.0), 1e-10);
    if (f.s == 0.0) {
      // single feasible point: the a/b blocks are Diag(g), Diag(h)
      ++degenerate;
      continue;
    }
    expect_close(vjp_a<double>(f, ones), Vec(K, 0.0), 1e-10);
    expect_close(vjp_b<double>(f, ones), Vec(K, 0.0), 1e-10);
  }
  EXPECT_LT(degenerate, 300u);
}

TEST(Vjp, NoLowerPinsGiveZero) {
  const auto f = jacobian_factors<double>(kX, BoxBounds<double>(Vec(3, 0.0), kB));
  expect_close(vjp_a<double>(f, Vec{0.3, -2.0, 1.0}), Vec(3, 0.0), 0.0);
}

TEST(Vjp, UnitVectorAtPinnedIndex) {
  const auto f = jacobian_factors<double>(kX, BoxBounds<double>(Vec(3, 0.0), kB));
  // v = e_1 with index 1 upper-pinned: e_1 - g * q_1 / s = e_1
  expect_close(vjp_b<double>(f, Vec{0.0, 1.0, 0.0}), Vec{0.0, 1.0, 0.0}, 0.0);
}

TEST(Vjp, DegenerateFreeMass) {
  const Vec a{0.5, 0.25, 0.25};
  const auto f = jacobian_factors<double>(Vec{1, 2, 3}, BoxBounds<double>(a, Vec(3, 1.0)));
  const Vec v{1.0, -2.0, 3.0};
  expect_close(vjp_x<double>(f, v), Vec(3, 0.0), 0.0);
  expect_close(vjp_a<double>(f, v), v, 0.0);
}

TEST(Jvp, ZeroTangents) {
  const auto f = jacobian_factors<double>(kX, BoxBounds<double>(Vec(3, 0.0), kB));
  const Vec z(3, 0.0);
  expect_close(jvp<double>(f, z, z, z), z, 0.0);
  expect_close(jvp<double>(f, {}, {}, {}), z, 0.0);
}

TEST(Dense, ProductsMatchExplicitMatrices) {
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    const std::size_t K = 2 + rng.index(7);
    const auto inst = random_instance(rng, K);
    const auto f = jacobian_factors<double>(inst.x, inst.bounds());
    const auto d = dense_jacobians(f);
    const Vec v = random_vec(rng, K);
    const Vec dx = random_vec(rng, K);
    const Vec da = random_vec(rng, K);
    const Vec db = random_vec(rng, K);
    expect_close(vjp_x<double>(f, v), vec_mat(v, d.jx), tol::eq);
    expect_close(vjp_a<double>(f, v), vec_mat(v, d.ja), tol::eq);
    expect_close(vjp_b<double>(f, v), vec_mat(v, d.jb), tol::eq);
    Vec want = mat_vec(d.jx, dx);
    const Vec wa = mat_vec(d.ja, da);
    const Vec wb = mat_vec(d.jb, db);
    for (std::size_t i = 0; i < K; ++i) want[i] += wa[i] + wb[i];
    expect_close(jvp<double>(f, dx, da, db), want, tol::eq);
  }
}

TEST(FiniteDifferences, ReferenceInstance) {
  const auto r = check_gradients<double>(kX, BoxBounds<double>(Vec(3, 0.0), kB), 1e-6, 1e-5);
  EXPECT_LT(r.max_dev_x, 1e-6);
  EXPECT_LT(r.max_dev_b, 1e-6);
  EXPECT_TRUE(r.passed);
}

TEST(FiniteDifferences, Unconstrained) {
  Rng rng(29);
  const Vec x = random_logits(rng, 6);
  const auto r = check_gradients<double>(x, BoxBounds<double>::unconstrained(6), 1e-6, 1e-5);
  EXPECT_LT(r.max_dev_x, 1e-6);
  // raising b above 1 leaves the feasible set
  EXPECT_TRUE(r.boundary);
  EXPECT_TRUE(r.passed);
}

TEST(FiniteDifferences, BoundaryIsFlagged) {
  // x chosen so the free solution puts exactly 0.5 on index 2
  const Vec x{0.0, 0.0, std::log(2.0)};
  const auto r = check_gradients<double>(x, BoxBounds<double>(Vec(3, 0.0), Vec{1.0, 1.0, 0.5}),
                                         1e-6, 1e-5);
  EXPECT_TRUE(r.boundary);
  EXPECT_GT(r.skipped, 0u);
}

TEST(FiniteDifferences, RandomInstances) {
  Rng rng(37);
  std::size_t checked = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t K = 2 + rng.index(7);
    const auto inst = random_instance(rng, K);
    const auto r = check_gradients<double>(inst.x, inst.bounds(), 1e-6, 1e-5);
    EXPECT_TRUE(r.passed) << t << " dev " << r.max_dev();
    checked += r.checked;
  }
  EXPECT_GT(checked, 1000u);
}
