#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "proxmkl/oracle.hpp"
#include "proxmkl/prox.hpp"
#include "proxmkl/struct_loss.hpp"

namespace proxmkl {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(BruteForce, ZeroFunctionReturnsInput) {
  oracle::ConvexFunction zero;
  zero.value = [](const Vector&) { return 0.0; };
  zero.subgradient = [](const Vector& z) { return Vector::Zero(z.size()); };
  const Vector x = vec({1.5, -2.0, 0.25});
  const auto r = oracle::brute_force_prox(x, zero);
  EXPECT_LE((r.point - x).norm(), 1e-8);
  EXPECT_LE(r.objective, 1e-15);
}

TEST(BruteForce, SquaredL1KnownValue) {
  const auto r = oracle::brute_force_prox(vec({3.0, 1.0}), oracle::squared_l1(1.0));
  const ProxResult exact = prox_squared_l1(vec({3.0, 1.0}), 1.0);
  EXPECT_NEAR(r.objective, exact.envelope_value, 1e-7);
  EXPECT_GE(r.objective, exact.envelope_value - 1e-12);
}

TEST(BruteForce, L1BallMatchesProjection) {
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    const Vector x = vec({u(rng), u(rng), u(rng)});
    const auto r = oracle::brute_force_prox(x, oracle::l1_ball(1.0));
    EXPECT_LE((r.point - project_l1_ball(x, 1.0)).norm(), 1e-6);
  }
}

TEST(BruteForce, DimensionGuard) {
  EXPECT_THROW(oracle::brute_force_prox(Vector::Zero(13), oracle::squared_l1(1.0)), std::invalid_argument);
  EXPECT_THROW(oracle::brute_force_prox(Vector(), oracle::squared_l1(1.0)), std::invalid_argument);
}

TEST(Enumerate, SinglePositionAndGuard) {
  ChainScores s{Matrix(1, 3), Matrix::Zero(3, 3)};
  s.emission << 0.1, 0.7, 0.7;
  const Decoding d = oracle::enumerate_decode(s);
  EXPECT_EQ(d.labels, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(d.score, 0.7);

  const ChainScores big{Matrix::Zero(30, 5), Matrix::Zero(5, 5)};
  EXPECT_THROW(oracle::enumerate_decode(big), std::invalid_argument);
  EXPECT_THROW(oracle::enumerate_partition(big), std::invalid_argument);
}

TEST(Enumerate, ZeroScoresWithCost) {
  const ChainScores s{Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
  const Decoding d = oracle::enumerate_decode(s, hamming_cost({0, 0}, 2));
  EXPECT_EQ(d.labels, (std::vector<int>{1, 1}));
  EXPECT_DOUBLE_EQ(d.score, 2.0);
  EXPECT_NEAR(oracle::enumerate_partition(s).log_partition, 2.0 * std::log(2.0), 1e-15);
}

TEST(FiniteDiff, Examples) {
  const auto linear = [](const Vector& v) { return 2.0 * v[0] - 3.0 * v[1]; };
  const Vector g = oracle::finite_diff_gradient(linear, vec({0.3, 0.4}));
  EXPECT_NEAR(g[0], 2.0, 1e-10);
  EXPECT_NEAR(g[1], -3.0, 1e-10);

  const auto quad = [](const Vector& v) { return 0.5 * v[0] * v[0]; };
  EXPECT_NEAR(oracle::finite_diff_gradient(quad, vec({3.0}))[0], 3.0, 1e-10);

  const Vector sub = oracle::finite_diff_gradient(linear, vec({0.3, 0.4}), {1});
  ASSERT_EQ(sub.size(), 1);
  EXPECT_NEAR(sub[0], -3.0, 1e-10);
}

TEST(Comparator, QuadraticStreamFindsMean) {
  const QuadraticLoss loss = QuadraticLoss::centers({vec({1.0}), vec({2.0}), vec({6.0})}, {0, 1});
  oracle::ComparatorOptions opt;
  opt.radius = 10.0;
  opt.iterations = 20000;
  const auto r = oracle::batch_comparator(loss, RegularizerChain{}, 1.0, opt);
  EXPECT_NEAR(r.theta.values()[0], 3.0, 1e-4);
  const double best = (4.0 + 1.0 + 9.0) / 6.0;
  EXPECT_NEAR(r.objective, best, 1e-8);
  EXPECT_LE(r.lower_bound, best + 1e-12);
}

TEST(Comparator, RidgeHingeBeatsRandomProbes) {
  std::mt19937_64 rng(82);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> lab(0, 1);
  const FeatureLayout layout = FeatureLayout::uniform(2, 2, 1, false);
  std::vector<ChainInstance> data(8);
  for (auto& x : data) {
    x.inputs = Matrix(2, 2);
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j) x.inputs(i, j) = u(rng);
    x.labels = {lab(rng), lab(rng)};
  }
  const ChainLoss loss(layout, data, LossKind::hinge);
  const RegularizerChain ridge{{RegularizerTerm::make(TermKind::sq_l2)}};
  const double lambda = 0.1;
  oracle::ComparatorOptions opt;
  opt.radius = loss.bounds(lambda)->gamma;
  const auto r = oracle::batch_comparator(loss, ridge, lambda, opt);
  EXPECT_NEAR(r.objective, oracle::batch_objective(loss, ridge, lambda, r.theta), 1e-12);
  for (int p = 0; p < 1000; ++p) {
    GroupedVector probe = loss.zeros();
    for (Index i = 0; i < probe.size(); ++i) probe.mutable_values()[i] = 2.0 * u(rng);
    EXPECT_LE(r.objective, oracle::batch_objective(loss, ridge, lambda, probe) + 1e-12);
  }
}

TEST(Comparator, NoDataMeansZero) {
  const QuadraticLoss loss = QuadraticLoss::centers({vec({0.0, 0.0})}, {0, 2});
  oracle::ComparatorOptions opt;
  opt.radius = 1.0;
  const auto r = oracle::batch_comparator(loss, RegularizerChain{{RegularizerTerm::make(TermKind::l21)}}, 1.0, opt);
  EXPECT_EQ(r.theta.values(), Vector::Zero(2));
  EXPECT_EQ(r.objective, 0.0);
}

TEST(Certify, AllChecksPass) {
  const auto reports = oracle::certify(3, 20);
  ASSERT_FALSE(reports.empty());
  for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.name << ": deviation " << r.deviation;
  std::ostringstream out;
  oracle::write_reports_csv(out, reports);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "name,oracle_value,library_value,deviation,tolerance,pass");
}

}  // namespace
}  // namespace proxmkl
