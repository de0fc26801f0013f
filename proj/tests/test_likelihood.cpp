#include <gtest/gtest.h>

#include <cmath>

#include "mmc/likelihood.hpp"
#include "mmc/metrics.hpp"
#include "test_util.hpp"

using namespace mmc;

namespace {

TrajectorySet one_trajectory(std::initializer_list<int> xs, int S) {
  TrajectorySet t;
  t.T = 1;
  t.H = static_cast<int>(xs.size());
  t.S = S;
  for (int x : xs) t.states.push_back(static_cast<State>(x));
  return t;
}

}  // namespace

TEST(PoolEstimates, HandCountsNoSmoothing) {
  const auto tr = one_trajectory({0, 0, 1}, 2);
  const std::vector<int> labels = {0};
  const auto est = pool_estimates(tr, labels, 1, 0.0);
  EXPECT_DOUBLE_EQ(est.kernels[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(est.kernels[0](0, 1), 0.5);
  EXPECT_TRUE(est.defined[0][0]);
  EXPECT_FALSE(est.defined[0][1]);
  EXPECT_TRUE(std::isnan(est.kernels[0](1, 0)));
}

TEST(PoolEstimates, SmoothedEmptyRowIsUniform) {
  const auto tr = one_trajectory({0, 0, 1}, 2);
  const std::vector<int> labels = {0};
  const auto est = pool_estimates(tr, labels, 1, 0.5);
  EXPECT_DOUBLE_EQ(est.kernels[0](1, 0), 0.5);
  EXPECT_DOUBLE_EQ(est.kernels[0](1, 1), 0.5);
  EXPECT_DOUBLE_EQ(est.kernels[0](0, 0), 1.5 / 3.0);
  EXPECT_TRUE(est.defined[0][1]);
}

TEST(PoolEstimates, RowsStochasticWithSmoothing) {
  const auto m = mmc::testing::sparse_chain(5, 4);
  const auto inst = make_instance({m, m, m}, ProbVector::uniform(3), 30, 15);
  const auto tr = sample_trajectories(inst, 9);
  const auto est = pool_estimates(tr, inst.decoding(), 3, 0.25);
  for (const auto& P : est.kernels) {
    EXPECT_GT(P.minCoeff(), 0.0);
    EXPECT_LT((P.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
  }
}

TEST(PoolEstimates, Errors) {
  const auto tr = one_trajectory({0, 0, 1}, 2);
  const std::vector<int> labels = {1};
  try {
    pool_estimates(tr, labels, 2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyCluster);
  }
  const std::vector<int> two = {0, 0};
  EXPECT_THROW(pool_estimates(tr, two, 1, 0.5), Error);
  const std::vector<int> zero = {0};
  EXPECT_THROW(pool_estimates(tr, zero, 1, -1.0), Error);
}

TEST(Loglik, HandValue) {
  const std::vector<State> x = {0, 0, 1};
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  EXPECT_NEAR(trajectory_loglik(std::span<const State>(x), half), 2 * std::log(0.5), 1e-15);
  EXPECT_NEAR(trajectory_loglik(std::span<const State>(x), half), -1.38629, 1e-5);
}

TEST(Loglik, CountFormMatchesSequential) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto m = mmc::testing::random_chain(4, seed);
    const auto inst = make_instance({m, m}, ProbVector::uniform(2), 5, 200);
    const auto tr = sample_trajectories(inst, seed);
    for (int t = 0; t < tr.T; ++t) {
      const double a = trajectory_loglik(tr.trajectory(t), m.transition().matrix());
      const double b = trajectory_loglik_sequential(tr.trajectory(t), m.transition().matrix());
      EXPECT_NEAR(a, b, 1e-12 * std::abs(b));
    }
  }
}

TEST(Loglik, ZeroProbabilityTransition) {
  const std::vector<State> x = {0, 1};
  Eigen::MatrixXd P(2, 2);
  P << 1, 0, 0.5, 0.5;
  try {
    trajectory_loglik(std::span<const State>(x), P);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroProbabilityTransition);
  }
}

TEST(Refine, FixedPointAfterConvergence) {
  const auto ms = gen_separation_instance(2);
  const auto inst = make_instance(ms, ProbVector::uniform(2), 40, 300);
  const auto tr = sample_trajectories(inst, 3);
  const auto once = refine(tr, inst.decoding(), 2, RefineOptions{.lambda = 0.5, .iterate = true});
  const auto again = refine(tr, once.labels, 2, 0.5);
  EXPECT_EQ(again.changed, 0);
  EXPECT_EQ(again.labels, once.labels);
}

TEST(Refine, LabelPermutationEquivariant) {
  const auto ms = gen_separation_instance(2);
  const auto inst = make_instance(ms, ProbVector::uniform(2), 40, 100);
  const auto tr = sample_trajectories(inst, 5);
  std::vector<int> init = inst.decoding();
  for (std::size_t t = 0; t < init.size(); t += 7) init[t] = 1 - init[t];
  std::vector<int> swapped(init.size());
  for (std::size_t t = 0; t < init.size(); ++t) swapped[t] = 1 - init[t];
  const auto a = refine(tr, init, 2, 0.5);
  const auto b = refine(tr, swapped, 2, 0.5);
  for (std::size_t t = 0; t < init.size(); ++t) EXPECT_EQ(a.labels[t], 1 - b.labels[t]);
}

TEST(Refine, JobsDoNotChangeResult) {
  const auto ms = gen_separation_instance(2);
  const auto inst = make_instance(ms, ProbVector::uniform(2), 50, 80);
  const auto tr = sample_trajectories(inst, 6);
  const auto a = refine(tr, inst.decoding(), 2, RefineOptions{.lambda = 0.5, .jobs = 1});
  const auto b = refine(tr, inst.decoding(), 2, RefineOptions{.lambda = 0.5, .jobs = 4});
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.loglik, b.loglik);
}

TEST(Oracle, SingleSourceWellSeparated) {
  const auto ms = gen_separation_instance(2);
  const auto inst = make_instance({ms[0], ms[0]}, ProbVector::uniform(2), 100, 200);
  const auto tr = sample_trajectories(inst, 1);
  const auto labels = oracle_classify(tr, ms, true);
  int wrong = 0;
  for (int l : labels) wrong += l != 0;
  EXPECT_EQ(wrong, 0);
}

TEST(Oracle, IdenticalModelsTieToLowestIndex) {
  const auto m = mmc::testing::random_chain(3, 2);
  const auto inst = make_instance({m, m}, ProbVector::uniform(2), 20, 30);
  const auto tr = sample_trajectories(inst, 1);
  const std::vector<MarkovModel> ms = {m, m};
  for (int l : oracle_classify(tr, ms, true)) EXPECT_EQ(l, 0);
}

TEST(Oracle, PluginAgreesWithTrueLabelPooling) {
  const std::vector<MarkovModel> ms = {mmc::testing::random_chain(3, 11), mmc::testing::random_chain(3, 12)};
  const auto inst = make_instance(ms, ProbVector::uniform(2), 100, 10000);
  const auto tr = sample_trajectories(inst, 2);
  const auto plug = refine(tr, inst.decoding(), 2, 1e-9);
  const auto oracle = oracle_classify(tr, ms, false);
  int agree = 0;
  for (std::size_t t = 0; t < oracle.size(); ++t) agree += plug.labels[t] == oracle[t];
  EXPECT_GE(agree, 99);
}
