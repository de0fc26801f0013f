#include <gtest/gtest.h>

#include <numeric>

#include "mmc/embedding.hpp"
#include "mmc/metrics.hpp"
#include "mmc/simgen.hpp"
#include "test_util.hpp"

using namespace mmc;

namespace {

std::vector<MarkovModel> pair_of(int S, std::uint64_t seed) {
  return {mmc::testing::random_chain(S, seed), mmc::testing::random_chain(S, seed + 1000)};
}

}  // namespace

TEST(ClusterSizes, Examples) {
  const std::vector<double> even = {0.5, 0.5}, skew = {0.7, 0.3}, tiny = {0.99, 0.01};
  EXPECT_EQ(cluster_sizes(even, 10), (std::vector<int>{5, 5}));
  EXPECT_EQ(cluster_sizes(skew, 10), (std::vector<int>{7, 3}));
  EXPECT_EQ(cluster_sizes(tiny, 10), (std::vector<int>{9, 1}));
}

TEST(ClusterSizes, AlwaysSumToTWithFloor) {
  auto eng = rng::substream(5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const int K = 2 + static_cast<int>(rng::bounded(eng, 6));
    const int T = K + static_cast<int>(rng::bounded(eng, 50));
    std::vector<double> a(static_cast<std::size_t>(K));
    for (double& x : a) x = rng::exponential(eng);
    const double sum = std::accumulate(a.begin(), a.end(), 0.0);
    for (double& x : a) x /= sum;
    const auto sizes = cluster_sizes(a, T);
    EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), 0), T);
    for (int s : sizes) EXPECT_GE(s, 1);
  }
}

TEST(ClusterSizes, TooFewTrajectories) {
  const std::vector<double> a = {0.3, 0.3, 0.4};
  try {
    cluster_sizes(a, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyClusterAfterRounding);
  }
}

TEST(MakeInstance, ContiguousBlocks) {
  const auto inst = make_instance(pair_of(3, 1), ProbVector{0.5, 0.5}, 10, 5);
  EXPECT_EQ(inst.decoding(), (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
  EXPECT_NEAR(inst.alpha_min(), 0.5, 1e-15);
}

TEST(MakeInstance, ShufflePreservesSizes) {
  const auto inst = make_instance(pair_of(3, 1), ProbVector{0.7, 0.3}, 100, 5, 42);
  EXPECT_EQ(std::count(inst.decoding().begin(), inst.decoding().end(), 0), 70);
  EXPECT_NE(inst.decoding(), make_instance(pair_of(3, 1), ProbVector{0.7, 0.3}, 100, 5).decoding());
}

TEST(MakeInstance, Errors) {
  auto models = pair_of(3, 1);
  models.push_back(mmc::testing::random_chain(4, 9));
  try {
    make_instance(models, ProbVector::uniform(3), 10, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StateSpaceMismatch);
  }
  EXPECT_THROW(make_instance(pair_of(3, 1), ProbVector::uniform(2), 10, 1), Error);
}

TEST(Sample, Reproducible) {
  const auto inst = make_instance(pair_of(4, 2), ProbVector{0.5, 0.5}, 20, 50);
  const auto a = sample_trajectories(inst, 7, 1);
  const auto b = sample_trajectories(inst, 7, 4);
  const auto c = sample_trajectories(inst, 8, 1);
  EXPECT_EQ(a.states, b.states);
  EXPECT_NE(a.states, c.states);
  EXPECT_EQ(a.instance_id, inst.content_hash());
  for (State s : a.states) EXPECT_LT(s, 4);
}

TEST(Sample, PointMassInitial) {
  const auto P = StochasticMatrix::uniform(3);
  std::vector<MarkovModel> ms = {validate_model(P, ProbVector::point_mass(3, 0)),
                                 validate_model(P, ProbVector::point_mass(3, 0))};
  const auto inst = make_instance(ms, ProbVector::uniform(2), 50, 2);
  const auto tr = sample_trajectories(inst, 1);
  for (int t = 0; t < tr.T; ++t) EXPECT_EQ(tr.trajectory(t)[0], 0);
}

TEST(Sample, NearDeterministicChain) {
  const double e = 1e-9;
  const auto m = validate_model(StochasticMatrix{{1 - e, e}, {1 - e, e}}, ProbVector::point_mass(2, 0));
  const auto inst = make_instance({m, m}, ProbVector::uniform(2), 10, 100);
  const auto tr = sample_trajectories(inst, 3);
  for (State s : tr.states) EXPECT_EQ(s, 0);
}

TEST(Sample, EmpiricalFrequenciesMatchKernel) {
  const auto m = mmc::testing::random_chain(4, 17);
  const auto inst = make_instance({m, m}, ProbVector::uniform(2), 100, 10000);
  const auto tr = sample_trajectories(inst, 99);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(4, 4);
  for (int t = 0; t < tr.T; ++t) {
    const auto c = count_stats(tr.trajectory(t), 4);
    for (int s = 0; s < 4; ++s)
      for (int j = 0; j < 4; ++j) N(s, j) += c.transition(s, j);
  }
  for (int s = 0; s < 4; ++s) {
    N.row(s) /= N.row(s).sum();
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(N(s, j), m.transition()(s, j), 0.01);
  }
}

TEST(RandomErgodic, FloorAndValidity) {
  for (int S = 2; S <= 8; ++S) {
    const auto m = gen_random_ergodic(S, static_cast<std::uint64_t>(S), 0.5 / S);
    EXPECT_GE(m.transition().matrix().minCoeff(), 0.5 / S - 1e-15);
    EXPECT_GE(m.initial().min(), 0.5 / S - 1e-15);
  }
  EXPECT_THROW(gen_random_ergodic(3, 1, 0.5), Error);
}

TEST(RandomErgodic, EtaBound) {
  for (int S = 2; S <= 8; ++S) {
    const double floor = 0.5 / S;
    const std::vector<MarkovModel> ms = {gen_random_ergodic(S, 1, floor), gen_random_ergodic(S, 2, floor)};
    EXPECT_LE(eta_params(ms).eta_p, 2.0 * S * (1.0 - S * floor) + 1.0);
  }
}

TEST(Separation, ValidChains) {
  for (int sp : {1, 2, 4, 8}) {
    const auto ms = gen_separation_instance(sp);
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_EQ(ms[0].num_states(), static_cast<std::size_t>(2 * sp));
    EXPECT_NEAR(ms[0].stationary()[0], 3.0 / (4 * sp), 1e-12);
    EXPECT_NEAR(ms[1].stationary()[0], 1.0 / (4 * sp), 1e-12);
  }
}
