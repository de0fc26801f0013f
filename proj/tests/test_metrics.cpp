#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "mmc/embedding.hpp"
#include "mmc/metrics.hpp"
#include "test_util.hpp"

using namespace mmc;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Exact D^{(a,b)} by enumerating every path of length H.
double enumerate_D(const MarkovModel& a, const MarkovModel& b, int H) {
  const int S = static_cast<int>(a.num_states());
  const auto& Pa = a.transition().matrix();
  const auto& Pb = b.transition().matrix();
  const auto& ma = a.initial().values();
  const auto& mb = b.initial().values();
  double total = 0.0;
  std::vector<int> path(static_cast<std::size_t>(H));
  std::function<void(int, double, double)> rec = [&](int h, double prob, double llr) {
    if (h == H) {
      total += prob * llr;
      return;
    }
    for (int s = 0; s < S; ++s) {
      path[static_cast<std::size_t>(h)] = s;
      double p, r;
      if (h == 0) {
        p = ma[s];
        r = std::log(ma[s] / mb[s]);
      } else {
        const int prev = path[static_cast<std::size_t>(h - 1)];
        p = Pa(prev, s);
        r = std::log(Pa(prev, s) / Pb(prev, s));
      }
      rec(h + 1, prob * p, llr + r);
    }
  };
  rec(0, 1.0, 0.0);
  return total / (H - 1);
}

MarkovModel two_state(double p01, double p10) {
  return validate_model(StochasticMatrix{{1 - p01, p01}, {p10, 1 - p10}}, ProbVector{0.5, 0.5});
}

}  // namespace

TEST(Divergences, Examples) {
  EXPECT_EQ(kl_divergence(vec({0.3, 0.7}), vec({0.3, 0.7})), 0.0);
  EXPECT_NEAR(kl_divergence(vec({0.9, 0.1}), vec({0.8, 0.2})), 0.9 * std::log(0.9 / 0.8) + 0.1 * std::log(0.5), 1e-15);
  EXPECT_NEAR(kl_divergence(vec({0.9, 0.1}), vec({0.8, 0.2})), 0.03669, 1e-5);
  EXPECT_NEAR(kl_divergence(vec({1, 0}), vec({0.5, 0.5})), std::log(2.0), 1e-15);
  EXPECT_TRUE(std::isinf(kl_divergence(vec({0.5, 0.5}), vec({1, 0}))));
  EXPECT_NEAR(l2_distance(vec({1, 0}), vec({0, 1})), 2.0, 1e-15);
  EXPECT_NEAR(tv_distance(vec({1, 0}), vec({0, 1})), 1.0, 1e-15);
  EXPECT_NEAR(hellinger_sq(vec({1, 0}), vec({0, 1})), 1.0, 1e-15);
}

TEST(Divergences, PinskerAndNonnegativity) {
  std::mt19937_64 g(3);
  std::gamma_distribution<double> gam(1.0);
  for (int i = 0; i < 500; ++i) {
    Eigen::VectorXd p(5), q(5);
    for (int s = 0; s < 5; ++s) {
      p[s] = gam(g);
      q[s] = gam(g);
    }
    p /= p.sum();
    q /= q.sum();
    const double kl = kl_divergence(p, q);
    EXPECT_GE(kl, 0.0);
    const double tv = tv_distance(p, q);
    EXPECT_LE(2 * tv * tv, kl + 1e-12);
    EXPECT_LE(hellinger_sq(p, q), tv + 1e-12);
  }
}

TEST(DivergenceD, IdenticalModelsZero) {
  const auto m = mmc::testing::random_chain(4, 1);
  const std::vector<MarkovModel> ms = {m, m};
  EXPECT_EQ(divergence_D(ms, 50).value, 0.0);
  EXPECT_EQ(divergence_D_pi(ms).value, 0.0);
}

TEST(DivergenceD, MatchesPathEnumeration) {
  const auto A = two_state(0.1, 0.2), B = two_state(0.2, 0.3);
  const std::vector<MarkovModel> ms = {A, B};
  const auto d = divergence_D(ms, 6);
  EXPECT_NEAR(d.pairwise(0, 1), enumerate_D(A, B, 6), 1e-12);
  EXPECT_NEAR(d.pairwise(1, 0), enumerate_D(B, A, 6), 1e-12);
  EXPECT_EQ(d.value, std::min(d.pairwise(0, 1), d.pairwise(1, 0)));

  const auto r1 = mmc::testing::random_chain(3, 21), r2 = mmc::testing::random_chain(3, 22);
  const std::vector<MarkovModel> rs = {r1, r2};
  EXPECT_NEAR(divergence_D(rs, 5).pairwise(0, 1), enumerate_D(r1, r2, 5), 1e-12);
}

TEST(DivergenceD, MatchesMonteCarloAtH100) {
  const auto A = two_state(0.1, 0.2), B = two_state(0.2, 0.3);
  const std::vector<MarkovModel> ms = {A, B};
  const double exact = divergence_D(ms, 100).pairwise(0, 1);
  const auto inst = make_instance({A, A}, ProbVector::uniform(2), 20000, 100);
  const auto tr = sample_trajectories(inst, 77);
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < tr.T; ++t) {
    const auto x = tr.trajectory(t);
    double llr = std::log(A.initial().values()[x[0]] / B.initial().values()[x[0]]);
    for (int h = 1; h < tr.H; ++h) {
      llr += std::log(A.transition()(x[static_cast<std::size_t>(h - 1)], x[static_cast<std::size_t>(h)]) /
                      B.transition()(x[static_cast<std::size_t>(h - 1)], x[static_cast<std::size_t>(h)]));
    }
    llr /= (tr.H - 1);
    sum += llr;
    sum_sq += llr * llr;
  }
  const double mean = sum / tr.T;
  const double se = std::sqrt((sum_sq / tr.T - mean * mean) / tr.T);
  EXPECT_LT(std::abs(mean - exact), 3 * se);
}

TEST(DivergenceD, StationaryStartIsDpiPlusInitialTerm) {
  auto make = [](std::uint64_t seed) {
    const auto r = mmc::testing::random_chain(3, seed);
    return validate_model(r.transition(), r.stationary());
  };
  const std::vector<MarkovModel> ms = {make(31), make(32)};
  const int H = 40;
  const auto d = divergence_D(ms, H);
  const auto dpi = divergence_D_pi(ms);
  for (int a = 0; a < 2; ++a) {
    const int b = 1 - a;
    const double mu_term = kl_divergence(ms[static_cast<std::size_t>(a)].initial(), ms[static_cast<std::size_t>(b)].initial()) / (H - 1);
    EXPECT_NEAR(d.pairwise(a, b), mu_term + dpi.pairwise(a, b), 1e-12);
  }
}

TEST(DivergenceD, ConvergesToDpiAtRateOneOverH) {
  const std::vector<MarkovModel> ms = {mmc::testing::random_chain(3, 41), mmc::testing::random_chain(3, 42)};
  const double dpi = divergence_D_pi(ms).pairwise(0, 1);
  std::vector<double> gaps;
  for (int H : {100, 1000, 10000}) gaps.push_back(std::abs(divergence_D(ms, H).pairwise(0, 1) - dpi));
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
    EXPECT_LT(gaps[i + 1], gaps[i]);
    EXPECT_NEAR(gaps[i] / gaps[i + 1], 10.0, 1.0);
  }
}

TEST(DivergenceD, PairConventions) {
  Eigen::MatrixXd t(3, 3);
  t << 0, 1, 5, 2, 0, 3, 4, 6, 0;
  const auto o = pair_minimum(t, PairConvention::Ordered);
  EXPECT_EQ(o.value, 1.0);
  EXPECT_EQ(o.arg_from, 0);
  EXPECT_EQ(o.arg_to, 1);
  const auto s = pair_minimum(t, PairConvention::Symmetrized);
  EXPECT_EQ(s.value, 2.0);
}

TEST(Misclassification, Examples) {
  const std::vector<int> f = {0, 0, 1, 1};
  EXPECT_EQ(misclassification(std::vector<int>{1, 1, 0, 0}, f), 0);
  EXPECT_EQ(misclassification(std::vector<int>{0, 1, 1, 1}, f), 1);
  EXPECT_EQ(misclassification(f, f), 0);
  EXPECT_EQ(misclassification(std::vector<int>{0, 0, 0, 0}, f), 2);
  EXPECT_THROW(misclassification(std::vector<int>{0, 0}, f), Error);
}

TEST(Misclassification, AssignmentMatchesBruteForce) {
  std::mt19937_64 g(5);
  for (int i = 0; i < 300; ++i) {
    const int K1 = 1 + static_cast<int>(g() % 6), K2 = 1 + static_cast<int>(g() % 6);
    const int T = 1 + static_cast<int>(g() % 40);
    std::vector<int> a(static_cast<std::size_t>(T)), b(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      a[static_cast<std::size_t>(t)] = static_cast<int>(g() % static_cast<unsigned>(K1));
      b[static_cast<std::size_t>(t)] = static_cast<int>(g() % static_cast<unsigned>(K2));
    }
    EXPECT_EQ(misclassification_assignment(a, b), misclassification_brute(a, b));
  }
}

TEST(Misclassification, ConfusionPadding) {
  const auto C = confusion_matrix(std::vector<int>{0, 0, 0}, std::vector<int>{0, 1, 2});
  EXPECT_EQ(C.rows(), 3);
  EXPECT_EQ(C.cols(), 3);
  EXPECT_EQ(C.sum(), 3);
}

TEST(SeparationFamily, ClosedForms) {
  for (int Sp : {1, 2, 4, 8}) {
    const auto ms = gen_separation_instance(Sp);
    const auto kg = state_gap(ms);
    EXPECT_NEAR(kg.alpha, 1.0 / (4 * Sp), 1e-12);
    const auto eta = eta_params(ms);
    EXPECT_NEAR(eta.eta_pi, 3.0, 1e-12);
    EXPECT_NEAR(eta.eta_p, 3.0, 1e-12);
    // Rows differ by ±1/(2S') on each of 2S' states.
    EXPECT_NEAR(kg.Delta_sq, 2.0 * Sp * std::pow(1.0 / (2 * Sp), 2), 1e-12);
    // Every state contributes π(s)·((3/4)log 3 − (1/4)log 3).
    EXPECT_NEAR(divergence_D_pi(ms).value, 0.5 * std::log(3.0), 1e-12);
  }
}

TEST(StateGap, WitnessMaximizesProduct) {
  const std::vector<MarkovModel> ms = {mmc::testing::random_chain(4, 1), mmc::testing::random_chain(4, 2),
                                       mmc::testing::random_chain(4, 3)};
  const auto kg = state_gap(ms);
  double best_global = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      double best = -1;
      for (int s = 0; s < 4; ++s) {
        const double m = std::min(ms[static_cast<std::size_t>(a)].stationary().values()[s], ms[static_cast<std::size_t>(b)].stationary().values()[s]);
        const Eigen::VectorXd d = ms[static_cast<std::size_t>(a)].transition().matrix().row(s) - ms[static_cast<std::size_t>(b)].transition().matrix().row(s);
        best = std::max(best, m * d.squaredNorm());
      }
      best_global = std::min(best_global, best);
    }
  EXPECT_NEAR(kg.product(), best_global, 1e-15);
  const std::vector<MarkovModel> same = {ms[0], ms[0]};
  EXPECT_EQ(state_gap(same).Delta_sq, 0.0);
}

TEST(Eta, IdenticalAndFloor) {
  const auto m = mmc::testing::random_chain(4, 1);
  const std::vector<MarkovModel> same = {m, m};
  const auto e = eta_params(same);
  EXPECT_EQ(e.eta_mu, 1.0);
  EXPECT_EQ(e.eta_pi, 1.0);
  EXPECT_EQ(e.eta_p, 1.0);
  const std::vector<MarkovModel> ms = {gen_random_ergodic(5, 1, 0.1), gen_random_ergodic(5, 2, 0.1)};
  EXPECT_LE(eta_params(ms).eta_p, 1.0 / 0.1);
}

TEST(DeltaW, IdenticalZeroAndMatchesEmbedding) {
  const auto a = mmc::testing::random_chain(3, 1), b = mmc::testing::random_chain(3, 2);
  const std::vector<MarkovModel> same = {a, a};
  EXPECT_EQ(delta_W_sq(same), 0.0);
  const std::vector<MarkovModel> ms = {a, b};
  EXPECT_NEAR(delta_W_sq(ms), (embed_model(a).coords - embed_model(b).coords).squaredNorm(), 1e-15);
}

TEST(GapReport, FieldsConsistent) {
  const auto ms = gen_separation_instance(2);
  const auto inst = make_instance(ms, ProbVector::uniform(2), 10, 50);
  const auto r = gap_report(inst);
  EXPECT_EQ(r.D, divergence_D(inst).value);
  EXPECT_EQ(r.D_pi, divergence_D_pi(ms).value);
  ASSERT_TRUE(r.alpha_min_clusters);
  EXPECT_DOUBLE_EQ(*r.alpha_min_clusters, 0.5);
  EXPECT_NEAR(r.pi_min, 0.125, 1e-12);
}
