#include "mmc/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void same_length(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw Error(ErrorKind::DimensionMismatch, "distributions differ in length");
}

void need_pairs(std::span<const MarkovModel> models) {
  if (models.size() < 2) throw Error(ErrorKind::InvalidRange, "need at least two models");
  for (const auto& m : models) {
    if (m.num_states() != models.front().num_states()) {
      throw Error(ErrorKind::StateSpaceMismatch, "models do not share a state space");
    }
  }
}

}  // namespace

double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  same_length(p, q);
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return kInf;
    total += p[i] * std::log(p[i] / q[i]);
  }
  // Round-off can leave a tiny negative value when p ≈ q.
  return std::max(total, 0.0);
}

double l2_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  same_length(p, q);
  return (p - q).squaredNorm();
}

double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  same_length(p, q);
  return 0.5 * (p - q).cwiseAbs().sum();
}

double hellinger_sq(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  same_length(p, q);
  return 0.5 * (p.cwiseMax(0.0).cwiseSqrt() - q.cwiseMax(0.0).cwiseSqrt()).squaredNorm();
}

Eigen::VectorXd visitation_average(const MarkovModel& model, int H) {
  if (H < 2) throw Error(ErrorKind::InvalidRange, "H must be >= 2");
  const Eigen::MatrixXd Pt = model.transition().matrix().transpose();
  Eigen::VectorXd cur = model.initial().values();
  Eigen::VectorXd acc = cur;
  for (int h = 2; h <= H - 1; ++h) {
    cur = Pt * cur;
    acc += cur;
  }
  return acc / static_cast<double>(H - 1);
}

double weighted_row_kl(const Eigen::VectorXd& weights, const StochasticMatrix& Pa,
                       const StochasticMatrix& Pb) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < weights.size(); ++s) {
    if (weights[s] <= 0.0) continue;  // 0·∞ = 0
    const double kl = kl_divergence(Eigen::VectorXd(Pa.matrix().row(s).transpose()),
                                    Eigen::VectorXd(Pb.matrix().row(s).transpose()));
    if (kl == kInf) return kInf;
    total += weights[s] * kl;
  }
  return total;
}

PairwiseDivergence pair_minimum(Eigen::MatrixXd pairwise, PairConvention convention) {
  const auto K = static_cast<int>(pairwise.rows());
  PairwiseDivergence out;
  out.value = kInf;
  for (int a = 0; a < K; ++a) {
    for (int b = 0; b < K; ++b) {
      if (a == b) continue;
      double v = pairwise(a, b);
      if (convention == PairConvention::Symmetrized) {
        if (b < a) continue;
        v = std::max(pairwise(a, b), pairwise(b, a));
      }
      if (v < out.value) {
        out.value = v;
        out.arg_from = a;
        out.arg_to = b;
      }
    }
  }
  out.pairwise = std::move(pairwise);
  return out;
}

PairwiseDivergence divergence_D(std::span<const MarkovModel> models, int H,
                                PairConvention convention) {
  need_pairs(models);
  const auto K = static_cast<Eigen::Index>(models.size());
  std::vector<Eigen::VectorXd> visit;
  for (const auto& m : models) visit.push_back(visitation_average(m, H));
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a == b) continue;
      const auto& ma = models[static_cast<std::size_t>(a)];
      const auto& mb = models[static_cast<std::size_t>(b)];
      const double init = kl_divergence(ma.initial(), mb.initial());
      const double rows = weighted_row_kl(visit[static_cast<std::size_t>(a)], ma.transition(),
                                          mb.transition());
      D(a, b) = init / (H - 1) + rows;
    }
  }
  return pair_minimum(std::move(D), convention);
}

PairwiseDivergence divergence_D(const MixtureInstance& instance, PairConvention convention) {
  return divergence_D(instance.models(), instance.horizon(), convention);
}

PairwiseDivergence divergence_D_pi(std::span<const MarkovModel> models, PairConvention convention) {
  need_pairs(models);
  const auto K = static_cast<Eigen::Index>(models.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a == b) continue;
      const auto& ma = models[static_cast<std::size_t>(a)];
      const auto& mb = models[static_cast<std::size_t>(b)];
      D(a, b) = weighted_row_kl(ma.stationary().values(), ma.transition(), mb.transition());
    }
  }
  return pair_minimum(std::move(D), convention);
}

}  // namespace mmc
