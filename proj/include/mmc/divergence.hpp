#pragma once

// Divergences between discrete laws and the weighted-KL separations between
// chains (horizon-averaged and stationary).

#include <Eigen/Dense>

#include <span>

#include "mmc/chain.hpp"
#include "mmc/simgen.hpp"

namespace mmc {

/// Σ p log(p/q); 0·log(0/q) = 0 and p > 0 = q gives +∞.
double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
/// Σ (p − q)².
double l2_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
/// ½ Σ |p − q|.
double tv_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
/// ½ Σ (√p − √q)².
double hellinger_sq(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

inline double kl_divergence(const ProbVector& p, const ProbVector& q) {
  return kl_divergence(p.values(), q.values());
}
inline double hellinger_sq(const ProbVector& p, const ProbVector& q) {
  return hellinger_sq(p.values(), q.values());
}

/// How the minimum over k ≠ k' treats the asymmetry of the pairwise table.
enum class PairConvention {
  /// min over all ordered pairs (k, k').
  Ordered,
  /// min over unordered pairs of max(D(k,k'), D(k',k)).
  Symmetrized,
};

struct PairwiseDivergence {
  double value = 0.0;
  Eigen::MatrixXd pairwise;  // K×K, diagonal 0, never symmetrized
  int arg_from = 0;
  int arg_to = 1;
};

/// (1/(H−1)) Σ_{h=1}^{H−1} P(s_h = ·), propagated exactly from μ.
Eigen::VectorXd visitation_average(const MarkovModel& model, int H);

/// Σ_s w(s)·KL(p_a(·|s), p_b(·|s)), skipping states with zero weight.
double weighted_row_kl(const Eigen::VectorXd& weights, const StochasticMatrix& Pa,
                       const StochasticMatrix& Pb);

/// D^{(k,k')} = KL(μ_k, μ_k')/(H−1) + Σ_s P_H^{(k)}(s) KL(p_k(·|s), p_k'(·|s)).
PairwiseDivergence divergence_D(std::span<const MarkovModel> models, int H,
                                PairConvention convention = PairConvention::Ordered);
PairwiseDivergence divergence_D(const MixtureInstance& instance,
                                PairConvention convention = PairConvention::Ordered);

/// D_π^{(k,k')} = Σ_s π_k(s) KL(p_k(·|s), p_k'(·|s)).
PairwiseDivergence divergence_D_pi(std::span<const MarkovModel> models,
                                   PairConvention convention = PairConvention::Ordered);

/// Applies the pair convention to a precomputed K×K table.
PairwiseDivergence pair_minimum(Eigen::MatrixXd pairwise, PairConvention convention);

}  // namespace mmc
