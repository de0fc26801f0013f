#pragma once

// Stage II: pooled kernel estimates per provisional cluster and a one-shot
// trajectory-wise maximum-likelihood reassignment. Also the known-kernel
// classifier used as a reference.

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "mmc/embedding.hpp"
#include "mmc/simgen.hpp"

namespace mmc {

struct TransitionEstimate {
  int K = 0;
  int S = 0;
  double lambda = 0.0;
  std::vector<Eigen::MatrixXd> kernels;         // K × (S×S)
  std::vector<Eigen::VectorXd> pooled_visits;   // K × S, transition sources
  std::vector<Eigen::MatrixXd> pooled_counts;   // K × (S×S)
  /// defined[k][s] is false when the row had no data and λ = 0.
  std::vector<std::vector<bool>> defined;
};

struct Stage2Result {
  std::vector<int> labels;
  Eigen::MatrixXd loglik;  // T×K
  int changed = 0;
  double lambda = 0.0;
  int passes = 1;
};

/// p̂(s'|s) = (N(s,s') + λ) / (Σ_j N(s,j) + λS) pooled over each cluster.
TransitionEstimate pool_estimates(const TrajectorySet& trajs, std::span<const int> labels, int K,
                                  double lambda, int jobs = 1);

/// Σ_{s,s'} N(s,s')·log p̂(s'|s).
double trajectory_loglik(const CountStats& stats, const Eigen::MatrixXd& kernel);
double trajectory_loglik(std::span<const State> trajectory, const Eigen::MatrixXd& kernel);
/// Step-by-step sum over h, kept as a cross-check of the count form.
double trajectory_loglik_sequential(std::span<const State> trajectory,
                                    const Eigen::MatrixXd& kernel);

struct RefineOptions {
  double lambda = 0.5;
  /// Repeat pool-and-reassign until no label changes (capped by max_passes).
  bool iterate = false;
  int max_passes = 100;
  int jobs = 1;
};

Stage2Result refine(const TrajectorySet& trajs, std::span<const int> initial_labels, int K,
                    const RefineOptions& opts);
inline Stage2Result refine(const TrajectorySet& trajs, std::span<const int> initial_labels, int K,
                           double lambda) {
  return refine(trajs, initial_labels, K, RefineOptions{.lambda = lambda});
}

/// argmax_k [log μ_k(s_1)] + Σ_h log p_k(s_{h+1}|s_h); ties to the lowest k.
std::vector<int> oracle_classify(const TrajectorySet& trajs, std::span<const MarkovModel> models,
                                 bool use_initial, int jobs = 1);

}  // namespace mmc
