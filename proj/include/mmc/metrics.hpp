#pragma once

// Misclassification under relabeling, and the separation quantities of a
// family of chains.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "mmc/divergence.hpp"

namespace mmc {

/// C(a, b) = #{t : f_hat(t) = a, f(t) = b}, padded to K×K with
/// K = max(K1, K2) so empty clusters take part in the matching.
Eigen::MatrixXi confusion_matrix(std::span<const int> f_hat, std::span<const int> f);

/// Maximum-weight perfect assignment on a square matrix; returns row→column.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight);

/// E_T by exhaustive search over relabelings (K ≤ 8).
int misclassification_brute(std::span<const int> f_hat, std::span<const int> f);
/// E_T through the optimal assignment on the confusion matrix.
int misclassification_assignment(std::span<const int> f_hat, std::span<const int> f);
/// Brute force for K ≤ 8, assignment otherwise.
int misclassification(std::span<const int> f_hat, std::span<const int> f);

/// min_{k≠k'} ‖L(M_k) − L(M_k')‖².
double delta_W_sq(std::span<const MarkovModel> models);

struct StateGap {
  double alpha = 0.0;
  double Delta_sq = 0.0;
  /// witness(k, k') is the state maximizing min(π_k, π_k')·‖p_k − p_k'‖².
  Eigen::MatrixXi witness;
  double product() const { return alpha * Delta_sq; }
};

StateGap state_gap(std::span<const MarkovModel> models);

struct EtaParams {
  double eta_mu = 1.0;
  double eta_pi = 1.0;
  double eta_p = 1.0;
};

EtaParams eta_params(std::span<const MarkovModel> models);

/// Largest transition probability over all chains.
double p_max(std::span<const MarkovModel> models);

struct GapReport {
  double D = 0.0;
  double D_pi = 0.0;
  Eigen::MatrixXd pairwise_D;
  Eigen::MatrixXd pairwise_D_pi;
  double delta_W_sq = 0.0;
  double alpha = 0.0;
  double Delta_sq = 0.0;
  EtaParams eta;
  double p_max = 0.0;
  double pi_min = 0.0;
  double v_min = 0.0;
  double gamma_ps = 0.0;
  std::optional<double> alpha_min_clusters;
};

GapReport gap_report(std::span<const MarkovModel> models, int H,
                     std::optional<std::span<const int>> decoding = std::nullopt);
GapReport gap_report(const MixtureInstance& instance);

}  // namespace mmc
