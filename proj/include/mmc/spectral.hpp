#pragma once

// Stage I: adaptive SVD clustering of the empirical data matrix that
// estimates the number of clusters without knowing it in advance.

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "mmc/embedding.hpp"

namespace mmc {

/// Which squared radius defines the neighborhoods Q_t.
enum class RadiusMode {
  /// σ_thres², the radius written in the clustering loop.
  Threshold,
  /// r̂²·log(TH/δ) with r̂ = c_sigma·√(S/(Hγ_ps)·log(H/δ)), the row-level
  /// radius used by the misclassification analysis.
  RowLevel,
};

struct SpectralConfig {
  double delta = 0.1;
  double gamma_ps = 1.0;
  double c_sigma = 8.0;
  double c_rho = 32.0;
  RadiusMode radius_mode = RadiusMode::Threshold;
  /// When set, replaces the squared neighborhood radius outright.
  std::optional<double> radius_sq;
  /// Drop the carved set that fails the loop guard instead of keeping it as
  /// a cluster; its members then join the leftovers.
  bool discard_small_final = false;

  void validate() const;
};

struct Stage1Result {
  int K_hat = 0;
  std::vector<int> labels;   // 0-based, length T
  std::vector<int> centers;  // t_k* per carved cluster
  int R_hat = 0;
  std::vector<double> singular_values;
  double sigma_thres = 0.0;
  double radius_sq = 0.0;
  /// The first peel ran although the loop guard exceeded T.
  bool forced_first_cluster = false;
};

/// c_sigma·√(T·S/(H·γ_ps)·log(T·H/δ)).
double sigma_threshold(int T, int S, int H, const SpectralConfig& cfg);

/// Number of values ≥ thresh (non-strict).
int estimate_rank(std::span<const double> singular_values, double thresh);

/// Squared radius of the neighborhoods for the configured mode.
double neighborhood_radius_sq(int T, int S, int H, const SpectralConfig& cfg);

/// Minimum carved-set size c_rho·R̂·T/log(TH/δ) that keeps the peel going.
double peel_guard(int T, int H, int R_hat, const SpectralConfig& cfg);

/// Full Stage I on a T×S² matrix built from trajectories of length H.
Stage1Result spectral_cluster(const Eigen::MatrixXd& W_hat, int H, const SpectralConfig& cfg);
inline Stage1Result spectral_cluster(const DataMatrix& W_hat, int H, const SpectralConfig& cfg) {
  return spectral_cluster(W_hat.rows, H, cfg);
}

/// The spectral representation X̂ = Û_{1:R}Σ̂_{1:R}.
Eigen::MatrixXd spectral_representation(const Eigen::MatrixXd& W_hat, int rank);

}  // namespace mmc
