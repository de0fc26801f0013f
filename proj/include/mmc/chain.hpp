#pragma once

// Validated ergodic Markov chains and their spectral / mixing quantities.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mmc/error.hpp"

namespace mmc {

inline constexpr double kProbSumTol = 1e-12;
inline constexpr double kStationaryTol = 1e-10;

/// Probability vector: nonnegative entries summing to 1 within kProbSumTol.
class ProbVector {
 public:
  ProbVector() = default;
  explicit ProbVector(Eigen::VectorXd values);
  ProbVector(std::initializer_list<double> values);

  static ProbVector uniform(std::size_t n);
  static ProbVector point_mass(std::size_t n, std::size_t at);

  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double min() const { return values_.minCoeff(); }
  double max() const { return values_.maxCoeff(); }

 private:
  Eigen::VectorXd values_;
};

/// Square row-stochastic matrix.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;
  explicit StochasticMatrix(Eigen::MatrixXd rows);
  StochasticMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static StochasticMatrix uniform(std::size_t n);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t s, std::size_t next) const {
    return m_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(next));
  }
  ProbVector row(std::size_t s) const;
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

 private:
  Eigen::MatrixXd m_;
};

/// Ergodic chain with cached stationary distribution, pseudo-spectral gap and
/// mixing time. Instances only come out of validate_model / augmented_chain.
///
/// A support mask is carried for chains whose stationary law vanishes on some
/// states (the doublet chain of a base chain with zero transitions). For
/// models built by validate_model every state is in the support.
class MarkovModel {
 public:
  std::size_t num_states() const noexcept { return P_.size(); }
  const StochasticMatrix& transition() const noexcept { return P_; }
  const ProbVector& initial() const noexcept { return mu_; }
  const ProbVector& stationary() const noexcept { return pi_; }
  double pseudo_spectral_gap() const noexcept { return gamma_ps_; }
  int mixing_time() const noexcept { return t_mix_; }
  const std::vector<bool>& support() const noexcept { return support_; }
  bool full_support() const noexcept;

  /// Smallest stationary probability over the support.
  double pi_min() const;

 private:
  friend MarkovModel validate_model(const StochasticMatrix&, const ProbVector&);
  friend MarkovModel augmented_chain(const MarkovModel&);

  StochasticMatrix P_;
  ProbVector mu_;
  ProbVector pi_;
  double gamma_ps_ = 0.0;
  int t_mix_ = 0;
  std::vector<bool> support_;
};

/// Checks dimensions, stochasticity and ergodicity, then caches π, t_mix and
/// γ_ps (with k_max = max(10, 2·t_mix)).
MarkovModel validate_model(const StochasticMatrix& P, const ProbVector& mu);

/// Solves (Pᵀ − I)π = 0 with Σπ = 1. Throws SingularSystem when the chain is
/// not irreducible.
ProbVector stationary_distribution(const StochasticMatrix& P);

/// P*(s,s') = π(s')P(s',s)/π(s), restricted to the model's support (rows
/// outside the support are copied from P).
StochasticMatrix time_reversal(const MarkovModel& model);

/// Spectral gaps 1 − λ₂((P*)^k P^k) for k = 1..k_max, on the support.
std::vector<double> multistep_spectral_gaps(const MarkovModel& model, int k_max);

/// max over k ∈ [1, k_max] of gap_k / k.
double pseudo_spectral_gap(const MarkovModel& model, int k_max);

/// Default supremum range for the pseudo-spectral gap.
int default_gap_horizon(int t_mix) noexcept;

/// Smallest t with max_s TV(P^t(s,·), π) ≤ threshold, over support rows.
int mixing_time(const MarkovModel& model, double threshold = 0.25, int t_max = 100000);

/// Doublet chain on S² states indexed (s,s') → s·S + s'.
MarkovModel augmented_chain(const MarkovModel& model);

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// min_{k,s} π^(k)(s) over a model collection.
double pi_min(std::span<const MarkovModel> models);
/// min_{k,s} π^(k)(s)(1 − π^(k)(s)).
double v_min(std::span<const MarkovModel> models);
/// min_k γ_ps^(k).
double min_pseudo_spectral_gap(std::span<const MarkovModel> models);

}  // namespace mmc
