#pragma once

// Inequalities between the separation measures, the necessary condition for
// locally stable recovery, and the predicted error rate after refinement.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmc/metrics.hpp"

namespace mmc {

/// One inequality lhs ≤ rhs (or lhs ≥ rhs, see `direction`).
struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  /// Distance to violation; +∞ when one side is infinite and the check is
  /// vacuous.
  double slack = 0.0;
};

struct UniformErgodicity {
  double M = 1.0;
  double rho = 0.5;
};

struct GapInequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_hold() const;
  const InequalityCheck& find(const std::string& name) const;
};

/// log(e/2).
inline constexpr double kKlL2Constant = 0.30685281944005469;

/// Checks, by name:
///   kl_l2_lower  log(e/2)/max(p_max, q_max)·L₂ ≤ KL, worst row over ordered pairs
///   kl_l2_upper  KL ≤ L₂ / min q, worst row
///   dpi_state_gap   D_π ≥ log(e/2)·αΔ²/p_max
///   dw_hellinger Δ_W² ≤ min_{k≠k'} (2p_max/log(e/2))·D_π^{(k,k')} + 4H²(π_k, π_k')
///   dw_state_gap    Δ_W² ≥ ½αΔ² − max((√η_π − 1)², (1 − 1/√η_π)²)
///   dw_mixing    (only with M, ρ) Δ_W² ≤ 7(p_max D_π + (⌈log_ρ M⁻¹⌉ + 1/(1−ρ))√(D_π/(2π_min)))
GapInequalityReport check_gap_inequalities(std::span<const MarkovModel> models,
                                           std::optional<UniformErgodicity> mixing = std::nullopt);

/// Constants (M, ρ) with max_s ‖P^t(s,·) − π‖₁ ≤ Mρ^t for every chain and t ≥ 0, ρ
/// halfway between the largest non-unit eigenvalue modulus and 1.
UniformErgodicity estimate_uniform_ergodicity(std::span<const MarkovModel> models);

struct BoundReport {
  bool necessary_holds = false;
  double lhs_4HD = 0.0;
  double rhs_necessary = 0.0;
  /// Smallest H ≥ 1 meeting the condition; empty when no finite H does or
  /// it exceeds 1e15.
  std::optional<long long> min_H_necessary;
  double predicted_rate = 0.0;
  double asymptotic_ratio = 0.0;
};

/// Rearranged form: 4(H−1)D ≥ log(1/(2δ))/(εT) + log(α_min/(16eε)).
BoundReport lower_bound_check(double eps, double delta, long long T, long long H, double D,
                              double alpha_min);

/// Probability form: δ ≥ ½(α_min/(16eε))^{εT}·exp(−4εT(H−1)D), evaluated
/// without rearranging.
bool lower_bound_probability_form(double eps, double delta, long long T, long long H, double D,
                                  double alpha_min);

/// Smallest H in [1, H_max] meeting the condition by direct scan.
std::optional<long long> min_H_by_scan(double eps, double delta, long long T, double D,
                                       double alpha_min, long long H_max);

/// T·exp(−C·γ_ps·H·D_π).
double predicted_rate(double T, double H, double gamma_ps, double D_pi, double C_eta);

/// 1/(256(4η_p² + 5 log η_p)).
double rate_constant_from_eta(double eta_p);

}  // namespace mmc
