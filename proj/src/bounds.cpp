#include "mmc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace mmc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tol_for(double a, double b) {
  return 1e-12 * std::max({1.0, std::isfinite(a) ? std::abs(a) : 0.0,
                           std::isfinite(b) ? std::abs(b) : 0.0});
}

// lhs ≤ rhs
InequalityCheck at_most(std::string name, double lhs, double rhs) {
  InequalityCheck c{std::move(name), lhs, rhs, true, 0.0};
  if (rhs == kInf || lhs == -kInf) {
    c.slack = kInf;
    return c;
  }
  c.slack = rhs - lhs;
  c.holds = c.slack >= -tol_for(lhs, rhs);
  return c;
}

// lhs ≥ rhs
InequalityCheck at_least(std::string name, double lhs, double rhs) {
  InequalityCheck c{std::move(name), lhs, rhs, true, 0.0};
  if (lhs == kInf || rhs == -kInf) {
    c.slack = kInf;
    return c;
  }
  c.slack = lhs - rhs;
  c.holds = c.slack >= -tol_for(lhs, rhs);
  return c;
}

void keep_worst(std::optional<InequalityCheck>& worst, InequalityCheck c) {
  if (!worst || c.slack < worst->slack) worst = std::move(c);
}

void check_ranges(double eps, double delta, long long T, double D, double alpha_min) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidRange, "eps must lie in (0,1]");
  if (!(delta > 0.0 && delta <= 0.5)) throw Error(ErrorKind::InvalidRange, "delta must lie in (0,1/2]");
  if (!(alpha_min > 0.0 && alpha_min <= 1.0)) {
    throw Error(ErrorKind::InvalidRange, "alpha_min must lie in (0,1]");
  }
  if (T < 1) throw Error(ErrorKind::InvalidRange, "T must be >= 1");
  if (!(D >= 0.0)) throw Error(ErrorKind::InvalidRange, "D must be >= 0");
}

double necessary_rhs(double eps, double delta, long long T, double alpha_min) {
  return std::log(1.0 / (2.0 * delta)) / (eps * static_cast<double>(T)) +
         std::log(alpha_min / (16.0 * std::numbers::e * eps));
}

}  // namespace

bool GapInequalityReport::all_hold() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

const InequalityCheck& GapInequalityReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::InvalidRange, "no inequality named " + name);
}

GapInequalityReport check_gap_inequalities(std::span<const MarkovModel> models,
                                           std::optional<UniformErgodicity> mixing) {
  if (models.size() < 2) throw Error(ErrorKind::InvalidRange, "need at least two models");
  const auto K = static_cast<Eigen::Index>(models.size());
  const auto S = static_cast<Eigen::Index>(models.front().num_states());
  const double c = kKlL2Constant;
  const double pmax = p_max(models);

  std::optional<InequalityCheck> lower, upper;
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a == b) continue;
      const auto& Pa = models[static_cast<std::size_t>(a)].transition().matrix();
      const auto& Pb = models[static_cast<std::size_t>(b)].transition().matrix();
      for (Eigen::Index s = 0; s < S; ++s) {
        const Eigen::VectorXd p = Pa.row(s).transpose();
        const Eigen::VectorXd q = Pb.row(s).transpose();
        const double kl = kl_divergence(p, q);
        const double l2 = l2_distance(p, q);
        keep_worst(lower, at_least("kl_l2_lower", kl, c / std::max(p.maxCoeff(), q.maxCoeff()) * l2));
        const double qmin = q.minCoeff();
        keep_worst(upper, at_most("kl_l2_upper", kl, l2 == 0.0 ? 0.0 : (qmin > 0.0 ? l2 / qmin : kInf)));
      }
    }
  }

  GapInequalityReport rep;
  rep.checks.push_back(*lower);
  rep.checks.push_back(*upper);

  const auto Dpi = divergence_D_pi(models);
  const auto kg = state_gap(models);
  rep.checks.push_back(at_least("dpi_state_gap", Dpi.value, c * kg.product() / pmax));

  const double dw = delta_W_sq(models);
  double hell_rhs = kInf;
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a == b) continue;
      const double v = 2.0 * pmax / c * Dpi.pairwise(a, b) +
                       4.0 * hellinger_sq(models[static_cast<std::size_t>(a)].stationary(),
                                          models[static_cast<std::size_t>(b)].stationary());
      hell_rhs = std::min(hell_rhs, v);
    }
  }
  rep.checks.push_back(at_most("dw_hellinger", dw, hell_rhs));

  const double r = std::sqrt(eta_params(models).eta_pi);
  const double penalty = r == kInf ? kInf : std::max((r - 1.0) * (r - 1.0), (1.0 - 1.0 / r) * (1.0 - 1.0 / r));
  rep.checks.push_back(at_least("dw_state_gap", dw, 0.5 * kg.product() - penalty));

  if (mixing) {
    if (!(mixing->rho > 0.0 && mixing->rho < 1.0) || !(mixing->M > 0.0)) {
      throw Error(ErrorKind::InvalidRange, "need rho in (0,1) and M > 0");
    }
    const double steps = std::ceil(std::log(1.0 / mixing->M) / std::log(mixing->rho)) +
                         1.0 / (1.0 - mixing->rho);
    const double rhs =
        7.0 * (pmax * Dpi.value + steps * std::sqrt(Dpi.value / (2.0 * pi_min(models))));
    rep.checks.push_back(at_most("dw_mixing", dw, rhs));
  }
  return rep;
}

UniformErgodicity estimate_uniform_ergodicity(std::span<const MarkovModel> models) {
  double modulus = 0.0;
  for (const auto& m : models) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.transition().matrix(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigenvalues did not converge");
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) mods.push_back(std::abs(es.eigenvalues()[i]));
    std::sort(mods.begin(), mods.end(), std::greater<>());
    if (mods.size() > 1) modulus = std::max(modulus, mods[1]);
  }
  UniformErgodicity u;
  u.rho = std::clamp(0.5 * (1.0 + modulus), 1e-3, 0.999);
  u.M = 0.0;
  for (const auto& m : models) {
    const auto& P = m.transition().matrix();
    const Eigen::RowVectorXd pi = m.stationary().values().transpose();
    // The envelope must also cover t = 0, where the distance is 2(1 − π(s)).
    Eigen::MatrixXd Pt = Eigen::MatrixXd::Identity(P.rows(), P.cols());
    double scale = 1.0;
    for (int t = 0; t <= 100000; ++t) {
      const double d = (Pt.rowwise() - pi).cwiseAbs().rowwise().sum().maxCoeff();
      u.M = std::max(u.M, d / scale);
      if (d < 1e-13) break;
      Pt = Pt * P;
      scale *= u.rho;
    }
  }
  // Margin for the iterations cut off at round-off level.
  u.M = std::max(u.M * 1.01, 1e-12);
  return u;
}

BoundReport lower_bound_check(double eps, double delta, long long T, long long H, double D,
                              double alpha_min) {
  check_ranges(eps, delta, T, D, alpha_min);
  if (H < 1) throw Error(ErrorKind::InvalidRange, "H must be >= 1");
  BoundReport r;
  r.lhs_4HD = 4.0 * static_cast<double>(H - 1) * D;
  r.rhs_necessary = necessary_rhs(eps, delta, T, alpha_min);
  r.necessary_holds = r.lhs_4HD >= r.rhs_necessary;
  if (r.rhs_necessary <= 0.0) {
    r.min_H_necessary = 1;
  } else if (D > 0.0 && r.rhs_necessary / (4.0 * D) < 1e15) {
    long long h = static_cast<long long>(std::ceil(r.rhs_necessary / (4.0 * D))) + 1;
    // Fix up the ceiling against round-off.
    while (h > 1 && 4.0 * static_cast<double>(h - 2) * D >= r.rhs_necessary) --h;
    while (4.0 * static_cast<double>(h - 1) * D < r.rhs_necessary) ++h;
    r.min_H_necessary = h;
  }
  const double log_a = std::log(alpha_min / (16.0 * std::numbers::e * eps));
  r.asymptotic_ratio = 2.0 * static_cast<double>(H - 1) * D / log_a;
  return r;
}

bool lower_bound_probability_form(double eps, double delta, long long T, long long H, double D,
                                  double alpha_min) {
  check_ranges(eps, delta, T, D, alpha_min);
  const double eT = eps * static_cast<double>(T);
  // The two factors are merged in one exponent so that neither overflows alone.
  const double prob = 0.5 * std::exp(eT * std::log(alpha_min / (16.0 * std::numbers::e * eps)) -
                                     4.0 * eT * static_cast<double>(H - 1) * D);
  return delta >= prob;
}

std::optional<long long> min_H_by_scan(double eps, double delta, long long T, double D,
                                       double alpha_min, long long H_max) {
  for (long long H = 1; H <= H_max; ++H) {
    if (lower_bound_check(eps, delta, T, H, D, alpha_min).necessary_holds) return H;
  }
  return std::nullopt;
}

double predicted_rate(double T, double H, double gamma_ps, double D_pi, double C_eta) {
  return T * std::exp(-C_eta * gamma_ps * H * D_pi);
}

double rate_constant_from_eta(double eta_p) {
  return 1.0 / (256.0 * (4.0 * eta_p * eta_p + 5.0 * std::log(eta_p)));
}

}  // namespace mmc
