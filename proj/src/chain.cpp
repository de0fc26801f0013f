#include "mmc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>

namespace mmc {
namespace {

void check_distribution(const Eigen::VectorXd& v, ErrorKind kind, const std::string& what) {
  if (v.size() == 0) {
    throw Error(kind, what + " is empty");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) {
      std::ostringstream os;
      os << what << " has invalid entry " << v[i] << " at index " << i;
      throw Error(kind, os.str());
    }
  }
  const double sum = v.sum();
  if (std::abs(sum - 1.0) > kProbSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << what << " sums to " << sum;
    throw Error(kind, os.str());
  }
}

std::vector<std::size_t> support_indices(const std::vector<bool>& support) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i]) idx.push_back(i);
  }
  return idx;
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

Eigen::VectorXd restrict(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(idx[i])];
  }
  return out;
}

// Graph check on the positive-transition digraph: strong connectivity from
// node 0, then the period as the gcd of level[u] + 1 - level[v] over edges.
void check_ergodic(const Eigen::MatrixXd& P) {
  const auto n = P.rows();
  auto reach = [&](bool reverse) {
    std::vector<int> level(static_cast<std::size_t>(n), -1);
    std::queue<Eigen::Index> q;
    level[0] = 0;
    q.push(0);
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      for (Eigen::Index v = 0; v < n; ++v) {
        const double w = reverse ? P(v, u) : P(u, v);
        if (w > 0.0 && level[static_cast<std::size_t>(v)] < 0) {
          level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
          q.push(v);
        }
      }
    }
    return level;
  };

  const auto fwd = reach(false);
  const auto bwd = reach(true);
  for (Eigen::Index v = 0; v < n; ++v) {
    if (fwd[static_cast<std::size_t>(v)] < 0 || bwd[static_cast<std::size_t>(v)] < 0) {
      throw Error(ErrorKind::NotIrreducible,
                  "state " + std::to_string(v) + " is not mutually reachable with state 0");
    }
  }

  int period = 0;
  for (Eigen::Index u = 0; u < n; ++u) {
    for (Eigen::Index v = 0; v < n; ++v) {
      if (P(u, v) > 0.0) {
        const int d = fwd[static_cast<std::size_t>(u)] + 1 - fwd[static_cast<std::size_t>(v)];
        period = std::gcd(period, std::abs(d));
      }
    }
  }
  if (period != 1) {
    throw Error(ErrorKind::Periodic, "chain has period " + std::to_string(period));
  }
}

Eigen::VectorXd solve_stationary(const Eigen::MatrixXd& P) {
  const auto n = P.rows();
  Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  A.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b[n - 1] = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (lu.rank() < n) {
    throw Error(ErrorKind::SingularSystem, "stationary system is rank deficient");
  }
  Eigen::VectorXd pi = lu.solve(b);
  // Round-off can leave entries of order -1e-17 on nearly empty states.
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  const double residual = (pi.transpose() * P - pi.transpose()).cwiseAbs().maxCoeff();
  if (!(residual <= kStationaryTol)) {
    throw Error(ErrorKind::SingularSystem,
                "stationary residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return pi;
}

int mixing_time_impl(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, double threshold,
                     int t_max) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::InvalidRange, "mixing threshold must lie in (0,1)");
  }
  Eigen::MatrixXd Pt = P;
  for (int t = 1; t <= t_max; ++t) {
    double worst = 0.0;
    for (Eigen::Index s = 0; s < Pt.rows(); ++s) {
      worst = std::max(worst, 0.5 * (Pt.row(s).transpose() - pi).cwiseAbs().sum());
    }
    if (worst <= threshold) return t;
    Pt = Pt * P;
  }
  throw Error(ErrorKind::NotMixedWithinTMax,
              "chain not mixed within t_max = " + std::to_string(t_max));
}

std::vector<double> gaps_impl(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int k_max) {
  if (k_max < 1) {
    throw Error(ErrorKind::InvalidRange, "k_max must be >= 1");
  }
  const Eigen::VectorXd sq = pi.cwiseSqrt();
  const Eigen::VectorXd inv_sq = sq.cwiseInverse();
  // Q = D^{1/2} P D^{-1/2}; then D^{1/2} (P*)^k P^k D^{-1/2} = (Q^k)ᵀ Q^k.
  const Eigen::MatrixXd Q = sq.asDiagonal() * P * inv_sq.asDiagonal();

  std::vector<double> gaps;
  gaps.reserve(static_cast<std::size_t>(k_max));
  Eigen::MatrixXd Qk = Q;
  for (int k = 1; k <= k_max; ++k) {
    Eigen::MatrixXd A = Qk.transpose() * Qk;
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::EigenFailure, "eigensolver failed at k = " + std::to_string(k));
    }
    const auto& ev = es.eigenvalues();  // ascending
    const double lambda2 = ev.size() >= 2 ? ev[ev.size() - 2] : 0.0;
    gaps.push_back(1.0 - lambda2);
    Qk = Qk * Q;
  }
  return gaps;
}

double max_scaled_gap(const std::vector<double>& gaps) {
  double best = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    best = std::max(best, gaps[i] / static_cast<double>(i + 1));
  }
  return best;
}

}  // namespace

ProbVector::ProbVector(Eigen::VectorXd values) : values_(std::move(values)) {
  check_distribution(values_, ErrorKind::InvalidDistribution, "probability vector");
}

ProbVector::ProbVector(std::initializer_list<double> values)
    : ProbVector(Eigen::Map<const Eigen::VectorXd>(values.begin(),
                                                   static_cast<Eigen::Index>(values.size()))) {}

ProbVector ProbVector::uniform(std::size_t n) {
  return ProbVector(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

ProbVector ProbVector::point_mass(std::size_t n, std::size_t at) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(at)] = 1.0;
  return ProbVector(std::move(v));
}

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd rows) : m_(std::move(rows)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "transition matrix must be square and nonempty");
  }
  for (Eigen::Index s = 0; s < m_.rows(); ++s) {
    check_distribution(m_.row(s).transpose(), ErrorKind::RowNotStochastic,
                       "row " + std::to_string(s));
  }
}

StochasticMatrix::StochasticMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    if (static_cast<Eigen::Index>(r.size()) != n) {
      throw Error(ErrorKind::DimensionMismatch, "transition matrix must be square");
    }
    Eigen::Index j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  *this = StochasticMatrix(std::move(m));
}

StochasticMatrix StochasticMatrix::uniform(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return StochasticMatrix(Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(n)));
}

ProbVector StochasticMatrix::row(std::size_t s) const {
  return ProbVector(m_.row(static_cast<Eigen::Index>(s)).transpose());
}

bool MarkovModel::full_support() const noexcept {
  return std::all_of(support_.begin(), support_.end(), [](bool b) { return b; });
}

double MarkovModel::pi_min() const {
  double m = 1.0;
  for (std::size_t s = 0; s < support_.size(); ++s) {
    if (support_[s]) m = std::min(m, pi_[s]);
  }
  return m;
}

ProbVector stationary_distribution(const StochasticMatrix& P) {
  return ProbVector(solve_stationary(P.matrix()));
}

MarkovModel validate_model(const StochasticMatrix& P, const ProbVector& mu) {
  if (P.size() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "empty transition matrix");
  }
  if (mu.size() != P.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "initial distribution has length " + std::to_string(mu.size()) + ", expected " +
                    std::to_string(P.size()));
  }
  check_ergodic(P.matrix());

  MarkovModel m;
  m.P_ = P;
  m.mu_ = mu;
  m.pi_ = ProbVector(solve_stationary(P.matrix()));
  m.support_.assign(P.size(), true);
  m.t_mix_ = mixing_time_impl(P.matrix(), m.pi_.values(), 0.25, 100000);
  m.gamma_ps_ = max_scaled_gap(gaps_impl(P.matrix(), m.pi_.values(), default_gap_horizon(m.t_mix_)));
  return m;
}

int default_gap_horizon(int t_mix) noexcept { return std::max(10, 2 * t_mix); }

StochasticMatrix time_reversal(const MarkovModel& model) {
  const Eigen::MatrixXd& P = model.transition().matrix();
  const Eigen::VectorXd& pi = model.stationary().values();
  const auto& support = model.support();
  const auto n = P.rows();
  Eigen::MatrixXd R = P;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (!support[static_cast<std::size_t>(s)]) continue;
    for (Eigen::Index t = 0; t < n; ++t) {
      R(s, t) = support[static_cast<std::size_t>(t)] ? pi[t] * P(t, s) / pi[s] : 0.0;
    }
    R.row(s) /= R.row(s).sum();
  }
  return StochasticMatrix(std::move(R));
}

std::vector<double> multistep_spectral_gaps(const MarkovModel& model, int k_max) {
  const auto idx = support_indices(model.support());
  return gaps_impl(restrict(model.transition().matrix(), idx),
                   restrict(model.stationary().values(), idx), k_max);
}

double pseudo_spectral_gap(const MarkovModel& model, int k_max) {
  return max_scaled_gap(multistep_spectral_gaps(model, k_max));
}

int mixing_time(const MarkovModel& model, double threshold, int t_max) {
  const auto idx = support_indices(model.support());
  return mixing_time_impl(restrict(model.transition().matrix(), idx),
                          restrict(model.stationary().values(), idx), threshold, t_max);
}

MarkovModel augmented_chain(const MarkovModel& model) {
  const auto S = static_cast<Eigen::Index>(model.num_states());
  const Eigen::MatrixXd& P = model.transition().matrix();
  const Eigen::VectorXd& pi = model.stationary().values();
  const Eigen::VectorXd& mu = model.initial().values();
  const Eigen::Index n = S * S;

  Eigen::MatrixXd Pd = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd pid(n);
  Eigen::VectorXd mud(n);
  for (Eigen::Index x = 0; x < S; ++x) {
    for (Eigen::Index xn = 0; xn < S; ++xn) {
      const Eigen::Index from = x * S + xn;
      for (Eigen::Index yn = 0; yn < S; ++yn) {
        Pd(from, xn * S + yn) = P(xn, yn);
      }
      pid[from] = pi[x] * P(x, xn);
      mud[from] = mu[x] * P(x, xn);
    }
  }

  MarkovModel d;
  d.P_ = StochasticMatrix(std::move(Pd));
  d.pi_ = ProbVector(pid / pid.sum());
  d.mu_ = ProbVector(mud / mud.sum());
  d.support_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d.support_[static_cast<std::size_t>(i)] = pid[i] > 0.0;

  const auto idx = support_indices(d.support_);
  const Eigen::MatrixXd Ps = restrict(d.P_.matrix(), idx);
  const Eigen::VectorXd pis = restrict(d.pi_.values(), idx);
  check_ergodic(Ps);
  d.t_mix_ = mixing_time_impl(Ps, pis, 0.25, 100000);
  d.gamma_ps_ = max_scaled_gap(gaps_impl(Ps, pis, default_gap_horizon(d.t_mix_)));
  return d;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

double pi_min(std::span<const MarkovModel> models) {
  double m = 1.0;
  for (const auto& model : models) m = std::min(m, model.pi_min());
  return m;
}

double v_min(std::span<const MarkovModel> models) {
  double m = 1.0;
  for (const auto& model : models) {
    const auto& pi = model.stationary().values();
    for (Eigen::Index s = 0; s < pi.size(); ++s) {
      if (model.support()[static_cast<std::size_t>(s)]) m = std::min(m, pi[s] * (1.0 - pi[s]));
    }
  }
  return m;
}

double min_pseudo_spectral_gap(std::span<const MarkovModel> models) {
  double m = 1.0;
  for (const auto& model : models) m = std::min(m, model.pseudo_spectral_gap());
  return m;
}

}  // namespace mmc
