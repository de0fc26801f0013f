#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mmc/chain.hpp"
#include "mmc/rng.hpp"
#include "mmc/simgen.hpp"

namespace mmc::testing {

/// Random chain with every entry >= floor (defaults to 1/(2S)).
inline MarkovModel random_chain(int S, std::uint64_t seed, double floor = -1.0) {
  return gen_random_ergodic(S, seed, floor > 0.0 ? floor : 0.5 / S);
}

/// Random chain that may contain zeros but stays ergodic (self loops kept).
inline MarkovModel sparse_chain(int S, std::uint64_t seed) {
  auto eng = rng::substream(seed, 77);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    P(s, s) = 0.2 + rng::uniform01(eng);
    P(s, (s + 1) % S) = 0.2 + rng::uniform01(eng);
    for (int j = 0; j < S; ++j) {
      if (rng::uniform01(eng) < 0.3) P(s, j) += rng::uniform01(eng);
    }
    P.row(s) /= P.row(s).sum();
  }
  return validate_model(StochasticMatrix(P), ProbVector::uniform(static_cast<std::size_t>(S)));
}

/// Stationary law by power iteration, independent of the library's solve.
inline Eigen::VectorXd power_stationary(const Eigen::MatrixXd& P) {
  Eigen::MatrixXd A = 0.5 * (P + Eigen::MatrixXd::Identity(P.rows(), P.cols()));
  for (int i = 0; i < 200; ++i) A = A * A, A = (A.array().colwise() / A.rowwise().sum().array()).matrix();
  return A.row(0).transpose();
}

/// Largest t-step worst-row TV, computed from explicit matrix powers.
inline int mixing_time_oracle(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi) {
  Eigen::MatrixXd Pt = P;
  for (int t = 1; t < 100000; ++t) {
    double worst = 0.0;
    for (Eigen::Index s = 0; s < P.rows(); ++s) {
      worst = std::max(worst, 0.5 * (Pt.row(s).transpose() - pi).cwiseAbs().sum());
    }
    if (worst <= 0.25) return t;
    Pt = Pt * P;
  }
  return -1;
}

/// Pseudo-spectral gap through the non-symmetric product (P*)^k P^k and a
/// general eigensolver.
inline double psg_oracle(const Eigen::MatrixXd& P, const Eigen::VectorXd& pi, int k_max) {
  const auto S = P.rows();
  Eigen::MatrixXd Pstar(S, S);
  for (Eigen::Index i = 0; i < S; ++i)
    for (Eigen::Index j = 0; j < S; ++j) Pstar(i, j) = pi[j] * P(j, i) / pi[i];
  double best = 0.0;
  Eigen::MatrixXd Pk = Eigen::MatrixXd::Identity(S, S), Psk = Pk;
  for (int k = 1; k <= k_max; ++k) {
    Pk = Pk * P;
    Psk = Psk * Pstar;
    Eigen::EigenSolver<Eigen::MatrixXd> es(Psk * Pk, false);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < S; ++i) ev.push_back(es.eigenvalues()[i].real());
    std::sort(ev.begin(), ev.end(), std::greater<>());
    const double lam2 = S > 1 ? ev[1] : 0.0;
    best = std::max(best, (1.0 - lam2) / k);
  }
  return best;
}

}  // namespace mmc::testing
