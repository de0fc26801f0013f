#include "mmc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mmc {
namespace {

struct Svd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
};

Svd thin_svd(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::SvdFailure, "SVD did not converge");
  }
  const Eigen::MatrixXd recon =
      svd.matrixU() * svd.singularValues().asDiagonal() * svd.matrixV().transpose();
  const double scale = A.norm();
  if ((A - recon).norm() > 1e-8 * std::max(scale, std::numeric_limits<double>::min())) {
    throw Error(ErrorKind::SvdFailure, "SVD residual exceeds 1e-8 relative");
  }
  return {svd.matrixU(), svd.singularValues()};
}

double log_TH_over_delta(int T, int H, double delta) {
  const double arg = static_cast<double>(T) * H / delta;
  if (!(arg > 1.0)) {
    throw Error(ErrorKind::NonpositiveLogArgument, "log(TH/delta) requires TH/delta > 1");
  }
  return std::log(arg);
}

}  // namespace

void SpectralConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidRange, "delta must lie in (0,1)");
  if (!(gamma_ps > 0.0 && gamma_ps <= 1.0)) {
    throw Error(ErrorKind::InvalidRange, "gamma_ps must lie in (0,1]");
  }
  if (!(c_sigma >= 0.0) || !(c_rho >= 0.0)) {
    throw Error(ErrorKind::InvalidRange, "threshold constants must be nonnegative");
  }
  if (radius_sq && !(*radius_sq >= 0.0)) {
    throw Error(ErrorKind::InvalidRange, "radius override must be nonnegative");
  }
}

double sigma_threshold(int T, int S, int H, const SpectralConfig& cfg) {
  if (T < 1 || S < 1 || H < 1) throw Error(ErrorKind::InvalidRange, "T, S, H must be >= 1");
  const double lg = log_TH_over_delta(T, H, cfg.delta);
  return cfg.c_sigma * std::sqrt(static_cast<double>(T) * S / (H * cfg.gamma_ps) * lg);
}

int estimate_rank(std::span<const double> singular_values, double thresh) {
  return static_cast<int>(std::count_if(singular_values.begin(), singular_values.end(),
                                        [&](double s) { return s >= thresh; }));
}

double neighborhood_radius_sq(int T, int S, int H, const SpectralConfig& cfg) {
  if (cfg.radius_sq) return *cfg.radius_sq;
  switch (cfg.radius_mode) {
    case RadiusMode::Threshold: {
      const double s = sigma_threshold(T, S, H, cfg);
      return s * s;
    }
    case RadiusMode::RowLevel: {
      const double r_sq = cfg.c_sigma * cfg.c_sigma * S / (H * cfg.gamma_ps) * std::log(H / cfg.delta);
      return r_sq * log_TH_over_delta(T, H, cfg.delta);
    }
  }
  return 0.0;
}

double peel_guard(int T, int H, int R_hat, const SpectralConfig& cfg) {
  return cfg.c_rho * R_hat * static_cast<double>(T) / log_TH_over_delta(T, H, cfg.delta);
}

Eigen::MatrixXd spectral_representation(const Eigen::MatrixXd& W_hat, int rank) {
  const Svd svd = thin_svd(W_hat);
  const Eigen::Index r = std::min<Eigen::Index>(rank, svd.sigma.size());
  return svd.U.leftCols(r) * svd.sigma.head(r).asDiagonal();
}

Stage1Result spectral_cluster(const Eigen::MatrixXd& W_hat, int H, const SpectralConfig& cfg) {
  cfg.validate();
  const auto T = static_cast<int>(W_hat.rows());
  if (T == 0 || W_hat.cols() == 0) throw Error(ErrorKind::EmptyInput, "empty data matrix");
  const int S = static_cast<int>(std::llround(std::sqrt(static_cast<double>(W_hat.cols()))));
  if (static_cast<Eigen::Index>(S) * S != W_hat.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "data matrix must have S² columns");
  }

  Stage1Result out;
  const Svd svd = thin_svd(W_hat);
  out.singular_values.assign(svd.sigma.data(), svd.sigma.data() + svd.sigma.size());
  out.sigma_thres = sigma_threshold(T, S, H, cfg);
  out.R_hat = std::max(1, estimate_rank(out.singular_values, out.sigma_thres));
  out.radius_sq = neighborhood_radius_sq(T, S, H, cfg);

  const Eigen::Index r = std::min<Eigen::Index>(out.R_hat, svd.sigma.size());
  const Eigen::MatrixXd X = svd.U.leftCols(r) * svd.sigma.head(r).asDiagonal();

  // Neighborhoods Q_t under the squared radius.
  std::vector<std::vector<int>> Q(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    for (int u = 0; u < T; ++u) {
      if ((X.row(u) - X.row(t)).squaredNorm() <= out.radius_sq) {
        Q[static_cast<std::size_t>(t)].push_back(u);
      }
    }
  }

  // Greedy peel. A carved set smaller than the guard ends the loop; it is
  // kept as the last cluster unless discard_small_final is set.
  const double guard = peel_guard(T, H, out.R_hat, cfg);
  std::vector<int> label(static_cast<std::size_t>(T), -1);
  int unassigned = T;
  while (unassigned > 0) {
    int best_t = -1;
    int best_count = -1;
    for (int t = 0; t < T; ++t) {
      int count = 0;
      for (int u : Q[static_cast<std::size_t>(t)]) count += label[static_cast<std::size_t>(u)] < 0;
      if (count > best_count) {
        best_count = count;
        best_t = t;
      }
    }
    const bool small = best_count < guard;
    if (small && out.K_hat == 0) out.forced_first_cluster = true;
    if (small && out.K_hat > 0 && cfg.discard_small_final) break;
    for (int u : Q[static_cast<std::size_t>(best_t)]) {
      if (label[static_cast<std::size_t>(u)] < 0) {
        label[static_cast<std::size_t>(u)] = out.K_hat;
        --unassigned;
      }
    }
    out.centers.push_back(best_t);
    ++out.K_hat;
    if (small) break;
  }

  for (int t = 0; t < T; ++t) {
    if (label[static_cast<std::size_t>(t)] >= 0) continue;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < out.K_hat; ++k) {
      const double d = (X.row(out.centers[static_cast<std::size_t>(k)]) - X.row(t)).norm();
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    label[static_cast<std::size_t>(t)] = best;
  }
  out.labels = std::move(label);
  return out;
}

}  // namespace mmc
