#include "mmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mmc/embedding.hpp"

namespace mmc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int label_count(std::span<const int> labels) {
  int K = 0;
  for (int k : labels) {
    if (k < 0) throw Error(ErrorKind::InvalidRange, "labels must be nonnegative");
    K = std::max(K, k + 1);
  }
  return K;
}

void need_pairs(std::span<const MarkovModel> models) {
  if (models.size() < 2) throw Error(ErrorKind::InvalidRange, "need at least two models");
}

// max ratio a/b over paired entries; 0/0 skipped, x/0 is +∞.
void ratio_max(double a, double b, double& acc) {
  if (a <= 0.0) return;
  acc = std::max(acc, b <= 0.0 ? kInf : a / b);
}

}  // namespace

Eigen::MatrixXi confusion_matrix(std::span<const int> f_hat, std::span<const int> f) {
  if (f_hat.size() != f.size()) {
    throw Error(ErrorKind::LengthMismatch, "label vectors differ in length: " +
                                               std::to_string(f_hat.size()) + " vs " +
                                               std::to_string(f.size()));
  }
  const int K = std::max({label_count(f_hat), label_count(f), 1});
  Eigen::MatrixXi C = Eigen::MatrixXi::Zero(K, K);
  for (std::size_t t = 0; t < f.size(); ++t) ++C(f_hat[t], f[t]);
  return C;
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  // Hungarian method (potentials form) on cost = −weight, 1-based internals.
  const auto n = static_cast<int>(weight.rows());
  if (weight.cols() != n) throw Error(ErrorKind::DimensionMismatch, "assignment needs a square matrix");
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(u);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(p);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = -weight(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

int misclassification_brute(std::span<const int> f_hat, std::span<const int> f) {
  const Eigen::MatrixXi C = confusion_matrix(f_hat, f);
  const auto K = static_cast<int>(C.rows());
  if (K > 8) throw Error(ErrorKind::InvalidRange, "brute force is limited to K <= 8");
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int agree = 0;
    for (int b = 0; b < K; ++b) agree += C(perm[static_cast<std::size_t>(b)], b);
    best = std::max(best, agree);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<int>(f.size()) - best;
}

int misclassification_assignment(std::span<const int> f_hat, std::span<const int> f) {
  const Eigen::MatrixXi C = confusion_matrix(f_hat, f);
  const auto match = max_weight_assignment(C.cast<double>());
  int agree = 0;
  for (std::size_t a = 0; a < match.size(); ++a) agree += C(static_cast<Eigen::Index>(a), match[a]);
  return static_cast<int>(f.size()) - agree;
}

int misclassification(std::span<const int> f_hat, std::span<const int> f) {
  const int K = std::max(label_count(f_hat), label_count(f));
  return K <= 8 ? misclassification_brute(f_hat, f) : misclassification_assignment(f_hat, f);
}

double delta_W_sq(std::span<const MarkovModel> models) {
  need_pairs(models);
  std::vector<Eigen::VectorXd> L;
  for (const auto& m : models) L.push_back(embed_model(m).coords);
  double best = kInf;
  for (std::size_t a = 0; a < L.size(); ++a) {
    for (std::size_t b = a + 1; b < L.size(); ++b) best = std::min(best, (L[a] - L[b]).squaredNorm());
  }
  return best;
}

StateGap state_gap(std::span<const MarkovModel> models) {
  need_pairs(models);
  const auto K = static_cast<Eigen::Index>(models.size());
  const auto S = static_cast<Eigen::Index>(models.front().num_states());
  StateGap out;
  out.witness = Eigen::MatrixXi::Constant(K, K, -1);
  double best_global = kInf;
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) {
      if (a == b) continue;
      const auto& ma = models[static_cast<std::size_t>(a)];
      const auto& mb = models[static_cast<std::size_t>(b)];
      double best = -1.0;
      double al = 0.0, dl = 0.0;
      for (Eigen::Index s = 0; s < S; ++s) {
        const double pi = std::min(ma.stationary()[s], mb.stationary()[s]);
        const double d = (ma.transition().matrix().row(s) - mb.transition().matrix().row(s)).squaredNorm();
        if (pi * d > best) {
          best = pi * d;
          al = pi;
          dl = d;
          out.witness(a, b) = static_cast<int>(s);
        }
      }
      if (best < best_global) {
        best_global = best;
        out.alpha = al;
        out.Delta_sq = dl;
      }
    }
  }
  return out;
}

EtaParams eta_params(std::span<const MarkovModel> models) {
  need_pairs(models);
  EtaParams e;
  const auto S = static_cast<Eigen::Index>(models.front().num_states());
  for (const auto& a : models) {
    for (const auto& b : models) {
      for (Eigen::Index s = 0; s < S; ++s) {
        ratio_max(a.initial()[s], b.initial()[s], e.eta_mu);
        ratio_max(a.stationary()[s], b.stationary()[s], e.eta_pi);
        for (Eigen::Index j = 0; j < S; ++j) {
          ratio_max(a.transition()(s, j), b.transition()(s, j), e.eta_p);
        }
      }
    }
  }
  return e;
}

double p_max(std::span<const MarkovModel> models) {
  double m = 0.0;
  for (const auto& model : models) m = std::max(m, model.transition().matrix().maxCoeff());
  return m;
}

GapReport gap_report(std::span<const MarkovModel> models, int H,
                     std::optional<std::span<const int>> decoding) {
  GapReport r;
  const auto D = divergence_D(models, H);
  const auto Dpi = divergence_D_pi(models);
  r.D = D.value;
  r.pairwise_D = D.pairwise;
  r.D_pi = Dpi.value;
  r.pairwise_D_pi = Dpi.pairwise;
  r.delta_W_sq = delta_W_sq(models);
  const auto kg = state_gap(models);
  r.alpha = kg.alpha;
  r.Delta_sq = kg.Delta_sq;
  r.eta = eta_params(models);
  r.p_max = p_max(models);
  r.pi_min = pi_min(models);
  r.v_min = v_min(models);
  r.gamma_ps = min_pseudo_spectral_gap(models);
  if (decoding) {
    std::vector<int> sizes(models.size(), 0);
    for (int k : *decoding) {
      if (k < 0 || static_cast<std::size_t>(k) >= models.size()) {
        throw Error(ErrorKind::InvalidRange, "decoding label out of range");
      }
      ++sizes[static_cast<std::size_t>(k)];
    }
    r.alpha_min_clusters = static_cast<double>(*std::min_element(sizes.begin(), sizes.end())) /
                           static_cast<double>(decoding->size());
  }
  return r;
}

GapReport gap_report(const MixtureInstance& instance) {
  return gap_report(instance.models(), instance.horizon(),
                    std::span<const int>(instance.decoding()));
}

}  // namespace mmc
