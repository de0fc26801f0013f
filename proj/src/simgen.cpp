#include "mmc/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

#include "mmc/parallel.hpp"
#include "mmc/rng.hpp"

namespace mmc {
namespace {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ull;
    }
  }
  template <class T>
  void value(T v) {
    bytes(&v, sizeof v);
  }
};

// Row-major cumulative table for inverse-CDF draws.
struct CdfTable {
  int n = 0;
  std::vector<double> cum;
  std::vector<double> prob;

  explicit CdfTable(const Eigen::MatrixXd& P) : n(static_cast<int>(P.cols())) {
    cum.resize(static_cast<std::size_t>(P.rows() * P.cols()));
    prob.resize(cum.size());
    for (Eigen::Index s = 0; s < P.rows(); ++s) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < P.cols(); ++j) {
        acc += P(s, j);
        cum[static_cast<std::size_t>(s * P.cols() + j)] = acc;
        prob[static_cast<std::size_t>(s * P.cols() + j)] = P(s, j);
      }
    }
  }

  State draw(std::size_t row, double u) const {
    const double* c = cum.data() + row * static_cast<std::size_t>(n);
    const double* p = prob.data() + row * static_cast<std::size_t>(n);
    for (int j = 0; j < n; ++j) {
      if (u < c[j] && p[j] > 0.0) return static_cast<State>(j);
    }
    // u fell past the last partial sum through round-off: take the last
    // state with positive probability.
    for (int j = n - 1; j >= 0; --j) {
      if (p[j] > 0.0) return static_cast<State>(j);
    }
    return 0;
  }
};

}  // namespace

MixtureInstance::MixtureInstance(std::vector<MarkovModel> models, std::vector<int> decoding,
                                 int horizon)
    : models_(std::move(models)), decoding_(std::move(decoding)), H_(horizon) {
  if (models_.empty()) {
    throw Error(ErrorKind::EmptyInput, "mixture instance needs at least one model");
  }
  if (H_ < 2) {
    throw Error(ErrorKind::InvalidRange, "horizon H must be >= 2");
  }
  const auto S = models_.front().num_states();
  for (const auto& m : models_) {
    if (m.num_states() != S) {
      throw Error(ErrorKind::StateSpaceMismatch, "models do not share a state space");
    }
  }
  if (S > 65535) {
    throw Error(ErrorKind::InvalidRange, "state count exceeds the u16 trajectory encoding");
  }
  std::vector<int> sizes(models_.size(), 0);
  for (int k : decoding_) {
    if (k < 0 || static_cast<std::size_t>(k) >= models_.size()) {
      throw Error(ErrorKind::InvalidRange, "decoding label " + std::to_string(k) + " out of range");
    }
    ++sizes[static_cast<std::size_t>(k)];
  }
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) {
      throw Error(ErrorKind::EmptyCluster, "cluster " + std::to_string(k) + " has no trajectories");
    }
  }
}

std::vector<double> MixtureInstance::cluster_fractions() const {
  std::vector<double> alpha(models_.size(), 0.0);
  for (int k : decoding_) alpha[static_cast<std::size_t>(k)] += 1.0;
  for (double& a : alpha) a /= static_cast<double>(decoding_.size());
  return alpha;
}

double MixtureInstance::alpha_min() const {
  const auto a = cluster_fractions();
  return *std::min_element(a.begin(), a.end());
}

std::uint64_t MixtureInstance::content_hash() const {
  Fnv1a h;
  h.value(static_cast<std::uint64_t>(models_.size()));
  h.value(static_cast<std::uint64_t>(num_states()));
  for (const auto& m : models_) {
    const auto& P = m.transition().matrix();
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
      for (Eigen::Index j = 0; j < P.cols(); ++j) h.value(P(i, j));
    }
    const auto& mu = m.initial().values();
    for (Eigen::Index i = 0; i < mu.size(); ++i) h.value(mu[i]);
  }
  h.value(static_cast<std::int64_t>(H_));
  h.value(static_cast<std::uint64_t>(decoding_.size()));
  for (int k : decoding_) h.value(static_cast<std::int32_t>(k));
  return h.h;
}

std::vector<int> cluster_sizes(std::span<const double> alpha, int T) {
  const auto K = static_cast<int>(alpha.size());
  if (K == 0) throw Error(ErrorKind::EmptyInput, "empty cluster proportions");
  if (T < K) {
    throw Error(ErrorKind::EmptyClusterAfterRounding,
                "T = " + std::to_string(T) + " cannot give " + std::to_string(K) +
                    " nonempty clusters");
  }
  std::vector<int> sizes(static_cast<std::size_t>(K));
  std::vector<double> frac(static_cast<std::size_t>(K));
  int assigned = 0;
  for (int k = 0; k < K; ++k) {
    const double quota = alpha[static_cast<std::size_t>(k)] * T;
    sizes[static_cast<std::size_t>(k)] = static_cast<int>(std::floor(quota));
    frac[static_cast<std::size_t>(k)] = quota - std::floor(quota);
    assigned += sizes[static_cast<std::size_t>(k)];
  }
  std::vector<int> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)];
  });
  for (int i = 0; assigned < T; i = (i + 1) % K, ++assigned) {
    ++sizes[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }
  // Floor of one per cluster, taken from the currently largest cluster.
  for (int k = 0; k < K; ++k) {
    if (sizes[static_cast<std::size_t>(k)] == 0) {
      auto largest = std::max_element(sizes.begin(), sizes.end());
      if (*largest < 2) {
        throw Error(ErrorKind::EmptyClusterAfterRounding, "cannot fill cluster " + std::to_string(k));
      }
      --*largest;
      sizes[static_cast<std::size_t>(k)] = 1;
    }
  }
  return sizes;
}

MixtureInstance make_instance(std::vector<MarkovModel> models, const ProbVector& alpha, int T,
                              int H, std::optional<std::uint64_t> shuffle_seed) {
  if (models.size() < 2) {
    throw Error(ErrorKind::InvalidRange, "a mixture needs K >= 2 models");
  }
  if (alpha.size() != models.size()) {
    throw Error(ErrorKind::DimensionMismatch, "alpha has length " + std::to_string(alpha.size()) +
                                                  " but there are " +
                                                  std::to_string(models.size()) + " models");
  }
  const auto S = models.front().num_states();
  for (const auto& m : models) {
    if (m.num_states() != S) {
      throw Error(ErrorKind::StateSpaceMismatch, "models do not share a state space");
    }
  }
  std::vector<double> a(alpha.values().data(), alpha.values().data() + alpha.size());
  const auto sizes = cluster_sizes(a, T);

  std::vector<int> f;
  f.reserve(static_cast<std::size_t>(T));
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    f.insert(f.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
  }
  if (shuffle_seed) {
    auto eng = rng::substream(*shuffle_seed, ~std::uint64_t{0});
    for (std::size_t i = f.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng::bounded(eng, i + 1));
      std::swap(f[i], f[j]);
    }
  }
  return MixtureInstance(std::move(models), std::move(f), H);
}

TrajectorySet sample_trajectories(const MixtureInstance& instance, std::uint64_t seed, int jobs) {
  TrajectorySet out;
  out.T = instance.num_trajectories();
  out.H = instance.horizon();
  out.S = static_cast<int>(instance.num_states());
  out.seed = seed;
  out.instance_id = instance.content_hash();
  out.states.resize(static_cast<std::size_t>(out.T) * static_cast<std::size_t>(out.H));

  std::vector<CdfTable> kernels;
  std::vector<CdfTable> initial;
  for (const auto& m : instance.models()) {
    kernels.emplace_back(m.transition().matrix());
    initial.emplace_back(Eigen::MatrixXd(m.initial().values().transpose()));
  }

  parallel_for(static_cast<std::size_t>(out.T), jobs, [&](std::size_t t) {
    const auto k = static_cast<std::size_t>(instance.decoding()[t]);
    auto eng = rng::substream(seed, t);
    State* row = out.states.data() + t * static_cast<std::size_t>(out.H);
    row[0] = initial[k].draw(0, rng::uniform01(eng));
    for (int h = 1; h < out.H; ++h) {
      row[h] = kernels[k].draw(row[h - 1], rng::uniform01(eng));
    }
  });
  return out;
}

MarkovModel gen_random_ergodic(int S, std::uint64_t seed, double floor) {
  if (S < 2) throw Error(ErrorKind::InvalidRange, "S must be >= 2");
  if (!(floor > 0.0 && floor < 1.0 / S)) {
    throw Error(ErrorKind::InvalidRange, "floor must lie in (0, 1/S)");
  }
  auto eng = rng::substream(seed, 0x72616e64ull);
  const double keep = 1.0 - S * floor;
  auto dirichlet_row = [&] {
    Eigen::VectorXd g(S);
    for (int j = 0; j < S; ++j) g[j] = rng::exponential(eng);
    g /= g.sum();
    Eigen::VectorXd row = (keep * g).array() + floor;
    return Eigen::VectorXd(row / row.sum());
  };
  Eigen::MatrixXd P(S, S);
  for (int s = 0; s < S; ++s) P.row(s) = dirichlet_row().transpose();
  Eigen::VectorXd mu = dirichlet_row();
  return validate_model(StochasticMatrix(std::move(P)), ProbVector(std::move(mu)));
}

std::vector<MarkovModel> gen_separation_instance(int S_prime) {
  if (S_prime < 1) throw Error(ErrorKind::InvalidRange, "S' must be >= 1");
  const int S = 2 * S_prime;
  const double hi = 3.0 / (4.0 * S_prime);
  const double lo = 1.0 / (4.0 * S_prime);
  Eigen::VectorXd row(S), swapped(S);
  for (int j = 0; j < S; ++j) {
    row[j] = j < S_prime ? hi : lo;
    swapped[j] = j < S_prime ? lo : hi;
  }
  auto build = [&](const Eigen::VectorXd& r) {
    Eigen::MatrixXd P = r.transpose().replicate(S, 1);
    // Rows are identical, so the stationary law is the row itself.
    return validate_model(StochasticMatrix(std::move(P)), ProbVector(r));
  };
  return {build(row), build(swapped)};
}

}  // namespace mmc
