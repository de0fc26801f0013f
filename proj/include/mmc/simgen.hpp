#pragma once

// Mixture instances and reproducible trajectory sampling.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mmc/chain.hpp"

namespace mmc {

using State = std::uint16_t;

/// K chains over a common state space, a ground-truth decoding t -> k, and
/// the horizon H. Cluster labels are 0-based.
class MixtureInstance {
 public:
  /// Validates shapes and that every cluster is nonempty.
  MixtureInstance(std::vector<MarkovModel> models, std::vector<int> decoding, int horizon);

  std::size_t num_clusters() const noexcept { return models_.size(); }
  std::size_t num_states() const noexcept { return models_.front().num_states(); }
  int num_trajectories() const noexcept { return static_cast<int>(decoding_.size()); }
  int horizon() const noexcept { return H_; }
  const std::vector<MarkovModel>& models() const noexcept { return models_; }
  const std::vector<int>& decoding() const noexcept { return decoding_; }

  /// α_k = |f⁻¹(k)| / T.
  std::vector<double> cluster_fractions() const;
  double alpha_min() const;

  /// Content hash (FNV-1a over the numeric contents).
  std::uint64_t content_hash() const;

 private:
  std::vector<MarkovModel> models_;
  std::vector<int> decoding_;
  int H_;
};

/// T×H state indices stored row-major, plus provenance.
struct TrajectorySet {
  int T = 0;
  int H = 0;
  int S = 0;
  std::vector<State> states;
  std::uint64_t seed = 0;
  std::uint64_t instance_id = 0;

  std::span<const State> trajectory(int t) const {
    return {states.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(H),
            static_cast<std::size_t>(H)};
  }
};

/// Largest-remainder cluster sizes summing to T, each at least 1.
std::vector<int> cluster_sizes(std::span<const double> alpha, int T);

/// Builds f in contiguous blocks; when shuffle_seed is set the block labels
/// are permuted over t with a seeded Fisher-Yates shuffle.
MixtureInstance make_instance(std::vector<MarkovModel> models, const ProbVector& alpha, int T,
                              int H, std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Trajectory t uses the sub-stream (seed, t), so the output does not depend
/// on the number of worker threads.
TrajectorySet sample_trajectories(const MixtureInstance& instance, std::uint64_t seed,
                                  int jobs = 1);

/// Rows (and μ) from a flat Dirichlet mixed with the uniform law so that
/// every entry is at least `floor`.
MarkovModel gen_random_ergodic(int S, std::uint64_t seed, double floor);

/// The two-chain construction on S = 2·S' states: rows put 3/(4S') on the
/// first S' states and 1/(4S') on the rest, swapped for the second chain.
/// Initial laws equal the stationary laws.
std::vector<MarkovModel> gen_separation_instance(int S_prime);

}  // namespace mmc
