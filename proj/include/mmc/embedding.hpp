#pragma once

// Euclidean embedding of ergodic chains, L(M) = vec(diag(π)^{1/2} P), and its
// empirical counterpart from a single trajectory. Coordinates are flattened
// row-major: (s, s') -> s·S + s'.

#include <Eigen/Dense>

#include <span>
#include <utility>
#include <vector>

#include "mmc/chain.hpp"
#include "mmc/simgen.hpp"

namespace mmc {

/// Occupation counts N(s) over h ∈ [H] and transition counts N(s,s') over
/// h ∈ [H−1].
struct CountStats {
  int S = 0;
  int H = 0;
  std::vector<int> visits;       // length S
  std::vector<int> transitions;  // S×S row-major

  int transition(int s, int next) const {
    return transitions[static_cast<std::size_t>(s * S + next)];
  }
  /// Σ_{s'} N(s,s'): visits to s that have a successor.
  int outgoing(int s) const;
};

CountStats count_stats(std::span<const State> trajectory, int S);

struct EmbeddingVector {
  Eigen::VectorXd coords;  // length S²
};

enum class DataMatrixKind { Truth, Empirical };

struct DataMatrix {
  Eigen::MatrixXd rows;  // T×S²
  DataMatrixKind kind = DataMatrixKind::Empirical;
};

/// Coordinate (s,s') = √π(s)·P(s,s').
EmbeddingVector embed_model(const MarkovModel& model);

/// Coordinate (s,s') = N(s,s')/√(H·N(s)); unvisited states map to zero.
EmbeddingVector embed_trajectory(const CountStats& stats);

/// Inverts embed_model: π(s) = Σ_{s'} L(s,s')², P(s,s') = L(s,s')/√π(s).
std::pair<Eigen::VectorXd, Eigen::MatrixXd> reconstruct_chain(const EmbeddingVector& embedding);

/// W (truth rows) and Ŵ (per-trajectory rows).
std::pair<DataMatrix, DataMatrix> build_matrices(const MixtureInstance& instance,
                                                 const TrajectorySet& trajs, int jobs = 1);

/// Ŵ alone, for data-only use.
DataMatrix empirical_matrix(const TrajectorySet& trajs, int jobs = 1);

/// W alone from the models and decoding.
DataMatrix truth_matrix(const MixtureInstance& instance);

/// ‖A − B‖_{2→∞}: the largest row ℓ₂ distance.
double two_inf_distance(const DataMatrix& A, const DataMatrix& B);
double two_inf_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace mmc
