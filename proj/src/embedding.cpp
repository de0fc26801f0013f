#include "mmc/embedding.hpp"

#include <cmath>
#include <string>

#include "mmc/parallel.hpp"

namespace mmc {

int CountStats::outgoing(int s) const {
  int n = 0;
  for (int j = 0; j < S; ++j) n += transition(s, j);
  return n;
}

CountStats count_stats(std::span<const State> trajectory, int S) {
  if (trajectory.size() < 2) {
    throw Error(ErrorKind::InvalidRange, "trajectory must have H >= 2");
  }
  CountStats c;
  c.S = S;
  c.H = static_cast<int>(trajectory.size());
  c.visits.assign(static_cast<std::size_t>(S), 0);
  c.transitions.assign(static_cast<std::size_t>(S) * static_cast<std::size_t>(S), 0);
  for (std::size_t h = 0; h < trajectory.size(); ++h) {
    const int s = trajectory[h];
    if (s >= S) {
      throw Error(ErrorKind::StateOutOfRange,
                  "state " + std::to_string(s) + " at position " + std::to_string(h) +
                      " exceeds S = " + std::to_string(S));
    }
    ++c.visits[static_cast<std::size_t>(s)];
    if (h + 1 < trajectory.size()) {
      const int next = trajectory[h + 1];
      if (next < S) ++c.transitions[static_cast<std::size_t>(s * S + next)];
    }
  }
  return c;
}

EmbeddingVector embed_model(const MarkovModel& model) {
  const auto S = static_cast<Eigen::Index>(model.num_states());
  const auto& P = model.transition().matrix();
  const auto& pi = model.stationary().values();
  Eigen::VectorXd v(S * S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const double w = std::sqrt(pi[s]);
    for (Eigen::Index j = 0; j < S; ++j) v[s * S + j] = w * P(s, j);
  }
  return {std::move(v)};
}

EmbeddingVector embed_trajectory(const CountStats& stats) {
  const int S = stats.S;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S) * S);
  for (int s = 0; s < S; ++s) {
    const int n = stats.visits[static_cast<std::size_t>(s)];
    if (n == 0) continue;
    const double denom = std::sqrt(static_cast<double>(stats.H) * n);
    for (int j = 0; j < S; ++j) {
      v[s * S + j] = stats.transition(s, j) / denom;
    }
  }
  return {std::move(v)};
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> reconstruct_chain(const EmbeddingVector& embedding) {
  const auto n = embedding.coords.size();
  const auto S = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (S * S != n) {
    throw Error(ErrorKind::DimensionMismatch, "embedding length is not a perfect square");
  }
  Eigen::VectorXd pi(S);
  Eigen::MatrixXd P(S, S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto block = embedding.coords.segment(s * S, S);
    // Rows of P sum to one, so the block sum is √π(s).
    const double root = block.sum();
    pi[s] = root * root;
    if (root > 0.0) {
      P.row(s) = (block / root).transpose();
    } else {
      P.row(s).setZero();
    }
  }
  return {std::move(pi), std::move(P)};
}

DataMatrix truth_matrix(const MixtureInstance& instance) {
  const auto S = static_cast<Eigen::Index>(instance.num_states());
  std::vector<Eigen::VectorXd> rows;
  for (const auto& m : instance.models()) rows.push_back(embed_model(m).coords);
  DataMatrix W{Eigen::MatrixXd(instance.num_trajectories(), S * S), DataMatrixKind::Truth};
  for (int t = 0; t < instance.num_trajectories(); ++t) {
    W.rows.row(t) = rows[static_cast<std::size_t>(instance.decoding()[static_cast<std::size_t>(t)])]
                        .transpose();
  }
  return W;
}

DataMatrix empirical_matrix(const TrajectorySet& trajs, int jobs) {
  const Eigen::Index S = trajs.S;
  DataMatrix W{Eigen::MatrixXd(trajs.T, S * S), DataMatrixKind::Empirical};
  parallel_for(static_cast<std::size_t>(trajs.T), jobs, [&](std::size_t t) {
    const auto stats = count_stats(trajs.trajectory(static_cast<int>(t)), trajs.S);
    W.rows.row(static_cast<Eigen::Index>(t)) = embed_trajectory(stats).coords.transpose();
  });
  return W;
}

std::pair<DataMatrix, DataMatrix> build_matrices(const MixtureInstance& instance,
                                                 const TrajectorySet& trajs, int jobs) {
  if (trajs.T != instance.num_trajectories() ||
      trajs.S != static_cast<int>(instance.num_states())) {
    throw Error(ErrorKind::DimensionMismatch, "trajectory set does not match the instance");
  }
  return {truth_matrix(instance), empirical_matrix(trajs, jobs)};
}

double two_inf_distance(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "matrices differ in shape");
  }
  if (A.rows() == 0) return 0.0;
  return (A - B).rowwise().norm().maxCoeff();
}

double two_inf_distance(const DataMatrix& A, const DataMatrix& B) {
  return two_inf_distance(A.rows, B.rows);
}

}  // namespace mmc
