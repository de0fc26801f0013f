#include "mmc/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mmc/parallel.hpp"

namespace mmc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_labels(std::span<const int> labels, int T, int K) {
  if (static_cast<int>(labels.size()) != T) {
    throw Error(ErrorKind::LengthMismatch, "label vector has length " +
                                               std::to_string(labels.size()) + ", expected " +
                                               std::to_string(T));
  }
  if (K < 1) throw Error(ErrorKind::InvalidRange, "K must be >= 1");
  for (int k : labels) {
    if (k < 0 || k >= K) throw Error(ErrorKind::InvalidRange, "label " + std::to_string(k) + " outside [0, K)");
  }
}

// Log-likelihood that returns −∞ instead of throwing on a zero entry.
double score(const CountStats& c, const Eigen::MatrixXd& kernel) {
  double total = 0.0;
  for (int s = 0; s < c.S; ++s) {
    for (int j = 0; j < c.S; ++j) {
      const int n = c.transition(s, j);
      if (n == 0) continue;
      const double p = kernel(s, j);
      if (!(p > 0.0)) return kNegInf;
      total += n * std::log(p);
    }
  }
  return total;
}

}  // namespace

TransitionEstimate pool_estimates(const TrajectorySet& trajs, std::span<const int> labels, int K,
                                  double lambda, int jobs) {
  check_labels(labels, trajs.T, K);
  if (!(lambda >= 0.0)) throw Error(ErrorKind::InvalidRange, "lambda must be >= 0");
  const int S = trajs.S;

  std::vector<CountStats> stats(static_cast<std::size_t>(trajs.T));
  parallel_for(stats.size(), jobs,
               [&](std::size_t t) { stats[t] = count_stats(trajs.trajectory(static_cast<int>(t)), S); });

  TransitionEstimate est;
  est.K = K;
  est.S = S;
  est.lambda = lambda;
  est.pooled_counts.assign(static_cast<std::size_t>(K), Eigen::MatrixXd::Zero(S, S));
  std::vector<int> members(static_cast<std::size_t>(K), 0);
  // Index-ordered reduction; counts are integers so the sums are exact anyway.
  for (int t = 0; t < trajs.T; ++t) {
    const auto k = static_cast<std::size_t>(labels[static_cast<std::size_t>(t)]);
    ++members[k];
    const auto& c = stats[static_cast<std::size_t>(t)];
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < S; ++j) est.pooled_counts[k](s, j) += c.transition(s, j);
    }
  }
  for (int k = 0; k < K; ++k) {
    if (members[static_cast<std::size_t>(k)] == 0) {
      throw Error(ErrorKind::EmptyCluster, "cluster " + std::to_string(k) + " has no trajectories");
    }
  }

  for (int k = 0; k < K; ++k) {
    const auto& N = est.pooled_counts[static_cast<std::size_t>(k)];
    Eigen::VectorXd out = N.rowwise().sum();
    Eigen::MatrixXd P(S, S);
    std::vector<bool> ok(static_cast<std::size_t>(S), true);
    for (int s = 0; s < S; ++s) {
      const double denom = out[s] + lambda * S;
      if (denom > 0.0) {
        P.row(s) = (N.row(s).array() + lambda) / denom;
      } else {
        P.row(s).setConstant(std::numeric_limits<double>::quiet_NaN());
        ok[static_cast<std::size_t>(s)] = false;
      }
    }
    est.pooled_visits.push_back(std::move(out));
    est.kernels.push_back(std::move(P));
    est.defined.push_back(std::move(ok));
  }
  return est;
}

double trajectory_loglik(const CountStats& stats, const Eigen::MatrixXd& kernel) {
  if (kernel.rows() != stats.S || kernel.cols() != stats.S) {
    throw Error(ErrorKind::DimensionMismatch, "kernel shape does not match the state count");
  }
  const double v = score(stats, kernel);
  if (v == kNegInf) {
    throw Error(ErrorKind::ZeroProbabilityTransition, "an observed transition has probability 0");
  }
  return v;
}

double trajectory_loglik(std::span<const State> trajectory, const Eigen::MatrixXd& kernel) {
  return trajectory_loglik(count_stats(trajectory, static_cast<int>(kernel.rows())), kernel);
}

double trajectory_loglik_sequential(std::span<const State> trajectory,
                                    const Eigen::MatrixXd& kernel) {
  double total = 0.0;
  for (std::size_t h = 0; h + 1 < trajectory.size(); ++h) {
    const int s = trajectory[h];
    const int j = trajectory[h + 1];
    if (s >= kernel.rows() || j >= kernel.cols()) {
      throw Error(ErrorKind::StateOutOfRange, "state exceeds the kernel size");
    }
    const double p = kernel(s, j);
    if (!(p > 0.0)) {
      throw Error(ErrorKind::ZeroProbabilityTransition,
                  "transition at position " + std::to_string(h) + " has probability 0");
    }
    total += std::log(p);
  }
  return total;
}

Stage2Result refine(const TrajectorySet& trajs, std::span<const int> initial_labels, int K,
                    const RefineOptions& opts) {
  check_labels(initial_labels, trajs.T, K);
  const int T = trajs.T;
  std::vector<CountStats> stats(static_cast<std::size_t>(T));
  parallel_for(stats.size(), opts.jobs, [&](std::size_t t) {
    stats[t] = count_stats(trajs.trajectory(static_cast<int>(t)), trajs.S);
  });

  Stage2Result out;
  out.lambda = opts.lambda;
  out.labels.assign(initial_labels.begin(), initial_labels.end());
  out.passes = 0;
  const int max_passes = opts.iterate ? std::max(1, opts.max_passes) : 1;
  for (int pass = 0; pass < max_passes; ++pass) {
    const auto est = pool_estimates(trajs, out.labels, K, opts.lambda, opts.jobs);
    out.loglik.resize(T, K);
    std::vector<int> next(out.labels);
    parallel_for(static_cast<std::size_t>(T), opts.jobs, [&](std::size_t t) {
      const auto ti = static_cast<Eigen::Index>(t);
      for (int k = 0; k < K; ++k) {
        // Undefined rows (λ = 0, no data) carry NaN; a trajectory that uses
        // such a row cannot be scored under that cluster.
        double v = score(stats[t], est.kernels[static_cast<std::size_t>(k)]);
        if (std::isnan(v)) v = kNegInf;
        out.loglik(ti, k) = v;
      }
      const int incumbent = out.labels[t];
      int best = incumbent;
      double best_v = out.loglik(ti, incumbent);
      for (int k = 0; k < K; ++k) {
        if (out.loglik(ti, k) > best_v) {
          best_v = out.loglik(ti, k);
          best = k;
        }
      }
      next[t] = best;
    });
    int changed = 0;
    for (int t = 0; t < T; ++t) changed += next[static_cast<std::size_t>(t)] != out.labels[static_cast<std::size_t>(t)];
    ++out.passes;
    out.changed += changed;
    out.labels = std::move(next);
    if (changed == 0) break;
    // A pass may empty a cluster; stop rather than pool from nothing.
    std::vector<int> sizes(static_cast<std::size_t>(K), 0);
    for (int k : out.labels) ++sizes[static_cast<std::size_t>(k)];
    if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) break;
  }
  return out;
}

std::vector<int> oracle_classify(const TrajectorySet& trajs, std::span<const MarkovModel> models,
                                 bool use_initial, int jobs) {
  if (models.empty()) throw Error(ErrorKind::EmptyInput, "no models supplied");
  for (const auto& m : models) {
    if (static_cast<int>(m.num_states()) != trajs.S) {
      throw Error(ErrorKind::StateSpaceMismatch, "model state count differs from the trajectories");
    }
  }
  const auto K = static_cast<int>(models.size());
  std::vector<int> labels(static_cast<std::size_t>(trajs.T), 0);
  parallel_for(static_cast<std::size_t>(trajs.T), jobs, [&](std::size_t t) {
    const auto traj = trajs.trajectory(static_cast<int>(t));
    const auto c = count_stats(traj, trajs.S);
    int best = 0;
    double best_v = kNegInf;
    for (int k = 0; k < K; ++k) {
      const auto& m = models[static_cast<std::size_t>(k)];
      double v = trajectory_loglik(c, m.transition().matrix());
      if (use_initial) {
        const double mu0 = m.initial()[traj[0]];
        if (!(mu0 > 0.0)) {
          throw Error(ErrorKind::ZeroProbabilityTransition, "initial state has probability 0");
        }
        v += std::log(mu0);
      }
      if (k == 0 || v > best_v) {
        best_v = v;
        best = k;
      }
    }
    labels[t] = best;
  });
  return labels;
}

}  // namespace mmc
