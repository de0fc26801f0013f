#pragma once

// End-to-end runs: generator specs, one sample → Stage I → Stage II → oracle
// pass per (config point, seed), sweep CSVs and their aggregation.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmc/likelihood.hpp"
#include "mmc/spectral.hpp"

namespace mmc {

/// Chains and cluster proportions; T and H are set per sweep point.
struct ModelFamily {
  std::vector<MarkovModel> models;
  ProbVector alpha = ProbVector::uniform(2);
};

/// {type: "separation", S_prime} | {type: "random", S, K, floor, seed} |
/// {type: "inline", models: [...]}; optional "alpha".
ModelFamily family_from_spec(const nlohmann::json& spec);

/// Full instance from a spec that also carries T and H (and optional
/// "shuffle_seed").
MixtureInstance instance_from_spec(const nlohmann::json& spec);

struct RunConfig {
  SpectralConfig spectral;           // delta and gamma_ps are overwritten per point
  std::optional<double> gamma;       // unset: min over true chains
  double lambda = 0.5;
  bool use_initial = true;
  bool shuffle = false;
  int jobs = 1;
};

struct SweepRecord {
  int T = 0;
  int H = 0;
  double delta = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int K_hat = 0;
  int err_stage1 = 0;
  int err_stage2 = 0;
  int err_oracle = 0;
  double D = 0.0;
  double D_pi = 0.0;
  double delta_W_sq = 0.0;
  double gamma_ps = 0.0;
  double sigma_thres = 0.0;
  int R_hat = 0;
  double wall_time = 0.0;
};

struct RunArtifacts {
  SweepRecord record;
  Stage1Result stage1;
  Stage2Result stage2;
  std::vector<int> oracle;
};

RunArtifacts run_point(const ModelFamily& family, int T, int H, double delta, double lambda,
                       std::uint64_t seed, const RunConfig& cfg);

struct SweepAxes {
  std::vector<int> T;
  std::vector<int> H;
  std::vector<double> delta;
  std::vector<double> lambda;
  std::vector<std::uint64_t> seeds;
  void validate() const;
};

/// Records in (T, H, δ, λ, seed) order; `jobs` workers run points in
/// parallel, each point single-threaded.
std::vector<SweepRecord> run_sweep(const ModelFamily& family, const SweepAxes& axes,
                                   const RunConfig& cfg);

extern const char* const kSweepHeader;
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rows);
std::vector<SweepRecord> read_sweep_csv(std::istream& in);

struct ReportRow {
  int T = 0;
  int H = 0;
  double delta = 0.0;
  double lambda = 0.0;
  int n = 0;
  double mean_stage1 = 0.0, median_stage1 = 0.0, ci_stage1 = 0.0;
  double mean_stage2 = 0.0, median_stage2 = 0.0, ci_stage2 = 0.0;
  double mean_oracle = 0.0, median_oracle = 0.0, ci_oracle = 0.0;
  double predicted_rate = 0.0;
};

/// Groups by (T, H, δ, λ); error columns are E_T/T, CI is the 95% normal
/// half-width. The predicted column is T·exp(−C·γ_ps·H·D_π) with the
/// group's mean γ_ps and D_π.
std::vector<ReportRow> aggregate(const std::vector<SweepRecord>& rows, double C_eta);
extern const char* const kReportHeader;
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace mmc
