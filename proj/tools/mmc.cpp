// mmc: generate instances, sample trajectories, run both clustering stages,
// evaluate, report separation gaps and bounds, and run seeded sweeps.
//
// Exit status: 0 success, 2 invalid configuration or input, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mmc/bounds.hpp"
#include "mmc/experiment.hpp"
#include "mmc/io.hpp"

namespace fs = std::filesystem;
using namespace mmc;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  double delta = 0.1;
  double lambda = 0.5;
  std::optional<double> gamma;
  bool oracle_gamma = false;
  std::string out = ".";
  int jobs = 1;
  double c_sigma = 8.0;
  double c_rho = 32.0;
  std::string radius_mode = "threshold";
};

SpectralConfig spectral_config(const Globals& g) {
  SpectralConfig cfg;
  cfg.delta = g.delta;
  cfg.c_sigma = g.c_sigma;
  cfg.c_rho = g.c_rho;
  cfg.radius_mode = g.radius_mode == "rowlevel" ? RadiusMode::RowLevel : RadiusMode::Threshold;
  return cfg;
}

fs::path out_file(const Globals& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

void announce(const fs::path& p) { std::cout << p.string() << '\n'; }

MixtureInstance load_instance(const std::string& path) { return io::instance_from_json(io::read_json(path)); }

// Trajectories must come from the instance they are evaluated against.
void check_pairing(const MixtureInstance& inst, const TrajectorySet& tr) {
  if (tr.instance_id != 0 && tr.instance_id != inst.content_hash()) {
    throw Error(ErrorKind::InvalidSpec, "trajectories were not sampled from this instance");
  }
  if (tr.T != inst.num_trajectories() || tr.H != inst.horizon() ||
      tr.S != static_cast<int>(inst.num_states())) {
    throw Error(ErrorKind::DimensionMismatch, "trajectory shape disagrees with the instance");
  }
}

double resolve_gamma(const Globals& g, const std::optional<MixtureInstance>& inst) {
  if (g.gamma) return *g.gamma;
  if (!inst) throw Error(ErrorKind::InvalidSpec, "need --gamma or --instance for the oracle gap");
  return min_pseudo_spectral_gap(inst->models());
}

template <class T>
std::vector<T> axis(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::InvalidSpec, std::string("missing field 'axes.") + key + "'");
  try {
    const auto& v = j.at(key);
    return v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("field 'axes.") + key + "': " + e.what());
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Clustering trajectories from a mixture of Markov chains"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Sampling seed");
  app.add_option("--delta", g.delta, "Confidence parameter in (0,1)");
  app.add_option("--lambda", g.lambda, "Additive smoothing for pooled kernels");
  auto* gamma = app.add_option("--gamma", g.gamma, "Supplied pseudo-spectral gap");
  auto* oracle = app.add_flag("--oracle-gamma", g.oracle_gamma, "Use the true chains' minimum gap (default)");
  gamma->excludes(oracle);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--c-sigma", g.c_sigma, "Singular-value threshold constant");
  app.add_option("--c-rho", g.c_rho, "Peel guard constant");
  app.add_option("--radius-mode", g.radius_mode, "Neighborhood radius")
      ->check(CLI::IsMember({"threshold", "rowlevel"}));

  std::string spec_path, instance_path, traj_path, stage1_path, stage2_path, config_path;
  std::vector<std::string> csv_paths;
  bool iterate = false, with_mixing = false, shuffle = false;
  std::optional<double> c_eta;
  double eps = 0.01, D = 0.0, alpha_min = 0.5;
  long long bT = 0, bH = 0;

  auto* generate = app.add_subcommand("generate", "Write an instance from a generator spec");
  generate->add_option("--spec", spec_path, "Generator spec JSON")->required();

  auto* sample = app.add_subcommand("sample", "Sample trajectories from an instance");
  sample->add_option("--instance", instance_path)->required();

  auto* cluster = app.add_subcommand("cluster", "Stage I spectral clustering");
  cluster->add_option("--trajectories", traj_path)->required();
  cluster->add_option("--instance", instance_path, "Instance for the oracle gap");

  auto* refine_cmd = app.add_subcommand("refine", "Stage II likelihood refinement");
  refine_cmd->add_option("--trajectories", traj_path)->required();
  refine_cmd->add_option("--stage1", stage1_path)->required();
  refine_cmd->add_flag("--iterate", iterate, "Repeat until no label changes");

  auto* evaluate = app.add_subcommand("evaluate", "Misclassification of both stages and the oracle");
  evaluate->add_option("--instance", instance_path)->required();
  evaluate->add_option("--trajectories", traj_path)->required();
  evaluate->add_option("--stage1", stage1_path)->required();
  evaluate->add_option("--stage2", stage2_path)->required();

  auto* gaps = app.add_subcommand("gaps", "Separation measures and their inequalities");
  gaps->add_option("--instance", instance_path)->required();
  gaps->add_flag("--mixing", with_mixing, "Also check the mixing-constant form");

  auto* bounds = app.add_subcommand("bounds", "Necessary condition and predicted error rate");
  bounds->add_option("--instance", instance_path, "Take T, H, D and alpha_min from an instance");
  bounds->add_option("--eps", eps, "Target error fraction")->check(CLI::PositiveNumber);
  bounds->add_option("-T", bT);
  bounds->add_option("-H", bH);
  bounds->add_option("-D", D);
  bounds->add_option("--alpha-min", alpha_min);
  bounds->add_option("--c-eta", c_eta, "Rate constant (default: explicit constant from eta_p)");

  auto* sweep = app.add_subcommand("sweep", "Seeded sweep over T, H, delta, lambda");
  sweep->add_option("--config", config_path, "Sweep config JSON")->required();
  sweep->add_flag("--shuffle", shuffle, "Shuffle the decoding per point");

  auto* report = app.add_subcommand("report", "Aggregate sweep CSVs");
  report->add_option("csv", csv_paths)->required()->expected(1, -1);
  report->add_option("--c-eta", c_eta, "Rate constant for the predicted column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (generate->parsed()) {
    const auto inst = instance_from_spec(io::read_json(spec_path));
    const auto p = out_file(g, "instance.json");
    io::write_json(p, io::to_json(inst));
    announce(p);
  } else if (sample->parsed()) {
    const auto inst = load_instance(instance_path);
    const auto p = out_file(g, "trajectories.bin");
    io::write_trajectories(p, sample_trajectories(inst, g.seed, g.jobs));
    announce(p);
  } else if (cluster->parsed()) {
    const auto tr = io::read_trajectories(traj_path);
    std::optional<MixtureInstance> inst;
    if (!instance_path.empty()) {
      inst = load_instance(instance_path);
      check_pairing(*inst, tr);
    }
    auto cfg = spectral_config(g);
    cfg.gamma_ps = resolve_gamma(g, inst);
    const auto W = empirical_matrix(tr);
    const auto res = spectral_cluster(W, tr.H, cfg);
    const auto pm = out_file(g, "W_hat.f64");
    io::write_matrix(pm, W);
    auto j = io::to_json(res);
    j["gamma_ps"] = cfg.gamma_ps;
    const auto p = out_file(g, "stage1.json");
    io::write_json(p, j);
    announce(pm);
    announce(p);
  } else if (refine_cmd->parsed()) {
    const auto tr = io::read_trajectories(traj_path);
    const auto s1 = io::stage1_from_json(io::read_json(stage1_path));
    const auto res = refine(tr, s1.labels, s1.K_hat,
                            RefineOptions{.lambda = g.lambda, .iterate = iterate, .jobs = g.jobs});
    const auto pl = out_file(g, "loglik.f64");
    io::write_f64(pl, res.loglik);
    const auto p = out_file(g, "stage2.json");
    io::write_json(p, io::to_json(res));
    announce(pl);
    announce(p);
  } else if (evaluate->parsed()) {
    const auto inst = load_instance(instance_path);
    const auto tr = io::read_trajectories(traj_path);
    check_pairing(inst, tr);
    const auto s1j = io::read_json(stage1_path);
    const auto s1 = io::stage1_from_json(s1j);
    const auto s2 = io::stage2_from_json(io::read_json(stage2_path));
    const auto oracle = oracle_classify(tr, inst.models(), true, g.jobs);
    const auto& f = inst.decoding();
    SweepRecord r;
    r.T = tr.T;
    r.H = tr.H;
    r.delta = g.delta;
    r.lambda = s2.lambda;
    r.seed = tr.seed;
    r.K_hat = s1.K_hat;
    r.err_stage1 = misclassification(s1.labels, f);
    r.err_stage2 = misclassification(s2.labels, f);
    r.err_oracle = misclassification(oracle, f);
    r.D = divergence_D(inst).value;
    r.D_pi = divergence_D_pi(inst.models()).value;
    r.delta_W_sq = delta_W_sq(inst.models());
    r.gamma_ps = s1j.contains("gamma_ps") ? s1j["gamma_ps"].get<double>() : resolve_gamma(g, inst);
    r.sigma_thres = s1.sigma_thres;
    r.R_hat = s1.R_hat;
    const auto pc = out_file(g, "record.csv");
    {
      std::ofstream out(pc);
      write_sweep_csv(out, {r});
    }
    const auto p = out_file(g, "evaluation.json");
    io::write_json(p, {{"err_stage1", r.err_stage1},
                       {"err_stage2", r.err_stage2},
                       {"err_oracle", r.err_oracle},
                       {"K_hat", r.K_hat},
                       {"K", inst.num_clusters()},
                       {"oracle_labels", oracle}});
    announce(pc);
    announce(p);
  } else if (gaps->parsed()) {
    const auto inst = load_instance(instance_path);
    std::optional<UniformErgodicity> mix;
    if (with_mixing) mix = estimate_uniform_ergodicity(inst.models());
    json j = {{"gaps", io::to_json(gap_report(inst))},
              {"inequalities", io::to_json(check_gap_inequalities(inst.models(), mix))}};
    if (mix) j["mixing"] = {{"M", mix->M}, {"rho", mix->rho}};
    const auto p = out_file(g, "gaps.json");
    io::write_json(p, j);
    announce(p);
  } else if (bounds->parsed()) {
    double gamma_ps = g.gamma.value_or(1.0), D_pi = 0.0, C = c_eta.value_or(0.0);
    if (!instance_path.empty()) {
      const auto inst = load_instance(instance_path);
      bT = inst.num_trajectories();
      bH = inst.horizon();
      D = divergence_D(inst).value;
      D_pi = divergence_D_pi(inst.models()).value;
      alpha_min = inst.alpha_min();
      gamma_ps = resolve_gamma(g, inst);
      if (!c_eta) C = rate_constant_from_eta(eta_params(inst.models()).eta_p);
    } else if (bT < 1 || bH < 1) {
      throw Error(ErrorKind::InvalidSpec, "bounds needs --instance or both -T and -H");
    }
    auto r = lower_bound_check(eps, g.delta, bT, bH, D, alpha_min);
    r.predicted_rate = predicted_rate(static_cast<double>(bT), static_cast<double>(bH), gamma_ps, D_pi, C);
    auto j = io::to_json(r);
    j["probability_form_holds"] = lower_bound_probability_form(eps, g.delta, bT, bH, D, alpha_min);
    const auto p = out_file(g, "bounds.json");
    io::write_json(p, j);
    announce(p);
  } else if (sweep->parsed()) {
    const auto cfg_json = io::read_json(config_path);
    if (!cfg_json.contains("instance")) throw Error(ErrorKind::InvalidSpec, "missing field 'instance'");
    if (!cfg_json.contains("axes")) throw Error(ErrorKind::InvalidSpec, "missing field 'axes'");
    const auto fam = family_from_spec(cfg_json["instance"]);
    const auto& a = cfg_json["axes"];
    SweepAxes axes{axis<int>(a, "T"), axis<int>(a, "H"), axis<double>(a, "delta"), axis<double>(a, "lambda"),
                   axis<std::uint64_t>(a, "seeds")};
    RunConfig rc;
    rc.spectral = spectral_config(g);
    rc.gamma = g.gamma;
    rc.shuffle = shuffle;
    rc.jobs = g.jobs;
    const auto rows = run_sweep(fam, axes, rc);
    const auto p = out_file(g, "sweep.csv");
    std::ofstream out(p);
    write_sweep_csv(out, rows);
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + p.string());
    announce(p);
  } else if (report->parsed()) {
    std::vector<SweepRecord> rows;
    for (const auto& path : csv_paths) {
      std::ifstream in(path);
      if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path);
      const auto part = read_sweep_csv(in);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    const auto p = out_file(g, "report.csv");
    std::ofstream out(p);
    write_report_csv(out, aggregate(rows, c_eta.value_or(rate_constant_from_eta(3.0))));
    announce(p);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "mmc: " << e.what() << '\n';
    return is_numerical(e.kind()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "mmc: " << e.what() << '\n';
    return 2;
  }
}
