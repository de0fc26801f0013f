#include "mmc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "mmc/bounds.hpp"
#include "mmc/io.hpp"
#include "mmc/metrics.hpp"
#include "mmc/parallel.hpp"
#include "mmc/rng.hpp"

namespace mmc {
namespace {

using nlohmann::json;

template <class T>
T spec_field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::InvalidSpec, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("field '") + key + "': " + e.what());
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Summary {
  double mean = 0.0, median = 0.0, ci = 0.0;
};

Summary summarize(std::vector<double> x) {
  Summary s;
  const auto n = static_cast<double>(x.size());
  for (double v : x) s.mean += v;
  s.mean /= n;
  std::sort(x.begin(), x.end());
  const std::size_t m = x.size() / 2;
  s.median = x.size() % 2 ? x[m] : 0.5 * (x[m - 1] + x[m]);
  if (x.size() > 1) {
    double ss = 0.0;
    for (double v : x) ss += (v - s.mean) * (v - s.mean);
    s.ci = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return s;
}

}  // namespace

ModelFamily family_from_spec(const json& spec) {
  if (!spec.is_object()) throw Error(ErrorKind::InvalidSpec, "spec must be a JSON object");
  const auto type = spec_field<std::string>(spec, "type");
  ModelFamily fam;
  if (type == "separation") {
    fam.models = gen_separation_instance(spec_field<int>(spec, "S_prime"));
  } else if (type == "random") {
    const int S = spec_field<int>(spec, "S");
    const int K = spec_field<int>(spec, "K");
    const double floor = spec_field<double>(spec, "floor");
    const auto seed = spec_field<std::uint64_t>(spec, "seed");
    if (K < 2) throw Error(ErrorKind::InvalidSpec, "field 'K' must be >= 2");
    for (int k = 0; k < K; ++k) {
      auto eng = rng::substream(seed, static_cast<std::uint64_t>(k));
      fam.models.push_back(gen_random_ergodic(S, eng(), floor));
    }
  } else if (type == "inline") {
    if (!spec.contains("models") || !spec["models"].is_array()) {
      throw Error(ErrorKind::InvalidSpec, "field 'models' must be an array");
    }
    for (const auto& m : spec["models"]) fam.models.push_back(io::model_from_json(m));
    if (fam.models.size() < 2) throw Error(ErrorKind::InvalidSpec, "field 'models' needs >= 2 entries");
  } else {
    throw Error(ErrorKind::InvalidSpec, "field 'type' has unknown value '" + type + "'");
  }
  if (spec.contains("alpha")) {
    const auto a = spec_field<std::vector<double>>(spec, "alpha");
    if (a.size() != fam.models.size()) {
      throw Error(ErrorKind::InvalidSpec, "field 'alpha' must have one entry per model");
    }
    try {
      fam.alpha = ProbVector(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidSpec, std::string("field 'alpha': ") + e.what());
    }
  } else {
    fam.alpha = ProbVector::uniform(fam.models.size());
  }
  return fam;
}

MixtureInstance instance_from_spec(const json& spec) {
  auto fam = family_from_spec(spec);
  std::optional<std::uint64_t> shuffle;
  if (spec.contains("shuffle_seed")) shuffle = spec_field<std::uint64_t>(spec, "shuffle_seed");
  return make_instance(std::move(fam.models), fam.alpha, spec_field<int>(spec, "T"),
                       spec_field<int>(spec, "H"), shuffle);
}

RunArtifacts run_point(const ModelFamily& family, int T, int H, double delta, double lambda,
                       std::uint64_t seed, const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto instance = make_instance(family.models, family.alpha, T, H,
                                      cfg.shuffle ? std::optional<std::uint64_t>(seed) : std::nullopt);
  const auto trajs = sample_trajectories(instance, seed, cfg.jobs);

  RunArtifacts out;
  auto& r = out.record;
  r.T = T;
  r.H = H;
  r.delta = delta;
  r.lambda = lambda;
  r.seed = seed;
  r.gamma_ps = cfg.gamma ? *cfg.gamma : min_pseudo_spectral_gap(family.models);

  SpectralConfig sc = cfg.spectral;
  sc.delta = delta;
  sc.gamma_ps = r.gamma_ps;
  const auto W_hat = empirical_matrix(trajs, cfg.jobs);
  out.stage1 = spectral_cluster(W_hat, H, sc);
  r.K_hat = out.stage1.K_hat;
  r.R_hat = out.stage1.R_hat;
  r.sigma_thres = out.stage1.sigma_thres;

  RefineOptions ro;
  ro.lambda = lambda;
  ro.jobs = cfg.jobs;
  out.stage2 = refine(trajs, out.stage1.labels, out.stage1.K_hat, ro);
  out.oracle = oracle_classify(trajs, family.models, cfg.use_initial, cfg.jobs);

  const auto& f = instance.decoding();
  r.err_stage1 = misclassification(out.stage1.labels, f);
  r.err_stage2 = misclassification(out.stage2.labels, f);
  r.err_oracle = misclassification(out.oracle, f);
  r.D = divergence_D(instance).value;
  r.D_pi = divergence_D_pi(family.models).value;
  r.delta_W_sq = delta_W_sq(family.models);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void SweepAxes::validate() const {
  if (T.empty() || H.empty() || delta.empty() || lambda.empty() || seeds.empty()) {
    throw Error(ErrorKind::InvalidSpec, "every sweep axis must be nonempty");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw Error(ErrorKind::InvalidSpec, "seeds must be distinct");
  }
}

std::vector<SweepRecord> run_sweep(const ModelFamily& family, const SweepAxes& axes,
                                   const RunConfig& cfg) {
  axes.validate();
  struct Point {
    int T, H;
    double delta, lambda;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  for (int T : axes.T)
    for (int H : axes.H)
      for (double d : axes.delta)
        for (double l : axes.lambda)
          for (auto s : axes.seeds) points.push_back({T, H, d, l, s});

  RunConfig inner = cfg;
  inner.jobs = 1;
  std::vector<SweepRecord> rows(points.size());
  parallel_for(points.size(), cfg.jobs, [&](std::size_t i) {
    const auto& p = points[i];
    rows[i] = run_point(family, p.T, p.H, p.delta, p.lambda, p.seed, inner).record;
  });
  return rows;
}

const char* const kSweepHeader =
    "T,H,delta,lambda,seed,K_hat,err_stage1,err_stage2,err_oracle,D,D_pi,delta_W_sq,gamma_ps,"
    "sigma_thres,R_hat,wall_time";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << r.T << ',' << r.H << ',' << fmt(r.delta) << ',' << fmt(r.lambda) << ',' << r.seed << ','
        << r.K_hat << ',' << r.err_stage1 << ',' << r.err_stage2 << ',' << r.err_oracle << ','
        << fmt(r.D) << ',' << fmt(r.D_pi) << ',' << fmt(r.delta_W_sq) << ',' << fmt(r.gamma_ps)
        << ',' << fmt(r.sigma_thres) << ',' << r.R_hat << ',' << fmt(r.wall_time) << '\n';
  }
}

std::vector<SweepRecord> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) {
    throw Error(ErrorKind::InvalidSpec, "sweep CSV header does not match the expected columns");
  }
  std::vector<SweepRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 16) throw Error(ErrorKind::InvalidSpec, "sweep CSV row has " + std::to_string(f.size()) + " fields");
    auto d = [&](int i) { return std::strtod(f[static_cast<std::size_t>(i)].c_str(), nullptr); };
    auto n = [&](int i) { return std::stoi(f[static_cast<std::size_t>(i)]); };
    SweepRecord r;
    r.T = n(0);
    r.H = n(1);
    r.delta = d(2);
    r.lambda = d(3);
    r.seed = std::stoull(f[4]);
    r.K_hat = n(5);
    r.err_stage1 = n(6);
    r.err_stage2 = n(7);
    r.err_oracle = n(8);
    r.D = d(9);
    r.D_pi = d(10);
    r.delta_W_sq = d(11);
    r.gamma_ps = d(12);
    r.sigma_thres = d(13);
    r.R_hat = n(14);
    r.wall_time = d(15);
    rows.push_back(r);
  }
  return rows;
}

std::vector<ReportRow> aggregate(const std::vector<SweepRecord>& rows, double C_eta) {
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "no sweep rows to aggregate");
  using Key = std::tuple<int, int, double, double>;
  std::map<Key, std::vector<const SweepRecord*>> groups;
  for (const auto& r : rows) groups[{r.T, r.H, r.delta, r.lambda}].push_back(&r);
  std::vector<ReportRow> out;
  for (const auto& [key, g] : groups) {
    ReportRow row;
    std::tie(row.T, row.H, row.delta, row.lambda) = key;
    row.n = static_cast<int>(g.size());
    std::vector<double> e1, e2, eo;
    double gamma = 0.0, dpi = 0.0;
    for (const auto* r : g) {
      e1.push_back(static_cast<double>(r->err_stage1) / r->T);
      e2.push_back(static_cast<double>(r->err_stage2) / r->T);
      eo.push_back(static_cast<double>(r->err_oracle) / r->T);
      gamma += r->gamma_ps;
      dpi += r->D_pi;
    }
    const auto s1 = summarize(e1), s2 = summarize(e2), so = summarize(eo);
    row.mean_stage1 = s1.mean, row.median_stage1 = s1.median, row.ci_stage1 = s1.ci;
    row.mean_stage2 = s2.mean, row.median_stage2 = s2.median, row.ci_stage2 = s2.ci;
    row.mean_oracle = so.mean, row.median_oracle = so.median, row.ci_oracle = so.ci;
    row.predicted_rate = predicted_rate(row.T, row.H, gamma / row.n, dpi / row.n, C_eta);
    out.push_back(row);
  }
  return out;
}

const char* const kReportHeader =
    "T,H,delta,lambda,n,mean_stage1,median_stage1,ci95_stage1,mean_stage2,median_stage2,"
    "ci95_stage2,mean_oracle,median_oracle,ci95_oracle,predicted_rate";

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    out << r.T << ',' << r.H << ',' << fmt(r.delta) << ',' << fmt(r.lambda) << ',' << r.n << ','
        << fmt(r.mean_stage1) << ',' << fmt(r.median_stage1) << ',' << fmt(r.ci_stage1) << ','
        << fmt(r.mean_stage2) << ',' << fmt(r.median_stage2) << ',' << fmt(r.ci_stage2) << ','
        << fmt(r.mean_oracle) << ',' << fmt(r.median_oracle) << ',' << fmt(r.ci_oracle) << ','
        << fmt(r.predicted_rate) << '\n';
  }
}

}  // namespace mmc
