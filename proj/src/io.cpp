#include "mmc/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace mmc::io {
namespace {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorKind::InvalidSpec, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, std::string("field '") + key + "': " + e.what());
  }
}

// JSON has no infinity; +∞ is written as the string "inf".
json number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) r.push_back(number(M(i, k)));
    rows.push_back(std::move(r));
  }
  return rows;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  return out;
}

void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), 4)) throw Error(ErrorKind::IoFailure, "truncated header");
  return v;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".json";
  return p;
}

json to_json(const MarkovModel& model) {
  const auto& P = model.transition().matrix();
  json j;
  j["S"] = model.num_states();
  j["P"] = matrix_json(P);
  const auto& mu = model.initial().values();
  j["mu"] = std::vector<double>(mu.data(), mu.data() + mu.size());
  return j;
}

MarkovModel model_from_json(const json& j) {
  const int S = field<int>(j, "S");
  const auto rows = field<std::vector<std::vector<double>>>(j, "P");
  const auto mu = field<std::vector<double>>(j, "mu");
  if (S < 1 || rows.size() != static_cast<std::size_t>(S) || mu.size() != static_cast<std::size_t>(S)) {
    throw Error(ErrorKind::InvalidSpec, "model shapes disagree with S = " + std::to_string(S));
  }
  Eigen::MatrixXd P(S, S);
  for (int i = 0; i < S; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(S)) {
      throw Error(ErrorKind::InvalidSpec, "row " + std::to_string(i) + " of P has the wrong length");
    }
    for (int k = 0; k < S; ++k) P(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  return validate_model(StochasticMatrix(std::move(P)),
                        ProbVector(Eigen::Map<const Eigen::VectorXd>(mu.data(), S)));
}

json to_json(const MixtureInstance& instance) {
  json j;
  j["models"] = json::array();
  for (const auto& m : instance.models()) j["models"].push_back(to_json(m));
  j["decoding"] = instance.decoding();
  j["T"] = instance.num_trajectories();
  j["H"] = instance.horizon();
  return j;
}

MixtureInstance instance_from_json(const json& j) {
  const auto& arr = j.contains("models") ? j.at("models") : json();
  if (!arr.is_array() || arr.empty()) throw Error(ErrorKind::InvalidSpec, "field 'models' must be a nonempty array");
  std::vector<MarkovModel> models;
  for (const auto& m : arr) models.push_back(model_from_json(m));
  auto decoding = field<std::vector<int>>(j, "decoding");
  const int T = field<int>(j, "T");
  if (T != static_cast<int>(decoding.size())) {
    throw Error(ErrorKind::InvalidSpec, "field 'T' disagrees with the decoding length");
  }
  return MixtureInstance(std::move(models), std::move(decoding), field<int>(j, "H"));
}

json to_json(const Stage1Result& r) {
  return {{"K_hat", r.K_hat},
          {"labels", r.labels},
          {"centers", r.centers},
          {"R_hat", r.R_hat},
          {"sigma_thres", r.sigma_thres},
          {"radius_sq", r.radius_sq},
          {"singular_values", r.singular_values},
          {"forced_first_cluster", r.forced_first_cluster}};
}

Stage1Result stage1_from_json(const json& j) {
  Stage1Result r;
  r.K_hat = field<int>(j, "K_hat");
  r.labels = field<std::vector<int>>(j, "labels");
  r.centers = field<std::vector<int>>(j, "centers");
  r.R_hat = field<int>(j, "R_hat");
  r.sigma_thres = field<double>(j, "sigma_thres");
  r.singular_values = field<std::vector<double>>(j, "singular_values");
  r.forced_first_cluster = field<bool>(j, "forced_first_cluster");
  if (j.contains("radius_sq")) r.radius_sq = field<double>(j, "radius_sq");
  return r;
}

json to_json(const Stage2Result& r) {
  return {{"labels", r.labels}, {"changed", r.changed}, {"lambda", r.lambda}};
}

Stage2Result stage2_from_json(const json& j) {
  Stage2Result r;
  r.labels = field<std::vector<int>>(j, "labels");
  r.changed = field<int>(j, "changed");
  r.lambda = field<double>(j, "lambda");
  return r;
}

json to_json(const GapReport& r) {
  json j = {{"D", number(r.D)},
            {"D_pi", number(r.D_pi)},
            {"pairwise_D", matrix_json(r.pairwise_D)},
            {"pairwise_D_pi", matrix_json(r.pairwise_D_pi)},
            {"delta_W_sq", r.delta_W_sq},
            {"alpha", r.alpha},
            {"Delta_sq", r.Delta_sq},
            {"eta_mu", number(r.eta.eta_mu)},
            {"eta_pi", number(r.eta.eta_pi)},
            {"eta_p", number(r.eta.eta_p)},
            {"p_max", r.p_max},
            {"pi_min", r.pi_min},
            {"v_min", r.v_min},
            {"gamma_ps", r.gamma_ps}};
  j["alpha_min_clusters"] = r.alpha_min_clusters ? json(*r.alpha_min_clusters) : json(nullptr);
  return j;
}

json to_json(const BoundReport& r) {
  json j = {{"necessary_holds", r.necessary_holds},
            {"lhs_4HD", number(r.lhs_4HD)},
            {"rhs_necessary", number(r.rhs_necessary)},
            {"predicted_rate", number(r.predicted_rate)},
            {"asymptotic_ratio", number(r.asymptotic_ratio)}};
  j["min_H_necessary"] = r.min_H_necessary ? json(*r.min_H_necessary) : json(nullptr);
  return j;
}

json to_json(const GapInequalityReport& r) {
  json arr = json::array();
  for (const auto& c : r.checks) {
    arr.push_back({{"name", c.name},
                   {"lhs", number(c.lhs)},
                   {"rhs", number(c.rhs)},
                   {"holds", c.holds},
                   {"slack", number(c.slack)}});
  }
  return {{"all_hold", r.all_hold()}, {"checks", arr}};
}

json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidSpec, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

void write_trajectories(const std::filesystem::path& path, const TrajectorySet& trajs) {
  auto out = open_out(path);
  put_u32(out, static_cast<std::uint32_t>(trajs.T));
  put_u32(out, static_cast<std::uint32_t>(trajs.H));
  put_u32(out, static_cast<std::uint32_t>(trajs.S));
  out.write(reinterpret_cast<const char*>(trajs.states.data()),
            static_cast<std::streamsize>(trajs.states.size() * sizeof(State)));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
  write_json(sidecar_path(path), {{"seed", trajs.seed},
                                  {"instance_hash", trajs.instance_id},
                                  {"T", trajs.T},
                                  {"H", trajs.H},
                                  {"S", trajs.S}});
}

TrajectorySet read_trajectories(const std::filesystem::path& path) {
  auto in = open_in(path);
  TrajectorySet t;
  t.T = static_cast<int>(get_u32(in));
  t.H = static_cast<int>(get_u32(in));
  t.S = static_cast<int>(get_u32(in));
  t.states.resize(static_cast<std::size_t>(t.T) * static_cast<std::size_t>(t.H));
  if (!in.read(reinterpret_cast<char*>(t.states.data()),
               static_cast<std::streamsize>(t.states.size() * sizeof(State)))) {
    throw Error(ErrorKind::IoFailure, "truncated trajectory file " + path.string());
  }
  for (State s : t.states) {
    if (s >= t.S) throw Error(ErrorKind::StateOutOfRange, "stored state exceeds S");
  }
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    const auto j = read_json(side);
    t.seed = field<std::uint64_t>(j, "seed");
    t.instance_id = field<std::uint64_t>(j, "instance_hash");
  }
  return t;
}

void write_f64(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(rm.size() * sizeof(double)));
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path.string());
}

void write_matrix(const std::filesystem::path& path, const DataMatrix& m) {
  write_f64(path, m.rows);
  write_json(sidecar_path(path),
             {{"rows", m.rows.rows()},
              {"cols", m.rows.cols()},
              {"dtype", "f64"},
              {"order", "row-major"},
              {"kind", m.kind == DataMatrixKind::Truth ? "truth" : "empirical"}});
}

DataMatrix read_matrix(const std::filesystem::path& path) {
  const auto meta = read_json(sidecar_path(path));
  const auto rows = field<Eigen::Index>(meta, "rows");
  const auto cols = field<Eigen::Index>(meta, "cols");
  const auto kind = field<std::string>(meta, "kind");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  auto in = open_in(path);
  if (!in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(rm.size() * sizeof(double)))) {
    throw Error(ErrorKind::IoFailure, "truncated matrix file " + path.string());
  }
  return {Eigen::MatrixXd(rm), kind == "truth" ? DataMatrixKind::Truth : DataMatrixKind::Empirical};
}

}  // namespace mmc::io
