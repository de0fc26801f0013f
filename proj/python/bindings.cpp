#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mmc/bounds.hpp"
#include "mmc/experiment.hpp"
#include "mmc/io.hpp"

namespace py = pybind11;
using namespace mmc;

namespace {

std::vector<int> labels_of(const py::array_t<int, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

TrajectorySet trajectories_from_array(const py::array_t<State, py::array::c_style | py::array::forcecast>& a,
                                      int S) {
  if (a.ndim() != 2) throw Error(ErrorKind::DimensionMismatch, "trajectories must be a T x H array");
  TrajectorySet t;
  t.T = static_cast<int>(a.shape(0));
  t.H = static_cast<int>(a.shape(1));
  t.S = S;
  t.states.assign(a.data(), a.data() + a.size());
  for (State s : t.states) {
    if (s >= S) throw Error(ErrorKind::StateOutOfRange, "state exceeds S");
  }
  return t;
}

py::array_t<State> states_array(const TrajectorySet& t) {
  py::array_t<State> out({t.T, t.H});
  std::copy(t.states.begin(), t.states.end(), out.mutable_data());
  return out;
}

SpectralConfig make_config(double delta, double gamma_ps, double c_sigma, double c_rho,
                           const std::string& radius_mode, std::optional<double> radius_sq,
                           bool discard_small_final) {
  SpectralConfig cfg;
  cfg.delta = delta;
  cfg.gamma_ps = gamma_ps;
  cfg.c_sigma = c_sigma;
  cfg.c_rho = c_rho;
  if (radius_mode == "rowlevel") {
    cfg.radius_mode = RadiusMode::RowLevel;
  } else if (radius_mode != "threshold") {
    throw Error(ErrorKind::InvalidSpec, "radius_mode must be 'threshold' or 'rowlevel'");
  }
  cfg.radius_sq = radius_sq;
  cfg.discard_small_final = discard_small_final;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_mmc, m) {
  m.doc() = "Clustering trajectories from a mixture of Markov chains";

  static py::exception<Error> error(m, "MmcError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (message, kind name)
      PyErr_SetObject(error.ptr(), py::make_tuple(e.what(), std::string(to_string(e.kind()))).ptr());
    }
  });

  py::class_<MarkovModel>(m, "MarkovModel")
      .def_property_readonly("num_states", &MarkovModel::num_states)
      .def_property_readonly("transition", [](const MarkovModel& x) { return x.transition().matrix(); })
      .def_property_readonly("initial", [](const MarkovModel& x) { return x.initial().values(); })
      .def_property_readonly("stationary", [](const MarkovModel& x) { return x.stationary().values(); })
      .def_property_readonly("pseudo_spectral_gap", &MarkovModel::pseudo_spectral_gap)
      .def_property_readonly("mixing_time", &MarkovModel::mixing_time)
      .def("to_json", [](const MarkovModel& x) { return io::to_json(x).dump(); });

  m.def("validate_model",
        [](const Eigen::MatrixXd& P, const Eigen::VectorXd& mu) {
          return validate_model(StochasticMatrix(P), ProbVector(mu));
        },
        py::arg("P"), py::arg("mu"));
  m.def("augmented_chain", &augmented_chain);
  m.def("time_reversal", [](const MarkovModel& x) { return time_reversal(x).matrix(); });
  m.def("gen_random_ergodic", &gen_random_ergodic, py::arg("S"), py::arg("seed"), py::arg("floor"));
  m.def("gen_separation_instance", &gen_separation_instance, py::arg("S_prime"));

  py::class_<MixtureInstance>(m, "MixtureInstance")
      .def_property_readonly("models", &MixtureInstance::models)
      .def_property_readonly("decoding", &MixtureInstance::decoding)
      .def_property_readonly("T", &MixtureInstance::num_trajectories)
      .def_property_readonly("H", &MixtureInstance::horizon)
      .def_property_readonly("S", &MixtureInstance::num_states)
      .def_property_readonly("K", &MixtureInstance::num_clusters)
      .def_property_readonly("alpha_min", &MixtureInstance::alpha_min)
      .def_property_readonly("content_hash", &MixtureInstance::content_hash)
      .def("to_json", [](const MixtureInstance& x) { return io::to_json(x).dump(); });

  m.def("make_instance",
        [](std::vector<MarkovModel> models, const Eigen::VectorXd& alpha, int T, int H,
           std::optional<std::uint64_t> shuffle_seed) {
          return make_instance(std::move(models), ProbVector(alpha), T, H, shuffle_seed);
        },
        py::arg("models"), py::arg("alpha"), py::arg("T"), py::arg("H"), py::arg("shuffle_seed") = py::none());
  m.def("instance_from_spec_json",
        [](const std::string& s) { return instance_from_spec(nlohmann::json::parse(s)); });

  py::class_<TrajectorySet>(m, "TrajectorySet")
      .def_property_readonly("T", [](const TrajectorySet& t) { return t.T; })
      .def_property_readonly("H", [](const TrajectorySet& t) { return t.H; })
      .def_property_readonly("S", [](const TrajectorySet& t) { return t.S; })
      .def_property_readonly("seed", [](const TrajectorySet& t) { return t.seed; })
      .def_property_readonly("instance_id", [](const TrajectorySet& t) { return t.instance_id; })
      .def_property_readonly("states", &states_array);
  m.def("sample_trajectories", &sample_trajectories, py::arg("instance"), py::arg("seed"), py::arg("jobs") = 1);
  m.def("trajectories_from_array", &trajectories_from_array, py::arg("states"), py::arg("S"));

  m.def("empirical_matrix", [](const TrajectorySet& t) { return empirical_matrix(t).rows; });
  m.def("truth_matrix", [](const MixtureInstance& i) { return truth_matrix(i).rows; });
  m.def("embed_model", [](const MarkovModel& x) { return embed_model(x).coords; });
  m.def("two_inf_distance", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return two_inf_distance(a, b); });

  py::class_<Stage1Result>(m, "Stage1Result")
      .def_readonly("K_hat", &Stage1Result::K_hat)
      .def_readonly("labels", &Stage1Result::labels)
      .def_readonly("centers", &Stage1Result::centers)
      .def_readonly("R_hat", &Stage1Result::R_hat)
      .def_readonly("singular_values", &Stage1Result::singular_values)
      .def_readonly("sigma_thres", &Stage1Result::sigma_thres)
      .def_readonly("radius_sq", &Stage1Result::radius_sq)
      .def_readonly("forced_first_cluster", &Stage1Result::forced_first_cluster);
  m.def("sigma_threshold",
        [](int T, int S, int H, double delta, double gamma_ps, double c_sigma) {
          return sigma_threshold(T, S, H, make_config(delta, gamma_ps, c_sigma, 0.0, "threshold", {}, false));
        },
        py::arg("T"), py::arg("S"), py::arg("H"), py::arg("delta") = 0.1, py::arg("gamma_ps") = 1.0,
        py::arg("c_sigma") = 8.0);
  m.def("spectral_cluster",
        [](const Eigen::MatrixXd& W, int H, double delta, double gamma_ps, double c_sigma, double c_rho,
           const std::string& radius_mode, std::optional<double> radius_sq, bool discard_small_final) {
          return spectral_cluster(W, H,
                                  make_config(delta, gamma_ps, c_sigma, c_rho, radius_mode, radius_sq,
                                              discard_small_final));
        },
        py::arg("W"), py::arg("H"), py::arg("delta") = 0.1, py::arg("gamma_ps") = 1.0, py::arg("c_sigma") = 8.0,
        py::arg("c_rho") = 32.0, py::arg("radius_mode") = "threshold", py::arg("radius_sq") = py::none(),
        py::arg("discard_small_final") = false);

  py::class_<Stage2Result>(m, "Stage2Result")
      .def_readonly("labels", &Stage2Result::labels)
      .def_readonly("loglik", &Stage2Result::loglik)
      .def_readonly("changed", &Stage2Result::changed)
      .def_readonly("passes", &Stage2Result::passes)
      .def_readonly("lambda_", &Stage2Result::lambda);
  m.def("refine",
        [](const TrajectorySet& t, const py::array_t<int, py::array::c_style | py::array::forcecast>& labels, int K,
           double lambda, bool iterate, int jobs) {
          const auto l = labels_of(labels);
          return refine(t, l, K, RefineOptions{.lambda = lambda, .iterate = iterate, .jobs = jobs});
        },
        py::arg("trajectories"), py::arg("labels"), py::arg("K"), py::arg("lam") = 0.5, py::arg("iterate") = false,
        py::arg("jobs") = 1);
  m.def("pool_estimates",
        [](const TrajectorySet& t, const py::array_t<int, py::array::c_style | py::array::forcecast>& labels, int K,
           double lambda) { return pool_estimates(t, labels_of(labels), K, lambda).kernels; },
        py::arg("trajectories"), py::arg("labels"), py::arg("K"), py::arg("lam"));
  m.def("trajectory_loglik",
        [](const std::vector<State>& x, const Eigen::MatrixXd& P) { return trajectory_loglik(std::span<const State>(x), P); });
  m.def("oracle_classify",
        [](const TrajectorySet& t, const std::vector<MarkovModel>& models, bool use_initial, int jobs) {
          return oracle_classify(t, models, use_initial, jobs);
        },
        py::arg("trajectories"), py::arg("models"), py::arg("use_initial") = true, py::arg("jobs") = 1);

  m.def("misclassification", [](const std::vector<int>& a, const std::vector<int>& b) { return misclassification(a, b); });
  m.def("kl_divergence", [](const Eigen::VectorXd& p, const Eigen::VectorXd& q) { return kl_divergence(p, q); });
  m.def("divergence_D", [](const std::vector<MarkovModel>& ms, int H) { return divergence_D(ms, H).value; });
  m.def("divergence_D_pi", [](const std::vector<MarkovModel>& ms) { return divergence_D_pi(ms).value; });
  m.def("delta_W_sq", [](const std::vector<MarkovModel>& ms) { return delta_W_sq(ms); });
  m.def("gap_report_json", [](const MixtureInstance& i) { return io::to_json(gap_report(i)).dump(); });
  m.def("gap_inequalities_json", [](const std::vector<MarkovModel>& ms, bool with_mixing) {
    std::optional<UniformErgodicity> mix;
    if (with_mixing) mix = estimate_uniform_ergodicity(ms);
    return io::to_json(check_gap_inequalities(ms, mix)).dump();
  });
  m.def("lower_bound_json", [](double eps, double delta, long long T, long long H, double D, double alpha_min) {
    return io::to_json(lower_bound_check(eps, delta, T, H, D, alpha_min)).dump();
  });
  m.def("lower_bound_probability_form", &lower_bound_probability_form);
  m.def("predicted_rate", &predicted_rate);

  m.def("sweep_csv",
        [](const std::string& family_spec, std::vector<int> T, std::vector<int> H, std::vector<double> delta,
           std::vector<double> lambda, std::vector<std::uint64_t> seeds, double c_sigma, double c_rho,
           const std::string& radius_mode, std::optional<double> gamma, int jobs) {
          RunConfig cfg;
          cfg.spectral = make_config(0.1, 1.0, c_sigma, c_rho, radius_mode, {}, false);
          cfg.gamma = gamma;
          cfg.jobs = jobs;
          std::vector<SweepRecord> rows;
          {
            py::gil_scoped_release release;
            rows = run_sweep(family_from_spec(nlohmann::json::parse(family_spec)),
                             SweepAxes{std::move(T), std::move(H), std::move(delta), std::move(lambda), std::move(seeds)},
                             cfg);
          }
          std::ostringstream out;
          write_sweep_csv(out, rows);
          return out.str();
        },
        py::arg("family_spec"), py::arg("T"), py::arg("H"), py::arg("delta"), py::arg("lam"), py::arg("seeds"),
        py::arg("c_sigma") = 8.0, py::arg("c_rho") = 32.0, py::arg("radius_mode") = "threshold",
        py::arg("gamma") = py::none(), py::arg("jobs") = 1);
}
