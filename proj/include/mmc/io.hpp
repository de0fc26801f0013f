#pragma once

// File formats: JSON for models, instances and results; little-endian binary
// for trajectories and dense matrices, each with a JSON sidecar.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mmc/bounds.hpp"
#include "mmc/likelihood.hpp"
#include "mmc/metrics.hpp"
#include "mmc/spectral.hpp"

namespace mmc::io {

using nlohmann::json;

json to_json(const MarkovModel& model);
/// Derived quantities are recomputed, never read from the document.
MarkovModel model_from_json(const json& j);

json to_json(const MixtureInstance& instance);
MixtureInstance instance_from_json(const json& j);

json to_json(const Stage1Result& r);
Stage1Result stage1_from_json(const json& j);

json to_json(const Stage2Result& r);
Stage2Result stage2_from_json(const json& j);

json to_json(const GapReport& r);
json to_json(const BoundReport& r);
json to_json(const GapInequalityReport& r);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// Binary: u32 T, H, S then T·H u16 states; sidecar `<path>.json` with seed
/// and instance hash.
void write_trajectories(const std::filesystem::path& path, const TrajectorySet& trajs);
TrajectorySet read_trajectories(const std::filesystem::path& path);

/// Binary f64 row-major; sidecar `<path>.json` with rows, cols and kind.
void write_matrix(const std::filesystem::path& path, const DataMatrix& m);
DataMatrix read_matrix(const std::filesystem::path& path);

/// Raw f64 row-major dump without a kind tag (used for loglik scores).
void write_f64(const std::filesystem::path& path, const Eigen::MatrixXd& m);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace mmc::io
