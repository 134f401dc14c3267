#pragma once

// Config parsing (JSON or key=value), report serialization, CSV emission,
// and the metadata header stamped on every output file.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pann/annulus.hpp"
#include "pann/model.hpp"
#include "pann/poincare.hpp"

namespace pann::io {

inline constexpr const char* kToolName = "pann";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the canonical serialized config; stamped into outputs so a
// result file pins the exact configuration that produced it.
std::uint64_t fnv1a(std::string_view bytes);
std::string hash_hex(std::string_view bytes);

// Params from a JSON object {"a1":..,"a2":..,"lambda1":..,"lambda2":..} or
// key=value lines. Throws std::invalid_argument on missing/invalid keys.
model::Params parse_params_text(const std::string& text);
model::Params params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const model::Params& p);

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string command;
  model::Params params = model::base_params();
  bool params_given = false;
  double rtol = 1e-10;
  double atol = 1e-12;
  double epsilon = 0.1;
  std::string rect = "outer";
  double nu_min = 1.0;
  double nu_max = 5.0;
  std::size_t steps = 50;
  std::size_t burn_in = 500;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double proximity_tol = 1e-4;
  std::string out_dir = ".";
  std::vector<std::string> formats = {"csv", "svg", "json"};
  bool resume = false;
  // model-map block (no defaults for the constants: they must be supplied)
  std::optional<double> mm_u, mm_k1, mm_k2;
  double mm_beta_min = 0.0, mm_beta_max = 0.0;
  std::size_t mm_steps = 0;
  double mm_v0 = 0.5;

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  std::string config_hash() const;
};

// Load a config file: JSON if it starts with '{', key=value otherwise.
RunConfig load_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// Report serialization

nlohmann::json audit_report_json(const model::Params& p);
nlohmann::json classification_json(const annulus::Classification& cl);

// ---------------------------------------------------------------------------
// File writers (all outputs carry the metadata header)

std::string metadata_comment(const RunConfig& cfg);

void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

std::string csv_polyline(const RunConfig& cfg,
                         const std::vector<geom::Pt>& pts);
std::string csv_cycle(const RunConfig& cfg, const planar::LimitCycle& cyc);
std::string csv_sweep(const RunConfig& cfg,
                      const std::vector<pmap::BifurcationRecord>& recs);
std::string csv_trajectory3(const RunConfig& cfg,
                            const std::vector<std::array<double, 4>>& rows);

// Completed nu values of an existing sweep CSV (for --resume).
std::vector<double> sweep_csv_completed(const std::string& content);

}  // namespace pann::io
