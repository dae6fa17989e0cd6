#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "markovian_projection.hpp"
#include "ou_channel.hpp"

namespace fadesim {

struct ModelConfig {
  std::string cls;  // rayleigh | rice | hoyt | ou
  RayleighParams rayleigh{1.0, 1.0, 1.0, 1.0};
  OuParams ou;
  RiceMode rice_mode = RiceMode::Affine;

  ProjectedModel projected() const;
  OuParams iq_params() const;
  FadingKind kind() const;
};

struct KbeOptions {
  int nt = 400;
  int nx = 400;
  double xb = 0.0;  // 0 selects 12 sigma^2
  std::string grid;  // file base; empty selects <out>/kbe_grid
  double v_floor = 1e-12;
  double zeta_cap = 50.0;
};

struct StatsOptions {
  double burn_in = 10.0;
  double dt = 0.01;
  std::vector<double> lags{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};

// Exact vs affine Rice drift sweep.
struct DriftOptions {
  std::vector<double> times{0.5, 1.0, 2.0, 4.0};
  int points = 200;
};

struct ExperimentConfig {
  ModelConfig model;
  double T = 4.0;
  int N = 100;
  double gamma = 0.5;
  std::string estimator = "mc";  // mc | is
  std::string system = "both";   // projected | iq | both
  std::uint64_t M = 1000000;
  std::uint64_t M_is = 1000000;
  std::vector<double> w;  // resolved; defaults to 200 points on [0, T]
  std::uint64_t seed = 1;
  std::string out = "out";
  unsigned workers = 0;  // 0 selects available parallelism
  double confidence = 1.96;
  double target_rel_error = 0.05;
  KbeOptions kbe;
  int bins = 50;
  std::vector<std::uint64_t> paths{0, 1, 2, 3, 4};
  StatsOptions stats;
  DriftOptions drift;
  std::string label;  // optional prefix for output file names

  std::string grid_base() const;
  std::string output_path(const std::string& name) const;
};

// Validation error with the 1-based line of the offending key when known.
struct ConfigIssue {
  std::string field;
  std::string message;
  int line = 0;

  std::string str(const std::string& source) const;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigIssue> issues;
  nlohmann::json resolved;  // merged document, for metadata
};

// Parses the config text (may be empty), applies overrides (flags win) and checks
// every constraint, collecting all problems. default_out replaces "out" when the
// document does not name an output directory.
ConfigResult validate_config(const std::string& raw, const nlohmann::json& overrides = nlohmann::json::object(),
                             const std::string& default_out = "");

// Echo of the effective configuration, used in metadata sidecars.
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace fadesim
