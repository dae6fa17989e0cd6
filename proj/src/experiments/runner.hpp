#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "experiments/config.hpp"

namespace fadesim {

struct RunReport {
  std::vector<std::string> files;  // CSV/JSON outputs, in write order
  nlohmann::json summary = nlohmann::json::object();
};

// simulate, hist, ccdf-mc, kbe-solve, ccdf-is, compare, stats, drift
const std::vector<std::string>& subcommands();

// Runs one subcommand on a validated config; outputs go under cfg.out.
RunReport run_experiment(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

// 64-bit FNV-1a of the effective config (output location excluded), hex.
std::string config_hash(const ExperimentConfig& cfg);

struct ReproduceOptions {
  std::optional<std::uint64_t> seed;  // replaces every step's seed
  std::string out;                    // empty keeps <default>/<target>
  unsigned workers = 0;
};

std::vector<std::string> reproduce_targets();
std::string reproduce_source(const std::string& id);  // pinned JSON text
RunReport run_reproduce(const std::string& id, const ReproduceOptions& opt, std::ostream& log);

}  // namespace fadesim
