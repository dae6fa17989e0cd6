#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fadesim/fadesim.h"

namespace {

using json = nlohmann::json;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out, model, system, estimator, label, grid;
  std::optional<double> B, sigma, gamma, T, xb, w_min, w_max;
  std::optional<int> N, w_count, grid_nt, grid_nx;
  std::optional<std::uint64_t> M, M_is;
  std::vector<double> w;
  bool print_report = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--workers", f.workers, "worker threads (0 = all cores)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--model", f.model, "model class: rayleigh, rice, hoyt, ou");
  app->add_option("--B", f.B, "Rayleigh bandwidth B");
  app->add_option("--sigma", f.sigma, "Rayleigh sigma");
  app->add_option("--gamma", f.gamma, "fade threshold");
  app->add_option("--T", f.T, "horizon");
  app->add_option("--N", f.N, "time steps");
  app->add_option("--M", f.M, "MC samples");
  app->add_option("--M-is", f.M_is, "IS samples");
  app->add_option("--w", f.w, "threshold(s) w, comma separated")->delimiter(',');
  app->add_option("--w-min", f.w_min, "first w of a linspace");
  app->add_option("--w-max", f.w_max, "last w of a linspace");
  app->add_option("--w-count", f.w_count, "number of w values");
  app->add_option("--grid-nt", f.grid_nt, "KBE time/z steps");
  app->add_option("--grid-nx", f.grid_nx, "KBE x steps");
  app->add_option("--xb", f.xb, "KBE upper x boundary");
  app->add_option("--grid", f.grid, "value grid file base");
  app->add_option("--system", f.system, "projected, iq or both");
  app->add_option("--estimator", f.estimator, "mc or is");
  app->add_option("--label", f.label, "prefix for output names");
  app->add_flag("--report", f.print_report, "print the run report as JSON");
}

json overrides(const Flags& f) {
  json o = json::object();
  if (f.seed) o["seed"] = *f.seed;
  if (f.workers) o["workers"] = *f.workers;
  if (f.out) o["out"] = *f.out;
  if (f.model) o["model"]["class"] = *f.model;
  if (f.B) o["model"]["B"] = *f.B;
  if (f.sigma) o["model"]["sigma"] = *f.sigma;
  if (f.gamma) o["gamma"] = *f.gamma;
  if (f.T) o["T"] = *f.T;
  if (f.N) o["N"] = *f.N;
  if (f.M) o["M"] = *f.M;
  if (f.M_is) o["M_is"] = *f.M_is;
  if (!f.w.empty()) o["w"] = f.w;
  if (f.w_min || f.w_max || f.w_count) {
    json w = json::object();
    if (f.w_min) w["min"] = *f.w_min;
    if (f.w_max) w["max"] = *f.w_max;
    if (f.w_count) w["count"] = *f.w_count;
    o["w"] = w;
  }
  if (f.grid_nt) o["kbe"]["nt"] = *f.grid_nt;
  if (f.grid_nx) o["kbe"]["nx"] = *f.grid_nx;
  if (f.xb) o["kbe"]["xb"] = *f.xb;
  if (f.grid) o["kbe"]["grid"] = *f.grid;
  if (f.system) o["system"] = *f.system;
  if (f.estimator) o["estimator"] = *f.estimator;
  if (f.label) o["label"] = *f.label;
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(item);
  return out;
}

std::vector<std::string> take_list(fadesim_status (*fn)(char**)) {
  char* s = nullptr;
  if (fn(&s) != FADESIM_OK) return {};
  std::vector<std::string> v = split(s);
  fadesim_string_free(s);
  return v;
}

void print_line(const char* line, void*) { std::cout << line << std::endl; }

int exit_code(fadesim_status s) {
  if (s == FADESIM_OK) return 0;
  std::cerr << "error (" << fadesim_status_name(s) << "): " << fadesim_last_error() << '\n';
  return s == FADESIM_ERR_CONFIG ? 2 : s == FADESIM_ERR_IO ? 3 : 1;
}

int finish(fadesim_status s, char* report, bool print) {
  if (report && print) std::cout << report << '\n';
  fadesim_string_free(report);
  return exit_code(s);
}

std::string default_out() {
  const char* env = std::getenv("FADESIM_OUT");
  return env && *env ? env : "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fade-duration simulation: projected SDEs, Monte Carlo, KBE and importance sampling"};
  app.set_version_flag("--version", std::string(fadesim_version()) + " (" + fadesim_build_id() + ")");
  app.require_subcommand(1);

  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> runs;
  for (const std::string& name : take_list(fadesim_subcommands)) {
    CLI::App* sub = app.add_subcommand(name, "run " + name);
    add_common(sub, flags);
    runs.emplace_back(name, sub);
  }

  CLI::App* validate = app.add_subcommand("validate", "check a config and print the effective values");
  add_common(validate, flags);

  std::string target;
  std::optional<std::uint64_t> rseed;
  std::optional<std::string> rout;
  unsigned rworkers = 0;
  bool rreport = false;
  CLI::App* reproduce = app.add_subcommand("reproduce", "run a pinned figure/table target");
  reproduce->add_option("target", target, "target id (see `fadesim targets`)")->required();
  reproduce->add_option("--seed", rseed, "replace the pinned seed");
  reproduce->add_option("--out", rout, "output root; results go to <out>/<target>");
  reproduce->add_option("--workers", rworkers, "worker threads (0 = all cores)");
  reproduce->add_flag("--report", rreport, "print the run report as JSON");

  app.add_subcommand("targets", "list reproduce targets");

  std::string grid_base;
  CLI::App* check = app.add_subcommand("grid-check", "load a value grid and re-verify its invariants");
  check->add_option("base", grid_base, "grid file base (without .json/.bin)")->required();

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("targets")) {
    for (const auto& t : take_list(fadesim_reproduce_targets)) std::cout << t << '\n';
    return 0;
  }
  if (app.got_subcommand(check)) {
    fadesim_grid* g = nullptr;
    const fadesim_status s = fadesim_grid_load(grid_base.c_str(), 1, &g);
    fadesim_grid_free(g);
    if (s == FADESIM_OK) std::cout << grid_base << ": invariants hold\n";
    return exit_code(s);
  }
  if (app.got_subcommand(reproduce)) {
    const std::string out = rout ? *rout : default_out();
    char* report = nullptr;
    const fadesim_status s = fadesim_reproduce(target.c_str(), rseed.has_value(), rseed.value_or(0), out.c_str(),
                                               rworkers, print_line, nullptr, &report);
    return finish(s, report, rreport);
  }

  const std::string text = flags.config.empty() ? "" : read_file(flags.config);
  const std::string ov = overrides(flags).dump();
  const std::string source = flags.config.empty() ? "<flags>" : flags.config;
  const std::string out = default_out();
  if (app.got_subcommand(validate)) {
    char* resolved = nullptr;
    const fadesim_status s = fadesim_validate_config(text.c_str(), ov.c_str(), source.c_str(), out.c_str(), &resolved);
    return finish(s, resolved, true);
  }
  for (const auto& [name, sub] : runs) {
    if (!app.got_subcommand(sub)) continue;
    char* report = nullptr;
    const fadesim_status s = fadesim_run(name.c_str(), text.c_str(), ov.c_str(), source.c_str(), out.c_str(),
                                         print_line, nullptr, &report);
    return finish(s, report, flags.print_report);
  }
  return 1;
}
