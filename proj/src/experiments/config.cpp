#include "experiments/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "fade_duration_mc.hpp"

namespace fadesim {
namespace {

using json = nlohmann::json;

int line_of_offset(const std::string& raw, std::size_t off) {
  off = std::min(off, raw.size());
  return 1 + int(std::count(raw.begin(), raw.begin() + std::ptrdiff_t(off), '\n'));
}

// Best-effort source line of a dotted key path: each component is searched after
// the previous one.
int line_of_field(const std::string& raw, const std::string& field) {
  if (raw.empty()) return 0;
  std::size_t pos = 0;
  std::size_t start = 0;
  while (start <= field.size()) {
    const std::size_t dot = field.find('.', start);
    const std::string comp = field.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    const std::size_t hit = raw.find("\"" + comp + "\"", pos);
    if (hit == std::string::npos) return 0;
    pos = hit + 1;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return line_of_offset(raw, pos - 1);
}

class Checker {
 public:
  Checker(const std::string& raw, std::vector<ConfigIssue>& issues) : raw_(raw), issues_(issues) {}

  void fail(const std::string& field, const std::string& msg) {
    issues_.push_back({field, msg, line_of_field(raw_, field)});
  }

  void known_keys(const json& obj, const std::string& prefix, const std::set<std::string>& keys) {
    for (const auto& [k, v] : obj.items()) {
      if (!keys.count(k)) {
        std::string allowed;
        for (const auto& a : keys) allowed += (allowed.empty() ? "" : ", ") + a;
        fail(prefix + k, "unknown key (allowed: " + allowed + ")");
      }
    }
  }

  // Reads a finite number; fills `out` only when present and valid.
  bool number(const json& obj, const std::string& key, const std::string& field, double& out) {
    if (!obj.contains(key)) return false;
    const json& v = obj.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(field, "must be a finite number");
      return false;
    }
    out = v.get<double>();
    return true;
  }

  void positive(const json& obj, const std::string& key, const std::string& field, double& out) {
    double v = out;
    if (number(obj, key, field, v)) {
      if (v > 0.0) out = v;
      else fail(field, "must be > 0, got " + format(v));
    }
  }

  void nonneg(const json& obj, const std::string& key, const std::string& field, double& out) {
    double v = out;
    if (number(obj, key, field, v)) {
      if (v >= 0.0) out = v;
      else fail(field, "must be >= 0, got " + format(v));
    }
  }

  template <class Int>
  void integer(const json& obj, const std::string& key, const std::string& field, Int& out, long double lo) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      fail(field, "must be an integer");
      return;
    }
    const long double d = v.get<long double>();
    if (d != std::floor(d) || d < lo || d > (long double)std::numeric_limits<Int>::max()) {
      fail(field, "must be an integer >= " + format(double(lo)));
      return;
    }
    out = v.is_number_unsigned() ? Int(v.get<std::uint64_t>()) : Int(d);
  }

  void choice(const json& obj, const std::string& key, const std::string& field, std::string& out,
              const std::set<std::string>& allowed) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_string() || !allowed.count(v.get<std::string>())) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(field, "must be one of: " + list);
      return;
    }
    out = v.get<std::string>();
  }

  void string(const json& obj, const std::string& key, const std::string& field, std::string& out) {
    if (!obj.contains(key)) return;
    if (!obj.at(key).is_string()) {
      fail(field, "must be a string");
      return;
    }
    out = obj.at(key).get<std::string>();
  }

  static std::string format(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

 private:
  const std::string& raw_;
  std::vector<ConfigIssue>& issues_;
};

void read_model(Checker& ck, const json& doc, ModelConfig& m) {
  if (!doc.contains("model")) {
    ck.fail("model", "required (object with a \"class\" key: rayleigh, rice, hoyt or ou)");
    return;
  }
  const json& j = doc.at("model");
  if (!j.is_object()) {
    ck.fail("model", "must be an object");
    return;
  }
  ck.choice(j, "class", "model.class", m.cls, {"rayleigh", "rice", "hoyt", "ou"});
  if (!j.contains("class")) ck.fail("model.class", "required (rayleigh, rice, hoyt or ou)");
  if (m.cls.empty()) return;

  if (m.cls == "rayleigh") {
    ck.known_keys(j, "model.", {"class", "B", "sigma", "i0", "q0"});
    ck.positive(j, "B", "model.B", m.rayleigh.B);
    ck.positive(j, "sigma", "model.sigma", m.rayleigh.sigma);
    ck.number(j, "i0", "model.i0", m.rayleigh.i0);
    ck.number(j, "q0", "model.q0", m.rayleigh.q0);
    m.ou = to_ou(m.rayleigh);
    return;
  }
  if (m.cls == "rice") {
    ck.known_keys(j, "model.", {"class", "k", "theta", "beta", "i0", "q0", "drift"});
    OuParams& p = m.ou;
    p = OuParams{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0};
    double k = 1.0, theta = 1.0, beta = 1.0;
    ck.positive(j, "k", "model.k", k);
    ck.number(j, "theta", "model.theta", theta);
    ck.positive(j, "beta", "model.beta", beta);
    ck.number(j, "i0", "model.i0", p.i0);
    ck.number(j, "q0", "model.q0", p.q0);
    p.k1 = p.k2 = k;
    p.theta1 = p.theta2 = theta;
    p.beta1 = p.beta2 = beta;
    if (p.i0 != p.q0) {
      ck.fail("model.q0", "the Rice projection requires equal initial components (i0 = q0)");
    }
    std::string drift = "affine";
    ck.choice(j, "drift", "model.drift", drift, {"affine", "exact"});
    m.rice_mode = drift == "exact" ? RiceMode::Exact : RiceMode::Affine;
    return;
  }
  if (m.cls == "hoyt") {
    ck.known_keys(j, "model.", {"class", "k1", "k2", "beta1", "beta2", "i0", "q0"});
    OuParams& p = m.ou;
    p = OuParams{0.1, 0.5, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0};
    ck.positive(j, "k1", "model.k1", p.k1);
    ck.positive(j, "k2", "model.k2", p.k2);
    ck.positive(j, "beta1", "model.beta1", p.beta1);
    ck.positive(j, "beta2", "model.beta2", p.beta2);
    ck.number(j, "i0", "model.i0", p.i0);
    ck.number(j, "q0", "model.q0", p.q0);
    if (p.i0 != 0.0 || p.q0 != 0.0) {
      ck.fail(p.i0 != 0.0 ? "model.i0" : "model.q0", "the Hoyt projection assumes the channel starts at I0 = Q0 = 0");
    }
    return;
  }
  // generic OU pair, classified by its parameters
  ck.known_keys(j, "model.", {"class", "k1", "k2", "theta1", "theta2", "beta1", "beta2", "i0", "q0", "drift"});
  OuParams& p = m.ou;
  p = OuParams{};
  ck.positive(j, "k1", "model.k1", p.k1);
  ck.positive(j, "k2", "model.k2", p.k2);
  ck.number(j, "theta1", "model.theta1", p.theta1);
  ck.number(j, "theta2", "model.theta2", p.theta2);
  ck.positive(j, "beta1", "model.beta1", p.beta1);
  ck.positive(j, "beta2", "model.beta2", p.beta2);
  ck.number(j, "i0", "model.i0", p.i0);
  ck.number(j, "q0", "model.q0", p.q0);
  std::string drift = "affine";
  ck.choice(j, "drift", "model.drift", drift, {"affine", "exact"});
  m.rice_mode = drift == "exact" ? RiceMode::Exact : RiceMode::Affine;
}

void read_w(Checker& ck, const json& doc, double T, std::vector<double>& w) {
  if (!doc.contains("w")) {
    w = linspace(0.0, T, 200);
    return;
  }
  const json& j = doc.at("w");
  if (j.is_number()) {
    double v = 0.0;
    if (ck.number(doc, "w", "w", v)) w = {v};
  } else if (j.is_array()) {
    if (j.empty()) ck.fail("w", "list must not be empty");
    for (std::size_t k = 0; k < j.size(); ++k) {
      if (!j[k].is_number() || !std::isfinite(j[k].get<double>())) {
        ck.fail("w", "entry " + std::to_string(k) + " must be a finite number");
        return;
      }
      w.push_back(j[k].get<double>());
    }
    if (!std::is_sorted(w.begin(), w.end())) ck.fail("w", "list must be nondecreasing");
  } else if (j.is_object()) {
    ck.known_keys(j, "w.", {"min", "max", "count"});
    double lo = 0.0, hi = T;
    int count = 200;
    ck.number(j, "min", "w.min", lo);
    ck.number(j, "max", "w.max", hi);
    ck.integer(j, "count", "w.count", count, 1);
    if (hi < lo) {
      ck.fail("w.max", "must be >= w.min");
      return;
    }
    w = linspace(lo, hi, count);
  } else {
    ck.fail("w", "must be a number, a list, or {\"min\", \"max\", \"count\"}");
  }
}

}  // namespace

ProjectedModel ModelConfig::projected() const {
  if (cls == "rayleigh") return ProjectedModel::rayleigh(rayleigh);
  if (cls == "rice") return ProjectedModel::rice(ou, rice_mode);
  if (cls == "hoyt") return ProjectedModel::hoyt(ou);
  return ProjectedModel::from_ou(ou, rice_mode);
}

OuParams ModelConfig::iq_params() const { return cls == "rayleigh" ? to_ou(rayleigh) : ou; }

FadingKind ModelConfig::kind() const {
  if (cls == "rayleigh") return FadingKind::Rayleigh;
  if (cls == "rice") return FadingKind::Rice;
  if (cls == "hoyt") return FadingKind::Hoyt;
  return classify_fading(ou).kind;
}

std::string ExperimentConfig::grid_base() const {
  return kbe.grid.empty() ? (std::filesystem::path(out) / "kbe_grid").string() : kbe.grid;
}

std::string ExperimentConfig::output_path(const std::string& name) const {
  return (std::filesystem::path(out) / (label.empty() ? name : label + "_" + name)).string();
}

std::string ConfigIssue::str(const std::string& source) const {
  std::string where = source.empty() ? "config" : source;
  if (line > 0) where += ":" + std::to_string(line);
  return where + ": " + field + ": " + message;
}

ConfigResult validate_config(const std::string& raw, const json& overrides, const std::string& default_out) {
  ConfigResult res;
  json doc = json::object();
  if (raw.find_first_not_of(" \t\r\n") != std::string::npos) {
    try {
      doc = json::parse(raw);
    } catch (const json::parse_error& e) {
      res.issues.push_back({"(syntax)", e.what(), line_of_offset(raw, e.byte == 0 ? 0 : e.byte - 1)});
      return res;
    }
  }
  if (!doc.is_object()) {
    res.issues.push_back({"(document)", "top level must be a JSON object", 1});
    return res;
  }
  if (!overrides.is_null()) doc.merge_patch(overrides);
  res.resolved = doc;

  Checker ck(raw, res.issues);
  ck.known_keys(doc, "", {"model", "T", "N", "gamma", "estimator", "system", "M", "M_is", "w", "seed", "out",
                          "workers", "confidence", "target_rel_error", "kbe", "bins", "paths", "stats", "drift",
                          "label"});
  ExperimentConfig c;
  if (!default_out.empty()) c.out = default_out;
  read_model(ck, doc, c.model);
  ck.positive(doc, "T", "T", c.T);
  ck.integer(doc, "N", "N", c.N, 1);
  ck.nonneg(doc, "gamma", "gamma", c.gamma);
  ck.choice(doc, "estimator", "estimator", c.estimator, {"mc", "is"});
  ck.choice(doc, "system", "system", c.system, {"projected", "iq", "both"});
  ck.integer(doc, "M", "M", c.M, 1);
  ck.integer(doc, "M_is", "M_is", c.M_is, 2);
  read_w(ck, doc, c.T, c.w);
  ck.integer(doc, "seed", "seed", c.seed, 0);
  ck.string(doc, "out", "out", c.out);
  ck.integer(doc, "workers", "workers", c.workers, 0);
  ck.positive(doc, "confidence", "confidence", c.confidence);
  ck.positive(doc, "target_rel_error", "target_rel_error", c.target_rel_error);
  ck.integer(doc, "bins", "bins", c.bins, 1);
  ck.string(doc, "label", "label", c.label);
  if (doc.contains("paths")) {
    const json& p = doc.at("paths");
    c.paths.clear();
    if (!p.is_array()) ck.fail("paths", "must be a list of path indices");
    else
      for (const auto& v : p) {
        if (!v.is_number_unsigned()) {
          ck.fail("paths", "entries must be nonnegative integers");
          break;
        }
        c.paths.push_back(v.get<std::uint64_t>());
      }
  }
  if (doc.contains("kbe")) {
    const json& k = doc.at("kbe");
    if (!k.is_object()) {
      ck.fail("kbe", "must be an object");
    } else {
      ck.known_keys(k, "kbe.", {"nt", "nx", "xb", "grid", "v_floor", "zeta_cap"});
      ck.integer(k, "nt", "kbe.nt", c.kbe.nt, 2);
      ck.integer(k, "nx", "kbe.nx", c.kbe.nx, 2);
      ck.nonneg(k, "xb", "kbe.xb", c.kbe.xb);
      ck.string(k, "grid", "kbe.grid", c.kbe.grid);
      ck.positive(k, "v_floor", "kbe.v_floor", c.kbe.v_floor);
      ck.positive(k, "zeta_cap", "kbe.zeta_cap", c.kbe.zeta_cap);
      if (c.kbe.xb > 0.0 && !(c.kbe.xb > c.gamma * c.gamma)) ck.fail("kbe.xb", "must exceed gamma^2");
    }
  }
  if (doc.contains("stats")) {
    const json& s = doc.at("stats");
    if (!s.is_object()) {
      ck.fail("stats", "must be an object");
    } else {
      ck.known_keys(s, "stats.", {"burn_in", "dt", "lags"});
      ck.nonneg(s, "burn_in", "stats.burn_in", c.stats.burn_in);
      ck.positive(s, "dt", "stats.dt", c.stats.dt);
      if (s.contains("lags")) {
        c.stats.lags.clear();
        const json& l = s.at("lags");
        if (!l.is_array() || l.empty()) ck.fail("stats.lags", "must be a nonempty list");
        else
          for (const auto& v : l) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
              ck.fail("stats.lags", "entries must be positive numbers");
              break;
            }
            c.stats.lags.push_back(v.get<double>());
          }
      }
    }
  }

  if (doc.contains("drift")) {
    const json& d = doc.at("drift");
    if (!d.is_object()) {
      ck.fail("drift", "must be an object");
    } else {
      ck.known_keys(d, "drift.", {"times", "points"});
      ck.integer(d, "points", "drift.points", c.drift.points, 2);
      if (d.contains("times")) {
        c.drift.times.clear();
        const json& t = d.at("times");
        if (!t.is_array() || t.empty()) ck.fail("drift.times", "must be a nonempty list");
        else
          for (const auto& v : t) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
              ck.fail("drift.times", "entries must be positive numbers");
              break;
            }
            c.drift.times.push_back(v.get<double>());
          }
      }
    }
  }

  // cross-field constraints
  if (!c.model.cls.empty()) {
    if (c.estimator == "is" && c.model.cls != "rayleigh") {
      ck.fail("estimator", "importance sampling needs the rayleigh model: the optimal control is derived only for Rayleigh fading");
    }
    if (c.model.cls == "ou") {
      try {
        const FadingClass fc = classify_fading(c.model.ou);
        if (fc.kind == FadingKind::Beckmann && c.system != "iq") {
          ck.fail("model", "parameters classify as beckmann, which has no projected SDE; use system \"iq\"");
        }
        if (fc.kind == FadingKind::Rice && (c.model.ou.theta1 != c.model.ou.theta2 || c.model.ou.i0 != c.model.ou.q0)) {
          ck.fail("model", "the Rice projection requires theta1 = theta2 and i0 = q0");
        }
        if (fc.kind == FadingKind::Hoyt && (c.model.ou.i0 != 0.0 || c.model.ou.q0 != 0.0)) {
          ck.fail("model", "the Hoyt projection assumes the channel starts at I0 = Q0 = 0");
        }
      } catch (const ConfigError&) {
        // parameter errors are already reported field by field
      }
    }
  }
  for (double v : c.w) {
    if (!std::isfinite(v)) ck.fail("w", "entries must be finite");
  }
  if (res.issues.empty()) res.config = c;
  return res;
}

json to_json(const ExperimentConfig& c) {
  json model = {{"class", c.model.cls}};
  if (c.model.cls == "rayleigh") {
    model.update({{"B", c.model.rayleigh.B}, {"sigma", c.model.rayleigh.sigma}, {"i0", c.model.rayleigh.i0},
                  {"q0", c.model.rayleigh.q0}});
  } else {
    const OuParams& p = c.model.ou;
    model.update({{"k1", p.k1}, {"k2", p.k2}, {"theta1", p.theta1}, {"theta2", p.theta2}, {"beta1", p.beta1},
                  {"beta2", p.beta2}, {"i0", p.i0}, {"q0", p.q0},
                  {"drift", c.model.rice_mode == RiceMode::Exact ? "exact" : "affine"}});
  }
  return {{"model", model},
          {"T", c.T},
          {"N", c.N},
          {"gamma", c.gamma},
          {"estimator", c.estimator},
          {"system", c.system},
          {"M", c.M},
          {"M_is", c.M_is},
          {"seed", c.seed},
          {"confidence", c.confidence},
          {"target_rel_error", c.target_rel_error},
          {"kbe",
           {{"nt", c.kbe.nt},
            {"nx", c.kbe.nx},
            {"xb", c.kbe.xb},
            {"v_floor", c.kbe.v_floor},
            {"zeta_cap", c.kbe.zeta_cap}}},
          {"bins", c.bins},
          {"paths", c.paths},
          {"stats", {{"burn_in", c.stats.burn_in}, {"dt", c.stats.dt}, {"lags", c.stats.lags}}},
          {"drift", {{"times", c.drift.times}, {"points", c.drift.points}}},
          {"w", c.w}};
}

}  // namespace fadesim
