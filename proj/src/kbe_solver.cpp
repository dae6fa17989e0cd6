#include "kbe_solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "errors.hpp"

namespace fadesim {
namespace {

using json = nlohmann::json;

// Thomas factorization of a constant tridiagonal matrix.
class Tridiagonal {
 public:
  Tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag, const std::vector<double>& upper)
      : lower_(lower), cp_(diag.size()), inv_(diag.size()) {
    const std::size_t n = diag.size();
    for (std::size_t k = 0; k < n; ++k) {
      const double d = diag[k] - (k > 0 ? lower[k] * cp_[k - 1] : 0.0);
      if (!(std::fabs(d) > 1e-300)) {
        throw NumericalError("KBE x-system is singular at row " + std::to_string(k + 1));
      }
      inv_[k] = 1.0 / d;
      cp_[k] = upper[k] * inv_[k];
    }
  }

  void solve(double* x) const {
    const std::size_t n = inv_.size();
    x[0] *= inv_[0];
    for (std::size_t k = 1; k < n; ++k) x[k] = (x[k] - lower_[k] * x[k - 1]) * inv_[k];
    for (std::size_t k = n - 1; k-- > 0;) x[k] -= cp_[k] * x[k + 1];
  }

 private:
  std::vector<double> lower_, cp_, inv_;
};

// One Crank-Nicolson step of length 2h for dv/d(-t) = -G v on interior nodes:
// (I + h G) v_new = (I - h G) v_old.
class HalfStep {
 public:
  HalfStep(const KbeOperator& op, double h)
      : op_(op), h_(h), solver_(scaled(op.lower, h), shifted(op.diag, h), scaled(op.upper, h)), rhs_(op.diag.size()) {}

  // row points at node i = 0; interior nodes 1..nx are updated in place
  void apply(double* row) {
    const std::size_t n = rhs_.size();
    const double* v = row + 1;
    for (std::size_t k = 0; k < n; ++k) {
      double g = op_.diag[k] * v[k];
      if (k > 0) g += op_.lower[k] * v[k - 1];
      if (k + 1 < n) g += op_.upper[k] * v[k + 1];
      rhs_[k] = v[k] - h_ * g;
    }
    solver_.solve(rhs_.data());
    std::copy(rhs_.begin(), rhs_.end(), row + 1);
  }

 private:
  static std::vector<double> scaled(const std::vector<double>& a, double h) {
    std::vector<double> out(a);
    for (double& x : out) x *= h;
    return out;
  }
  static std::vector<double> shifted(const std::vector<double>& a, double h) {
    std::vector<double> out(a);
    for (double& x : out) x = 1.0 + h * x;
    return out;
  }

  const KbeOperator& op_;
  double h_;
  Tridiagonal solver_;
  std::vector<double> rhs_;
};

void extrapolate_edges(double* row, int nx) {
  row[0] = std::clamp(2.0 * row[1] - row[2], 0.0, 1.0);
  row[nx + 1] = std::clamp(2.0 * row[nx] - row[nx - 1], 0.0, 1.0);
}

// Splits u into an integer part and a fraction, snapping near-integers so queries on
// grid nodes read stored values exactly.
void locate(double u, int& idx, double& frac) {
  const double r = std::nearbyint(u);
  if (std::fabs(u - r) <= 1e-9 * std::max(1.0, std::fabs(u))) {
    idx = int(r);
    frac = 0.0;
    return;
  }
  const double f = std::floor(u);
  idx = int(f);
  frac = u - f;
}

// Bilinear in (x, z~) on stored slice n; z~ < 0 means the target is already met.
double slice_value(const ValueFunctionGrid& g, int n, double x, double zt) {
  if (zt < 0.0) return 1.0;
  const KbeGridConfig& c = g.config();
  int j;
  double mu;
  locate(zt / c.dt(), j, mu);
  if (j >= c.nt + 1) return 0.0;
  int i;
  double nu;
  locate(std::min(x, c.xb) / c.dx(), i, nu);
  if (i >= c.nx + 1) {
    i = c.nx + 1;
    nu = 0.0;
  }
  auto along_z = [&](int ii) {
    const double a = g.node(n, ii, j);
    return mu == 0.0 ? a : (1.0 - mu) * a + mu * g.node(n, ii, j + 1);
  };
  const double lo = along_z(i);
  return nu == 0.0 ? lo : (1.0 - nu) * lo + nu * along_z(i + 1);
}

}  // namespace

KbeGridConfig resolve(KbeGridConfig cfg) {
  std::vector<std::string> errs;
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) errs.push_back("T must be > 0");
  if (cfg.nt < 2) errs.push_back("grid nt must be >= 2");
  if (cfg.nx < 2) errs.push_back("grid nx must be >= 2");
  if (!(cfg.B > 0.0)) errs.push_back("B must be > 0");
  if (!(cfg.sigma > 0.0)) errs.push_back("sigma must be > 0");
  if (!(cfg.gamma >= 0.0)) errs.push_back("gamma must be >= 0");
  if (cfg.xb == 0.0 && cfg.sigma > 0.0) cfg.xb = 12.0 * cfg.sigma * cfg.sigma;
  if (!(cfg.xb > cfg.gamma * cfg.gamma)) errs.push_back("xb must exceed gamma^2");
  if (!errs.empty()) {
    std::string msg = "invalid KBE grid:";
    for (const auto& e : errs) msg += " " + e + ";";
    throw ConfigError(msg);
  }
  return cfg;
}

KbeOperator build_operator(const KbeGridConfig& raw) {
  const KbeGridConfig cfg = resolve(raw);
  KbeOperator op;
  op.dt = cfg.dt();
  op.dx = cfg.dx();
  const int nx = cfg.nx;
  const double s2 = cfg.sigma * cfg.sigma;
  const double g2 = cfg.gamma * cfg.gamma;
  op.x.resize(nx + 2);
  op.alpha_u.resize(nx + 2);
  op.alpha_l.resize(nx + 2);
  op.beta.resize(nx + 2);
  op.gamma.resize(nx + 2);
  op.fade_fraction.resize(nx + 2);
  for (int i = 0; i <= nx + 1; ++i) {
    const double x = i * op.dx;
    const double a = cfg.B * (s2 - x);
    const double b2 = 2.0 * s2 * cfg.B * x;
    op.x[i] = x;
    op.alpha_u[i] = a / (2.0 * op.dx) + b2 / (2.0 * op.dx * op.dx);
    op.alpha_l[i] = a / (2.0 * op.dx) - b2 / (2.0 * op.dx * op.dx);
    op.beta[i] = b2 / (op.dx * op.dx);
    // cell average of 1{x < gamma^2}; a node sample makes the threshold jump with dx
    op.fade_fraction[i] = std::clamp((g2 - (x - 0.5 * op.dx)) / op.dx, 0.0, 1.0);
    op.gamma[i] = op.fade_fraction[i] / (2.0 * op.dt);
  }
  op.lower.assign(nx, 0.0);
  op.diag.assign(nx, 0.0);
  op.upper.assign(nx, 0.0);
  for (int i = 1; i <= nx; ++i) {
    op.lower[i - 1] = op.alpha_l[i];
    op.diag[i - 1] = op.beta[i];
    op.upper[i - 1] = -op.alpha_u[i];
  }
  // v_0 = 2v_1 - v_2 and v_{nx+1} = 2v_nx - v_{nx-1}
  op.diag[0] = 2.0 * op.alpha_l[1] + op.beta[1];
  op.upper[0] = -(op.alpha_l[1] + op.alpha_u[1]);
  op.lower[0] = 0.0;
  op.lower[nx - 1] = op.alpha_l[nx] + op.alpha_u[nx];
  op.diag[nx - 1] = -2.0 * op.alpha_u[nx] + op.beta[nx];
  op.upper[nx - 1] = 0.0;
  return op;
}

ValueFunctionGrid::ValueFunctionGrid(const KbeGridConfig& cfg, KbeStorage storage) : cfg_(cfg), storage_(storage) {
  const std::size_t slices = storage == KbeStorage::Full ? std::size_t(cfg.nt + 2) : 1;
  data_.assign(slices * std::size_t(cfg.nx + 2) * std::size_t(cfg.nt + 2), 0.0);
}

std::size_t ValueFunctionGrid::offset(int n, int i, int j) const {
  const std::size_t s = storage_ == KbeStorage::Full ? std::size_t(n) : 0;
  return (s * std::size_t(cfg_.nx + 2) + std::size_t(i)) * std::size_t(cfg_.nt + 2) + std::size_t(j);
}

// Backward sweep from t = T. Each step is Strang-split: half a Crank-Nicolson step in
// x, the exact z~ transport, another half step in x. Because dz~ = dt and z~ moves
// at speed 1{x < gamma^2}, transport over one step is the convex shift
// v_j <- (1 - c_i) v_j + c_i v_{j-1}, which keeps values in [0, 1] and never feeds
// the wedge z~ >= T - t.
ValueFunctionGrid solve_kbe(const KbeGridConfig& raw, KbeStorage storage) {
  const auto start = std::chrono::steady_clock::now();
  const KbeGridConfig cfg = resolve(raw);
  const KbeOperator op = build_operator(cfg);
  const int nt = cfg.nt, nx = cfg.nx;
  const std::size_t stride = std::size_t(nx + 2);
  ValueFunctionGrid grid(cfg, storage);

  // working slice in (j, i) layout so x-solves run on contiguous rows
  std::vector<double> work(std::size_t(nt + 2) * stride, 0.0);
  auto row = [&](int j) { return work.data() + std::size_t(j) * stride; };
  auto store = [&](int n) {
    if (!grid.has_slice(n)) return;
    for (int i = 0; i <= nx + 1; ++i) {
      for (int j = 0; j <= nt + 1; ++j) grid.node(n, i, j) = row(j)[i];
    }
  };

  // t = T: g~(z~) = 1{z~ < 0} is 0 on every node, including z~ = 0
  store(nt + 1);

  HalfStep half(op, 0.25 * op.dt);
  double lo = 0.0, hi = 1.0;
  for (int n = nt + 1; n >= 1; --n) {
    const int active_old = nt - n;     // nonzero rows of slice n
    const int active_new = nt + 1 - n;  // nonzero rows of slice n-1
    const double edge = n < nt + 1 ? 1.0 : 0.0;
    for (int j = 1; j <= active_old; ++j) half.apply(row(j));
    std::fill(row(0), row(0) + stride, edge);
    for (int j = active_new; j >= 1; --j) {
      double* cur = row(j);
      const double* prev = row(j - 1);
      for (int i = 1; i <= nx; ++i) {
        const double c = op.fade_fraction[i];
        cur[i] = (1.0 - c) * cur[i] + c * prev[i];
      }
    }
    for (int j = 1; j <= active_new; ++j) {
      double* cur = row(j);
      half.apply(cur);
      for (int i = 1; i <= nx; ++i) {
        lo = std::min(lo, cur[i]);
        hi = std::max(hi, cur[i]);
        cur[i] = std::clamp(cur[i], 0.0, 1.0);
      }
      extrapolate_edges(cur, nx);
    }
    std::fill(row(0), row(0) + stride, 1.0);
    store(n - 1);
  }

  grid.diagnostics.min_pre_clamp = lo;
  grid.diagnostics.max_pre_clamp = hi;
  double grad = 0.0;
  for (int j = 0; j <= nt + 1; ++j) {
    grad = std::max(grad, std::fabs(grid.node(0, nx + 1, j) - grid.node(0, nx, j)) / op.dx);
  }
  grid.diagnostics.gradient_at_xb = grad;
  grid.diagnostics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return grid;
}

// Between slices the query is moved along the fade characteristic: the slack
// T - t - z~ is held fixed, so interpolation in t never straddles the wedge kink.
double value_at(const ValueFunctionGrid& grid, double t, double x, double z, double w) {
  const KbeGridConfig& c = grid.config();
  const double tol = 1e-9 * c.T;
  if (!(t >= -tol && t <= c.T + tol)) throw DomainError("value_at: t outside [0, T]");
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError("value_at: x must be finite and >= 0");
  if (!(z >= -tol && z <= t + tol)) throw DomainError("value_at: z outside [0, t]");
  if (!std::isfinite(w)) throw DomainError("value_at: w must be finite");
  t = std::clamp(t, 0.0, c.T);
  const double zt = w - z;
  if (zt < 0.0) return 1.0;
  if (zt >= c.T - t) return 0.0;

  int n;
  double lambda;
  locate(t / c.dt(), n, lambda);
  if (n >= c.nt + 1) {
    n = c.nt + 1;
    lambda = 0.0;
  }
  if (!grid.has_slice(n) || (lambda > 0.0 && !grid.has_slice(n + 1))) {
    throw DomainError("value_at: grid stores only the t = 0 slice");
  }
  const double a = slice_value(grid, n, x, zt + lambda * c.dt());
  if (lambda == 0.0) return a;
  const double b = slice_value(grid, n + 1, x, zt - (1.0 - lambda) * c.dt());
  return (1.0 - lambda) * a + lambda * b;
}

double control_at(const ControlPolicy& policy, double t, double x, double z) {
  const ValueFunctionGrid& g = *policy.grid;
  const KbeGridConfig& c = g.config();
  if (!(x >= 0.0)) throw DomainError("control_at: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double h = c.dx();
  const double xl = std::max(x - h, 0.0);
  const double xr = x + h;
  const double vl = std::max(value_at(g, t, xl, z, policy.w), policy.v_floor);
  const double vr = std::max(value_at(g, t, xr, z, policy.w), policy.v_floor);
  if (vl == vr) return 0.0;
  const double grad = (std::log(vr) - std::log(vl)) / (xr - xl);
  const double zeta = c.sigma * std::sqrt(2.0 * c.B * x) * grad;
  return std::clamp(zeta, -policy.zeta_cap, policy.zeta_cap);
}

GridCheck check_invariants(const ValueFunctionGrid& g) {
  GridCheck out;
  const int nt = g.nt(), nx = g.nx();
  double mn = 1.0, mx = 0.0, rise = -1.0;
  std::size_t bad_range = 0, bad_edge = 0, bad_wedge = 0, bad_mono = 0;
  for (int n = 0; n <= nt + 1; ++n) {
    if (!g.has_slice(n)) continue;
    const double edge = n < nt + 1 ? 1.0 : 0.0;
    for (int i = 0; i <= nx + 1; ++i) {
      for (int j = 0; j <= nt + 1; ++j) {
        const double v = g.node(n, i, j);
        if (!(v >= 0.0 && v <= 1.0)) ++bad_range;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        if (j == 0 && v != edge) ++bad_edge;
        if (j >= 1 && j >= nt + 1 - n && v != 0.0) ++bad_wedge;
        if (j > 0) {
          const double d = v - g.node(n, i, j - 1);
          rise = std::max(rise, d);
          if (d > 1e-10) ++bad_mono;
        }
      }
    }
  }
  out.min_value = mn;
  out.max_value = mx;
  out.max_z_increase = rise;
  auto fail = [&](std::size_t count, const char* what) {
    if (count == 0) return;
    out.ok = false;
    out.failures.push_back(std::to_string(count) + " nodes " + what);
  };
  fail(bad_range, "outside [0, 1]");
  fail(bad_edge, "violate the z~ = 0 boundary");
  fail(bad_wedge, "nonzero in the z~ >= T - t wedge");
  fail(bad_mono, "increase in z~");
  return out;
}

void save_grid(const ValueFunctionGrid& g, const std::string& base) {
  const std::filesystem::path bin_path = base + ".bin";
  const KbeGridConfig& c = g.config();
  json meta = {
      {"format", "fadesim-value-grid"},
      {"version", 1},
      {"config",
       {{"T", c.T}, {"nt", c.nt}, {"nx", c.nx}, {"xb", c.xb}, {"B", c.B}, {"sigma", c.sigma}, {"gamma", c.gamma}}},
      {"storage", g.storage() == KbeStorage::Full ? "full" : "initial_slice"},
      {"shape", {g.storage() == KbeStorage::Full ? c.nt + 2 : 1, c.nx + 2, c.nt + 2}},
      {"order", "n,i,j row-major"},
      {"dtype", "float64"},
      {"byte_order", "little"},
      {"data", bin_path.filename().string()},
      {"diagnostics",
       {{"min_pre_clamp", g.diagnostics.min_pre_clamp},
        {"max_pre_clamp", g.diagnostics.max_pre_clamp},
        {"gradient_at_xb", g.diagnostics.gradient_at_xb},
        {"seconds", g.diagnostics.seconds}}},
  };
  std::ofstream js(base + ".json");
  if (!js) throw IoError("cannot write " + base + ".json");
  js << meta.dump(2) << '\n';

  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot write " + bin_path.string());
  const auto& d = g.data();
  if constexpr (std::endian::native == std::endian::little) {
    bin.write(reinterpret_cast<const char*>(d.data()), std::streamsize(d.size() * sizeof(double)));
  } else {
    for (double v : d) {
      auto u = std::bit_cast<std::uint64_t>(v);
      unsigned char b[8];
      for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(u >> (8 * k));
      bin.write(reinterpret_cast<const char*>(b), 8);
    }
  }
  if (!bin) throw IoError("failed writing " + bin_path.string());
}

ValueFunctionGrid load_grid(const std::string& base, bool check) {
  std::ifstream js(base + ".json");
  if (!js) throw IoError("cannot open grid metadata " + base + ".json");
  json meta;
  try {
    js >> meta;
  } catch (const json::exception& e) {
    throw IoError(base + ".json: " + e.what());
  }
  if (meta.value("format", "") != "fadesim-value-grid") throw IoError(base + ".json is not a value grid file");
  if (meta.value("byte_order", "") != "little" || meta.value("dtype", "") != "float64") {
    throw IoError(base + ".json: unsupported byte order or dtype");
  }
  KbeGridConfig c;
  const json& jc = meta.at("config");
  c.T = jc.at("T");
  c.nt = jc.at("nt");
  c.nx = jc.at("nx");
  c.xb = jc.at("xb");
  c.B = jc.at("B");
  c.sigma = jc.at("sigma");
  c.gamma = jc.at("gamma");
  c = resolve(c);
  const KbeStorage storage = meta.at("storage") == "full" ? KbeStorage::Full : KbeStorage::InitialSlice;
  ValueFunctionGrid g(c, storage);
  const auto& d = meta.at("diagnostics");
  g.diagnostics.min_pre_clamp = d.value("min_pre_clamp", 0.0);
  g.diagnostics.max_pre_clamp = d.value("max_pre_clamp", 1.0);
  g.diagnostics.gradient_at_xb = d.value("gradient_at_xb", 0.0);
  g.diagnostics.seconds = d.value("seconds", 0.0);

  const std::filesystem::path bin_path =
      std::filesystem::path(base).parent_path() / meta.at("data").get<std::string>();
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw IoError("cannot open grid data " + bin_path.string());
  auto& data = g.data();
  const auto bytes = std::streamsize(data.size() * sizeof(double));
  if constexpr (std::endian::native == std::endian::little) {
    bin.read(reinterpret_cast<char*>(data.data()), bytes);
  } else {
    for (double& v : data) {
      unsigned char b[8];
      bin.read(reinterpret_cast<char*>(b), 8);
      std::uint64_t u = 0;
      for (int k = 0; k < 8; ++k) u |= std::uint64_t(b[k]) << (8 * k);
      v = std::bit_cast<double>(u);
    }
  }
  if (!bin || bin.peek() != std::char_traits<char>::eof()) {
    throw IoError(bin_path.string() + ": size does not match the metadata shape");
  }
  if (check) {
    const GridCheck r = check_invariants(g);
    if (!r.ok) {
      std::string msg = "grid " + base + " fails invariant check:";
      for (const auto& f : r.failures) msg += " " + f + ";";
      throw NumericalError(msg);
    }
  }
  return g;
}

}  // namespace fadesim
