#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fadesim {

struct KbeGridConfig {
  double T = 4.0;
  int nt = 400;     // time steps; the z~ grid shares the spacing
  int nx = 400;
  double xb = 0.0;  // 0 selects 12 sigma^2
  double B = 1.0;
  double sigma = 1.0;
  double gamma = 0.5;

  double dt() const { return T / (nt + 1); }
  double dx() const { return xb / (nx + 1); }
};

// Fills the xb default and throws ConfigError listing every violation.
KbeGridConfig resolve(KbeGridConfig cfg);

// Per-node coefficients of the x-operator G = -(a d/dx + b^2/2 d2/dx2):
// row i of G is (alpha_l, beta, -alpha_u), and gamma_i couples z~ neighbours.
struct KbeOperator {
  double dt = 0.0, dx = 0.0;
  std::vector<double> x;
  std::vector<double> alpha_u, alpha_l, beta, gamma;
  std::vector<double> fade_fraction;  // share of the x-cell below gamma^2

  // Tridiagonal G on interior nodes 1..nx with the linear-extrapolation rows folded
  // in at i = 1 and i = nx; entry k is row k+1.
  std::vector<double> lower, diag, upper;
};

KbeOperator build_operator(const KbeGridConfig& cfg);

enum class KbeStorage { Full, InitialSlice };

struct KbeDiagnostics {
  double min_pre_clamp = 0.0;
  double max_pre_clamp = 1.0;
  double gradient_at_xb = 0.0;  // max over z~ of |dv/dx| at x = xb, t = 0
  double seconds = 0.0;
};

// v~(t_n, x_i, z~_j) on n = 0..nt+1, i = 0..nx+1, j = 0..nt+1, stored (n, i, j)
// row-major. With InitialSlice storage only n = 0 is kept.
class ValueFunctionGrid {
 public:
  ValueFunctionGrid() = default;
  ValueFunctionGrid(const KbeGridConfig& cfg, KbeStorage storage);

  const KbeGridConfig& config() const { return cfg_; }
  KbeStorage storage() const { return storage_; }
  int nt() const { return cfg_.nt; }
  int nx() const { return cfg_.nx; }
  bool has_slice(int n) const { return storage_ == KbeStorage::Full || n == 0; }

  double node(int n, int i, int j) const { return data_[offset(n, i, j)]; }
  double& node(int n, int i, int j) { return data_[offset(n, i, j)]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  KbeDiagnostics diagnostics;

 private:
  std::size_t offset(int n, int i, int j) const;

  KbeGridConfig cfg_;
  KbeStorage storage_ = KbeStorage::Full;
  std::vector<double> data_;
};

ValueFunctionGrid solve_kbe(const KbeGridConfig& cfg, KbeStorage storage = KbeStorage::Full);

// v(t, x, z) = v~(t, x, w - z): 1 once z > w, 0 when the remaining time cannot cover
// w - z, otherwise interpolated (see kbe_solver.cpp).
double value_at(const ValueFunctionGrid& grid, double t, double x, double z, double w);

struct ControlPolicy {
  const ValueFunctionGrid* grid = nullptr;
  double w = 0.0;
  double v_floor = 1e-12;
  double zeta_cap = 50.0;
};

// sigma sqrt(2Bx) d/dx log max(v, v_floor), central differences at the grid spacing.
double control_at(const ControlPolicy& policy, double t, double x, double z);

struct GridCheck {
  bool ok = true;
  std::vector<std::string> failures;
  double min_value = 0.0, max_value = 0.0;
  double max_z_increase = 0.0;  // largest v~(j+1) - v~(j); <= 0 means monotone in z~
};

GridCheck check_invariants(const ValueFunctionGrid& grid);

// Writes <base>.json (config, shape, byte order) and <base>.bin (little-endian float64).
void save_grid(const ValueFunctionGrid& grid, const std::string& base);
ValueFunctionGrid load_grid(const std::string& base, bool check);

}  // namespace fadesim
