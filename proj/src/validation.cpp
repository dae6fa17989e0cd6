#include "validation.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"
#include "output.hpp"
#include "special_functions.hpp"

namespace fadesim {
namespace {

double kolmogorov_c(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("significance level must be in (0, 1)");
  return std::sqrt(-0.5 * std::log(0.5 * alpha));
}

double integrate_fixed(const Law& law, double a, double b) {
  if (b <= a) return 0.0;
  auto f = [&](double y) { return law.pdf(y); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 5, 1e-13);
}

double law_cdf_closed(const Law& law, double y) { return y <= 0.0 ? 0.0 : -std::expm1(-y / law.mean); }

}  // namespace

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = double(a.size()), nb = double(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::fabs(double(i) / na - double(j) / nb));
  }
  // once one sample is exhausted the gap only shrinks, and its value there was counted
  return d;
}

double ks_critical_one_sample(std::uint64_t n, double alpha) { return kolmogorov_c(alpha) / std::sqrt(double(n)); }

double ks_critical_two_sample(std::uint64_t n, std::uint64_t m, double alpha) {
  return kolmogorov_c(alpha) * std::sqrt(double(n + m) / (double(n) * double(m)));
}

Law Law::exponential(double mean) {
  if (!(mean > 0.0)) throw ConfigError("exponential law: mean must be > 0");
  Law l;
  l.kind = LawKind::Exponential;
  l.mean = mean;
  return l;
}

Law Law::squared_hoyt(double s1v, double s2v) {
  if (!(s1v > 0.0) || !(s2v > 0.0)) throw ConfigError("squared Hoyt law: variances must be > 0");
  Law l;
  l.kind = LawKind::SquaredHoyt;
  l.s1v = s1v;
  l.s2v = s2v;
  return l;
}

Law Law::squared_rice(double m, double sigv) {
  if (!(sigv > 0.0)) throw ConfigError("squared Rice law: variance must be > 0");
  Law l;
  l.kind = LawKind::SquaredRice;
  l.m = m;
  l.sigv = sigv;
  return l;
}

Law Law::parse(const std::string& tag) {
  if (tag == "exponential") return exponential(1.0);
  if (tag == "squared_hoyt") return squared_hoyt(1.0, 1.0);
  if (tag == "squared_rice") return squared_rice(0.0, 1.0);
  throw ConfigError("unknown law '" + tag + "' (expected exponential, squared_hoyt or squared_rice)");
}

double Law::pdf(double y) const {
  if (y < 0.0) return 0.0;
  switch (kind) {
    case LawKind::Exponential:
      return std::exp(-y / mean) / mean;
    case LawKind::SquaredHoyt: {
      // exp(-y(s1+s2)/(4 s1 s2)) I0(y(s1-s2)/(4 s1 s2)) / (2 sqrt(s1 s2))
      const double q = 4.0 * s1v * s2v;
      const double a = y * std::fabs(s1v - s2v) / q;
      return std::exp(-y * (s1v + s2v) / q + a) * bessel_i0_scaled(a) / (2.0 * std::sqrt(s1v * s2v));
    }
    case LawKind::SquaredRice: {
      // sqrt(R) is Rice(sqrt2 m, sigma): exp(-(2m^2 + y)/(2 s)) I0(m sqrt(2y)/s) / (2 s)
      const double a = std::fabs(m) * std::sqrt(2.0 * y) / sigv;
      return std::exp(-(2.0 * m * m + y) / (2.0 * sigv) + a) * bessel_i0_scaled(a) / (2.0 * sigv);
    }
  }
  return 0.0;
}

std::string Law::name() const {
  switch (kind) {
    case LawKind::Exponential: return "exponential";
    case LawKind::SquaredHoyt: return "squared_hoyt";
    case LawKind::SquaredRice: return "squared_rice";
  }
  return "unknown";
}

GofReport gof_stationary(const std::vector<double>& samples, const Law& law, double alpha) {
  if (samples.empty()) throw ConfigError("gof_stationary: empty sample");
  std::vector<double> s(samples);
  std::sort(s.begin(), s.end());
  const double n = double(s.size());
  double d = 0.0, cdf = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double y = std::max(s[k], 0.0);
    if (law.kind == LawKind::Exponential) {
      cdf = law_cdf_closed(law, y);
    } else {
      cdf = std::min(1.0, cdf + integrate_fixed(law, prev, y));
      prev = y;
    }
    d = std::max({d, std::fabs(double(k + 1) / n - cdf), std::fabs(cdf - double(k) / n)});
  }
  GofReport r;
  r.test = "ks_" + law.name();
  r.statistic = d;
  r.threshold = ks_critical_one_sample(s.size(), alpha);
  r.n = s.size();
  r.pass = d <= r.threshold;
  return r;
}

GofReport ks_report(const std::string& test, const std::vector<double>& a, const std::vector<double>& b,
                    double alpha) {
  GofReport r;
  r.test = test;
  r.statistic = ks_two_sample(a, b);
  r.threshold = ks_critical_two_sample(a.size(), b.size(), alpha);
  r.n = a.size();
  r.m = b.size();
  r.pass = r.statistic <= r.threshold;
  return r;
}

GofReport chi_square_gof(const Histogram& h, const Law& law, double alpha) {
  if (h.total == 0) throw ConfigError("chi_square_gof: empty histogram");
  const std::size_t bins = h.counts.size();
  // expected mass per bin; the last bin also takes the tail beyond hi
  std::vector<double> expect(bins);
  for (std::size_t b = 0; b < bins; ++b) expect[b] = integrate_fixed(law, h.edges[b], h.edges[b + 1]);
  const double below = integrate_fixed(law, 0.0, h.edges[0]);
  const double inside = std::accumulate(expect.begin(), expect.end(), 0.0);
  expect.back() += std::max(0.0, 1.0 - below - inside);
  expect.front() += below;
  double stat = 0.0, obs_acc = 0.0, exp_acc = 0.0;
  int cells = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    obs_acc += double(h.counts[b]);
    exp_acc += expect[b] * double(h.total);
    if (exp_acc >= 5.0 || b + 1 == bins) {
      if (exp_acc > 0.0) {
        stat += (obs_acc - exp_acc) * (obs_acc - exp_acc) / exp_acc;
        ++cells;
      }
      obs_acc = exp_acc = 0.0;
    }
  }
  GofReport r;
  r.test = "chi2_" + law.name();
  r.statistic = stat;
  const boost::math::chi_squared dist(std::max(1, cells - 1));
  r.threshold = boost::math::quantile(boost::math::complement(dist, alpha));
  r.n = h.total;
  r.pass = stat <= r.threshold;
  return r;
}

void write_gof_csv(const std::string& path, const std::vector<GofReport>& rows) {
  CsvWriter csv(path, {"test", "statistic", "threshold", "n", "m", "pass", "seed"});
  for (const auto& r : rows) {
    csv.row(r.test, r.statistic, r.threshold, r.n, r.m, r.pass ? "true" : "false", r.seed);
  }
}

}  // namespace fadesim
