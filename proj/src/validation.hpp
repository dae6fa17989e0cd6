#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fade_duration_mc.hpp"

namespace fadesim {

// sup |F_a - F_b| over the pooled sample.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic Kolmogorov critical values at significance alpha.
double ks_critical_one_sample(std::uint64_t n, double alpha);
double ks_critical_two_sample(std::uint64_t n, std::uint64_t m, double alpha);

enum class LawKind { Exponential, SquaredHoyt, SquaredRice };

// Laws of the square envelope R at one time.
struct Law {
  LawKind kind = LawKind::Exponential;
  double mean = 1.0;             // Exponential
  double s1v = 0.0, s2v = 0.0;   // SquaredHoyt: component variances
  double m = 0.0, sigv = 0.0;    // SquaredRice: common component mean and variance

  static Law exponential(double mean);
  static Law squared_hoyt(double s1v, double s2v);
  static Law squared_rice(double m, double sigv);
  static Law parse(const std::string& tag);  // "exponential" | "squared_hoyt" | "squared_rice"

  double pdf(double y) const;
  std::string name() const;
};

struct GofReport {
  std::string test;
  double statistic = 0.0;
  double threshold = 0.0;
  std::uint64_t n = 0;
  std::uint64_t m = 0;  // second sample size; 0 for one-sample tests
  bool pass = false;
  std::uint64_t seed = 0;
};

// One-sample KS against the law's CDF (closed form or cumulative quadrature).
GofReport gof_stationary(const std::vector<double>& samples, const Law& law, double alpha = 0.01);

GofReport ks_report(const std::string& test, const std::vector<double>& a, const std::vector<double>& b,
                    double alpha = 0.01);

// Pearson chi-square of a histogram against the law, pooling bins with expected
// count < 5; critical value from the chi-square quantile.
GofReport chi_square_gof(const Histogram& h, const Law& law, double alpha = 0.01);

void write_gof_csv(const std::string& path, const std::vector<GofReport>& rows);

}  // namespace fadesim
