#pragma once

#include <cmath>

namespace fadesim {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  void scale(double f) {
    sum_ *= f;
    comp_ *= f;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Sum of e^{l_k} and e^{2 l_k} over log-weights l_k, kept relative to the running max.
class LogWeightSum {
 public:
  void add(double l) {
    if (l == -INFINITY) return;
    rebase(l);
    const double e = std::exp(l - max_);
    s1_.add(e);
    s2_.add(e * e);
    ++count_;
  }
  void merge(const LogWeightSum& o) {
    if (o.count_ == 0) return;
    rebase(o.max_);
    const double f = std::exp(o.max_ - max_);
    s1_.add(o.s1_.value() * f);
    s2_.add(o.s2_.value() * f * f);
    count_ += o.count_;
  }
  double sum() const { return count_ ? s1_.value() * std::exp(max_) : 0.0; }
  double sum_sq() const { return count_ ? s2_.value() * std::exp(2.0 * max_) : 0.0; }
  double max_log() const { return max_; }
  long long count() const { return count_; }

 private:
  void rebase(double l) {
    if (count_ == 0) {
      max_ = l;
    } else if (l > max_) {
      const double f = std::exp(max_ - l);
      s1_.scale(f);
      s2_.scale(f * f);
      max_ = l;
    }
  }

  double max_ = -INFINITY;
  CompensatedSum s1_, s2_;
  long long count_ = 0;
};

}  // namespace fadesim
