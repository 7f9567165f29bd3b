#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace esbm {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// log of the ascending factorial (a)_n = a (a+1) ... (a+n-1), for a > 0.
double log_rising(double a, long n);

double log_beta(double a, double b);

double log_sum_exp(std::span<const double> values);
double log_add_exp(double x, double y);

/// Sign-tracked logarithm, used where intermediate quantities may be negative.
struct SignedLog {
  double log_abs = kLogZero;
  int sign = 0;

  static SignedLog from(double x);
  double value() const;
};

SignedLog operator+(SignedLog x, SignedLog y);
SignedLog operator*(SignedLog x, SignedLog y);

/// log B(a + m, b + mbar) for integer tallies, tabulated up to a capacity and
/// evaluated with lgamma beyond it.
class LogBetaTable {
 public:
  LogBetaTable(double a, double b, std::size_t capacity);

  double operator()(long edges, long non_edges) const {
    const auto total = static_cast<std::size_t>(edges + non_edges);
    if (total < sum_.size()) {
      return a_[static_cast<std::size_t>(edges)] +
             b_[static_cast<std::size_t>(non_edges)] - sum_[total];
    }
    return slow(edges, non_edges);
  }

  double a() const { return alpha_; }
  double b() const { return beta_; }

 private:
  double slow(long edges, long non_edges) const;

  double alpha_;
  double beta_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> sum_;
};

}  // namespace esbm
