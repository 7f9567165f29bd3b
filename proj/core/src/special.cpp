#include "esbm/special.hpp"

#include <algorithm>
#include <cmath>

namespace esbm {

double log_rising(double a, long n) {
  if (n == 0) return 0.0;
  // The lgamma difference cancels badly once a dominates n.
  if (n <= 256 || a > 1e4 * static_cast<double>(n)) {
    double out = 0.0;
    for (long i = 0; i < n; ++i) out += std::log(a + static_cast<double>(i));
    return out;
  }
  return std::lgamma(a + static_cast<double>(n)) - std::lgamma(a);
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kLogZero;
  const double top = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double x : values) sum += std::exp(x - top);
  return top + std::log(sum);
}

double log_add_exp(double x, double y) {
  if (x < y) std::swap(x, y);
  if (!std::isfinite(y)) return x;
  return x + std::log1p(std::exp(y - x));
}

SignedLog SignedLog::from(double x) {
  if (x == 0.0) return {};
  return {std::log(std::fabs(x)), x > 0 ? 1 : -1};
}

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

SignedLog operator+(SignedLog x, SignedLog y) {
  if (x.sign == 0) return y;
  if (y.sign == 0) return x;
  if (x.log_abs < y.log_abs) std::swap(x, y);
  const double ratio = std::exp(y.log_abs - x.log_abs);
  if (x.sign == y.sign) return {x.log_abs + std::log1p(ratio), x.sign};
  if (ratio == 1.0) return {};
  return {x.log_abs + std::log1p(-ratio), x.sign};
}

SignedLog operator*(SignedLog x, SignedLog y) {
  if (x.sign == 0 || y.sign == 0) return {};
  return {x.log_abs + y.log_abs, x.sign * y.sign};
}

LogBetaTable::LogBetaTable(double a, double b, std::size_t capacity)
    : alpha_(a), beta_(b), a_(capacity), b_(capacity), sum_(capacity) {
  for (std::size_t i = 0; i < capacity; ++i) {
    const auto x = static_cast<double>(i);
    a_[i] = std::lgamma(a + x);
    b_[i] = std::lgamma(b + x);
    sum_[i] = std::lgamma(a + b + x);
  }
}

double LogBetaTable::slow(long edges, long non_edges) const {
  // Same association as the tabulated path so both agree bit for bit.
  return std::lgamma(alpha_ + static_cast<double>(edges)) + std::lgamma(beta_ + static_cast<double>(non_edges)) -
         std::lgamma(alpha_ + beta_ + static_cast<double>(edges + non_edges));
}

}  // namespace esbm
