#include "esbm/priors.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "esbm/error.hpp"

namespace esbm {

namespace {

std::string range_message(const char* name, double value, const char* range) {
  std::ostringstream os;
  os << name << "=" << value << " is outside " << range;
  return os.str();
}

double log_binomial(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

PriorSpec PriorSpec::dirichlet_multinomial(double beta, int max_clusters) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ValidationError(range_message("beta", beta, "(0, inf)"));
  if (max_clusters < 1) {
    throw ValidationError("Hbar=" + std::to_string(max_clusters) + " must be a positive integer");
  }
  PriorSpec p;
  p.kind_ = PriorKind::DirichletMultinomial;
  p.beta_ = beta;
  p.max_clusters_ = max_clusters;
  p.sigma_ = -beta;
  return p;
}

PriorSpec PriorSpec::dirichlet_process(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError(range_message("alpha", alpha, "(0, inf)"));
  PriorSpec p;
  p.kind_ = PriorKind::DirichletProcess;
  p.alpha_ = alpha;
  p.sigma_ = 0.0;
  return p;
}

PriorSpec PriorSpec::pitman_yor(double sigma, double alpha) {
  if (!(sigma >= 0.0 && sigma < 1.0)) throw ValidationError(range_message("sigma", sigma, "[0, 1)"));
  if (!(alpha > -sigma) || !std::isfinite(alpha)) {
    throw ValidationError(range_message("alpha", alpha, "(-sigma, inf)"));
  }
  PriorSpec p;
  p.kind_ = PriorKind::PitmanYor;
  p.alpha_ = alpha;
  p.sigma_ = sigma;
  return p;
}

PriorSpec PriorSpec::gnedin(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError(range_message("gamma", gamma, "(0, 1)"));
  PriorSpec p;
  p.kind_ = PriorKind::Gnedin;
  p.gamma_ = gamma;
  p.sigma_ = -1.0;
  return p;
}

double PriorSpec::log_weight(long n, long k) const {
  if (n < 1 || k < 1 || k > n) return kLogZero;
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  switch (kind_) {
    case PriorKind::DirichletMultinomial: {
      if (k > max_clusters_) return kLogZero;
      const auto hbar = static_cast<double>(max_clusters_);
      return (kd - 1.0) * std::log(beta_) + std::lgamma(hbar) - std::lgamma(hbar - kd + 1.0) -
             log_rising(beta_ * hbar + 1.0, n - 1);
    }
    case PriorKind::DirichletProcess:
      return kd * std::log(alpha_) - log_rising(alpha_, n);
    case PriorKind::PitmanYor: {
      double prod = 0.0;
      if (sigma_ == 0.0) {
        prod = (kd - 1.0) * std::log(alpha_);
      } else {
        const double ratio = alpha_ / sigma_;
        prod = (kd - 1.0) * std::log(sigma_) + log_rising(ratio + 1.0, k - 1);
      }
      return prod - log_rising(alpha_ + 1.0, n - 1);
    }
    case PriorKind::Gnedin:
      return log_rising(gamma_, n - k) + std::lgamma(kd) + std::lgamma(kd - gamma_) -
             std::lgamma(1.0 - gamma_) - std::lgamma(nd) - std::lgamma(nd + gamma_) +
             std::lgamma(1.0 + gamma_);
  }
  return kLogZero;
}

double PriorSpec::log_join_weight(std::size_t cluster_size, std::size_t nodes, std::size_t clusters) const {
  const auto n = static_cast<double>(cluster_size);
  switch (kind_) {
    case PriorKind::DirichletMultinomial:
      return std::log(n + beta_);
    case PriorKind::DirichletProcess:
      return std::log(n);
    case PriorKind::PitmanYor:
      return std::log(n - sigma_);
    case PriorKind::Gnedin:
      return std::log(n + 1.0) +
             std::log(static_cast<double>(nodes) - static_cast<double>(clusters) + gamma_);
  }
  return kLogZero;
}

double PriorSpec::log_new_weight(std::size_t nodes, std::size_t clusters) const {
  (void)nodes;
  if (clusters == 0) return 0.0;
  const auto h = static_cast<double>(clusters);
  switch (kind_) {
    case PriorKind::DirichletMultinomial:
      if (clusters >= static_cast<std::size_t>(max_clusters_)) return kLogZero;
      return std::log(beta_ * (static_cast<double>(max_clusters_) - h));
    case PriorKind::DirichletProcess:
      return std::log(alpha_);
    case PriorKind::PitmanYor:
      return std::log(alpha_ + h * sigma_);
    case PriorKind::Gnedin:
      return std::log(h * h - h * gamma_);
  }
  return kLogZero;
}

std::string PriorSpec::name() const {
  switch (kind_) {
    case PriorKind::DirichletMultinomial: return "dm";
    case PriorKind::DirichletProcess: return "dp";
    case PriorKind::PitmanYor: return "py";
    case PriorKind::Gnedin: return "gn";
  }
  return "?";
}

std::string PriorSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case PriorKind::DirichletMultinomial: os << "dm(beta=" << beta_ << ", Hbar=" << max_clusters_ << ")"; break;
    case PriorKind::DirichletProcess: os << "dp(alpha=" << alpha_ << ")"; break;
    case PriorKind::PitmanYor: os << "py(sigma=" << sigma_ << ", alpha=" << alpha_ << ")"; break;
    case PriorKind::Gnedin: os << "gn(gamma=" << gamma_ << ")"; break;
  }
  return os.str();
}

double log_eppf(const PriorSpec& prior, std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw ValidationError("EPPF needs at least one cluster");
  long total = 0;
  double log_p = 0.0;
  const double shifted = 1.0 - prior.discount();
  for (auto n : sizes) {
    if (n == 0) throw ValidationError("EPPF cluster sizes must be positive");
    total += static_cast<long>(n);
    log_p += log_rising(shifted, static_cast<long>(n) - 1);
  }
  const double w = prior.log_weight(total, static_cast<long>(sizes.size()));
  if (w == kLogZero) return kLogZero;
  return w + log_p;
}

double log_urn_weight(const PriorSpec& prior, std::size_t h, std::span<const std::size_t> sizes) {
  const std::size_t nodes = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (h > sizes.size()) {
    throw ValidationError("urn target " + std::to_string(h) + " exceeds H=" + std::to_string(sizes.size()));
  }
  if (h == sizes.size()) return prior.log_new_weight(nodes, sizes.size());
  return prior.log_join_weight(sizes[h], nodes, sizes.size());
}

std::vector<SignedLog> generalized_factorial_row(std::size_t n, double sigma) {
  std::vector<SignedLog> row(n + 1);
  row[0] = SignedLog::from(1.0);
  const SignedLog s = SignedLog::from(sigma);
  for (std::size_t m = 0; m < n; ++m) {
    // C(m+1, k) = sigma C(m, k-1) + (m - k sigma) C(m, k), updated in place from high k.
    for (std::size_t k = m + 1; k >= 1; --k) {
      const SignedLog keep = k <= m ? SignedLog::from(static_cast<double>(m) - static_cast<double>(k) * sigma) * row[k]
                                    : SignedLog{};
      row[k] = s * row[k - 1] + keep;
    }
    row[0] = SignedLog{};
  }
  return row;
}

std::vector<double> log_stirling_first_row(std::size_t n) {
  std::vector<double> row(n + 1, kLogZero);
  row[0] = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    // |s(m+1, k)| = m |s(m, k)| + |s(m, k-1)|
    for (std::size_t k = m + 1; k >= 1; --k) {
      const double keep = (k <= m && m > 0) ? std::log(static_cast<double>(m)) + row[k] : kLogZero;
      row[k] = log_add_exp(row[k - 1], keep);
    }
    row[0] = kLogZero;
  }
  return row;
}

double gn_population_pmf(double gamma, long h) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError(range_message("gamma", gamma, "(0, 1)"));
  if (h < 1) throw ValidationError("population cluster count must be >= 1");
  return std::exp(std::log(gamma) + log_rising(1.0 - gamma, h - 1) - std::lgamma(static_cast<double>(h) + 1.0));
}

namespace {

HDistribution finish(std::vector<double> log_pmf) {
  HDistribution out;
  out.pmf.resize(log_pmf.size());
  double total = 0.0;
  for (std::size_t i = 0; i < log_pmf.size(); ++i) {
    out.pmf[i] = std::exp(log_pmf[i]);
    total += out.pmf[i];
    out.mean += static_cast<double>(i + 1) * out.pmf[i];
  }
  if (!(std::fabs(total - 1.0) <= 1e-10)) {
    std::ostringstream os;
    os.precision(17);
    os << "internal error: prior on H sums to " << total;
    throw std::runtime_error(os.str());
  }
  return out;
}

}  // namespace

HDistribution gnedin_h_distribution(double gamma, std::size_t nodes) {
  if (nodes == 0) throw ValidationError("V must be >= 1");
  std::vector<double> log_pmf(nodes);
  const auto v = static_cast<long>(nodes);
  for (long h = 1; h <= v; ++h) {
    log_pmf[static_cast<std::size_t>(h - 1)] =
        log_binomial(nodes, static_cast<std::size_t>(h)) + log_rising(1.0 - gamma, h - 1) +
        log_rising(gamma, v - h) - log_rising(1.0 + gamma, v - 1);
  }
  return finish(std::move(log_pmf));
}

HDistribution h_distribution(const PriorSpec& prior, std::size_t nodes) {
  if (nodes == 0) throw ValidationError("V must be >= 1");
  const auto v = static_cast<long>(nodes);
  const double sigma = prior.discount();
  std::vector<double> log_pmf(nodes, kLogZero);
  if (sigma == 0.0) {
    const auto stirling = log_stirling_first_row(nodes);
    for (long h = 1; h <= v; ++h) {
      const double w = prior.log_weight(v, h);
      if (w != kLogZero) log_pmf[static_cast<std::size_t>(h - 1)] = w + stirling[static_cast<std::size_t>(h)];
    }
  } else {
    const auto coeff = generalized_factorial_row(nodes, sigma);
    const double log_abs_sigma = std::log(std::fabs(sigma));
    const int sigma_sign = sigma > 0 ? 1 : -1;
    for (long h = 1; h <= v; ++h) {
      const double w = prior.log_weight(v, h);
      const SignedLog& c = coeff[static_cast<std::size_t>(h)];
      if (w == kLogZero || c.sign == 0) continue;
      const int sign = c.sign * ((h % 2 == 0) ? 1 : sigma_sign);
      if (sign < 0) throw std::runtime_error("internal error: negative mass in prior on H");
      log_pmf[static_cast<std::size_t>(h - 1)] = w + c.log_abs - static_cast<double>(h) * log_abs_sigma;
    }
  }
  HDistribution out = finish(std::move(log_pmf));
  if (prior.kind() == PriorKind::Gnedin) {
    const HDistribution closed = gnedin_h_distribution(prior.gamma(), nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      if (std::fabs(closed.pmf[i] - out.pmf[i]) > 1e-8) {
        throw std::runtime_error("internal error: Gnedin prior on H disagrees with its closed form at h=" +
                                 std::to_string(i + 1));
      }
    }
  }
  return out;
}

PriorSpec elicit_prior(const PriorSpec& base, double target_mean, std::size_t nodes) {
  if (!(target_mean >= 1.0 && target_mean <= static_cast<double>(nodes))) {
    throw ValidationError("target E[H]=" + std::to_string(target_mean) + " is outside [1, V]");
  }
  // Parameterize each free hyperparameter by t in [lo, hi].
  std::function<PriorSpec(double)> make;
  double lo = 0.0, hi = 0.0;
  switch (base.kind()) {
    case PriorKind::DirichletProcess:
      make = [](double t) { return PriorSpec::dirichlet_process(std::exp(t)); };
      lo = std::log(1e-8);
      hi = std::log(1e8);
      break;
    case PriorKind::PitmanYor: {
      const double sigma = base.discount();
      make = [sigma](double t) { return PriorSpec::pitman_yor(sigma, -sigma + std::exp(t)); };
      lo = std::log(1e-10);
      hi = std::log(1e8);
      break;
    }
    case PriorKind::DirichletMultinomial: {
      const int hbar = base.max_clusters();
      if (target_mean > static_cast<double>(hbar)) {
        throw ValidationError("target E[H] exceeds Hbar=" + std::to_string(hbar));
      }
      make = [hbar](double t) { return PriorSpec::dirichlet_multinomial(std::exp(t), hbar); };
      lo = std::log(1e-8);
      hi = std::log(1e8);
      break;
    }
    case PriorKind::Gnedin:
      make = [](double t) { return PriorSpec::gnedin(t); };
      lo = 1e-9;
      hi = 1.0 - 1e-9;
      break;
  }
  const auto mean_at = [&](double t) { return h_distribution(make(t), nodes).mean; };
  double f_lo = mean_at(lo) - target_mean;
  const double f_hi = mean_at(hi) - target_mean;
  if (f_lo * f_hi > 0.0) {
    throw ValidationError("target E[H]=" + std::to_string(target_mean) + " is not attainable for " +
                          base.name() + " with V=" + std::to_string(nodes));
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = mean_at(mid) - target_mean;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return make(0.5 * (lo + hi));
}

}  // namespace esbm
