#include "esbm/trace.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "esbm/error.hpp"
#include "esbm/io.hpp"

namespace esbm {

void TraceStore::push(Partition part, double ll) {
  samples.push_back(std::move(part));
  loglik.push_back(ll);
}

void TraceStore::validate() const {
  if (samples.size() != loglik.size()) throw ValidationError("trace has mismatched sample and log-likelihood counts");
  for (std::size_t t = 0; t < samples.size(); ++t) {
    if (samples[t].size() != nodes) {
      throw ValidationError("trace sample " + std::to_string(t + 1) + " has " + std::to_string(samples[t].size()) +
                            " labels, expected " + std::to_string(nodes));
    }
  }
}

void write_trace(std::ostream& out, const TraceStore& trace) {
  trace.validate();
  out << "V=" << trace.nodes << " T=" << trace.size() << '\n';
  std::string line;
  char buf[64];
  for (std::size_t t = 0; t < trace.size(); ++t) {
    line.clear();
    auto res = std::to_chars(buf, buf + sizeof(buf), trace.loglik[t], std::chars_format::general, 17);
    line.append(buf, res.ptr);
    for (int label : trace.samples[t].labels()) {
      line.push_back(' ');
      res = std::to_chars(buf, buf + sizeof(buf), label + 1);
      line.append(buf, res.ptr);
    }
    line.push_back('\n');
    out << line;
  }
}

void write_trace(const std::filesystem::path& path, const TraceStore& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open trace file for writing: " + path.string());
  write_trace(out, trace);
  if (!out) throw IoError("failed writing trace file: " + path.string());
}

namespace {

std::size_t header_field(const std::string& token, const char* key, std::size_t line) {
  const std::string prefix = std::string(key) + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw ValidationError("trace line " + std::to_string(line) + ": expected '" + prefix + "<n>' header");
  }
  const long value = parse_long(std::string_view(token).substr(prefix.size()), prefix);
  if (value < 0) throw ValidationError("trace header field " + prefix + " must be non-negative");
  return static_cast<std::size_t>(value);
}

}  // namespace

TraceStore read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("trace file is empty");
  std::istringstream header(line);
  std::string vtok, ttok;
  header >> vtok >> ttok;
  TraceStore trace;
  trace.nodes = header_field(vtok, "V", 1);
  const std::size_t expected = header_field(ttok, "T", 1);
  if (trace.nodes == 0) throw ValidationError("trace header declares V=0");
  trace.samples.reserve(expected);
  trace.loglik.reserve(expected);
  std::vector<int> labels(trace.nodes);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto skip = [&] {
      while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    };
    skip();
    double ll = 0.0;
    auto res = std::from_chars(p, end, ll);
    if (res.ec != std::errc()) {
      // from_chars rejects "inf"/"-inf" spellings on some libraries; handle them explicitly.
      const std::string_view rest(p, static_cast<std::size_t>(end - p));
      if (rest.rfind("-inf", 0) == 0) {
        ll = -INFINITY;
        res.ptr = p + 4;
      } else {
        throw ValidationError("trace line " + std::to_string(lineno) + ": bad log-likelihood");
      }
    }
    p = res.ptr;
    for (std::size_t v = 0; v < trace.nodes; ++v) {
      skip();
      int label = 0;
      auto r = std::from_chars(p, end, label);
      if (r.ec != std::errc() || label < 1) {
        throw ValidationError("trace line " + std::to_string(lineno) + ": expected " + std::to_string(trace.nodes) +
                              " positive 1-based labels");
      }
      labels[v] = label;
      p = r.ptr;
    }
    skip();
    if (p != end) throw ValidationError("trace line " + std::to_string(lineno) + ": trailing tokens");
    trace.push(Partition::from_labels(labels), ll);
  }
  if (trace.size() != expected) {
    throw ValidationError("trace header declares T=" + std::to_string(expected) + " but file holds " +
                          std::to_string(trace.size()) + " samples");
  }
  return trace;
}

TraceStore read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path.string());
  return read_trace(in);
}

double effective_sample_size(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 4) return static_cast<double>(n);
  const double mean = std::accumulate(chain.begin(), chain.end(), 0.0) / static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += (chain[i] - mean) * (chain[i + lag] - mean);
    return s / static_cast<double>(n);
  };
  const double var = autocov(0);
  if (!(var > 0.0)) return static_cast<double>(n);
  double sum = 0.0;  // sum over positive pair sums Gamma_m = g(2m) + g(2m+1)
  for (std::size_t m = 0; 2 * m + 1 < n / 2; ++m) {
    const double pair = autocov(2 * m) + autocov(2 * m + 1);
    if (pair <= 0.0) break;
    sum += pair;
  }
  const double tau = (2.0 * sum - var) / var;
  return static_cast<double>(n) / std::max(tau, 1e-12);
}

namespace {

void mean_and_batch_variance(std::span<const double> x, double& mean, double& var_of_mean) {
  const std::size_t n = x.size();
  mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const auto batch = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t batches = n / batch;
  if (batches < 2) {
    var_of_mean = 0.0;
    return;
  }
  double ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < batch; ++i) s += x[b * batch + i];
    const double d = s / static_cast<double>(batch) - mean;
    ss += d * d;
  }
  // Variance of a batch mean, scaled down to the variance of the full mean.
  var_of_mean = ss / static_cast<double>(batches - 1) * static_cast<double>(batch) / static_cast<double>(n);
}

}  // namespace

double geweke_z(std::span<const double> chain) {
  const std::size_t n = chain.size();
  if (n < 20) return 0.0;
  const std::size_t first = n / 10;
  const std::size_t last = n / 2;
  double ma = 0, va = 0, mb = 0, vb = 0;
  mean_and_batch_variance(chain.subspan(0, first), ma, va);
  mean_and_batch_variance(chain.subspan(n - last), mb, vb);
  const double denom = std::sqrt(va + vb);
  if (!(denom > 0.0)) return 0.0;
  return (ma - mb) / denom;
}

}  // namespace esbm
