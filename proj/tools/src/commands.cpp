#include "commands.hpp"

#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "esbm/error.hpp"
#include "esbm/inference.hpp"
#include "esbm/io.hpp"
#include "esbm/prediction.hpp"
#include "esbm/simulation.hpp"
#include "esbm_cli/cli.hpp"
#include "manifest.hpp"

namespace esbm::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path directory_of(const fs::path& path) { return path.has_parent_path() ? path.parent_path() : fs::path("."); }

double require(const std::optional<double>& value, const char* flag, const std::string& prior) {
  if (!value) throw ValidationError(std::string(flag) + " is required for --prior " + prior);
  return *value;
}

nlohmann::ordered_json prior_json(const PriorFlags& flags) {
  nlohmann::ordered_json j;
  j["prior"] = flags.prior;
  if (flags.beta) j["beta"] = *flags.beta;
  if (flags.hbar) j["Hbar"] = *flags.hbar;
  if (flags.alpha) j["alpha"] = *flags.alpha;
  if (flags.sigma) j["sigma"] = *flags.sigma;
  if (flags.gamma) j["gamma"] = *flags.gamma;
  return j;
}

std::vector<double> cluster_count_series(const TraceStore& trace) {
  std::vector<double> series;
  series.reserve(trace.size());
  for (const auto& sample : trace.samples) series.push_back(static_cast<double>(sample.clusters()));
  return series;
}

fs::path chain_path(const fs::path& out, std::size_t chain, std::size_t chains) {
  if (chains == 1) return out;
  fs::path path = out;
  path.replace_filename(out.stem().string() + ".chain" + std::to_string(chain + 1) + out.extension().string());
  return path;
}

}  // namespace

PriorSpec prior_from_flags(const PriorFlags& flags) {
  const std::string& p = flags.prior;
  if (p == "dm") {
    if (!flags.hbar) throw ValidationError("--Hbar is required for --prior dm");
    return PriorSpec::dirichlet_multinomial(require(flags.beta, "--beta", p), *flags.hbar);
  }
  if (p == "dp") return PriorSpec::dirichlet_process(require(flags.alpha, "--alpha", p));
  if (p == "py") return PriorSpec::pitman_yor(require(flags.sigma, "--sigma", p), require(flags.alpha, "--alpha", p));
  if (p == "gn") return PriorSpec::gnedin(require(flags.gamma, "--gamma", p));
  throw ValidationError("unknown prior '" + p + "' (expected dm, dp, py or gn)");
}

LikelihoodSpec likelihood_from_flags(const LikelihoodFlags& flags) {
  LikelihoodSpec lik{flags.a, flags.b};
  lik.validate();
  return lik;
}

void run_simulate(const SimulateOptions& options, std::ostream& out) {
  const auto start = Clock::now();
  GeneratorSpec spec = preset(options.preset, options.seed);
  if (!options.sizes.empty()) {
    if (options.sizes.size() != spec.groups()) {
      throw ValidationError("--sizes needs " + std::to_string(spec.groups()) + " values for preset " + options.preset);
    }
    spec.sizes = options.sizes;
  }
  if (options.holdout > 0 && (options.out_holdout_edges.empty() || options.out_holdout_truth.empty())) {
    throw ValidationError("--holdout requires --out-holdout-edges and --out-holdout-truth");
  }
  const SimulatedNetwork sim = generate(spec);
  write_edge_list(options.out_edges, sim.network);
  write_partition(options.out_truth, sim.truth);

  RunManifest run;
  run.subcommand = "simulate";
  run.parameters = {{"preset", options.preset}, {"sizes", spec.sizes}, {"theta", spec.theta}};
  run.seed = options.seed;
  run.artifacts = {options.out_edges, options.out_truth};

  if (options.holdout > 0) {
    const std::uint64_t holdout_seed = options.holdout_seed.value_or(options.seed + 1);
    const HoldoutNodes nodes = generate_holdout(spec, options.holdout, options.unseen_fraction, holdout_seed);
    const std::size_t existing = spec.nodes();
    const fs::path edges_path = options.out_holdout_edges;
    const fs::path truth_path = options.out_holdout_truth;
    auto edges_out = open_output(edges_path);
    auto truth_out = open_output(truth_path);
    for (std::size_t i = 0; i < nodes.edges.size(); ++i) {
      const std::size_t id = existing + i + 1;
      for (std::size_t u = 0; u < existing; ++u) {
        if (nodes.edges[i][u]) edges_out << id << ',' << u + 1 << '\n';
      }
      truth_out << id << ',' << nodes.groups[i] + 1 << '\n';
    }
    finish_output(edges_out, edges_path);
    finish_output(truth_out, truth_path);
    run.parameters["holdout"] = options.holdout;
    run.parameters["unseen_fraction"] = options.unseen_fraction;
    run.parameters["holdout_seed"] = holdout_seed;
    run.artifacts.push_back(edges_path);
    run.artifacts.push_back(truth_path);
  }
  run.seconds = seconds_since(start);
  append_manifest(directory_of(options.out_edges), run);
  out << "simulated " << spec.nodes() << " nodes, " << sim.network.edge_count() << " edges, "
      << spec.groups() << " groups\n";
}

void run_fit(const FitOptions& options, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  const PriorSpec prior = prior_from_flags(options.prior);
  const LikelihoodSpec lik = likelihood_from_flags(options.lik);
  if (options.chains == 0) throw ValidationError("--chains must be positive");

  SamplerConfig config;
  config.sweeps = options.sweeps;
  config.burn_in = options.burn_in;
  config.thin = options.thin;
  config.seed = options.seed;
  if (options.init == "singletons") {
    config.init = InitMode::Singletons;
  } else if (options.init == "one") {
    config.init = InitMode::AllInOne;
  } else {
    throw ValidationError("unknown --init '" + options.init + "' (expected singletons or one)");
  }
  config.interrupt = &interrupt_flag();
  config.validate();

  const Network net = read_edge_list(options.network, options.nodes);
  std::optional<AttributeFile> attributes;
  std::optional<Supervision> supervision;
  if (!options.attributes.empty()) {
    attributes = read_attributes(options.attributes, net.size());
    supervision = Supervision{&attributes->table,
                              CohesionSpec::uniform(attributes->table.categories(), options.cohesion_alpha)};
  }

  std::vector<TraceStore> traces(options.chains);
  std::vector<ChainStats> stats(options.chains);
  std::vector<std::exception_ptr> failures(options.chains);
  auto work = [&](std::size_t i) {
    try {
      SamplerConfig chain = config;
      chain.seed = config.seed + i;
      traces[i] = run_chain(net, prior, lik, supervision ? &*supervision : nullptr, chain, &stats[i]);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };
  if (options.chains == 1) {
    work(0);
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < options.chains; ++i) threads.emplace_back(work, i);
  }
  for (auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  RunManifest run;
  run.subcommand = "fit";
  run.parameters = prior_json(options.prior);
  run.parameters["resolved_prior"] = prior.describe();
  run.parameters["a"] = lik.a;
  run.parameters["b"] = lik.b;
  run.parameters["sweeps"] = config.sweeps;
  run.parameters["burnin"] = config.burn_in;
  run.parameters["thin"] = config.thin;
  run.parameters["init"] = options.init;
  run.parameters["chains"] = options.chains;
  run.parameters["nodes"] = net.size();
  run.parameters["supervised"] = supervision.has_value();
  if (supervision) run.parameters["cohesion_alpha"] = options.cohesion_alpha;
  run.seed = config.seed;
  run.inputs.push_back(options.network);
  if (attributes) run.inputs.push_back(options.attributes);
  run.diagnostics = nlohmann::ordered_json::array();

  const fs::path out_path = options.out;
  double total_sweeps = 0.0;
  double total_seconds = 0.0;
  for (std::size_t i = 0; i < options.chains; ++i) {
    const fs::path path = chain_path(out_path, i, options.chains);
    write_trace(path, traces[i]);
    run.artifacts.push_back(path);
    const double rate = stats[i].seconds > 0.0 ? static_cast<double>(stats[i].sweeps_done) / stats[i].seconds : 0.0;
    total_sweeps += static_cast<double>(stats[i].sweeps_done);
    total_seconds += stats[i].seconds;

    nlohmann::ordered_json diag;
    diag["chain"] = i + 1;
    diag["seed"] = config.seed + i;
    diag["sweeps_done"] = stats[i].sweeps_done;
    diag["samples"] = traces[i].size();
    diag["sweeps_per_second"] = rate;
    diag["saturated_proposals"] = stats[i].saturated_proposals;
    diag["meta"] = traces[i].meta;
    out << "chain " << i + 1 << ": " << traces[i].size() << " samples, " << format_number(rate) << " sweeps/s";
    if (traces[i].size() >= 4) {
      const auto h = cluster_count_series(traces[i]);
      const double ess_ll = effective_sample_size(traces[i].loglik);
      const double ess_h = effective_sample_size(h);
      diag["ess_loglik"] = ess_ll;
      diag["ess_clusters"] = ess_h;
      out << ", ESS(loglik) " << format_number(ess_ll) << ", ESS(H) " << format_number(ess_h);
      if (traces[i].size() >= 20) {
        const double z = geweke_z(traces[i].loglik);
        diag["geweke_z_loglik"] = z;
        out << ", Geweke z " << format_number(z, 3);
      }
    }
    out << '\n';
    if (stats[i].saturated_proposals > 0) {
      err << "note: chain " << i + 1 << " reached the maximum number of clusters; "
          << stats[i].saturated_proposals << " new-cluster proposals had zero weight\n";
    }
    if (stats[i].sweeps_done < config.sweeps) {
      err << "warning: chain " << i + 1 << " interrupted after " << stats[i].sweeps_done << " sweeps\n";
    }
    run.diagnostics.push_back(std::move(diag));
  }

  if (attributes) {
    fs::path sidecar = out_path;
    sidecar += ".categories.csv";
    auto side = open_output(sidecar);
    for (std::size_t c = 0; c < attributes->category_names.size(); ++c) {
      side << c + 1 << ',' << attributes->category_names[c] << '\n';
    }
    finish_output(side, sidecar);
    run.artifacts.push_back(sidecar);
  }
  run.seconds = seconds_since(start);
  if (total_seconds > 0.0) run.sweeps_per_second = total_sweeps / total_seconds;
  append_manifest(directory_of(out_path), run);
}

void run_summarize(const SummarizeOptions& options, std::ostream& out, std::ostream& err) {
  const auto start = Clock::now();
  if (!(options.level > 0.0 && options.level < 1.0)) throw ValidationError("--level must lie in (0, 1)");
  const LikelihoodSpec lik = likelihood_from_flags(options.lik);
  const TraceStore trace = read_trace(fs::path(options.trace));
  if (trace.size() == 0) throw ValidationError("trace " + options.trace + " holds no samples");
  std::optional<Network> net;
  if (!options.network.empty()) {
    net = read_edge_list(options.network, options.nodes.value_or(trace.nodes));
    if (net->size() != trace.nodes) throw ValidationError("network and trace have different numbers of nodes");
  }

  const PointEstimate estimate = point_estimate(trace);
  const CredibleBall ball = credible_ball(trace, estimate.partition, options.level);
  const SimilarityMatrix similarity = similarity_matrix(trace);
  const ClusterCountSummary quartiles = cluster_count_quartiles(trace);
  const HarmonicMeanEstimate marginal = log_harmonic_marginal(trace);

  const std::string prefix = options.out_prefix;
  const fs::path point_path = prefix + "_point.csv";
  const fs::path bound_path = prefix + "_bound.csv";
  const fs::path similarity_path = prefix + "_similarity.csv";
  const fs::path report_path = prefix + "_report.txt";
  write_partition(point_path, estimate.partition);
  write_partition(bound_path, ball.bound);
  {
    auto sim = open_output(similarity_path);
    for (std::size_t v = 0; v < similarity.nodes; ++v) {
      for (std::size_t u = 0; u < similarity.nodes; ++u) {
        if (u > 0) sim << ',';
        sim << format_number(similarity(v, u));
      }
      sim << '\n';
    }
    finish_output(sim, similarity_path);
  }

  std::ostringstream report;
  report << "samples: " << trace.size() << '\n';
  report << "nodes: " << trace.nodes << '\n';
  report << "point estimate clusters: " << estimate.partition.clusters() << '\n';
  report << "point estimate expected VI: " << format_number(estimate.objective) << '\n';
  report << "posterior H quartiles: " << format_number(quartiles.q1) << ' ' << format_number(quartiles.median) << ' '
         << format_number(quartiles.q3) << '\n';
  report << "credible ball level: " << format_number(ball.level) << '\n';
  report << "credible ball radius: " << format_number(ball.radius) << '\n';
  report << "credible bound clusters: " << ball.bound.clusters() << '\n';
  report << "VI(point, bound): " << format_number(vi(estimate.partition, ball.bound)) << '\n';
  report << "credible bound tie broken: " << (ball.tie_broken ? "yes" : "no") << '\n';
  if (net) {
    report << "deviance: " << format_number(deviance(*net, estimate.partition, lik)) << '\n';
    report << "edge misclassification: " << format_number(misclassification(*net, estimate.partition, lik)) << '\n';
  }
  report << "log marginal likelihood (harmonic mean): " << format_number(marginal.log_marginal) << " (se "
         << format_number(marginal.standard_error) << ")\n";
  if (marginal.unstable) {
    report << "warning: harmonic-mean estimate unstable, top 1% of samples carry "
           << format_number(marginal.top_share, 3) << " of the weight\n";
  }
  {
    auto rep = open_output(report_path);
    rep << report.str();
    finish_output(rep, report_path);
  }
  out << report.str();

  RunManifest run;
  run.subcommand = "summarize";
  run.parameters = {{"level", options.level}, {"a", lik.a}, {"b", lik.b}, {"out_prefix", prefix}};
  run.inputs.push_back(options.trace);
  if (net) run.inputs.push_back(options.network);
  run.artifacts = {point_path, bound_path, similarity_path, report_path};
  run.seconds = seconds_since(start);
  run.diagnostics = {{"candidates_evaluated", estimate.candidates_evaluated}, {"greedy_passes", estimate.greedy_passes}};
  append_manifest(directory_of(report_path), run);
  if (marginal.unstable) err << "warning: harmonic-mean estimate is dominated by a few samples\n";
}

void run_predict(const PredictOptions& options, std::ostream& out) {
  const auto start = Clock::now();
  const PriorSpec prior = prior_from_flags(options.prior);
  const LikelihoodSpec lik = likelihood_from_flags(options.lik);
  const TraceStore trace = read_trace(fs::path(options.trace));
  if (trace.size() == 0) throw ValidationError("trace " + options.trace + " holds no samples");
  const Network net = read_edge_list(options.network, options.nodes.value_or(trace.nodes));
  if (net.size() != trace.nodes) throw ValidationError("network and trace have different numbers of nodes");
  const NewNodeEdges incoming = read_new_edges(options.new_edges, net.size());

  const Partition estimate = point_estimate(trace).partition;
  std::vector<std::vector<double>> probs(incoming.edges.size());
  {
    std::vector<std::jthread> workers;
    const std::size_t count = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
    std::vector<std::exception_ptr> failures(count);
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < probs.size(); i += count) {
            probs[i] = predict_membership(net, estimate, lik, prior, incoming.edges[i]);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    workers.clear();
    for (auto& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }
  }

  std::ostringstream table;
  table << "new_id";
  for (std::size_t h = 0; h < estimate.clusters(); ++h) table << ",cluster_" << h + 1;
  table << ",new\n";
  for (std::size_t i = 0; i < probs.size(); ++i) {
    table << incoming.ids[i];
    for (double p : probs[i]) table << ',' << format_number(p);
    table << '\n';
  }
  if (options.out.empty()) {
    out << table.str();
    return;
  }
  const fs::path path = options.out;
  auto file = open_output(path);
  file << table.str();
  finish_output(file, path);

  RunManifest run;
  run.subcommand = "predict";
  run.parameters = prior_json(options.prior);
  run.parameters["a"] = lik.a;
  run.parameters["b"] = lik.b;
  run.inputs = {options.network, options.trace, options.new_edges};
  run.artifacts = {path};
  run.seconds = seconds_since(start);
  append_manifest(directory_of(path), run);
}

void run_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
  const TraceStore a = read_trace(fs::path(options.trace_a));
  const TraceStore b = read_trace(fs::path(options.trace_b));
  if (a.size() == 0 || b.size() == 0) throw ValidationError("both traces must hold samples");
  const HarmonicMeanEstimate ma = log_harmonic_marginal(a);
  const HarmonicMeanEstimate mb = log_harmonic_marginal(b);
  const double two_log_b = log_bayes_factor(a, b);
  out << "log marginal a: " << format_number(ma.log_marginal) << " (se " << format_number(ma.standard_error) << ")\n";
  out << "log marginal b: " << format_number(mb.log_marginal) << " (se " << format_number(mb.standard_error) << ")\n";
  out << "2 log B: " << format_number(two_log_b) << '\n';
  out << "evidence: " << bayes_factor_evidence(two_log_b) << '\n';
  if (ma.unstable) err << "warning: harmonic-mean estimate of trace a is unstable\n";
  if (mb.unstable) err << "warning: harmonic-mean estimate of trace b is unstable\n";
}

void run_prior_expect(const PriorExpectOptions& options, std::ostream& out, std::ostream& err) {
  if (options.nodes == 0) throw ValidationError("--V must be positive");
  PriorSpec prior = prior_from_flags(options.prior);
  if (options.target_mean) {
    prior = elicit_prior(prior, *options.target_mean, options.nodes);
    err << "elicited " << prior.describe() << '\n';
  }
  const HDistribution dist = h_distribution(prior, options.nodes);
  out << "h,pr\n";
  for (std::size_t h = 0; h < dist.pmf.size(); ++h) out << h + 1 << ',' << format_number(dist.pmf[h]) << '\n';
  out << "mean," << format_number(dist.mean) << '\n';
}

}  // namespace esbm::cli
