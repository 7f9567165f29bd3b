#include "esbm_cli/cli.hpp"

#include <exception>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "esbm/error.hpp"

namespace esbm::cli {

std::atomic<bool>& interrupt_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

struct Options {
  SimulateOptions simulate;
  FitOptions fit;
  SummarizeOptions summarize;
  PredictOptions predict;
  CompareOptions compare;
  PriorExpectOptions prior_expect;
};

void add_prior_flags(CLI::App* cmd, PriorFlags& flags) {
  cmd->add_option("--prior", flags.prior, "Partition prior")->required()->check(CLI::IsMember({"dm", "dp", "py", "gn"}));
  cmd->add_option("--beta", flags.beta, "DM concentration (> 0)");
  cmd->add_option("--Hbar", flags.hbar, "DM number of population clusters (>= 1)");
  cmd->add_option("--alpha", flags.alpha, "DP / PY strength");
  cmd->add_option("--sigma", flags.sigma, "PY discount in [0, 1)");
  cmd->add_option("--gamma", flags.gamma, "GN parameter in (0, 1)");
}

void add_likelihood_flags(CLI::App* cmd, LikelihoodFlags& flags) {
  cmd->add_option("--a", flags.a, "Beta prior on block probabilities, first shape")->capture_default_str();
  cmd->add_option("--b", flags.b, "Beta prior on block probabilities, second shape")->capture_default_str();
}

std::unique_ptr<CLI::App> build(Options& o) {
  auto app = std::make_unique<CLI::App>("Extended stochastic block models: simulate, fit and summarize", "esbm");
  app->require_subcommand(1);
  app->fallthrough(false);

  auto* sim = app->add_subcommand("simulate", "Generate a planted block-model network");
  sim->add_option("--preset", o.simulate.preset, "scenario1 | scenario2 | scenario3 | scenario3-strict")->required();
  sim->add_option("--seed", o.simulate.seed, "Random seed")->capture_default_str();
  sim->add_option("--sizes", o.simulate.sizes, "Comma-separated group sizes overriding the preset")->delimiter(',');
  sim->add_option("--out-edges", o.simulate.out_edges, "Output edge list")->required();
  sim->add_option("--out-truth", o.simulate.out_truth, "Output planted partition (node,cluster)")->required();
  sim->add_option("--holdout", o.simulate.holdout, "Number of held-out new nodes")->capture_default_str();
  sim->add_option("--unseen-fraction", o.simulate.unseen_fraction, "Fraction of held-out nodes from an unseen group")
      ->capture_default_str();
  sim->add_option("--holdout-seed", o.simulate.holdout_seed, "Seed of the held-out draw (default: seed + 1)");
  sim->add_option("--out-holdout-edges", o.simulate.out_holdout_edges, "Held-out edges (new_id,existing_id)");
  sim->add_option("--out-holdout-truth", o.simulate.out_holdout_truth, "Held-out groups (new_id,group)");

  auto* fit = app->add_subcommand("fit", "Run the collapsed Gibbs sampler");
  fit->add_option("--network", o.fit.network, "Edge list, 1-based \"u v\" pairs")->required();
  fit->add_option("--nodes", o.fit.nodes, "Number of nodes (allows isolated trailing nodes)");
  fit->add_option("--attributes", o.fit.attributes, "node_id,category_label CSV; enables supervision");
  fit->add_option("--cohesion-alpha", o.fit.cohesion_alpha, "Dirichlet parameter of the attribute cohesion")
      ->capture_default_str();
  add_prior_flags(fit, o.fit.prior);
  add_likelihood_flags(fit, o.fit.lik);
  fit->add_option("--sweeps", o.fit.sweeps, "Total sweeps including burn-in")->capture_default_str();
  fit->add_option("--burnin", o.fit.burn_in, "Burn-in sweeps")->capture_default_str();
  fit->add_option("--thin", o.fit.thin, "Keep every thin-th sweep")->capture_default_str();
  fit->add_option("--seed", o.fit.seed, "Random seed; chain i uses seed + i - 1")->capture_default_str();
  fit->add_option("--init", o.fit.init, "singletons | one")->capture_default_str();
  fit->add_option("--chains", o.fit.chains, "Independent chains run concurrently")->capture_default_str();
  fit->add_option("--out", o.fit.out, "Output trace file")->required();

  auto* sum = app->add_subcommand("summarize", "Point estimate, credible ball and model fit from a trace");
  sum->add_option("--trace", o.summarize.trace, "Trace file")->required();
  sum->add_option("--level", o.summarize.level, "Credible ball level")->capture_default_str();
  sum->add_option("--out-prefix", o.summarize.out_prefix, "Prefix of the output files")->required();
  sum->add_option("--network", o.summarize.network, "Edge list; adds deviance and misclassification");
  sum->add_option("--nodes", o.summarize.nodes, "Number of nodes in the edge list");
  add_likelihood_flags(sum, o.summarize.lik);

  auto* pred = app->add_subcommand("predict", "Cluster membership probabilities of new nodes");
  pred->add_option("--network", o.predict.network, "Edge list of the training network")->required();
  pred->add_option("--nodes", o.predict.nodes, "Number of nodes in the edge list");
  pred->add_option("--trace", o.predict.trace, "Trace file of the fitted model")->required();
  pred->add_option("--new-edges", o.predict.new_edges, "new_id,existing_id CSV")->required();
  add_prior_flags(pred, o.predict.prior);
  add_likelihood_flags(pred, o.predict.lik);
  pred->add_option("--out", o.predict.out, "Output CSV (default: standard output)");

  auto* cmp = app->add_subcommand("compare", "Harmonic-mean Bayes factor between two fits");
  cmp->add_option("--trace-a", o.compare.trace_a, "Trace of model a")->required();
  cmp->add_option("--trace-b", o.compare.trace_b, "Trace of model b")->required();

  auto* pe = app->add_subcommand("prior-expect", "Prior distribution of the number of clusters");
  add_prior_flags(pe, o.prior_expect.prior);
  pe->add_option("--V", o.prior_expect.nodes, "Number of nodes")->required();
  pe->add_option("--target-mean", o.prior_expect.target_mean, "Tune the free hyperparameter to this prior mean");
  return app;
}

}  // namespace

std::string usage() {
  Options options;
  auto app = build(options);
  std::ostringstream text;
  text << app->help("", CLI::AppFormatMode::All);
  return text.str();
}

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options options;
  auto app = build(options);
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app->parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app->help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return 1;
  }

  try {
    if (app->got_subcommand("simulate")) {
      run_simulate(options.simulate, out);
    } else if (app->got_subcommand("fit")) {
      run_fit(options.fit, out, err);
    } else if (app->got_subcommand("summarize")) {
      run_summarize(options.summarize, out, err);
    } else if (app->got_subcommand("predict")) {
      run_predict(options.predict, out);
    } else if (app->got_subcommand("compare")) {
      run_compare(options.compare, out, err);
    } else if (app->got_subcommand("prior-expect")) {
      run_prior_expect(options.prior_expect, out, err);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace esbm::cli
