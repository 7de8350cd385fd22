#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "latnet/evaluation.hpp"
#include "latnet/mcmc.hpp"
#include "latnet/models.hpp"
#include "latnet/simulate.hpp"
#include "latnet/sociomatrix.hpp"
#include "latnet/theory.hpp"

namespace fs = std::filesystem;
using namespace latnet;

namespace {

struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;
  void add(const std::string& key, const std::string& value) {
    entries.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    std::ostringstream os;
    os << value;
    entries.emplace_back(key, os.str());
  }
  void add(const std::string& key, long long value) {
    entries.emplace_back(key, std::to_string(value));
  }
  void write(const fs::path& dir) const {
    std::ofstream out(dir / "run-manifest.txt");
    if (!out) throw std::runtime_error("cannot write run manifest");
    for (const auto& [k, v] : entries) out << k << '\t' << v << '\n';
  }
};

fs::path ensure_outdir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ChainOptions {
  std::string data;
  std::string covariates;
  std::string model = "eigen";
  int k = 3;
  int iterations = 20000;
  int burn_in = 5000;
  int thin = 10;
  double mh_step = 0.5;
  bool no_adapt = false;
  std::uint64_t seed = 1;
  std::string out = ".";

  void attach(CLI::App* app, bool need_model) {
    app->add_option("--data", data, "edge-list TSV")->required();
    app->add_option("--covariates", covariates, "dyad covariate TSV");
    auto* m = app->add_option("--model", model, "dist | class | eigen");
    auto* kk = app->add_option("--k", k, "latent dimension / class count");
    if (need_model) {
      m->required();
      kk->required();
    }
    app->add_option("--iterations", iterations, "total sweeps");
    app->add_option("--burn", burn_in, "burn-in sweeps");
    app->add_option("--thin", thin, "recording stride");
    app->add_option("--mh-step", mh_step, "distance-model proposal sd");
    app->add_flag("--no-adapt", no_adapt, "freeze the proposal sd");
    app->add_option("--seed", seed, "rng seed");
    app->add_option("--out", out, "output directory");
  }

  SamplerConfig sampler_config() const {
    SamplerConfig cfg;
    cfg.iterations = iterations;
    cfg.burn_in = burn_in;
    cfg.thin = thin;
    cfg.mh_step = mh_step;
    cfg.adapt = !no_adapt;
    cfg.seed = seed;
    return cfg;
  }

  void record(Manifest& man) const {
    man.add("data", data);
    if (!covariates.empty()) man.add("covariates", covariates);
    man.add("model", model);
    man.add("k", static_cast<long long>(k));
    man.add("iterations", static_cast<long long>(iterations));
    man.add("burn", static_cast<long long>(burn_in));
    man.add("thin", static_cast<long long>(thin));
    man.add("mh_step", mh_step);
    man.add("adapt", no_adapt ? "0" : "1");
    man.add("seed", static_cast<long long>(seed));
  }
};

int run_ingest_genesis(const std::string& text_path, const std::string& out) {
  const fs::path dir = ensure_outdir(out);
  const Sociomatrix y = tokenize_adjacency_counts(read_file(text_path));
  write_edge_list(y, (dir / "genesis.tsv").string());
  Manifest man;
  man.add("subcommand", "ingest-genesis");
  man.add("text", text_path);
  man.add("vocabulary_size", static_cast<long long>(y.node_count()));
  man.add("value_levels", static_cast<long long>(y.value_levels().size()));
  man.write(dir);
  std::cerr << "tokenized " << text_path << ": " << y.node_count()
            << " distinct tokens, " << y.value_levels().size()
            << " value levels\n";
  return 0;
}

int run_lcc(const std::string& edges, int threshold, const std::string& out) {
  const fs::path dir = ensure_outdir(out);
  const Sociomatrix y = load_edge_list(edges, 0);
  const Sociomatrix lcc = largest_connected_component(y, threshold);
  write_edge_list(lcc, (dir / "lcc.tsv").string());
  Manifest man;
  man.add("subcommand", "lcc");
  man.add("edges", edges);
  man.add("threshold", static_cast<long long>(threshold));
  man.add("component_nodes", static_cast<long long>(lcc.node_count()));
  man.write(dir);
  std::cerr << "largest component: " << lcc.node_count() << " of "
            << y.node_count() << " nodes\n";
  return 0;
}

int run_fit(const ChainOptions& opt) {
  const fs::path dir = ensure_outdir(opt.out);
  const Sociomatrix y = load_edge_list(opt.data, 0);
  const DyadCovariates x = opt.covariates.empty()
                               ? DyadCovariates::none(y.node_count())
                               : load_covariates(opt.covariates, y);
  const ModelKind kind = model_from_name(opt.model);
  const PriorConfig prior =
      calibrate_prior_alpha_variance(kind, opt.k, PriorConfig{}, y.node_count());
  GibbsSampler sampler(y, x, kind, opt.k, opt.sampler_config(), prior);
  const Trace trace = sampler.run();
  write_trace_csv(trace, (dir / "trace.csv").string());
  const Eigen::VectorXd yhat = posterior_predictive_mean(trace);
  {
    std::ofstream th(dir / "theta.tsv");
    th << "i\tj\ty\tyhat\n";
    char buf[32];
    for (int d = 0; d < y.dyad_count(); ++d) {
      const auto [i, j] = y.dyad_nodes(d);
      std::snprintf(buf, sizeof buf, "%.10g", yhat[d]);
      th << y.labels()[i] << '\t' << y.labels()[j] << '\t';
      if (y.observed_at(d))
        th << y.value_at(d);
      else
        th << "NA";
      th << '\t' << buf << '\n';
    }
  }
  Manifest man;
  man.add("subcommand", "fit");
  opt.record(man);
  man.add("nodes", static_cast<long long>(y.node_count()));
  man.add("recorded_samples", static_cast<long long>(trace.recorded));
  if (kind == ModelKind::distance && trace.mh_proposals > 0)
    man.add("mh_acceptance",
            static_cast<double>(trace.mh_accepted) / trace.mh_proposals);
  man.write(dir);
  return 0;
}

int run_cv(const ChainOptions& opt, int folds, int jobs) {
  const fs::path dir = ensure_outdir(opt.out);
  const Sociomatrix y = load_edge_list(opt.data, 0);
  const DyadCovariates x = opt.covariates.empty()
                               ? DyadCovariates::none(y.node_count())
                               : load_covariates(opt.covariates, y);
  const ModelKind kind = model_from_name(opt.model);
  const PredictionMatrix pred = cross_validate(
      y, x, kind, opt.k, folds, opt.sampler_config(), PriorConfig{}, jobs);
  const RocCurve roc = roc_curve(pred);
  write_predictions_tsv(y, pred, (dir / "predictions.tsv").string());
  write_roc_tsv(roc, (dir / "roc.tsv").string());
  AucTable table;
  table.set(fs::path(opt.data).stem().string(), opt.model, opt.k, roc.auc);
  write_auc_table_csv(table, (dir / "auc_table.csv").string());
  Manifest man;
  man.add("subcommand", "cv");
  opt.record(man);
  man.add("folds", static_cast<long long>(folds));
  man.add("jobs", static_cast<long long>(jobs));
  man.add("auc", roc.auc);
  man.write(dir);
  std::cerr << "cv auc(" << opt.model << ", K=" << opt.k << ") = " << roc.auc
            << '\n';
  return 0;
}

int run_check_theory(std::uint64_t seed, const std::string& out) {
  const TheoryReport rep = run_theory_battery(seed);
  std::cout << rep.to_string();
  if (!out.empty()) {
    const fs::path dir = ensure_outdir(out);
    std::ofstream f(dir / "theory_report.txt");
    f << rep.to_string();
    Manifest man;
    man.add("subcommand", "check-theory");
    man.add("seed", static_cast<long long>(seed));
    man.add("all_pass", rep.all_pass() ? "1" : "0");
    man.write(dir);
  }
  return 0;
}

int run_simulate(const std::string& model, int n, int k, double mu,
                 double m_within, double m_between, bool have_m,
                 bool random_labels, int clusters, double separation,
                 double spread, const std::string& lambda_csv,
                 std::uint64_t seed, const std::string& out) {
  const fs::path dir = ensure_outdir(out);
  const ModelKind kind = model_from_name(model);
  SimulateParams params;
  params.intercept = mu;
  params.random_labels = random_labels;
  params.clusters = clusters;
  params.cluster_separation = separation;
  params.cluster_spread = spread;
  if (have_m) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(k, k, m_between);
    m.diagonal().setConstant(m_within);
    params.class_effects = m;
  }
  if (!lambda_csv.empty()) {
    std::vector<double> vals;
    std::stringstream ss(lambda_csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    params.lambda = Eigen::Map<Eigen::VectorXd>(vals.data(),
                                                static_cast<int>(vals.size()));
  }
  const SimulationResult sim = simulate(kind, n, k, params, seed);
  write_edge_list(sim.y, (dir / "data.tsv").string());
  write_latent_tsv(sim, (dir / "latent.tsv").string());
  write_theta_tsv(sim, (dir / "theta.tsv").string());
  Manifest man;
  man.add("subcommand", "simulate");
  man.add("model", model);
  man.add("n", static_cast<long long>(n));
  man.add("k", static_cast<long long>(k));
  man.add("mu", mu);
  man.add("seed", static_cast<long long>(seed));
  double density = 0.0;
  for (int d = 0; d < sim.y.dyad_count(); ++d) density += sim.y.value_at(d);
  man.add("edge_density", density / sim.y.dyad_count());
  man.write(dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent-variable models for symmetric relational data"};
  app.require_subcommand(1);

  // ingest-genesis
  std::string genesis_text, genesis_out = ".";
  auto* ingest = app.add_subcommand(
      "ingest-genesis", "build token-adjacency counts from a text file");
  ingest->add_option("text", genesis_text, "input text file")->required();
  ingest->add_option("--out", genesis_out, "output directory");

  // lcc
  std::string lcc_edges, lcc_out = ".";
  int lcc_threshold = 0;
  auto* lcc = app.add_subcommand(
      "lcc", "restrict an edge list to its largest connected component");
  lcc->add_option("edges", lcc_edges, "edge-list TSV")->required();
  lcc->add_option("--threshold", lcc_threshold, "edge rule: value > threshold");
  lcc->add_option("--out", lcc_out, "output directory");

  // fit
  ChainOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "posterior simulation on full data");
  fit_opt.attach(fit, true);

  // cv
  ChainOptions cv_opt;
  int cv_folds = 5, cv_jobs = 1;
  auto* cv = app.add_subcommand("cv", "five-fold cross-validated predictions");
  cv_opt.attach(cv, true);
  cv->add_option("--folds", cv_folds, "fold count");
  cv->add_option("--jobs", cv_jobs, "concurrent fold fits");

  // check-theory
  std::uint64_t theory_seed = 7;
  std::string theory_out;
  auto* theory = app.add_subcommand(
      "check-theory", "run the kernel-representation property battery");
  theory->add_option("--seed", theory_seed, "rng seed");
  theory->add_option("--out", theory_out, "optional output directory");

  // simulate
  std::string sim_model = "eigen", sim_lambda, sim_out = ".";
  int sim_n = 100, sim_k = 2, sim_clusters = 0;
  double sim_mu = 0.0, sim_mw = 3.0, sim_mb = -3.0;
  double sim_sep = 4.0, sim_spread = 1.0;
  bool sim_random_labels = false;
  std::uint64_t sim_seed = 1;
  auto* sim = app.add_subcommand("simulate",
                                 "forward-generate binary data from a model");
  sim->add_option("--model", sim_model, "dist | class | eigen")->required();
  sim->add_option("--n", sim_n, "node count")->required();
  sim->add_option("--k", sim_k, "latent dimension / class count")->required();
  sim->add_option("--mu", sim_mu, "intercept: P(edge) = Phi(mu + alpha)");
  auto* mw = sim->add_option("--m-within", sim_mw, "class effects diagonal");
  sim->add_option("--m-between", sim_mb, "class effects off-diagonal");
  sim->add_flag("--random-labels", sim_random_labels, "uniform class labels");
  sim->add_option("--clusters", sim_clusters, "distance model: cluster count");
  sim->add_option("--separation", sim_sep, "distance model: center separation");
  sim->add_option("--spread", sim_spread, "distance model: within-cluster sd");
  sim->add_option("--lambda", sim_lambda, "eigen weights, comma separated");
  sim->add_option("--seed", sim_seed, "rng seed");
  sim->add_option("--out", sim_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return run_ingest_genesis(genesis_text, genesis_out);
    if (*lcc) return run_lcc(lcc_edges, lcc_threshold, lcc_out);
    if (*fit) return run_fit(fit_opt);
    if (*cv) return run_cv(cv_opt, cv_folds, cv_jobs);
    if (*theory) return run_check_theory(theory_seed, theory_out);
    if (*sim)
      return run_simulate(sim_model, sim_n, sim_k, sim_mu, sim_mw, sim_mb,
                          mw->count() > 0 || sim_model == "class",
                          sim_random_labels, sim_clusters, sim_sep, sim_spread,
                          sim_lambda, sim_seed, sim_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
