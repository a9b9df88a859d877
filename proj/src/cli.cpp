#include "bggm/cli.hpp"

#include "bggm/error.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

namespace bggm {

namespace fs = std::filesystem;

namespace {

std::string_view r_proposal_name(RProposal p) { return p == RProposal::random_walk ? "random-walk" : "prior-uniform"; }

void append_chain(std::ostringstream& s, const ChainConfig& c) {
  s << "iterations=" << c.iterations << "\nburn_in=" << c.burn_in << "\nthin=" << c.thin << "\nseed=" << c.seed
    << "\nr_proposal=" << r_proposal_name(c.r_proposal) << "\nr_step=" << format_double(c.r_step)
    << "\nrefine=" << c.refine_active_edges << "\ns_proposal_sd=" << format_double(c.s_proposal_sd) << '\n';
}

void append_csv(std::ostringstream& s, const CsvOptions& o) {
  s << "label_column=" << o.label_column << "\nclass1=" << o.class1 << "\nclass2=" << o.class2
    << "\nunknown=" << o.unknown << '\n';
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::string alpha_tag(double alpha) { return format_double(alpha); }

Hyperparameters hyperparameters_for(const Dataset& d, const fs::path& prior_network) {
  Hyperparameters h = default_hyperparameters(d.p());
  if (!prior_network.empty()) h = apply_prior_network(std::move(h), read_prior_network_file(prior_network), d.names);
  return h;
}

void write_counter(std::ostream& out, std::string_view name, const UpdateCounter& c) {
  out << name << "_attempted\t" << c.attempted << '\n'
      << name << "_accepted\t" << c.accepted << '\n'
      << name << "_infeasible\t" << c.infeasible << '\n'
      << name << "_acceptance_rate\t" << format_double(c.rate()) << '\n';
}

std::vector<fs::path> write_networks(const PosteriorSummary& summary, const std::vector<double>& alphas,
                                     const FileHeader& base, const fs::path& out_dir, std::ostream& log) {
  std::vector<fs::path> files;
  for (double alpha : alphas) {
    for (NetworkKind kind : {NetworkKind::class1, NetworkKind::class2, NetworkKind::differential, NetworkKind::conserved}) {
      const NetworkCall call = call_network(summary, kind, alpha);
      const std::string stem = "network_" + std::string(to_string(kind)) + "_alpha" + alpha_tag(alpha);
      FileHeader h = base;
      h.kind = "network-tsv";
      const fs::path tsv = out_dir / (stem + ".tsv");
      {
        auto out = open_output(tsv);
        write_network_tsv(out, call, summary.names, h);
      }
      h.kind = "network-dot";
      const fs::path dot = out_dir / (stem + ".dot");
      {
        auto out = open_output(dot);
        write_network_dot(out, call, summary.names, h);
      }
      files.push_back(tsv);
      files.push_back(dot);
      log << "alpha " << alpha_tag(alpha) << ' ' << to_string(kind) << ": " << call.edges.size() << " edges\n";
    }
  }
  return files;
}

fs::path write_predictions(const PosteriorSummary& summary, double cut, const FileHeader& base, const fs::path& out_dir) {
  FileHeader h = base;
  h.kind = "predictions";
  const fs::path path = out_dir / "predictions.tsv";
  auto out = open_output(path);
  out << h.line() << '\n' << "row\tlabel\tclass1_probability\n";
  if (summary.class1_probability.size() > 0) {
    // rows are 1-based data rows, in file order
    for (const LabelPrediction& p : predict_labels(summary, cut)) {
      out << p.row + 1 << '\t' << to_string(p.label) << '\t' << format_double(p.class1_probability) << '\n';
    }
  }
  return path;
}

std::vector<double> parse_alphas(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  for (std::string tok; std::getline(in, tok, ',');) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ValidationError("alpha: not a number: '" + tok + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("alpha: at least one value is required");
  return out;
}

void validate_alphas(const std::vector<double>& alphas) {
  if (alphas.empty()) throw ValidationError("alpha: at least one value is required");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("alpha must lie in (0, 1), got " + format_double(a));
}

FitRecord load_record(const fs::path& results, FileHeader& header) {
  std::ifstream in(results);
  if (!in) throw ValidationError("cannot open '" + results.string() + "'");
  return read_results(in, &header);
}

}  // namespace

std::string RunConfig::canonical() const {
  std::ostringstream s;
  s << "command=fit\ndata=" << data.generic_string() << "\nprior_network=" << prior_network.generic_string() << '\n';
  append_csv(s, csv);
  append_chain(s, chain);
  s << "alpha=";
  for (std::size_t k = 0; k < alphas.size(); ++k) s << (k ? "," : "") << format_double(alphas[k]);
  s << "\ncut=" << format_double(cut) << '\n';
  return s.str();
}

void RunConfig::validate() const {
  if (data.empty()) throw ValidationError("fit: a data file is required");
  chain.validate();
  validate_alphas(alphas);
  if (!(cut >= 0.0 && cut <= 1.0)) throw ValidationError("cut must lie in [0, 1]");
}

std::vector<fs::path> cmd_fit(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const Dataset d = read_csv_file(cfg.data, cfg.csv);
  d.validate(true);
  const Hyperparameters h = hyperparameters_for(d, cfg.prior_network);
  TruthEdges truth;
  if (!cfg.truth.empty()) truth = read_truth_file(cfg.truth, d.names);
  ensure_dir(cfg.out_dir);

  const ChainSamples samples = run_chain(d, h, cfg.chain);
  const PosteriorSummary summary = summarize(samples);
  const FileHeader base{"results", cfg.chain.seed, fnv1a64(cfg.canonical())};
  std::vector<fs::path> files;

  const fs::path results = cfg.out_dir / "results.bggm";
  {
    auto out = open_output(results);
    write_results(out, make_fit_record(samples, summary), base);
  }
  files.push_back(results);

  const fs::path chain_path = cfg.out_dir / "chain_summary.tsv";
  {
    FileHeader hh = base;
    hh.kind = "chain-summary";
    auto out = open_output(chain_path);
    out << hh.line() << '\n' << "key\tvalue\n";
    out << "samples\t" << d.n() << "\nproteins\t" << d.p() << "\nunknown_samples\t" << summary.unknown_rows.size()
        << "\niterations\t" << cfg.chain.iterations << "\nburn_in\t" << cfg.chain.burn_in << "\nthin\t"
        << cfg.chain.thin << "\nretained_draws\t" << samples.draws.size() << '\n';
    write_counter(out, "edge", samples.acceptance.edge);
    write_counter(out, "refine", samples.acceptance.refine);
    write_counter(out, "s", samples.acceptance.s);
    out << "invariant_violations\t" << samples.invariant_violations << '\n';
  }
  files.push_back(chain_path);

  const fs::path edges_path = cfg.out_dir / "posterior_edges.tsv";
  {
    FileHeader hh = base;
    hh.kind = "posterior-edges";
    auto out = open_output(edges_path);
    out << hh.line() << '\n'
        << "protein_i\tprotein_j\tppi_class1\tppi_class2\tppi_diff\tppi_common\tpartial_corr_class1\tpartial_corr_class2\n";
    for (Index i = 0; i < d.p(); ++i) {
      for (Index j = i + 1; j < d.p(); ++j) {
        out << d.names[static_cast<std::size_t>(i)] << '\t' << d.names[static_cast<std::size_t>(j)] << '\t'
            << format_double(summary.ppi[0](i, j)) << '\t' << format_double(summary.ppi[1](i, j)) << '\t'
            << format_double(summary.ppi_diff(i, j)) << '\t' << format_double(summary.ppi_common(i, j)) << '\t'
            << format_double(summary.mean_partial_corr[0](i, j)) << '\t'
            << format_double(summary.mean_partial_corr[1](i, j)) << '\n';
      }
    }
  }
  files.push_back(edges_path);
  files.push_back(write_predictions(summary, cfg.cut, base, cfg.out_dir));

  log << "draws " << samples.draws.size() << ", edge acceptance " << format_double(samples.acceptance.edge.rate())
      << ", invariant violations " << samples.invariant_violations << '\n';
  auto nets = write_networks(summary, cfg.alphas, base, cfg.out_dir, log);
  files.insert(files.end(), nets.begin(), nets.end());

  if (!cfg.truth.empty()) {
    const RecoveryMetrics m = score_recovery(truth, summary);
    FileHeader hh = base;
    hh.kind = "recovery";
    const fs::path path = cfg.out_dir / "recovery.tsv";
    auto out = open_output(path);
    out << hh.line() << '\n'
        << "metric\tvalue\n"
        << "auc_class1\t" << format_double(m.auc[0]) << "\nauc_class2\t" << format_double(m.auc[1])
        << "\nauc_differential\t" << format_double(m.auc_differential) << '\n';
    files.push_back(path);
    log << "recovery AUC class1 " << format_double(m.auc[0]) << ", class2 " << format_double(m.auc[1])
        << ", differential " << format_double(m.auc_differential) << '\n';
  }
  return files;
}

std::vector<fs::path> cmd_predict(const fs::path& results, double cut, const fs::path& out_dir, std::ostream& log) {
  if (!(cut >= 0.0 && cut <= 1.0)) throw ValidationError("cut must lie in [0, 1]");
  FileHeader header;
  const FitRecord rec = load_record(results, header);
  ensure_dir(out_dir);
  const fs::path path = write_predictions(rec.summary, cut, header, out_dir);
  log << rec.summary.unknown_rows.size() << " predictions\n";
  return {path};
}

std::vector<fs::path> cmd_networks(const fs::path& results, const std::vector<double>& alphas, const fs::path& out_dir,
                                   std::ostream& log) {
  validate_alphas(alphas);
  FileHeader header;
  const FitRecord rec = load_record(results, header);
  ensure_dir(out_dir);
  return write_networks(rec.summary, alphas, header, out_dir, log);
}

std::string SimulateConfig::canonical() const {
  std::ostringstream s;
  s << "command=simulate\np=" << model.p << "\nn_conserved=" << model.n_conserved
    << "\nn_differential=" << model.n_differential << "\ncorr_lo=" << format_double(model.corr_lo)
    << "\ncorr_hi=" << format_double(model.corr_hi) << "\ns_lo=" << format_double(model.s_lo)
    << "\ns_hi=" << format_double(model.s_hi) << "\nmin_eigenvalue=" << format_double(model.min_eigenvalue)
    << "\nplacement_attempts=" << model.placement_attempts << "\nseed=" << model.seed << "\nn1=" << n1
    << "\nn2=" << n2 << '\n';
  append_csv(s, csv);
  return s.str();
}

std::vector<fs::path> cmd_simulate(const SimulateConfig& cfg, std::ostream& log) {
  if (cfg.n1 < 1 || cfg.n2 < 1) throw ValidationError("simulate: n1 and n2 must be positive");
  const TrueModel m = generate_model(cfg.model);
  const Dataset d = sample_data(m, cfg.n1, cfg.n2, Rng(cfg.model.seed).split(1).seed());
  ensure_dir(cfg.out_dir);
  const std::uint64_t hash = fnv1a64(cfg.canonical());

  const fs::path data = cfg.out_dir / "data.csv";
  {
    auto out = open_output(data);
    write_csv(out, d, FileHeader{"data", cfg.model.seed, hash}, cfg.csv);
  }
  const fs::path truth = cfg.out_dir / "truth.tsv";
  std::size_t listed = 0;
  {
    auto out = open_output(truth);
    out << FileHeader{"truth", cfg.model.seed, hash}.line() << '\n'
        << "# shrunk_edges=" << m.shrunk_edges << " dropped_edges=" << m.dropped_edges << '\n'
        << "protein_i\tprotein_j\ttruth\tpartial_corr_class1\tpartial_corr_class2\n";
    for (Index i = 0; i < m.p; ++i) {
      for (Index j = i + 1; j < m.p; ++j) {
        const EdgeTruth t = m.truth(i, j);
        if (t == EdgeTruth::null) continue;
        ++listed;
        out << m.names[static_cast<std::size_t>(i)] << '\t' << m.names[static_cast<std::size_t>(j)] << '\t'
            << to_string(t) << '\t' << format_double(m.partial_corr[0](i, j)) << '\t'
            << format_double(m.partial_corr[1](i, j)) << '\n';
      }
    }
  }
  log << "simulated " << d.n() << " samples over " << d.p() << " proteins, " << listed << " true edges ("
      << m.shrunk_edges << " shrunk, " << m.dropped_edges << " dropped)\n";
  return {data, truth};
}

TruthEdges read_truth_file(const fs::path& path, const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  const Index p = static_cast<Index>(names.size());
  TruthEdges t{{Matrix::Identity(p, p), Matrix::Identity(p, p)}};
  auto index_of = [&](const std::string& n) {
    const auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) throw ValidationError("truth file: unknown protein '" + n + "'");
    return static_cast<Index>(it - names.begin());
  };
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream f(line);
    std::string a, b, kind;
    if (!(f >> a >> b >> kind)) throw ValidationError("truth file: malformed line '" + line + "'");
    const Index i = index_of(a), j = index_of(b);
    const bool c1 = kind == "conserved" || kind == "differential_class1";
    const bool c2 = kind == "conserved" || kind == "differential_class2";
    if (!c1 && !c2) throw ValidationError("truth file: unknown edge kind '" + kind + "'");
    if (c1) t.adjacency[0](i, j) = t.adjacency[0](j, i) = 1.0;
    if (c2) t.adjacency[1](i, j) = t.adjacency[1](j, i) = 1.0;
  }
  return t;
}

RecoveryMetrics score_recovery(const TruthEdges& truth, const PosteriorSummary& summary) {
  if (truth.adjacency[0].rows() != summary.p()) throw ValidationError("score_recovery: dimension mismatch");
  RecoveryMetrics out;
  for (std::size_t k = 0; k < 2; ++k) out.auc[k] = edge_auc(summary.ppi[k], truth.adjacency[k]);
  out.auc_differential = edge_auc(summary.ppi_diff, (truth.adjacency[0] - truth.adjacency[1]).cwiseAbs());
  return out;
}

std::string BenchmarkConfig::canonical() const {
  std::ostringstream s;
  s << "command=benchmark\ndata=" << data.generic_string() << "\nprior_network=" << prior_network.generic_string()
    << "\nreplicates=" << plan.n_replicates << "\ntrain_fraction=" << format_double(plan.train_fraction)
    << "\nsplit_seed=" << plan.seed << "\nstratified=" << plan.stratified << "\nknn_k=" << knn_k
    << "\nbgbc=" << with_bgbc << '\n';
  append_csv(s, csv);
  append_chain(s, chain);
  return s.str();
}

std::vector<fs::path> cmd_benchmark(const BenchmarkConfig& cfg, std::ostream& log) {
  cfg.plan.validate();
  if (cfg.knn_k < 1) throw ValidationError("benchmark: knn k must be positive");
  if (cfg.with_bgbc) cfg.chain.validate();
  const Dataset d = read_csv_file(cfg.data, cfg.csv);
  if (!d.rows_with(ClassLabel::unknown).empty()) throw ValidationError("benchmark: every sample must be labeled");
  d.validate(true);
  const Hyperparameters h = hyperparameters_for(d, cfg.prior_network);
  ensure_dir(cfg.out_dir);

  const auto classifiers = standard_classifiers(cfg.knn_k);
  const BenchmarkResult r =
      benchmark(d, cfg.plan, classifiers, cfg.with_bgbc ? std::optional<ChainConfig>(cfg.chain) : std::nullopt, &h);
  const FileHeader base{"benchmark", cfg.plan.seed, fnv1a64(cfg.canonical())};

  const fs::path table = cfg.out_dir / "benchmark.tsv";
  {
    auto out = open_output(table);
    out << base.line() << '\n'
        << "# misclassification percent over " << cfg.plan.n_replicates << " splits, train fraction "
        << format_double(cfg.plan.train_fraction) << (cfg.plan.stratified ? ", stratified" : "")
        << "; resampled splits " << r.resampled << "; no SVM column (network-based SVM not implemented)\n";
    out << "statistic";
    for (const auto& name : r.classifiers) out << '\t' << name;
    out << "\nmean";
    for (double v : r.mean) out << '\t' << format_double(v);
    out << "\nsd";
    for (double v : r.sd) out << '\t' << format_double(v);
    out << '\n';
  }
  const fs::path reps = cfg.out_dir / "benchmark_replicates.tsv";
  {
    FileHeader hh = base;
    hh.kind = "benchmark-replicates";
    auto out = open_output(reps);
    out << hh.line() << '\n' << "replicate\tclassifier\terror_percent\n";
    for (std::size_t rep = 0; rep < r.errors.size(); ++rep)
      for (std::size_t c = 0; c < r.classifiers.size(); ++c)
        out << rep << '\t' << r.classifiers[c] << '\t' << format_double(r.errors[rep][c]) << '\n';
  }
  for (std::size_t c = 0; c < r.classifiers.size(); ++c) {
    log << r.classifiers[c] << ": " << format_double(r.mean[c]) << " (sd " << format_double(r.sd[c]) << ")\n";
  }
  return {table, reps};
}

namespace {

// "--name=value" arguments for every flat key of a config file.
std::vector<std::string> config_arguments(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  CLI::ConfigBase parser;
  std::vector<std::string> args;
  for (const CLI::ConfigItem& item : parser.from_config(in)) {
    if (!item.parents.empty()) throw ValidationError("config file: sections are not supported ('" + item.fullname() + "')");
    if (item.name == "config" || item.name == "++" || item.name == "--") continue;
    std::string value;
    for (std::size_t k = 0; k < item.inputs.size(); ++k) value += (k ? "," : "") + item.inputs[k];
    args.push_back("--" + item.name + "=" + value);
  }
  return args;
}

std::optional<fs::path> find_config(int argc, const char* const* argv) {
  for (int k = 2; k < argc; ++k) {
    const std::string_view a = argv[k];
    if (a == "--config" && k + 1 < argc) return fs::path(argv[k + 1]);
    if (a.rfind("--config=", 0) == 0) return fs::path(std::string(a.substr(9)));
  }
  return std::nullopt;
}

void add_csv_options(CLI::App* sub, CsvOptions& csv) {
  sub->add_option("--label-column", csv.label_column, "Name of the class label column")->capture_default_str();
  sub->add_option("--class1", csv.class1, "Label value of class 1")->capture_default_str();
  sub->add_option("--class2", csv.class2, "Label value of class 2")->capture_default_str();
  sub->add_option("--unknown", csv.unknown, "Label value of unlabeled samples")->capture_default_str();
}

void add_chain_options(CLI::App* sub, ChainConfig& c, std::string& r_proposal) {
  sub->add_option("--iterations", c.iterations, "Total sweeps")->capture_default_str();
  sub->add_option("--burn-in", c.burn_in, "Discarded leading sweeps")->capture_default_str();
  sub->add_option("--thin", c.thin, "Keep every thin-th sweep after burn-in")->capture_default_str();
  sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  sub->add_option("--r-proposal", r_proposal, "R proposal for new edges")
      ->check(CLI::IsMember({"prior-uniform", "random-walk"}))
      ->capture_default_str();
  sub->add_option("--r-step", c.r_step, "Random-walk sd for active R entries")->capture_default_str();
  sub->add_option("--s-proposal-sd", c.s_proposal_sd, "Log-scale random-walk sd for S")->capture_default_str();
  sub->add_option("--refine", c.refine_active_edges, "Random-walk active R entries after each edge move")
      ->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian two-class sparse Gaussian graphical models", "bggm"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));
  std::string config_path;

  RunConfig fit;
  std::string fit_alpha = "0.1", fit_rprop = "prior-uniform";
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model and write summaries, predictions and networks");
  fit_cmd->add_option("--data", fit.data, "Dataset CSV")->required();
  add_csv_options(fit_cmd, fit.csv);
  fit_cmd->add_option("--prior-network", fit.prior_network, "Prior network file");
  add_chain_options(fit_cmd, fit.chain, fit_rprop);
  fit_cmd->add_option("--alpha", fit_alpha, "Comma-separated Bayesian FDR levels")->capture_default_str();
  fit_cmd->add_option("--cut", fit.cut, "Class-1 probability cut for predictions")->capture_default_str();
  fit_cmd->add_option("--truth", fit.truth, "Truth file from simulate, for recovery AUCs");
  fit_cmd->add_option("--out", fit.out_dir, "Output directory")->capture_default_str();
  fit_cmd->add_option("--config", config_path, "Flat key=value config file");

  std::string results;
  double predict_cut = 0.5;
  fs::path predict_out = ".";
  auto* predict_cmd = app.add_subcommand("predict", "Re-extract predicted labels from a results file");
  predict_cmd->add_option("--results", results, "results.bggm written by fit")->required();
  predict_cmd->add_option("--cut", predict_cut, "Class-1 probability cut")->capture_default_str();
  predict_cmd->add_option("--out", predict_out, "Output directory")->capture_default_str();
  predict_cmd->add_option("--config", config_path, "Flat key=value config file");

  std::string networks_alpha = "0.1";
  fs::path networks_out = ".";
  auto* networks_cmd = app.add_subcommand("networks", "Re-threshold a results file at new FDR levels");
  networks_cmd->add_option("--results", results, "results.bggm written by fit")->required();
  networks_cmd->add_option("--alpha", networks_alpha, "Comma-separated Bayesian FDR levels")->capture_default_str();
  networks_cmd->add_option("--out", networks_out, "Output directory")->capture_default_str();
  networks_cmd->add_option("--config", config_path, "Flat key=value config file");

  SimulateConfig sim;
  std::size_t sim_p = static_cast<std::size_t>(sim.model.p);
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic two-class dataset and its true graphs");
  sim_cmd->add_option("--p", sim_p, "Number of proteins")->capture_default_str();
  sim_cmd->add_option("--n-conserved", sim.model.n_conserved, "Edges shared by both classes")->capture_default_str();
  sim_cmd->add_option("--n-differential", sim.model.n_differential, "Edges in one class only")->capture_default_str();
  sim_cmd->add_option("--corr-lo", sim.model.corr_lo, "Smallest |partial correlation|")->capture_default_str();
  sim_cmd->add_option("--corr-hi", sim.model.corr_hi, "Largest |partial correlation|")->capture_default_str();
  sim_cmd->add_option("--s-lo", sim.model.s_lo, "Smallest S_i")->capture_default_str();
  sim_cmd->add_option("--s-hi", sim.model.s_hi, "Largest S_i")->capture_default_str();
  sim_cmd->add_option("--min-eigenvalue", sim.model.min_eigenvalue, "PD margin for edge insertion")
      ->capture_default_str();
  sim_cmd->add_option("--placement-attempts", sim.model.placement_attempts, "Pairs tried before halving")
      ->capture_default_str();
  sim_cmd->add_option("--n1", sim.n1, "Class-1 samples")->capture_default_str();
  sim_cmd->add_option("--n2", sim.n2, "Class-2 samples")->capture_default_str();
  sim_cmd->add_option("--seed", sim.model.seed, "Random seed")->capture_default_str();
  add_csv_options(sim_cmd, sim.csv);
  sim_cmd->add_option("--out", sim.out_dir, "Output directory")->capture_default_str();
  sim_cmd->add_option("--config", config_path, "Flat key=value config file");

  BenchmarkConfig bench;
  std::string bench_rprop = "prior-uniform";
  auto* bench_cmd = app.add_subcommand("benchmark", "Repeated-split misclassification table");
  bench_cmd->add_option("--data", bench.data, "Fully labeled dataset CSV")->required();
  add_csv_options(bench_cmd, bench.csv);
  bench_cmd->add_option("--prior-network", bench.prior_network, "Prior network file");
  bench_cmd->add_option("--replicates", bench.plan.n_replicates, "Number of splits")->capture_default_str();
  bench_cmd->add_option("--train-fraction", bench.plan.train_fraction, "Training share")->capture_default_str();
  bench_cmd->add_option("--split-seed", bench.plan.seed, "Seed of the split streams")->capture_default_str();
  bench_cmd->add_option("--stratified", bench.plan.stratified, "Stratify splits by class")->capture_default_str();
  bench_cmd->add_option("--knn-k", bench.knn_k, "Neighbours for KNN")->capture_default_str();
  bench_cmd->add_option("--bgbc", bench.with_bgbc, "Include the Bayesian graphical classifier")->capture_default_str();
  add_chain_options(bench_cmd, bench.chain, bench_rprop);
  bench_cmd->add_option("--out", bench.out_dir, "Output directory")->capture_default_str();
  bench_cmd->add_option("--config", config_path, "Flat key=value config file");

  try {
    std::vector<std::string> storage(argv, argv + argc);
    if (const auto cfg = find_config(argc, argv)) {
      const auto extra = config_arguments(*cfg);
      storage.insert(storage.begin() + 2, extra.begin(), extra.end());
    }
    std::vector<const char*> args;
    for (const auto& s : storage) args.push_back(s.c_str());
    app.parse(static_cast<int>(args.size()), args.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (fit_cmd->parsed()) {
      fit.alphas = parse_alphas(fit_alpha);
      fit.chain.r_proposal = fit_rprop == "random-walk" ? RProposal::random_walk : RProposal::prior_uniform;
      cmd_fit(fit, out);
    } else if (predict_cmd->parsed()) {
      cmd_predict(results, predict_cut, predict_out, out);
    } else if (networks_cmd->parsed()) {
      cmd_networks(results, parse_alphas(networks_alpha), networks_out, out);
    } else if (sim_cmd->parsed()) {
      sim.model.p = static_cast<Index>(sim_p);
      cmd_simulate(sim, out);
    } else if (bench_cmd->parsed()) {
      bench.chain.r_proposal = bench_rprop == "random-walk" ? RProposal::random_walk : RProposal::prior_uniform;
      cmd_benchmark(bench, out);
    }
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace bggm
