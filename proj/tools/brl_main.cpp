#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "brl/errors.hpp"
#include "brl/eval.hpp"
#include "brl/inference.hpp"
#include "brl/serialize.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitUnconverged = 3;

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ','))
    out.push_back(std::stod(part));
  return out;
}

brl::DiscretizationSpec parse_discretization(
    const std::vector<std::string>& thresholds,
    const std::vector<std::string>& quantiles) {
  brl::DiscretizationSpec spec;
  for (const auto& arg : thresholds) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
      throw brl::ConfigError("--thresholds expects col=t1,t2,...: " + arg);
    spec.thresholds[arg.substr(0, eq)] = parse_double_list(arg.substr(eq + 1));
  }
  for (const auto& arg : quantiles) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
      throw brl::ConfigError("--quantiles expects col=k: " + arg);
    spec.quantiles[arg.substr(0, eq)] = std::stoi(arg.substr(eq + 1));
  }
  return spec;
}

struct FitOptions {
  std::string data_path;
  std::string label_col;
  std::vector<std::string> thresholds;
  std::vector<std::string> quantiles;
  double min_support = 0.05;
  std::size_t max_card = 2;
  double lambda = 3.0;
  double eta = 1.0;
  std::string alpha_text;
  int chains = 3;
  std::int64_t iters = 20000;
  std::int64_t max_iters = 320000;
  double rhat_threshold = 1.05;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out_path = "model.json";
  std::string dump_pool_path;
  std::string trace_path;
  bool keep_ensemble = false;
  bool strict = false;
};

json fit_config_json(const FitOptions& opt) {
  json cfg;
  cfg["subcommand"] = "fit";
  cfg["data"] = opt.data_path;
  cfg["label_col"] = opt.label_col;
  cfg["thresholds"] = opt.thresholds;
  cfg["quantiles"] = opt.quantiles;
  cfg["min_support"] = opt.min_support;
  cfg["max_card"] = opt.max_card;
  cfg["lambda"] = opt.lambda;
  cfg["eta"] = opt.eta;
  cfg["alpha"] = opt.alpha_text;
  cfg["chains"] = opt.chains;
  cfg["iters"] = opt.iters;
  cfg["max_iters"] = opt.max_iters;
  cfg["rhat_threshold"] = opt.rhat_threshold;
  cfg["thin"] = opt.thin;
  cfg["seed"] = opt.seed;
  cfg["keep_ensemble"] = opt.keep_ensemble;
  cfg["out"] = opt.out_path;
  return cfg;
}

void dump_pool(const std::string& path, const brl::AntecedentPool& pool,
               const brl::Dataset& data) {
  std::ofstream out(path);
  if (!out) throw brl::DataError("cannot write pool dump: " + path);
  for (const auto& a : pool.antecedents)
    out << a.render(data, " AND ") << "\t" << a.support_count << "\n";
}

void dump_trace(const std::string& path,
                const brl::PosteriorEnsemble& ensemble) {
  std::ofstream out(path);
  if (!out) throw brl::DataError("cannot write trace dump: " + path);
  out << "chain_id,iteration,log_posterior,m\n";
  for (std::size_t c = 0; c < ensemble.traces.size(); ++c)
    for (std::size_t t = 0; t < ensemble.traces[c].size(); ++t)
      out << c << "," << t + 1 << "," << ensemble.traces[c][t] << ","
          << ensemble.length_traces[c][t] << "\n";
}

int run_fit(const FitOptions& opt) {
  std::vector<std::string> warnings;
  brl::Dataset data = brl::load_csv(
      opt.data_path, opt.label_col,
      parse_discretization(opt.thresholds, opt.quantiles), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  brl::AntecedentPool pool =
      brl::mine_antecedents(data, opt.min_support, opt.max_card);
  std::cerr << "mined " << pool.size() << " antecedents (max cardinality "
            << pool.max_cardinality << ")\n";
  if (!opt.dump_pool_path.empty()) dump_pool(opt.dump_pool_path, pool, data);

  brl::Hyperparams hp;
  hp.lambda = opt.lambda;
  hp.eta = opt.eta;
  hp.alpha = opt.alpha_text.empty()
                 ? std::vector<double>(data.num_labels(), 1.0)
                 : parse_double_list(opt.alpha_text);

  brl::McmcConfig mcmc;
  mcmc.chains = opt.chains;
  mcmc.initial_iterations = opt.iters;
  mcmc.max_iterations = opt.max_iters;
  mcmc.rhat_threshold = opt.rhat_threshold;
  mcmc.thin = opt.thin;
  mcmc.jobs = opt.jobs;

  brl::PosteriorModel model(pool, data, hp);
  brl::PosteriorEnsemble ensemble = brl::run_ensemble(model, mcmc, opt.seed);
  if (!opt.trace_path.empty()) dump_trace(opt.trace_path, ensemble);

  brl::PointSelection point = brl::select_brl_point(ensemble, pool);
  brl::BayesianDecisionList fitted =
      brl::fit_consequents(point.list, pool, data, hp.alpha);

  brl::ModelBundle bundle;
  bundle.fitted = fitted;
  bundle.hp = hp;
  bundle.r_hat = ensemble.r_hat;
  bundle.converged = ensemble.converged;
  bundle.seed = opt.seed;
  bundle.created_at = timestamp_now();
  bundle.config_json = fit_config_json(opt).dump();
  if (opt.keep_ensemble) {
    bundle.has_ensemble = true;
    bundle.ensemble = brl::stored_ensemble(ensemble, pool, data, hp.alpha);
  }
  brl::save_model(opt.out_path, bundle);

  std::cout << brl::render(fitted);
  std::cout << "r_hat " << ensemble.r_hat << " after "
            << ensemble.iterations_per_chain << " iterations per chain ("
            << ensemble.samples.size() << " retained samples)\n";
  std::cout << "model written to " << opt.out_path << "\n";

  if (!ensemble.converged) {
    std::cerr << "warning: chains did not converge (r_hat " << ensemble.r_hat
              << " >= " << opt.rhat_threshold << ")\n";
    if (opt.strict) return kExitUnconverged;
  }
  return kExitOk;
}

struct PredictOptions {
  std::string model_path;
  std::string data_path;
  std::string mode = "point";
  std::string out_path;
};

int run_predict(const PredictOptions& opt) {
  brl::ModelBundle bundle = brl::load_model(opt.model_path);
  brl::CsvTable table = brl::read_csv_file(opt.data_path);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!opt.out_path.empty()) {
    file.open(opt.out_path);
    if (!file) throw brl::DataError("cannot write: " + opt.out_path);
    out = &file;
  }

  *out << "row";
  for (const auto& name : bundle.fitted.label_names)
    *out << ",p_" << brl::csv_escape(name);
  *out << ",predicted_label,matched_rule,explanation\n";

  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    brl::RowPrediction pred =
        opt.mode == "posterior" ? brl::predict_row_posterior(bundle, table, i)
                                : brl::predict_row_point(bundle, table, i);
    const std::size_t argmax =
        std::max_element(pred.probabilities.begin(),
                         pred.probabilities.end()) -
        pred.probabilities.begin();
    *out << i;
    for (double p : pred.probabilities) *out << "," << p;
    *out << "," << brl::csv_escape(bundle.fitted.label_names[argmax]) << ","
         << pred.matched_rule_index << "," << brl::csv_escape(pred.explanation)
         << "\n";
  }
  return kExitOk;
}

struct SimulateOptions {
  std::size_t n = 100;
  std::size_t n_rules = 100;
  std::size_t list_len = 5;
  double feature_prob = 0.5;
  double beta_a = 0.5;
  double beta_b = 0.5;
  std::uint64_t seed = 0;
  std::string out_path = "simulated.csv";
  std::string truth_path;
};

int run_simulate(const SimulateOptions& opt) {
  brl::SimulationSpec spec;
  spec.n = opt.n;
  spec.n_rules = opt.n_rules;
  spec.true_list_length = opt.list_len;
  spec.feature_prob = opt.feature_prob;
  spec.beta_a = opt.beta_a;
  spec.beta_b = opt.beta_b;
  spec.seed = opt.seed;
  brl::SimulatedData sim = brl::simulate_dataset(spec);

  std::ofstream out(opt.out_path);
  if (!out) throw brl::DataError("cannot write: " + opt.out_path);
  for (std::size_t c = 0; c < sim.data.num_items(); ++c)
    out << "rule" << c << ",";
  out << "label\n";
  for (std::size_t i = 0; i < sim.data.n(); ++i) {
    for (std::size_t c = 0; c < sim.data.num_items(); ++c)
      out << (sim.data.value(i, c) ? 1 : 0) << ",";
    out << sim.data.label_names[sim.data.y[i]] << "\n";
  }
  std::cout << "wrote " << sim.data.n() << " observations to " << opt.out_path
            << "\n";

  if (!opt.truth_path.empty()) {
    json truth;
    truth["true_list"] = sim.true_list.ids;
    json thetas = json::array();
    for (const auto& t : sim.true_theta) thetas.push_back({t[0], t[1]});
    truth["theta"] = thetas;  // rule rows in list order, then the default
    truth["seed"] = opt.seed;
    std::ofstream tf(opt.truth_path);
    if (!tf) throw brl::DataError("cannot write: " + opt.truth_path);
    tf << truth.dump(2) << "\n";
  }
  return kExitOk;
}

struct EvalCvOptions {
  std::string data_path;
  std::string label_col;
  std::vector<std::string> thresholds;
  std::vector<std::string> quantiles;
  int folds = 5;
  bool stratified = false;
  double min_support = 0.05;
  std::size_t max_card = 3;
  double lambda = 3.0;
  double eta = 1.0;
  std::string alpha_text;
  int chains = 3;
  std::int64_t iters = 20000;
  std::int64_t max_iters = 320000;
  double rhat_threshold = 1.05;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out_path = "cv_report.json";
  std::string roc_dir;
};

int run_eval_cv(const EvalCvOptions& opt) {
  std::vector<std::string> warnings;
  brl::Dataset data = brl::load_csv(
      opt.data_path, opt.label_col,
      parse_discretization(opt.thresholds, opt.quantiles), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  brl::CvConfig config;
  config.folds = opt.folds;
  config.stratified = opt.stratified;
  config.min_support = opt.min_support;
  config.max_cardinality = opt.max_card;
  config.hp.lambda = opt.lambda;
  config.hp.eta = opt.eta;
  config.hp.alpha = opt.alpha_text.empty()
                        ? std::vector<double>(data.num_labels(), 1.0)
                        : parse_double_list(opt.alpha_text);
  config.mcmc.chains = opt.chains;
  config.mcmc.initial_iterations = opt.iters;
  config.mcmc.max_iterations = opt.max_iters;
  config.mcmc.rhat_threshold = opt.rhat_threshold;
  config.mcmc.thin = opt.thin;
  config.mcmc.jobs = opt.jobs;

  brl::CvReport report = brl::run_cv_experiment(data, config, opt.seed);

  json doc;
  doc["created_at"] = timestamp_now();
  json cfg;
  cfg["subcommand"] = "eval cv";
  cfg["data"] = opt.data_path;
  cfg["label_col"] = opt.label_col;
  cfg["folds"] = opt.folds;
  cfg["stratified"] = opt.stratified;
  cfg["min_support"] = opt.min_support;
  cfg["max_card"] = opt.max_card;
  cfg["lambda"] = opt.lambda;
  cfg["eta"] = opt.eta;
  cfg["alpha"] = opt.alpha_text;
  cfg["chains"] = opt.chains;
  cfg["iters"] = opt.iters;
  cfg["max_iters"] = opt.max_iters;
  cfg["rhat_threshold"] = opt.rhat_threshold;
  cfg["thin"] = opt.thin;
  cfg["seed"] = opt.seed;
  doc["config"] = cfg;
  doc["mean_accuracy"] = report.mean_accuracy;
  doc["mean_auc"] = report.mean_auc;
  json folds = json::array();
  for (const auto& fr : report.folds) {
    json f;
    f["fold"] = fr.fold;
    f["skipped"] = fr.skipped;
    if (fr.skipped) {
      f["skip_reason"] = fr.skip_reason;
    } else {
      f["accuracy"] = fr.accuracy;
      f["auc"] = fr.auc;
      f["train_seconds"] = fr.train_seconds;
      f["r_hat"] = fr.r_hat;
      f["converged"] = fr.converged;
      f["pool_size"] = fr.pool_size;
      f["point_list"] = fr.point_list.ids;
      f["rendered"] = fr.rendered;
    }
    folds.push_back(std::move(f));
  }
  doc["folds"] = folds;

  std::ofstream out(opt.out_path);
  if (!out) throw brl::DataError("cannot write: " + opt.out_path);
  out << doc.dump(2) << "\n";

  if (!opt.roc_dir.empty()) {
    for (const auto& fr : report.folds) {
      if (fr.skipped || fr.roc.empty()) continue;
      const std::string path =
          opt.roc_dir + "/fold" + std::to_string(fr.fold) + "_roc.csv";
      std::ofstream roc(path);
      if (!roc) throw brl::DataError("cannot write: " + path);
      roc << "fpr,tpr,threshold\n";
      for (const auto& p : fr.roc)
        roc << p.fpr << "," << p.tpr << "," << p.threshold << "\n";
    }
  }

  for (const auto& fr : report.folds) {
    if (fr.skipped) {
      std::cout << "fold " << fr.fold << ": skipped (" << fr.skip_reason
                << ")\n";
    } else {
      std::cout << "fold " << fr.fold << ": accuracy " << fr.accuracy
                << ", auc " << fr.auc << ", r_hat " << fr.r_hat << "\n"
                << fr.rendered;
    }
  }
  std::cout << "mean accuracy " << report.mean_accuracy << ", mean auc "
            << report.mean_auc << "\n";
  std::cout << "report written to " << opt.out_path << "\n";
  return kExitOk;
}

int run_inspect(const std::string& model_path) {
  brl::ModelBundle bundle = brl::load_model(model_path);
  std::cout << brl::render(bundle.fitted);
  std::cout << "r_hat: " << bundle.r_hat << "\n";
  std::cout << "converged: " << (bundle.converged ? "yes" : "no") << "\n";
  std::cout << "seed: " << bundle.seed << "\n";
  std::cout << "created_at: " << bundle.created_at << "\n";
  std::cout << "ensemble stored: " << (bundle.has_ensemble ? "yes" : "no")
            << "\n";
  std::cout << "config: " << bundle.config_json << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian rule list classifier"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value configuration file");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "mine, sample, and fit a model");
  fit_cmd->add_option("--data", fit.data_path, "training CSV")->required();
  fit_cmd->add_option("--label-col", fit.label_col, "label column name")
      ->required();
  fit_cmd->add_option("--thresholds", fit.thresholds,
                      "numeric column thresholds, col=t1,t2,...");
  fit_cmd->add_option("--quantiles", fit.quantiles,
                      "numeric column quantile bins, col=k");
  fit_cmd->add_option("--min-support", fit.min_support, "mining min support");
  fit_cmd->add_option("--max-card", fit.max_card, "mining max cardinality");
  fit_cmd->add_option("--lambda", fit.lambda, "prior expected list length");
  fit_cmd->add_option("--eta", fit.eta, "prior expected cardinality");
  fit_cmd->add_option("--alpha", fit.alpha_text, "Dirichlet pseudocounts a1,a2,...");
  fit_cmd->add_option("--chains", fit.chains, "MCMC chain count");
  fit_cmd->add_option("--iters", fit.iters, "initial iterations per chain");
  fit_cmd->add_option("--max-iters", fit.max_iters, "iteration cap per chain");
  fit_cmd->add_option("--rhat-threshold", fit.rhat_threshold,
                      "convergence threshold");
  fit_cmd->add_option("--thin", fit.thin, "sample retention stride");
  fit_cmd->add_option("--seed", fit.seed, "master RNG seed");
  fit_cmd->add_option("--jobs", fit.jobs, "parallel chain workers")
      ->envname("BRL_JOBS");
  fit_cmd->add_option("--out", fit.out_path, "model output path");
  fit_cmd->add_option("--dump-pool", fit.dump_pool_path,
                      "write mined antecedents to a text file");
  fit_cmd->add_option("--trace", fit.trace_path,
                      "write per-iteration trace CSV");
  fit_cmd->add_flag("--keep-ensemble", fit.keep_ensemble,
                    "store posterior samples in the model file");
  fit_cmd->add_flag("--strict", fit.strict,
                    "exit 3 when chains fail to converge");

  PredictOptions predict;
  auto* predict_cmd = app.add_subcommand("predict", "score a CSV with a model");
  predict_cmd->add_option("--model", predict.model_path, "model JSON")
      ->required();
  predict_cmd->add_option("--data", predict.data_path, "CSV to score")
      ->required();
  predict_cmd->add_option("--mode", predict.mode, "point|posterior")
      ->check(CLI::IsMember({"point", "posterior"}));
  predict_cmd->add_option("--out", predict.out_path,
                          "output CSV (default stdout)");

  SimulateOptions simulate;
  auto* sim_cmd =
      app.add_subcommand("simulate", "generate decision-list data");
  sim_cmd->add_option("--n", simulate.n, "observations");
  sim_cmd->add_option("--n-rules", simulate.n_rules, "rule columns");
  sim_cmd->add_option("--list-len", simulate.list_len, "true list length");
  sim_cmd->add_option("--feature-prob", simulate.feature_prob,
                      "rule truth probability");
  sim_cmd->add_option("--beta-a", simulate.beta_a, "consequent Beta a");
  sim_cmd->add_option("--beta-b", simulate.beta_b, "consequent Beta b");
  sim_cmd->add_option("--seed", simulate.seed, "RNG seed");
  sim_cmd->add_option("--out", simulate.out_path, "dataset CSV path");
  sim_cmd->add_option("--truth", simulate.truth_path,
                      "write the true list and consequents as JSON");

  auto* eval_cmd = app.add_subcommand("eval", "experiment harnesses");
  eval_cmd->require_subcommand(1);
  EvalCvOptions cv;
  auto* cv_cmd = eval_cmd->add_subcommand("cv", "k-fold cross-validation");
  cv_cmd->add_option("--data", cv.data_path, "CSV")->required();
  cv_cmd->add_option("--label-col", cv.label_col, "label column")->required();
  cv_cmd->add_option("--thresholds", cv.thresholds, "col=t1,t2,...");
  cv_cmd->add_option("--quantiles", cv.quantiles, "col=k");
  cv_cmd->add_option("--folds", cv.folds, "fold count");
  cv_cmd->add_flag("--stratified", cv.stratified, "stratify folds by label");
  cv_cmd->add_option("--min-support", cv.min_support, "mining min support");
  cv_cmd->add_option("--max-card", cv.max_card, "mining max cardinality");
  cv_cmd->add_option("--lambda", cv.lambda, "prior expected list length");
  cv_cmd->add_option("--eta", cv.eta, "prior expected cardinality");
  cv_cmd->add_option("--alpha", cv.alpha_text, "Dirichlet pseudocounts");
  cv_cmd->add_option("--chains", cv.chains, "MCMC chain count");
  cv_cmd->add_option("--iters", cv.iters, "initial iterations per chain");
  cv_cmd->add_option("--max-iters", cv.max_iters, "iteration cap per chain");
  cv_cmd->add_option("--rhat-threshold", cv.rhat_threshold,
                     "convergence threshold");
  cv_cmd->add_option("--thin", cv.thin, "sample retention stride");
  cv_cmd->add_option("--seed", cv.seed, "master RNG seed");
  cv_cmd->add_option("--jobs", cv.jobs, "parallel chain workers")
      ->envname("BRL_JOBS");
  cv_cmd->add_option("--out", cv.out_path, "report JSON path");
  cv_cmd->add_option("--roc-dir", cv.roc_dir, "directory for per-fold ROC CSVs");

  std::string inspect_model;
  auto* inspect_cmd =
      app.add_subcommand("inspect", "print a stored model and provenance");
  inspect_cmd->add_option("--model", inspect_model, "model JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return run_fit(fit);
    if (*predict_cmd) return run_predict(predict);
    if (*sim_cmd) return run_simulate(simulate);
    if (*cv_cmd) return run_eval_cv(cv);
    if (*inspect_cmd) return run_inspect(inspect_model);
  } catch (const brl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const brl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
