#include "brl/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/beta.hpp>

#include "brl/errors.hpp"

namespace brl {

void SimulationSpec::validate() const {
  if (n < 1 || n_rules < 1) throw ConfigError("n and n_rules must be positive");
  if (true_list_length > n_rules)
    throw ConfigError("true_list_length exceeds n_rules");
  if (!(beta_a > 0.0 && beta_b > 0.0))
    throw ConfigError("Beta parameters must be positive");
  if (!(feature_prob > 0.0 && feature_prob < 1.0))
    throw ConfigError("feature_prob must be in (0, 1)");
}

SimulatedData simulate_dataset(const SimulationSpec& spec) {
  spec.validate();
  Rng rng = make_rng(derive_seed(spec.seed, /*stream=*/0x51f7));

  SimulatedData sim;
  sim.data.label_names = {"0", "1"};
  sim.data.y.resize(spec.n);
  sim.data.columns.assign(spec.n_rules, Bitset(spec.n));
  for (std::size_t c = 0; c < spec.n_rules; ++c) {
    sim.data.item_columns.push_back(
        Item::equals("rule" + std::to_string(c), "1"));
    for (std::size_t i = 0; i < spec.n; ++i)
      if (uniform_unit(rng) < spec.feature_prob) sim.data.columns[c].set(i);
  }

  // True list: uniform draw of distinct rules, order retained.
  std::vector<std::uint32_t> ids(spec.n_rules);
  std::iota(ids.begin(), ids.end(), 0);
  for (std::size_t j = 0; j < spec.true_list_length; ++j) {
    std::size_t pick = j + uniform_index(rng, spec.n_rules - j);
    std::swap(ids[j], ids[pick]);
    sim.true_list.ids.push_back(ids[j]);
  }

  boost::math::beta_distribution<double> beta(spec.beta_a, spec.beta_b);
  sim.true_theta.resize(spec.true_list_length + 1);
  for (auto& theta : sim.true_theta) {
    const double p1 = boost::math::quantile(beta, uniform_unit(rng));
    theta = {1.0 - p1, p1};
  }

  for (std::size_t i = 0; i < spec.n; ++i) {
    std::size_t rule = spec.true_list_length;  // default
    for (std::size_t j = 0; j < spec.true_list_length; ++j)
      if (sim.data.columns[sim.true_list.ids[j]].test(i)) {
        rule = j;
        break;
      }
    sim.data.y[i] = uniform_unit(rng) < sim.true_theta[rule][1] ? 1 : 0;
  }
  return sim;
}

std::size_t levenshtein(const RuleList& a, const RuleList& b) {
  const std::size_t n = a.length();
  const std::size_t m = b.length();
  if (n == 0) return m;
  if (m == 0) return n;

  std::vector<std::size_t> costs(m + 1);
  std::iota(costs.begin(), costs.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t corner = costs[0];
    costs[0] = i + 1;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t upper = costs[j + 1];
      if (a.ids[i] == b.ids[j]) {
        costs[j + 1] = corner;
      } else {
        costs[j + 1] = 1 + std::min({upper, corner, costs[j]});
      }
      corner = upper;
    }
  }
  return costs[m];
}

ConcentrationReport concentration_report(const PosteriorEnsemble& ensemble,
                                         const RuleList& true_list) {
  if (ensemble.samples.empty())
    throw std::invalid_argument("ensemble is empty");
  ConcentrationReport report;
  report.distances.reserve(ensemble.samples.size());
  double total = 0.0;
  std::map<std::size_t, std::size_t> counts;
  for (const auto& s : ensemble.samples) {
    const std::size_t dist = levenshtein(s.list, true_list);
    report.distances.push_back(dist);
    total += static_cast<double>(dist);
    ++counts[dist];
  }
  report.mean_distance = total / static_cast<double>(report.distances.size());
  for (const auto& [dist, count] : counts)
    report.histogram[dist] = static_cast<double>(count) /
                             static_cast<double>(report.distances.size());
  return report;
}

RocResult roc_auc(const std::vector<double>& scores,
                  const std::vector<bool>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("scores and labels differ in length");
  const std::size_t n_pos =
      static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw DataError("ROC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocResult result;
  result.curve.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0, fp = 0;
  double concordant = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t tied_pos = 0, tied_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]])
        ++tied_pos;
      else
        ++tied_neg;
      ++j;
    }
    // Positives in this tie group beat all negatives ranked strictly below
    // and half of the tied negatives.
    concordant += static_cast<double>(tied_pos) *
                  (static_cast<double>(n_neg - fp - tied_neg) +
                   0.5 * static_cast<double>(tied_neg));
    tp += tied_pos;
    fp += tied_neg;
    result.curve.push_back({static_cast<double>(fp) / n_neg,
                            static_cast<double>(tp) / n_pos,
                            scores[order[i]]});
    i = j;
  }
  result.auc = concordant / (static_cast<double>(n_pos) * n_neg);
  return result;
}

CvReport run_cv_experiment(const Dataset& data, const CvConfig& config,
                           std::uint64_t seed) {
  CvReport report;
  report.seed = seed;
  FoldAssignment folds = split_folds(data, config.folds,
                                     derive_seed(seed, /*stream=*/0xf01d),
                                     config.stratified);

  double acc_total = 0.0, auc_total = 0.0;
  std::size_t scored_folds = 0;
  for (int f = 0; f < config.folds; ++f) {
    FoldResult fr;
    fr.fold = f;

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < data.n(); ++i)
      (folds.fold_of[i] == f ? test_rows : train_rows).push_back(i);
    Dataset train = subset(data, train_rows);
    Dataset test = subset(data, test_rows);

    const auto train_hist = train.label_histogram();
    if (std::count_if(train_hist.begin(), train_hist.end(),
                      [](std::size_t c) { return c > 0; }) < 2) {
      fr.skipped = true;
      fr.skip_reason = "training split has a single class";
      report.folds.push_back(std::move(fr));
      continue;
    }

    const auto start = std::chrono::steady_clock::now();
    AntecedentPool pool =
        mine_antecedents(train, config.min_support, config.max_cardinality);
    fr.pool_size = pool.size();

    Hyperparams hp = config.hp;
    if (hp.alpha.size() != train.num_labels())
      hp.alpha.assign(train.num_labels(), 1.0);
    PosteriorModel model(pool, train, hp);
    PosteriorEnsemble ensemble = run_ensemble(
        model, config.mcmc, derive_seed(seed, /*stream=*/0xcf0, f));
    fr.r_hat = ensemble.r_hat;
    fr.converged = ensemble.converged;

    PointSelection point = select_brl_point(ensemble, pool);
    fr.point_list = point.list;
    BayesianDecisionList fitted = fit_consequents(point.list, pool, train,
                                                  hp.alpha);
    fr.rendered = render(fitted);
    fr.train_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();

    std::size_t correct = 0;
    std::vector<double> scores(test.n());
    std::vector<bool> truth(test.n());
    for (std::size_t i = 0; i < test.n(); ++i) {
      Prediction pred = predict_point(fitted, pool, test, i);
      const std::size_t predicted =
          std::max_element(pred.probabilities.begin(),
                           pred.probabilities.end()) -
          pred.probabilities.begin();
      if (predicted == test.y[i]) ++correct;
      if (test.num_labels() == 2) {
        scores[i] = pred.probabilities[1];
        truth[i] = test.y[i] == 1;
      }
    }
    fr.accuracy = static_cast<double>(correct) / static_cast<double>(test.n());
    if (test.num_labels() == 2) {
      const bool both = std::count(truth.begin(), truth.end(), true) > 0 &&
                        std::count(truth.begin(), truth.end(), false) > 0;
      if (both) {
        RocResult rr = roc_auc(scores, truth);
        fr.auc = rr.auc;
        fr.roc = std::move(rr.curve);
      }
    }

    acc_total += fr.accuracy;
    auc_total += fr.auc;
    ++scored_folds;
    report.folds.push_back(std::move(fr));
  }

  if (scored_folds > 0) {
    report.mean_accuracy = acc_total / static_cast<double>(scored_folds);
    report.mean_auc = auc_total / static_cast<double>(scored_folds);
  }
  return report;
}

}  // namespace brl
