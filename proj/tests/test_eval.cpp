#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "brl/errors.hpp"
#include "brl/eval.hpp"
#include "brl/rng.hpp"
#include "oracles.hpp"

using namespace brl;

TEST_CASE("simulated data has the requested shape and is reproducible") {
  SimulationSpec spec;
  spec.n = 250;
  spec.seed = 5;
  SimulatedData a = simulate_dataset(spec);
  SimulatedData b = simulate_dataset(spec);
  CHECK(a.data.n() == 250);
  CHECK(a.data.num_items() == 100);
  CHECK(a.data.num_labels() == 2);
  CHECK(a.true_list.length() == 5);
  CHECK(a.true_theta.size() == 6);
  CHECK(a.data.y == b.data.y);
  CHECK(a.true_list == b.true_list);

  spec.seed = 6;
  SimulatedData c = simulate_dataset(spec);
  CHECK(a.data.y != c.data.y);
}

TEST_CASE("simulated feature columns have mean near one half") {
  SimulationSpec spec;
  spec.n = 10000;
  spec.seed = 11;
  SimulatedData sim = simulate_dataset(spec);
  for (std::size_t c = 0; c < sim.data.num_items(); ++c) {
    const double mean = static_cast<double>(sim.data.columns[c].count()) /
                        static_cast<double>(sim.data.n());
    CHECK(mean > 0.47);
    CHECK(mean < 0.53);
  }
}

TEST_CASE("labels follow the first matching rule's consequent") {
  SimulationSpec spec;
  spec.n = 20000;
  spec.seed = 23;
  SimulatedData sim = simulate_dataset(spec);
  // Empirical label-1 rate among rows first-matched by each true rule should
  // track the drawn consequent.
  for (std::size_t j = 0; j <= spec.true_list_length; ++j) {
    std::size_t hits = 0, total = 0;
    for (std::size_t i = 0; i < sim.data.n(); ++i) {
      std::size_t rule = spec.true_list_length;
      for (std::size_t k = 0; k < spec.true_list_length; ++k)
        if (sim.data.columns[sim.true_list.ids[k]].test(i)) {
          rule = k;
          break;
        }
      if (rule != j) continue;
      ++total;
      hits += sim.data.y[i];
    }
    if (total < 50) continue;
    const double rate = static_cast<double>(hits) / total;
    CHECK(std::abs(rate - sim.true_theta[j][1]) < 0.1);
  }
}

TEST_CASE("levenshtein worked examples") {
  RuleList abc{{0, 1, 2}};
  CHECK(levenshtein(abc, abc) == 0);
  CHECK(levenshtein(RuleList{{0, 1}}, RuleList{{1, 0}}) == 2);
  CHECK(levenshtein(RuleList{{0, 1, 2}}, RuleList{{0, 2}}) == 1);
  CHECK(levenshtein(RuleList{}, abc) == 3);
  CHECK(levenshtein(abc, RuleList{}) == 3);
}

TEST_CASE("levenshtein equals the full DP table on random pairs") {
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 500; ++rep) {
    auto random_list = [&](std::size_t max_len) {
      std::vector<std::uint32_t> ids(uniform_index(rng, max_len + 1));
      for (auto& id : ids) id = static_cast<std::uint32_t>(uniform_index(rng, 6));
      return ids;
    };
    const auto a = random_list(8);
    const auto b = random_list(8);
    CHECK(levenshtein(RuleList{a}, RuleList{b}) ==
          oracle::levenshtein_table(a, b));
  }
}

TEST_CASE("levenshtein satisfies the metric axioms") {
  Rng rng = make_rng(8);
  for (int rep = 0; rep < 300; ++rep) {
    auto random_list = [&] {
      std::vector<std::uint32_t> ids(uniform_index(rng, 7));
      for (auto& id : ids) id = static_cast<std::uint32_t>(uniform_index(rng, 5));
      return RuleList{ids};
    };
    const RuleList x = random_list(), y = random_list(), z = random_list();
    CHECK(levenshtein(x, y) == levenshtein(y, x));
    CHECK((levenshtein(x, y) == 0) == (x.ids == y.ids));
    CHECK(levenshtein(x, z) <= levenshtein(x, y) + levenshtein(y, z));
  }
}

TEST_CASE("concentration report histogram and mean") {
  RuleList truth{{1, 2}};
  PosteriorEnsemble only_truth;
  only_truth.samples = {{truth, -1.0, 1}};
  ConcentrationReport r1 = concentration_report(only_truth, truth);
  CHECK(r1.mean_distance == 0.0);
  CHECK(r1.histogram.at(0) == 1.0);

  PosteriorEnsemble two;
  two.samples = {{truth, -1.0, 1}, {RuleList{{3, 4}}, -2.0, 2}};
  ConcentrationReport r2 = concentration_report(two, truth);
  CHECK(r2.mean_distance == doctest::Approx(1.0));
  CHECK(r2.histogram.at(0) == doctest::Approx(0.5));
  CHECK(r2.histogram.at(2) == doctest::Approx(0.5));

  double total = 0.0;
  for (const auto& [d, p] : r2.histogram) total += p;
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("roc worked examples") {
  SUBCASE("perfect separation") {
    RocResult r = roc_auc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false});
    CHECK(r.auc == 1.0);
  }
  SUBCASE("one concordant and one discordant pair") {
    RocResult r = roc_auc({0.9, 0.8, 0.3}, {true, false, true});
    CHECK(r.auc == doctest::Approx(0.5));
  }
  SUBCASE("all ties give one half") {
    RocResult r = roc_auc({0.4, 0.4, 0.4, 0.4}, {true, false, true, false});
    CHECK(r.auc == doctest::Approx(0.5));
  }
  SUBCASE("single-class input is an error") {
    CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {true, true}), DataError);
  }
}

TEST_CASE("roc curve is a valid step function") {
  Rng rng = make_rng(15);
  std::vector<double> scores(40);
  std::vector<bool> labels(40);
  for (std::size_t i = 0; i < 40; ++i) {
    scores[i] = std::floor(uniform_unit(rng) * 10.0) / 10.0;
    labels[i] = uniform_unit(rng) < 0.5;
  }
  if (std::count(labels.begin(), labels.end(), true) == 0) labels[0] = true;
  if (std::count(labels.begin(), labels.end(), false) == 0) labels[1] = false;
  RocResult r = roc_auc(scores, labels);
  CHECK(r.curve.front().fpr == 0.0);
  CHECK(r.curve.front().tpr == 0.0);
  CHECK(r.curve.back().fpr == doctest::Approx(1.0));
  CHECK(r.curve.back().tpr == doctest::Approx(1.0));
  for (std::size_t i = 1; i < r.curve.size(); ++i) {
    CHECK(r.curve[i].fpr >= r.curve[i - 1].fpr);
    CHECK(r.curve[i].tpr >= r.curve[i - 1].tpr);
  }
}

TEST_CASE("auc equals brute-force concordance counting") {
  Rng rng = make_rng(44);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 20 + uniform_index(rng, 180);
    std::vector<double> scores(n);
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = std::floor(uniform_unit(rng) * 20.0) / 20.0;  // force ties
      labels[i] = uniform_unit(rng) < 0.4;
    }
    if (std::count(labels.begin(), labels.end(), true) == 0) labels[0] = true;
    if (std::count(labels.begin(), labels.end(), false) == 0)
      labels[n - 1] = false;
    CHECK(roc_auc(scores, labels).auc ==
          doctest::Approx(oracle::concordance_auc(scores, labels))
              .epsilon(1e-12));
  }
}

namespace {

CvConfig fast_cv_config() {
  CvConfig config;
  config.folds = 3;
  config.min_support = 0.1;
  config.max_cardinality = 1;
  config.hp.lambda = 3.0;
  config.mcmc.chains = 2;
  config.mcmc.initial_iterations = 1500;
  config.mcmc.max_iterations = 6000;
  return config;
}

}  // namespace

TEST_CASE("cross-validation is deterministic and leak-free") {
  SimulationSpec spec;
  spec.n = 300;
  spec.n_rules = 12;
  spec.true_list_length = 3;
  spec.seed = 61;
  SimulatedData sim = simulate_dataset(spec);

  CvConfig config = fast_cv_config();
  CvReport a = run_cv_experiment(sim.data, config, 9);
  CvReport b = run_cv_experiment(sim.data, config, 9);
  REQUIRE(a.folds.size() == 3);
  CHECK(a.mean_accuracy == b.mean_accuracy);
  for (std::size_t f = 0; f < a.folds.size(); ++f) {
    CHECK(a.folds[f].point_list == b.folds[f].point_list);
    CHECK(a.folds[f].accuracy == b.folds[f].accuracy);
  }

  // Mining leakage guard: each fold's pool must be recomputable from the
  // training split alone.
  FoldAssignment folds = split_folds(sim.data, config.folds,
                                     derive_seed(9, 0xf01d), false);
  for (int f = 0; f < config.folds; ++f) {
    std::vector<std::size_t> train_rows;
    for (std::size_t i = 0; i < sim.data.n(); ++i)
      if (folds.fold_of[i] != f) train_rows.push_back(i);
    Dataset train = subset(sim.data, train_rows);
    AntecedentPool from_train =
        mine_antecedents(train, config.min_support, config.max_cardinality);
    CHECK(from_train.size() == a.folds[f].pool_size);
    AntecedentPool again =
        mine_antecedents(train, config.min_support, config.max_cardinality);
    for (std::size_t k = 0; k < from_train.size(); ++k)
      CHECK(from_train.antecedents[k].support_count ==
            again.antecedents[k].support_count);
  }
}

TEST_CASE("cv accuracy approaches the generating list's bayes rate") {
  SimulationSpec spec;
  spec.n = 1200;
  spec.n_rules = 15;
  spec.true_list_length = 3;
  spec.seed = 71;
  SimulatedData sim = simulate_dataset(spec);

  // Bayes rate: expected accuracy of the true list's argmax classifier.
  double bayes = 0.0;
  for (std::size_t i = 0; i < sim.data.n(); ++i) {
    std::size_t rule = spec.true_list_length;
    for (std::size_t k = 0; k < spec.true_list_length; ++k)
      if (sim.data.columns[sim.true_list.ids[k]].test(i)) {
        rule = k;
        break;
      }
    bayes += std::max(sim.true_theta[rule][0], sim.true_theta[rule][1]);
  }
  bayes /= static_cast<double>(sim.data.n());

  CvConfig config = fast_cv_config();
  config.mcmc.initial_iterations = 4000;
  config.mcmc.max_iterations = 16000;
  CvReport report = run_cv_experiment(sim.data, config, 5);
  CHECK(report.mean_accuracy > bayes - 0.06);
}

TEST_CASE("posterior averaging is not catastrophically worse than the point list") {
  // Held-out log-loss of BRL-post should beat BRL-point in most replicates.
  int post_wins = 0;
  const int replicates = 10;
  for (int rep = 0; rep < replicates; ++rep) {
    SimulationSpec spec;
    spec.n = 6000;
    spec.seed = 100 + static_cast<std::uint64_t>(rep);
    SimulatedData sim = simulate_dataset(spec);

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < sim.data.n(); ++i)
      (i < 5000 ? train_rows : test_rows).push_back(i);
    Dataset train = subset(sim.data, train_rows);
    Dataset test = subset(sim.data, test_rows);

    AntecedentPool pool = singleton_pool(train);
    Hyperparams hp;
    hp.lambda = 5.0;
    PosteriorModel model(pool, train, hp);
    McmcConfig mcmc;
    mcmc.initial_iterations = 4000;
    mcmc.max_iterations = 16000;
    PosteriorEnsemble ensemble =
        run_ensemble(model, mcmc, 900 + static_cast<std::uint64_t>(rep));

    PointSelection point = select_brl_point(ensemble, pool);
    BayesianDecisionList fitted =
        fit_consequents(point.list, pool, train, hp.alpha);

    double point_loss = 0.0, post_loss = 0.0;
    for (std::size_t i = 0; i < test.n(); ++i) {
      Prediction p = predict_point(fitted, pool, test, i);
      point_loss -= std::log(std::max(p.probabilities[test.y[i]], 1e-12));
      auto probs = predict_posterior(ensemble, pool, train, hp.alpha, test, i);
      post_loss -= std::log(std::max(probs[test.y[i]], 1e-12));
    }
    if (post_loss <= point_loss) ++post_wins;
  }
  CHECK(post_wins >= 8);
}
