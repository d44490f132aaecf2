#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "brl/dataset.hpp"
#include "brl/inference.hpp"
#include "brl/mcmc.hpp"
#include "brl/model.hpp"

namespace brl {

// Decision-list data generator: feature columns are rule truth values, so the
// fitting pool is the set of singleton columns.
struct SimulationSpec {
  std::size_t n = 100;
  std::size_t n_rules = 100;
  std::size_t true_list_length = 5;
  double beta_a = 0.5;  // consequent prior Beta(a, b), two labels
  double beta_b = 0.5;
  double feature_prob = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedData {
  Dataset data;
  RuleList true_list;
  std::vector<std::array<double, 2>> true_theta;  // per rule; last = default
};

SimulatedData simulate_dataset(const SimulationSpec& spec);

// Unit-cost edit distance over antecedent-id sequences.
std::size_t levenshtein(const RuleList& a, const RuleList& b);

struct ConcentrationReport {
  std::vector<std::size_t> distances;  // per post-burn-in sample
  double mean_distance = 0.0;
  std::map<std::size_t, double> histogram;  // distance -> posterior proportion
};

ConcentrationReport concentration_report(const PosteriorEnsemble& ensemble,
                                         const RuleList& true_list);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;
};

struct RocResult {
  std::vector<RocPoint> curve;
  double auc = 0.0;  // Mann-Whitney concordance, ties counted 1/2
};

// `labels[i]` true marks the positive class; scores are positive-class
// probabilities (any monotone score works).
RocResult roc_auc(const std::vector<double>& scores,
                  const std::vector<bool>& labels);

struct CvConfig {
  int folds = 5;
  bool stratified = false;
  double min_support = 0.05;
  std::size_t max_cardinality = 3;
  Hyperparams hp;
  McmcConfig mcmc;
};

struct FoldResult {
  int fold = 0;
  bool skipped = false;
  std::string skip_reason;
  double accuracy = 0.0;
  double auc = 0.0;
  double train_seconds = 0.0;
  double r_hat = 0.0;
  bool converged = false;
  std::size_t pool_size = 0;
  RuleList point_list;
  std::string rendered;
  std::vector<RocPoint> roc;
};

struct CvReport {
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double mean_auc = 0.0;
  std::uint64_t seed = 0;
};

// Per fold: mine on the training split, sample, select the point estimate,
// fit consequents on the training split, evaluate on the held-out fold.
// Accuracy is argmax classification with ties to the lower label index; AUC
// treats label id 1 as the positive class (binary problems only; AUC is 0
// for multiclass data).
CvReport run_cv_experiment(const Dataset& data, const CvConfig& config,
                           std::uint64_t seed);

}  // namespace brl
