#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "brl/mcmc.hpp"
#include "brl/model.hpp"

namespace brl {

// A fitted decision list: list structure, rendered antecedents, posterior
// Dirichlet parameters per rule (row 0 = default rule), posterior means and
// equal-tailed marginal credible intervals.
struct BayesianDecisionList {
  RuleList list;
  std::vector<std::string> antecedent_text;        // per rule, size m
  std::vector<std::vector<double>> dirichlet_params;  // (m+1) x L
  std::vector<std::vector<double>> posterior_means;   // (m+1) x L
  std::vector<std::vector<std::pair<double, double>>> credible_intervals;
  double interval_level = 0.95;
  std::vector<std::string> label_names;
};

struct Prediction {
  std::vector<double> probabilities;  // length L, sums to 1
  std::size_t matched_rule_index = 0;  // 0 = default rule
  std::string explanation;             // matched antecedent text or "default"
};

// Equal-tailed interval of the marginal Beta(a, total - a) of one Dirichlet
// component at the given level.
std::pair<double, double> credible_interval(
    const std::vector<double>& dirichlet_row, std::size_t label, double level);

// Posterior consequents for a fixed list: Dirichlet(alpha + N_j) per rule.
BayesianDecisionList fit_consequents(const RuleList& d,
                                     const AntecedentPool& pool,
                                     const Dataset& data,
                                     const std::vector<double>& alpha,
                                     double interval_level = 0.95);

// Index (0 = default) of the first antecedent of `list` matching row `row`.
std::size_t first_match(const RuleList& list, const AntecedentPool& pool,
                        const Dataset& data, std::size_t row);

// First-match prediction for one observation of `data`.
Prediction predict_point(const BayesianDecisionList& model,
                         const AntecedentPool& pool, const Dataset& data,
                         std::size_t row);

struct PointSelection {
  RuleList list;
  double log_posterior = 0.0;
  double posterior_mean_length = 0.0;
  double posterior_mean_cardinality = 0.0;
  int window_widenings = 0;  // >0 when the m / c-bar window had to be widened
};

// Highest-posterior sample whose length is in {floor(m-bar), ceil(m-bar)} and
// whose mean cardinality lies in [floor(c-bar-bar), ceil(c-bar-bar)]; ties
// broken by earliest (chain, iteration).
PointSelection select_brl_point(const PosteriorEnsemble& ensemble,
                                const AntecedentPool& pool);

// Sample with the globally highest log posterior (same tie-break).
RuleList select_map(const PosteriorEnsemble& ensemble);

// Posterior-predictive probabilities: uniform average of per-sample
// first-match posterior means, consequents fit on the training data.
std::vector<double> predict_posterior(const PosteriorEnsemble& ensemble,
                                      const AntecedentPool& pool,
                                      const Dataset& data,
                                      const std::vector<double>& alpha,
                                      const Dataset& query, std::size_t row);

// Deduplicated ensemble view for repeated posterior prediction.
struct WeightedList {
  RuleList list;
  std::size_t multiplicity = 0;
};
std::vector<WeightedList> distinct_lists(const PosteriorEnsemble& ensemble);

// if / else if / else block, one rule per line, probability of `focus_label`
// as a percentage with its credible interval.
std::string render(const BayesianDecisionList& model,
                   std::size_t focus_label = 1);

}  // namespace brl
