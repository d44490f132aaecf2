#pragma once

#include <cstdint>
#include <vector>

#include "brl/bitset.hpp"
#include "brl/dataset.hpp"
#include "brl/mining.hpp"
#include "brl/rng.hpp"

namespace brl {

// Ordered, duplicate-free sequence of pool antecedent indices.
struct RuleList {
  std::vector<std::uint32_t> ids;

  std::size_t length() const { return ids.size(); }
  bool operator==(const RuleList&) const = default;
  auto operator<=>(const RuleList&) const = default;

  // Mean antecedent cardinality; 0 for the empty list.
  double mean_cardinality(const AntecedentPool& pool) const;
};

// First-match label counts; row 0 is the default rule, row j >= 1 pairs with
// the j-th antecedent of the list.
struct CountMatrix {
  std::size_t num_labels = 0;
  std::vector<std::size_t> data;  // (m+1) x L, row-major

  std::size_t rows() const { return data.size() / num_labels; }
  std::size_t at(std::size_t row, std::size_t label) const {
    return data[row * num_labels + label];
  }
  std::size_t& at(std::size_t row, std::size_t label) {
    return data[row * num_labels + label];
  }
};

struct Hyperparams {
  double lambda = 3.0;              // prior expected list length
  double eta = 1.0;                 // prior expected antecedent cardinality
  std::vector<double> alpha = {1.0, 1.0};  // Dirichlet pseudocounts, length L

  void validate() const;
};

// log sum_{j=0}^{max_terms} lambda^j / j!   (truncated-Poisson normalizer)
double log_truncated_poisson_normalizer(double rate, std::size_t max_terms);

CountMatrix compute_counts(const RuleList& d, const AntecedentPool& pool,
                           const Dataset& data);

// Hierarchical list prior: truncated-Poisson length, availability-truncated
// Poisson cardinalities, uniform antecedent choice within a cardinality.
double log_prior(const RuleList& d, const AntecedentPool& pool,
                 const Hyperparams& hp);

// Dirichlet-multinomial marginal of the observed label assignments given the
// first-match partition; all-zero rows contribute exactly 0.
double log_marginal_likelihood(const CountMatrix& counts,
                               const std::vector<double>& alpha);

double log_posterior(const RuleList& d, const AntecedentPool& pool,
                     const Dataset& data, const Hyperparams& hp);

// Draw a list from the generative prior. Always returns a valid list.
RuleList sample_prior_list(const AntecedentPool& pool, const Hyperparams& hp,
                           Rng& rng);

// All ordered duplicate-free lists over the pool (including the empty list).
// Intended for pools with |A| <= ~8; count is sum_m |A|!/(|A|-m)!.
std::vector<RuleList> enumerate_rule_lists(const AntecedentPool& pool);

// Shared evaluation state for repeated posterior computation over one
// (pool, dataset, hyperparams) triple: per-label observation masks, cached
// prior normalizers, and an integer lgamma table when alpha is integral.
class PosteriorModel {
 public:
  PosteriorModel(const AntecedentPool& pool, const Dataset& data,
                 const Hyperparams& hp);

  const AntecedentPool& pool() const { return *pool_; }
  const Dataset& data() const { return *data_; }
  const Hyperparams& hp() const { return hp_; }
  const std::vector<Bitset>& label_masks() const { return label_masks_; }

  double log_prior(const RuleList& d) const;
  double log_posterior(const RuleList& d) const;

  // Dirichlet-multinomial contribution of a single count row.
  double row_log_marginal(const std::size_t* row) const;
  double lgamma_shifted(std::size_t count, double alpha_component) const;

 private:
  const AntecedentPool* pool_;
  const Dataset* data_;
  Hyperparams hp_;
  std::vector<Bitset> label_masks_;
  double log_m_normalizer_;
  double alpha_sum_;
  double lgamma_alpha_sum_;
  std::vector<double> lgamma_alpha_;
  bool alpha_integral_;
  std::vector<double> lgamma_table_;  // lgamma(k) for integer k
  std::vector<double> eta_weights_;   // eta^c / c! per cardinality

  friend class ListScorer;
};

// Incremental first-match scorer used by the sampler. Maintains per-prefix
// "still unclaimed" bitsets so a candidate list sharing a prefix with the
// current one only recomputes rows from the first differing position.
class ListScorer {
 public:
  explicit ListScorer(const PosteriorModel& model);

  void reset(const RuleList& d);
  const RuleList& current() const { return current_; }
  double current_log_posterior() const { return current_log_posterior_; }

  // Scores a candidate without disturbing the committed state.
  double score(const RuleList& candidate);
  // Adopts the most recently scored candidate.
  void commit();

  CountMatrix current_counts() const;

 private:
  double evaluate(const RuleList& d, std::size_t common_prefix);

  const PosteriorModel* model_;
  RuleList current_;
  double current_log_posterior_ = 0.0;
  // Committed state: unclaimed_[j] = observations not claimed by rules 1..j.
  std::vector<Bitset> unclaimed_;
  std::vector<std::vector<std::size_t>> rows_;   // per-rule count rows
  std::vector<double> row_ll_;                   // per-rule marginal terms
  // Staged candidate (valid between score() and commit()).
  RuleList cand_;
  std::size_t cand_prefix_ = 0;
  double cand_log_posterior_ = 0.0;
  std::vector<Bitset> cand_unclaimed_;
  std::vector<std::vector<std::size_t>> cand_rows_;
  std::vector<double> cand_row_ll_;
};

}  // namespace brl
