#include "brl/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brl/errors.hpp"

namespace brl {

namespace {

void validate_list(const RuleList& d, const AntecedentPool& pool) {
  std::vector<bool> seen(pool.size(), false);
  for (auto id : d.ids) {
    if (id >= pool.size())
      throw std::invalid_argument("rule list references antecedent out of range");
    if (seen[id])
      throw std::invalid_argument("rule list contains duplicate antecedents");
    seen[id] = true;
  }
}

std::vector<double> poisson_weights(double rate, std::size_t max_cardinality) {
  std::vector<double> w(max_cardinality + 1, 0.0);
  for (std::size_t c = 1; c <= max_cardinality; ++c)
    w[c] = std::exp(static_cast<double>(c) * std::log(rate) -
                    std::lgamma(static_cast<double>(c) + 1.0));
  return w;
}

double log_prior_impl(const RuleList& d, const AntecedentPool& pool,
                      double lambda, double log_m_normalizer,
                      const std::vector<double>& eta_weights) {
  const double m = static_cast<double>(d.length());
  double logp = m * std::log(lambda) - std::lgamma(m + 1.0) - log_m_normalizer;

  std::vector<std::size_t> avail = pool.cardinality_counts();
  for (auto id : d.ids) {
    const std::size_t card = pool.antecedents[id].cardinality();
    double denom = 0.0;
    for (std::size_t c = 1; c < avail.size(); ++c)
      if (avail[c] > 0) denom += eta_weights[c];
    logp += std::log(eta_weights[card]) - std::log(denom) -
            std::log(static_cast<double>(avail[card]));
    --avail[card];
  }
  return logp;
}

}  // namespace

double RuleList::mean_cardinality(const AntecedentPool& pool) const {
  if (ids.empty()) return 0.0;
  std::size_t total = 0;
  for (auto id : ids) total += pool.antecedents[id].cardinality();
  return static_cast<double>(total) / static_cast<double>(ids.size());
}

void Hyperparams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("lambda must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw ConfigError("eta must be positive");
  if (alpha.empty()) throw ConfigError("alpha must be nonempty");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a))
      throw ConfigError("alpha entries must be positive");
}

double log_truncated_poisson_normalizer(double rate, std::size_t max_terms) {
  const double log_rate = std::log(rate);
  double max_term = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(max_terms + 1);
  for (std::size_t j = 0; j <= max_terms; ++j) {
    terms[j] = static_cast<double>(j) * log_rate -
               std::lgamma(static_cast<double>(j) + 1.0);
    max_term = std::max(max_term, terms[j]);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

CountMatrix compute_counts(const RuleList& d, const AntecedentPool& pool,
                           const Dataset& data) {
  if (pool.n != data.n())
    throw std::invalid_argument("pool and dataset observation counts differ");
  validate_list(d, pool);

  const std::size_t num_labels = data.num_labels();
  std::vector<Bitset> masks(num_labels, Bitset(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i) masks[data.y[i]].set(i);

  CountMatrix counts;
  counts.num_labels = num_labels;
  counts.data.assign((d.length() + 1) * num_labels, 0);

  Bitset unclaimed(data.n(), true);
  for (std::size_t j = 0; j < d.length(); ++j) {
    const Bitset& cov = pool.covers[d.ids[j]];
    for (std::size_t l = 0; l < num_labels; ++l)
      counts.at(j + 1, l) = Bitset::and_count(cov, unclaimed, masks[l]);
    unclaimed.and_not(cov);
  }
  for (std::size_t l = 0; l < num_labels; ++l)
    counts.at(0, l) = Bitset::and_count(unclaimed, masks[l]);
  return counts;
}

double log_prior(const RuleList& d, const AntecedentPool& pool,
                 const Hyperparams& hp) {
  hp.validate();
  validate_list(d, pool);
  return log_prior_impl(
      d, pool, hp.lambda,
      log_truncated_poisson_normalizer(hp.lambda, pool.size()),
      poisson_weights(hp.eta, pool.max_cardinality));
}

double log_marginal_likelihood(const CountMatrix& counts,
                               const std::vector<double>& alpha) {
  if (alpha.size() != counts.num_labels)
    throw std::invalid_argument("alpha length does not match label count");
  for (double a : alpha)
    if (!(a > 0.0)) throw std::invalid_argument("alpha entries must be positive");

  double alpha_sum = 0.0;
  for (double a : alpha) alpha_sum += a;
  const double lg_alpha_sum = std::lgamma(alpha_sum);

  double total = 0.0;
  for (std::size_t row = 0; row < counts.rows(); ++row) {
    std::size_t row_sum = 0;
    for (std::size_t l = 0; l < counts.num_labels; ++l)
      row_sum += counts.at(row, l);
    if (row_sum == 0) continue;
    double term = lg_alpha_sum -
                  std::lgamma(static_cast<double>(row_sum) + alpha_sum);
    for (std::size_t l = 0; l < counts.num_labels; ++l)
      term += std::lgamma(static_cast<double>(counts.at(row, l)) + alpha[l]) -
              std::lgamma(alpha[l]);
    total += term;
  }
  return total;
}

double log_posterior(const RuleList& d, const AntecedentPool& pool,
                     const Dataset& data, const Hyperparams& hp) {
  return log_prior(d, pool, hp) +
         log_marginal_likelihood(compute_counts(d, pool, data), hp.alpha);
}

RuleList sample_prior_list(const AntecedentPool& pool, const Hyperparams& hp,
                           Rng& rng) {
  hp.validate();
  if (pool.size() == 0) throw std::invalid_argument("pool is empty");

  // List length: Poisson(lambda) truncated to 0..|A|.
  std::vector<double> weights(pool.size() + 1);
  weights[0] = 1.0;
  for (std::size_t j = 1; j < weights.size(); ++j)
    weights[j] = weights[j - 1] * hp.lambda / static_cast<double>(j);
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform_unit(rng) * total;
  std::size_t m = weights.size() - 1;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (u < weights[j]) {
      m = j;
      break;
    }
    u -= weights[j];
  }

  // Unused antecedents per cardinality (swap-remove draw keeps it O(1)).
  std::map<std::size_t, std::vector<std::uint32_t>> unused(
      pool.by_cardinality.begin(), pool.by_cardinality.end());
  const std::vector<double> eta_w = poisson_weights(hp.eta, pool.max_cardinality);

  RuleList d;
  for (std::size_t j = 0; j < m; ++j) {
    double denom = 0.0;
    for (const auto& [card, ids] : unused)
      if (!ids.empty()) denom += eta_w[card];
    double v = uniform_unit(rng) * denom;
    std::size_t chosen_card = 0;
    for (const auto& [card, ids] : unused) {
      if (ids.empty()) continue;
      chosen_card = card;
      if (v < eta_w[card]) break;
      v -= eta_w[card];
    }
    auto& ids = unused[chosen_card];
    std::size_t pick = uniform_index(rng, ids.size());
    d.ids.push_back(ids[pick]);
    ids[pick] = ids.back();
    ids.pop_back();
  }
  return d;
}

std::vector<RuleList> enumerate_rule_lists(const AntecedentPool& pool) {
  std::vector<RuleList> out;
  RuleList current;
  std::vector<bool> used(pool.size(), false);
  auto recurse = [&](auto&& self) -> void {
    out.push_back(current);
    for (std::uint32_t id = 0; id < pool.size(); ++id) {
      if (used[id]) continue;
      used[id] = true;
      current.ids.push_back(id);
      self(self);
      current.ids.pop_back();
      used[id] = false;
    }
  };
  recurse(recurse);
  return out;
}

PosteriorModel::PosteriorModel(const AntecedentPool& pool, const Dataset& data,
                               const Hyperparams& hp)
    : pool_(&pool), data_(&data), hp_(hp) {
  hp_.validate();
  if (pool.n != data.n())
    throw std::invalid_argument("pool and dataset observation counts differ");
  if (hp_.alpha.size() != data.num_labels())
    throw std::invalid_argument("alpha length does not match label count");

  label_masks_.assign(data.num_labels(), Bitset(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i) label_masks_[data.y[i]].set(i);

  log_m_normalizer_ = log_truncated_poisson_normalizer(hp_.lambda, pool.size());

  alpha_sum_ = 0.0;
  for (double a : hp_.alpha) alpha_sum_ += a;
  lgamma_alpha_sum_ = std::lgamma(alpha_sum_);
  lgamma_alpha_.resize(hp_.alpha.size());
  for (std::size_t l = 0; l < hp_.alpha.size(); ++l)
    lgamma_alpha_[l] = std::lgamma(hp_.alpha[l]);

  alpha_integral_ = true;
  for (double a : hp_.alpha)
    if (a != std::floor(a)) alpha_integral_ = false;
  if (alpha_integral_) {
    const auto top = data.n() + static_cast<std::size_t>(alpha_sum_) + 2;
    lgamma_table_.resize(top + 1, 0.0);
    for (std::size_t k = 1; k <= top; ++k)
      lgamma_table_[k] = std::lgamma(static_cast<double>(k));
  }

  eta_weights_ = poisson_weights(hp_.eta, pool.max_cardinality);
}

double PosteriorModel::lgamma_shifted(std::size_t count,
                                      double alpha_component) const {
  if (alpha_integral_) {
    const auto idx = count + static_cast<std::size_t>(alpha_component);
    return lgamma_table_[idx];
  }
  return std::lgamma(static_cast<double>(count) + alpha_component);
}

double PosteriorModel::row_log_marginal(const std::size_t* row) const {
  std::size_t row_sum = 0;
  for (std::size_t l = 0; l < hp_.alpha.size(); ++l) row_sum += row[l];
  if (row_sum == 0) return 0.0;
  double term = lgamma_alpha_sum_ - lgamma_shifted(row_sum, alpha_sum_);
  for (std::size_t l = 0; l < hp_.alpha.size(); ++l)
    term += lgamma_shifted(row[l], hp_.alpha[l]) - lgamma_alpha_[l];
  return term;
}

double PosteriorModel::log_prior(const RuleList& d) const {
  validate_list(d, *pool_);
  return log_prior_impl(d, *pool_, hp_.lambda, log_m_normalizer_,
                        eta_weights_);
}

double PosteriorModel::log_posterior(const RuleList& d) const {
  validate_list(d, *pool_);
  const std::size_t num_labels = data_->num_labels();
  std::vector<std::size_t> row(num_labels);
  Bitset unclaimed(data_->n(), true);
  double ll = 0.0;
  for (auto id : d.ids) {
    const Bitset& cov = pool_->covers[id];
    for (std::size_t l = 0; l < num_labels; ++l)
      row[l] = Bitset::and_count(cov, unclaimed, label_masks_[l]);
    ll += row_log_marginal(row.data());
    unclaimed.and_not(cov);
  }
  for (std::size_t l = 0; l < num_labels; ++l)
    row[l] = Bitset::and_count(unclaimed, label_masks_[l]);
  ll += row_log_marginal(row.data());
  return ll + log_prior(d);
}

ListScorer::ListScorer(const PosteriorModel& model) : model_(&model) {
  reset(RuleList{});
}

void ListScorer::reset(const RuleList& d) {
  current_ = RuleList{};
  unclaimed_.assign(1, Bitset(model_->data().n(), true));
  rows_.clear();
  row_ll_.clear();
  current_log_posterior_ = evaluate(d, 0);
  commit();
}

double ListScorer::score(const RuleList& candidate) {
  std::size_t p = 0;
  while (p < candidate.length() && p < current_.length() &&
         candidate.ids[p] == current_.ids[p])
    ++p;
  return evaluate(candidate, p);
}

double ListScorer::evaluate(const RuleList& d, std::size_t common_prefix) {
  const auto& model = *model_;
  const std::size_t num_labels = model.data().num_labels();
  const std::size_t suffix = d.length() - common_prefix;

  cand_ = d;
  cand_prefix_ = common_prefix;
  cand_unclaimed_.resize(suffix);
  cand_rows_.resize(suffix);
  cand_row_ll_.resize(suffix);

  double ll = 0.0;
  for (std::size_t j = 0; j < common_prefix; ++j) ll += row_ll_[j];

  const Bitset* prev = &unclaimed_[common_prefix];
  for (std::size_t j = 0; j < suffix; ++j) {
    const Bitset& cov = model.pool().covers[d.ids[common_prefix + j]];
    auto& row = cand_rows_[j];
    row.resize(num_labels);
    for (std::size_t l = 0; l < num_labels; ++l)
      row[l] = Bitset::and_count(cov, *prev, model.label_masks()[l]);
    cand_unclaimed_[j] = *prev;
    cand_unclaimed_[j].and_not(cov);
    cand_row_ll_[j] = model.row_log_marginal(row.data());
    ll += cand_row_ll_[j];
    prev = &cand_unclaimed_[j];
  }

  std::vector<std::size_t> default_row(num_labels);
  for (std::size_t l = 0; l < num_labels; ++l)
    default_row[l] = Bitset::and_count(*prev, model.label_masks()[l]);
  ll += model.row_log_marginal(default_row.data());

  cand_log_posterior_ = ll + model.log_prior(d);
  return cand_log_posterior_;
}

void ListScorer::commit() {
  const std::size_t suffix = cand_.length() - cand_prefix_;
  unclaimed_.resize(cand_prefix_ + 1 + suffix, Bitset());
  rows_.resize(cand_.length());
  row_ll_.resize(cand_.length());
  for (std::size_t j = 0; j < suffix; ++j) {
    std::swap(unclaimed_[cand_prefix_ + 1 + j], cand_unclaimed_[j]);
    std::swap(rows_[cand_prefix_ + j], cand_rows_[j]);
    row_ll_[cand_prefix_ + j] = cand_row_ll_[j];
  }
  current_ = cand_;
  current_log_posterior_ = cand_log_posterior_;
}

CountMatrix ListScorer::current_counts() const {
  const std::size_t num_labels = model_->data().num_labels();
  CountMatrix counts;
  counts.num_labels = num_labels;
  counts.data.assign((current_.length() + 1) * num_labels, 0);
  for (std::size_t j = 0; j < current_.length(); ++j)
    for (std::size_t l = 0; l < num_labels; ++l)
      counts.at(j + 1, l) = rows_[j][l];
  const Bitset& unclaimed = unclaimed_.back();
  for (std::size_t l = 0; l < num_labels; ++l)
    counts.at(0, l) =
        Bitset::and_count(unclaimed, model_->label_masks()[l]);
  return counts;
}

}  // namespace brl
