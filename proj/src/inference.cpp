#include "brl/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <boost/math/distributions/beta.hpp>

#include "brl/errors.hpp"

namespace brl {

std::pair<double, double> credible_interval(
    const std::vector<double>& dirichlet_row, std::size_t label,
    double level) {
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("interval level must be in (0, 1)");
  const double total =
      std::accumulate(dirichlet_row.begin(), dirichlet_row.end(), 0.0);
  const double a = dirichlet_row[label];
  const double b = total - a;
  boost::math::beta_distribution<double> marginal(a, b);
  const double tail = (1.0 - level) / 2.0;
  return {boost::math::quantile(marginal, tail),
          boost::math::quantile(marginal, 1.0 - tail)};
}

BayesianDecisionList fit_consequents(const RuleList& d,
                                     const AntecedentPool& pool,
                                     const Dataset& data,
                                     const std::vector<double>& alpha,
                                     double interval_level) {
  CountMatrix counts = compute_counts(d, pool, data);
  if (alpha.size() != counts.num_labels)
    throw std::invalid_argument("alpha length does not match label count");

  BayesianDecisionList model;
  model.list = d;
  model.label_names = data.label_names;
  model.interval_level = interval_level;
  for (auto id : d.ids)
    model.antecedent_text.push_back(pool.antecedents[id].render(data));

  const std::size_t rows = counts.rows();
  model.dirichlet_params.resize(rows);
  model.posterior_means.resize(rows);
  model.credible_intervals.resize(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    auto& params = model.dirichlet_params[j];
    params.resize(counts.num_labels);
    double total = 0.0;
    for (std::size_t l = 0; l < counts.num_labels; ++l) {
      params[l] = alpha[l] + static_cast<double>(counts.at(j, l));
      total += params[l];
    }
    auto& means = model.posterior_means[j];
    means.resize(counts.num_labels);
    auto& intervals = model.credible_intervals[j];
    intervals.resize(counts.num_labels);
    for (std::size_t l = 0; l < counts.num_labels; ++l) {
      means[l] = params[l] / total;
      intervals[l] = credible_interval(params, l, interval_level);
    }
  }
  return model;
}

std::size_t first_match(const RuleList& list, const AntecedentPool& pool,
                        const Dataset& data, std::size_t row) {
  for (std::size_t j = 0; j < list.length(); ++j) {
    const auto& items = pool.antecedents[list.ids[j]].items;
    bool all = true;
    for (auto item : items)
      if (!data.value(row, item)) {
        all = false;
        break;
      }
    if (all) return j + 1;
  }
  return 0;
}

Prediction predict_point(const BayesianDecisionList& model,
                         const AntecedentPool& pool, const Dataset& data,
                         std::size_t row) {
  if (row >= data.n()) throw std::invalid_argument("row index out of range");
  Prediction pred;
  pred.matched_rule_index = first_match(model.list, pool, data, row);
  pred.probabilities = model.posterior_means[pred.matched_rule_index];
  pred.explanation = pred.matched_rule_index == 0
                         ? "default"
                         : model.antecedent_text[pred.matched_rule_index - 1];
  return pred;
}

namespace {

double mean_list_length(const PosteriorEnsemble& ensemble) {
  double total = 0.0;
  for (const auto& s : ensemble.samples)
    total += static_cast<double>(s.list.length());
  return total / static_cast<double>(ensemble.samples.size());
}

}  // namespace

PointSelection select_brl_point(const PosteriorEnsemble& ensemble,
                                const AntecedentPool& pool) {
  if (ensemble.samples.empty())
    throw std::invalid_argument("ensemble is empty");

  PointSelection sel;
  sel.posterior_mean_length = mean_list_length(ensemble);
  double cbar_total = 0.0;
  for (const auto& s : ensemble.samples)
    cbar_total += s.list.mean_cardinality(pool);
  sel.posterior_mean_cardinality =
      cbar_total / static_cast<double>(ensemble.samples.size());

  double m_lo = std::floor(sel.posterior_mean_length);
  double m_hi = std::ceil(sel.posterior_mean_length);
  double c_lo = std::floor(sel.posterior_mean_cardinality);
  double c_hi = std::ceil(sel.posterior_mean_cardinality);

  for (;;) {
    const SampleRecord* best = nullptr;
    for (const auto& s : ensemble.samples) {
      const auto m = static_cast<double>(s.list.length());
      if (m < m_lo || m > m_hi) continue;
      const double cbar = s.list.mean_cardinality(pool);
      if (cbar < c_lo || cbar > c_hi) continue;
      if (!best || s.log_posterior > best->log_posterior) best = &s;
    }
    if (best) {
      sel.list = best->list;
      sel.log_posterior = best->log_posterior;
      return sel;
    }
    ++sel.window_widenings;
    m_lo = std::max(0.0, m_lo - 1.0);
    m_hi += 1.0;
    c_lo = std::max(0.0, c_lo - 1.0);
    c_hi += 1.0;
  }
}

RuleList select_map(const PosteriorEnsemble& ensemble) {
  if (ensemble.samples.empty())
    throw std::invalid_argument("ensemble is empty");
  const SampleRecord* best = &ensemble.samples[0];
  for (const auto& s : ensemble.samples)
    if (s.log_posterior > best->log_posterior) best = &s;
  return best->list;
}

std::vector<WeightedList> distinct_lists(const PosteriorEnsemble& ensemble) {
  std::map<RuleList, std::size_t> counts;
  for (const auto& s : ensemble.samples) ++counts[s.list];
  std::vector<WeightedList> out;
  out.reserve(counts.size());
  for (auto& [list, count] : counts) out.push_back({list, count});
  return out;
}

std::vector<double> predict_posterior(const PosteriorEnsemble& ensemble,
                                      const AntecedentPool& pool,
                                      const Dataset& data,
                                      const std::vector<double>& alpha,
                                      const Dataset& query, std::size_t row) {
  if (ensemble.samples.empty())
    throw std::invalid_argument("ensemble is empty");
  std::vector<double> probs(data.num_labels(), 0.0);
  std::size_t total = 0;
  for (const auto& wl : distinct_lists(ensemble)) {
    CountMatrix counts = compute_counts(wl.list, pool, data);
    const std::size_t j = first_match(wl.list, pool, query, row);
    double row_total = 0.0;
    for (std::size_t l = 0; l < counts.num_labels; ++l)
      row_total += alpha[l] + static_cast<double>(counts.at(j, l));
    for (std::size_t l = 0; l < counts.num_labels; ++l)
      probs[l] += static_cast<double>(wl.multiplicity) *
                  (alpha[l] + static_cast<double>(counts.at(j, l))) / row_total;
    total += wl.multiplicity;
  }
  for (double& p : probs) p /= static_cast<double>(total);
  return probs;
}

std::string render(const BayesianDecisionList& model,
                   std::size_t focus_label) {
  if (focus_label >= model.label_names.size()) focus_label = 0;
  const std::string& target = model.label_names[focus_label];

  auto line = [&](std::size_t row) {
    char buf[96];
    const double mean = model.posterior_means[row][focus_label] * 100.0;
    const auto [lo, hi] = model.credible_intervals[row][focus_label];
    std::snprintf(buf, sizeof(buf), " probability %.1f%% (%.1f%%-%.1f%%)",
                  mean, lo * 100.0, hi * 100.0);
    return target + buf;
  };

  std::string out;
  const std::size_t m = model.list.length();
  for (std::size_t j = 1; j <= m; ++j) {
    out += (j == 1 ? "if " : "else if ");
    out += model.antecedent_text[j - 1];
    out += " then ";
    out += line(j);
    out += "\n";
  }
  out += "else ";
  out += line(0);
  out += "\n";
  return out;
}

}  // namespace brl
