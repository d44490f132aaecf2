#include "brl/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "brl/errors.hpp"

namespace brl {

int feasible_kind_count(std::size_t m, std::size_t pool_size) {
  return (m >= 2 ? 1 : 0) + (m < pool_size ? 1 : 0) + (m >= 1 ? 1 : 0);
}

double proposal_log_q(ProposalKind kind, std::size_t m_source,
                      std::size_t pool_size) {
  const auto m = static_cast<double>(m_source);
  const auto a = static_cast<double>(pool_size);
  double log_conditional = 0.0;
  switch (kind) {
    case ProposalKind::Move:
      log_conditional = -std::log(m * (m - 1.0));
      break;
    case ProposalKind::Add:
      log_conditional = -std::log((a - m) * (m + 1.0));
      break;
    case ProposalKind::Remove:
      log_conditional = -std::log(m);
      break;
  }
  return log_conditional -
         std::log(static_cast<double>(feasible_kind_count(m_source, pool_size)));
}

Proposal propose(const RuleList& d, const AntecedentPool& pool, Rng& rng) {
  const std::size_t m = d.length();
  const std::size_t a = pool.size();
  if (a == 0) throw std::invalid_argument("pool is empty");

  ProposalKind feasible[3];
  int n_feasible = 0;
  if (m >= 2) feasible[n_feasible++] = ProposalKind::Move;
  if (m < a) feasible[n_feasible++] = ProposalKind::Add;
  if (m >= 1) feasible[n_feasible++] = ProposalKind::Remove;

  Proposal prop;
  prop.kind = feasible[uniform_index(rng, static_cast<std::size_t>(n_feasible))];
  prop.resulting_list = d;
  auto& ids = prop.resulting_list.ids;

  switch (prop.kind) {
    case ProposalKind::Move: {
      const std::size_t from = uniform_index(rng, m);
      std::size_t to = uniform_index(rng, m - 1);
      if (to >= from) ++to;
      const std::uint32_t id = ids[from];
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(from));
      ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(to), id);
      prop.log_q_forward = proposal_log_q(ProposalKind::Move, m, a);
      prop.log_q_reverse = proposal_log_q(ProposalKind::Move, m, a);
      break;
    }
    case ProposalKind::Add: {
      std::uint32_t id;
      do {
        id = static_cast<std::uint32_t>(uniform_index(rng, a));
      } while (std::find(ids.begin(), ids.end(), id) != ids.end());
      const std::size_t pos = uniform_index(rng, m + 1);
      ids.insert(ids.begin() + static_cast<std::ptrdiff_t>(pos), id);
      prop.log_q_forward = proposal_log_q(ProposalKind::Add, m, a);
      prop.log_q_reverse = proposal_log_q(ProposalKind::Remove, m + 1, a);
      break;
    }
    case ProposalKind::Remove: {
      const std::size_t pos = uniform_index(rng, m);
      ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(pos));
      prop.log_q_forward = proposal_log_q(ProposalKind::Remove, m, a);
      prop.log_q_reverse = proposal_log_q(ProposalKind::Add, m - 1, a);
      break;
    }
  }
  return prop;
}

double acceptance_probability(double log_post_new, double log_post_old,
                              double log_q_forward, double log_q_reverse) {
  const double log_ratio =
      log_post_new - log_post_old + log_q_reverse - log_q_forward;
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

Chain::Chain(const PosteriorModel& model, int chain_id, std::uint64_t seed,
             std::int64_t thin, std::int64_t verify_every)
    : model_(&model),
      scorer_(model),
      rng_(make_rng(seed)),
      thin_(thin),
      verify_every_(verify_every) {
  state_.chain_id = chain_id;
  RuleList start = sample_prior_list(model.pool(), model.hp(), rng_);
  scorer_.reset(start);
  state_.current = scorer_.current();
  state_.current_log_posterior = scorer_.current_log_posterior();
}

void Chain::step() {
  Proposal prop = propose(state_.current, model_->pool(), rng_);
  const double cand_lp = scorer_.score(prop.resulting_list);
  const double log_ratio = cand_lp - state_.current_log_posterior +
                           prop.log_q_reverse - prop.log_q_forward;
  const double u = uniform_unit(rng_);
  if (std::log(u) < log_ratio) {
    scorer_.commit();
    state_.current = std::move(prop.resulting_list);
    state_.current_log_posterior = cand_lp;
  }
  ++state_.iteration;
  state_.trace.push_back(state_.current_log_posterior);
  state_.length_trace.push_back(
      static_cast<std::uint32_t>(state_.current.length()));
  if (state_.iteration % thin_ == 0)
    state_.samples.push_back(
        {state_.current, state_.current_log_posterior, state_.iteration});
  if (verify_every_ > 0 && state_.iteration % verify_every_ == 0) {
    const double fresh = model_->log_posterior(state_.current);
    if (std::abs(fresh - state_.current_log_posterior) > 1e-8) {
      std::ostringstream msg;
      msg << "incremental log-posterior drift at iteration "
          << state_.iteration << ": incremental "
          << state_.current_log_posterior << " vs full " << fresh;
      throw std::logic_error(msg.str());
    }
  }
}

void Chain::run(std::int64_t iterations) {
  for (std::int64_t t = 0; t < iterations; ++t) step();
}

ChainState run_chain(const PosteriorModel& model, std::int64_t iterations,
                     std::uint64_t seed, std::int64_t thin, int chain_id) {
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  Chain chain(model, chain_id, seed, thin);
  chain.run(iterations);
  return chain.state();
}

double gelman_rubin(const std::vector<std::vector<double>>& traces) {
  if (traces.size() < 2)
    throw ConfigError("Gelman-Rubin diagnostic needs at least 2 chains");
  const std::size_t n_t = traces[0].size();
  if (n_t < 2) throw ConfigError("Gelman-Rubin diagnostic needs >= 2 draws");
  for (const auto& t : traces)
    if (t.size() != n_t)
      throw ConfigError("Gelman-Rubin diagnostic needs equal-length chains");

  const auto m = static_cast<double>(traces.size());
  const auto n = static_cast<double>(n_t);

  std::vector<double> means(traces.size());
  std::vector<double> vars(traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i) {
    double mean = 0.0;
    for (double v : traces[i]) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : traces[i]) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    means[i] = mean;
    vars[i] = var;
  }

  double w = 0.0;
  for (double v : vars) w += v;
  w /= m;

  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= m;
  double b_over_n = 0.0;
  for (double v : means) b_over_n += (v - grand) * (v - grand);
  b_over_n /= (m - 1.0);

  if (w == 0.0) {
    return b_over_n == 0.0 ? 1.0
                           : std::numeric_limits<double>::infinity();
  }
  const double v_hat = (n - 1.0) / n * w + b_over_n;
  return std::sqrt(v_hat / w);
}

PosteriorEnsemble run_ensemble(const PosteriorModel& model,
                               const McmcConfig& config, std::uint64_t seed) {
  if (config.chains < 2) throw ConfigError("ensemble needs at least 2 chains");
  if (config.initial_iterations < 2)
    throw ConfigError("initial_iterations must be >= 2");

  std::vector<std::unique_ptr<Chain>> chains;
  for (int c = 0; c < config.chains; ++c)
    chains.push_back(std::make_unique<Chain>(
        model, c, derive_seed(seed, /*stream=*/0xc4a1, c), config.thin,
        config.verify_every));

  const int jobs = config.jobs > 0 ? config.jobs : config.chains;

  auto advance_all_to = [&](std::int64_t target) {
    std::size_t next = 0;
    while (next < chains.size()) {
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(
          std::min<std::size_t>(jobs, chains.size() - next));
      for (std::size_t j = 0; j < errors.size(); ++j, ++next) {
        Chain* chain = chains[next].get();
        workers.emplace_back([chain, target, &errors, j] {
          try {
            chain->run(target - chain->state().iteration);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    }
  };

  std::int64_t budget = config.initial_iterations;
  double r_hat = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (;;) {
    advance_all_to(budget);
    const std::int64_t burn = budget / 2;
    std::vector<std::vector<double>> traces;
    for (const auto& chain : chains) {
      const auto& full = chain->state().trace;
      traces.emplace_back(full.begin() + burn, full.end());
    }
    r_hat = gelman_rubin(traces);
    if (r_hat < config.rhat_threshold) {
      converged = true;
      break;
    }
    if (budget >= config.max_iterations) break;
    budget = std::min<std::int64_t>(budget * 2, config.max_iterations);
  }

  PosteriorEnsemble ensemble;
  ensemble.iterations_per_chain = budget;
  ensemble.r_hat = r_hat;
  ensemble.converged = converged;
  const std::int64_t burn = budget / 2;
  for (const auto& chain : chains) {
    std::int64_t discarded = 0;
    for (const auto& record : chain->state().samples) {
      if (record.iteration <= burn) {
        ++discarded;
        continue;
      }
      ensemble.samples.push_back(record);
      ensemble.sample_chain.push_back(chain->state().chain_id);
    }
    ensemble.burn_in_discarded.push_back(discarded);
    ensemble.traces.push_back(chain->state().trace);
    ensemble.length_traces.push_back(chain->state().length_trace);
  }
  return ensemble;
}

}  // namespace brl
