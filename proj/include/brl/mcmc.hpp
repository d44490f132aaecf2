#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "brl/model.hpp"

namespace brl {

enum class ProposalKind { Move, Add, Remove };

struct Proposal {
  ProposalKind kind = ProposalKind::Add;
  RuleList resulting_list;
  double log_q_forward = 0.0;  // log Q(d* | d)
  double log_q_reverse = 0.0;  // log Q(d  | d*)
};

// Feasible edit kinds at a list of length m: move needs m >= 2, add needs
// m < |A|, remove needs m >= 1.
int feasible_kind_count(std::size_t m, std::size_t pool_size);

// Log proposal probability of one edit kind from a list of length m_source,
// including the uniform choice among feasible kinds at the source.
double proposal_log_q(ProposalKind kind, std::size_t m_source,
                      std::size_t pool_size);

// Uniform choice among feasible kinds, then uniform antecedents/positions
// within the kind.
Proposal propose(const RuleList& d, const AntecedentPool& pool, Rng& rng);

// MH acceptance probability from log posteriors and log proposal densities.
double acceptance_probability(double log_post_new, double log_post_old,
                              double log_q_forward, double log_q_reverse);

struct SampleRecord {
  RuleList list;
  double log_posterior = 0.0;
  std::int64_t iteration = 0;
};

struct ChainState {
  int chain_id = 0;
  std::int64_t iteration = 0;
  std::vector<double> trace;          // log posterior after every iteration
  std::vector<std::uint32_t> length_trace;  // list length after every iteration
  std::vector<SampleRecord> samples;  // retained per thinning
  RuleList current;
  double current_log_posterior = 0.0;
};

// One Metropolis-Hastings chain over rule lists.
class Chain {
 public:
  Chain(const PosteriorModel& model, int chain_id, std::uint64_t seed,
        std::int64_t thin = 1, std::int64_t verify_every = 0);

  void step();
  void run(std::int64_t iterations);
  const ChainState& state() const { return state_; }
  ChainState& state() { return state_; }

 private:
  const PosteriorModel* model_;
  ListScorer scorer_;
  Rng rng_;
  std::int64_t thin_;
  std::int64_t verify_every_;
  ChainState state_;
};

struct McmcConfig {
  int chains = 3;
  std::int64_t initial_iterations = 20000;
  std::int64_t max_iterations = 320000;  // per chain, including burn-in
  double rhat_threshold = 1.05;
  std::int64_t thin = 1;
  int jobs = 0;  // 0: one thread per chain
  std::int64_t verify_every = 0;
};

struct PosteriorEnsemble {
  std::vector<SampleRecord> samples;  // post-burn-in, with chain provenance
  std::vector<int> sample_chain;      // chain id per sample
  std::vector<std::int64_t> burn_in_discarded;  // per chain
  std::int64_t iterations_per_chain = 0;
  double r_hat = 0.0;
  bool converged = false;
  // Full per-chain traces (every iteration, burn-in included).
  std::vector<std::vector<double>> traces;
  std::vector<std::vector<std::uint32_t>> length_traces;
};

// Potential scale reduction factor on equal-length scalar chains.
// All-constant-and-equal chains give 1; zero within-variance with spread
// between chains gives +infinity.
double gelman_rubin(const std::vector<std::vector<double>>& traces);

// Runs `iterations` MH steps from a prior-sampled start.
ChainState run_chain(const PosteriorModel& model, std::int64_t iterations,
                     std::uint64_t seed, std::int64_t thin = 1,
                     int chain_id = 0);

// Multi-chain sampler: discards the first half of each chain as burn-in,
// checks convergence on the log-posterior traces, and doubles the iteration
// budget until R-hat < threshold or max_iterations is reached.
PosteriorEnsemble run_ensemble(const PosteriorModel& model,
                               const McmcConfig& config, std::uint64_t seed);

}  // namespace brl
