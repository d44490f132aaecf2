#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "brl/errors.hpp"
#include "brl/mcmc.hpp"
#include "brl/rng.hpp"
#include "oracles.hpp"

using namespace brl;

namespace {

struct World {
  Dataset data;
  AntecedentPool pool;
  Hyperparams hp;
};

World three_antecedent_world(std::uint64_t seed = 13) {
  Rng rng = make_rng(seed);
  const std::size_t n = 30;
  std::vector<std::string> cols(3, std::string(n, '0'));
  std::vector<std::uint16_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols)
      if (uniform_unit(rng) < 0.5) c[i] = '1';
    labels[i] = uniform_unit(rng) < (cols[0][i] == '1' ? 0.8 : 0.3) ? 1 : 0;
  }
  World w;
  w.data = oracle::make_dataset(cols, labels);
  w.pool = make_pool(w.data, {{0}, {1}, {0, 2}});
  w.hp.lambda = 1.0;
  return w;
}

ProposalKind reverse_kind(ProposalKind kind) {
  switch (kind) {
    case ProposalKind::Move: return ProposalKind::Move;
    case ProposalKind::Add: return ProposalKind::Remove;
    case ProposalKind::Remove: return ProposalKind::Add;
  }
  return ProposalKind::Move;
}

}  // namespace

TEST_CASE("proposal conditionals match the Q table at m=3, |A|=10") {
  // move 1/6, add 1/28, remove 1/3; all three kinds feasible.
  Rng rng = make_rng(4);
  std::vector<std::string> cols(10, std::string(4, '1'));
  Dataset data = oracle::make_dataset(cols, {0, 1, 0, 1});
  AntecedentPool pool = singleton_pool(data);
  RuleList d{{0, 1, 2}};

  std::map<ProposalKind, int> kind_counts;
  const int reps = 30000;
  for (int k = 0; k < reps; ++k) {
    Proposal p = propose(d, pool, rng);
    ++kind_counts[p.kind];
    const double expected_conditional =
        p.kind == ProposalKind::Move ? 1.0 / 6.0
        : p.kind == ProposalKind::Add ? 1.0 / 28.0
                                      : 1.0 / 3.0;
    CHECK(p.log_q_forward ==
          doctest::Approx(std::log(expected_conditional / 3.0)).epsilon(1e-12));
  }
  for (const auto& [kind, count] : kind_counts)
    CHECK(std::abs(count / static_cast<double>(reps) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("degenerate lists restrict the feasible kinds") {
  Rng rng = make_rng(5);
  World w = three_antecedent_world();

  SUBCASE("empty list only adds, kind factor 1") {
    CHECK(feasible_kind_count(0, 3) == 1);
    for (int k = 0; k < 50; ++k) {
      Proposal p = propose(RuleList{}, w.pool, rng);
      CHECK(p.kind == ProposalKind::Add);
      CHECK(p.resulting_list.length() == 1);
      // q = 1 * 1/((3-0)*1)
      CHECK(p.log_q_forward == doctest::Approx(-std::log(3.0)).epsilon(1e-12));
    }
  }
  SUBCASE("length-1 list cannot move") {
    CHECK(feasible_kind_count(1, 3) == 2);
    for (int k = 0; k < 200; ++k) {
      Proposal p = propose(RuleList{{1}}, w.pool, rng);
      CHECK(p.kind != ProposalKind::Move);
    }
  }
  SUBCASE("saturated list cannot add") {
    CHECK(feasible_kind_count(3, 3) == 2);
    for (int k = 0; k < 200; ++k) {
      Proposal p = propose(RuleList{{0, 1, 2}}, w.pool, rng);
      CHECK(p.kind != ProposalKind::Add);
    }
  }
}

TEST_CASE("proposals differ by exactly one edit and stay valid") {
  Rng rng = make_rng(6);
  World w = three_antecedent_world();
  RuleList d;
  for (int step = 0; step < 2000; ++step) {
    Proposal p = propose(d, w.pool, rng);
    const auto& ids = p.resulting_list.ids;
    CHECK(std::set<std::uint32_t>(ids.begin(), ids.end()).size() == ids.size());
    switch (p.kind) {
      case ProposalKind::Move:
        CHECK(ids.size() == d.ids.size());
        CHECK(ids != d.ids);
        CHECK(std::multiset<std::uint32_t>(ids.begin(), ids.end()) ==
              std::multiset<std::uint32_t>(d.ids.begin(), d.ids.end()));
        break;
      case ProposalKind::Add:
        CHECK(ids.size() == d.ids.size() + 1);
        break;
      case ProposalKind::Remove:
        CHECK(ids.size() == d.ids.size() - 1);
        break;
    }
    d = p.resulting_list;
  }
}

TEST_CASE("reverse proposal log-q recomputes exactly") {
  Rng rng = make_rng(7);
  World w = three_antecedent_world();
  RuleList d;
  for (int step = 0; step < 2000; ++step) {
    Proposal p = propose(d, w.pool, rng);
    const double recomputed = proposal_log_q(
        reverse_kind(p.kind), p.resulting_list.length(), w.pool.size());
    CHECK(recomputed == p.log_q_reverse);
    d = p.resulting_list;
  }
}

TEST_CASE("acceptance probability follows the MH rule") {
  CHECK(acceptance_probability(-1.0, -2.0, -0.5, -0.5) == 1.0);
  CHECK(acceptance_probability(-2.0, -1.0, -0.5, -0.5) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(acceptance_probability(-1.0, -1.0, -2.0, -1.0) == 1.0);
  CHECK(acceptance_probability(-1.0, -1.0, -1.0, -2.0) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("flat-likelihood two-antecedent pool: ratio reduces to lambda/2") {
  // Both antecedents cover every observation, so every nonempty list has the
  // same likelihood and the add ratio from (a) to (a,b) is purely
  // prior x proposal: p(m=2)/p(m=1) = lambda/2, q terms 1/4 each.
  Dataset data = oracle::make_dataset({"1111", "1111"}, {0, 1, 0, 1});
  AntecedentPool pool = make_pool(data, {{0}, {1}});
  Hyperparams hp;
  hp.lambda = 2.0;

  const RuleList a{{0}};
  const RuleList ab{{0, 1}};
  const double lp_a = log_posterior(a, pool, data, hp);
  const double lp_ab = log_posterior(ab, pool, data, hp);
  const double q_fwd = proposal_log_q(ProposalKind::Add, 1, 2);
  const double q_rev = proposal_log_q(ProposalKind::Remove, 2, 2);
  CHECK(std::exp(q_fwd) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::exp(q_rev) == doctest::Approx(0.25).epsilon(1e-12));
  const double ratio = std::exp(lp_ab - lp_a + q_rev - q_fwd);
  CHECK(ratio == doctest::Approx(hp.lambda / 2.0).epsilon(1e-10));
  CHECK(acceptance_probability(lp_ab, lp_a, q_fwd, q_rev) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("chains are deterministic in the seed") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  ChainState s1 = run_chain(model, 500, 99);
  ChainState s2 = run_chain(model, 500, 99);
  ChainState s3 = run_chain(model, 500, 100);
  CHECK(s1.trace == s2.trace);
  CHECK(s1.current == s2.current);
  CHECK(s1.trace != s3.trace);
}

TEST_CASE("a single iteration records one transition") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  ChainState s = run_chain(model, 1, 7);
  CHECK(s.iteration == 1);
  CHECK(s.trace.size() == 1);
  CHECK(s.samples.size() == 1);
}

TEST_CASE("chain state stays consistent with full recomputation") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  Chain chain(model, 0, 21, /*thin=*/1, /*verify_every=*/500);
  chain.run(5000);  // throws on drift beyond 1e-8
  const ChainState& s = chain.state();
  CHECK(s.current_log_posterior ==
        doctest::Approx(model.log_posterior(s.current)).epsilon(1e-10));
}

TEST_CASE("thinning retains every k-th iteration") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  Chain chain(model, 0, 5, /*thin=*/10);
  chain.run(95);
  CHECK(chain.state().samples.size() == 9);
  for (const auto& s : chain.state().samples)
    CHECK(s.iteration % 10 == 0);
}

TEST_CASE("gelman-rubin on identical chains [1,2,3,4]") {
  const std::vector<double> chain{1, 2, 3, 4};
  CHECK(gelman_rubin({chain, chain}) ==
        doctest::Approx(std::sqrt(0.75)).epsilon(1e-12));
}

TEST_CASE("gelman-rubin sentinel cases") {
  CHECK(gelman_rubin({{5, 5, 5}, {5, 5, 5}}) == 1.0);
  CHECK(std::isinf(gelman_rubin({{0, 0, 0}, {100, 100, 100}})));
}

TEST_CASE("gelman-rubin near 1 for iid draws") {
  Rng rng = make_rng(12);
  auto gaussian_chain = [&](std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) {
      // Box-Muller
      const double u1 = uniform_unit(rng) + 1e-300;
      const double u2 = uniform_unit(rng);
      v = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }
    return out;
  };
  const double r = gelman_rubin(
      {gaussian_chain(20000), gaussian_chain(20000), gaussian_chain(20000)});
  CHECK(r > 0.99);
  CHECK(r < 1.01);
}

TEST_CASE("gelman-rubin preconditions") {
  CHECK_THROWS_AS(gelman_rubin({{1, 2, 3}}), ConfigError);
  CHECK_THROWS_AS(gelman_rubin({{1, 2}, {1, 2, 3}}), ConfigError);
  CHECK_THROWS_AS(gelman_rubin({{1}, {1}}), ConfigError);
}

TEST_CASE("ensemble requires at least two chains") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  McmcConfig config;
  config.chains = 1;
  CHECK_THROWS_AS(run_ensemble(model, config, 1), ConfigError);
}

TEST_CASE("ensemble converges on a sharply peaked posterior") {
  // One antecedent separates the labels perfectly at n=200.
  const std::size_t n = 200;
  std::vector<std::string> cols(2, std::string(n, '0'));
  std::vector<std::uint16_t> labels(n);
  Rng rng = make_rng(3);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i % 2;
    if (labels[i]) cols[0][i] = '1';
    if (uniform_unit(rng) < 0.5) cols[1][i] = '1';
  }
  Dataset data = oracle::make_dataset(cols, labels);
  AntecedentPool pool = singleton_pool(data);
  Hyperparams hp;
  hp.lambda = 1.0;
  PosteriorModel model(pool, data, hp);

  McmcConfig config;
  config.initial_iterations = 2000;
  config.max_iterations = 2000;
  PosteriorEnsemble ensemble = run_ensemble(model, config, 17);
  CHECK(ensemble.converged);
  CHECK(ensemble.r_hat < 1.05);
  CHECK(ensemble.iterations_per_chain == 2000);
  CHECK(ensemble.samples.size() == 3000);  // 3 chains x 1000 post-burn-in
  CHECK(ensemble.burn_in_discarded ==
        std::vector<std::int64_t>{1000, 1000, 1000});
}

TEST_CASE("unconverged ensembles are flagged, not fatal") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  McmcConfig config;
  config.initial_iterations = 64;
  config.max_iterations = 128;
  config.rhat_threshold = 0.5;  // unreachable: R-hat is at least ~0.7
  PosteriorEnsemble ensemble = run_ensemble(model, config, 9);
  CHECK_FALSE(ensemble.converged);
  CHECK(ensemble.iterations_per_chain == 128);
  CHECK(ensemble.r_hat >= 0.5);
}

TEST_CASE("ensemble results do not depend on worker count") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  McmcConfig serial;
  serial.initial_iterations = 512;
  serial.jobs = 1;
  McmcConfig parallel = serial;
  parallel.jobs = 3;
  PosteriorEnsemble a = run_ensemble(model, serial, 33);
  PosteriorEnsemble b = run_ensemble(model, parallel, 33);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    CHECK(a.samples[i].list == b.samples[i].list);
    CHECK(a.samples[i].log_posterior == b.samples[i].log_posterior);
  }
  CHECK(a.r_hat == b.r_hat);
}

TEST_CASE("long-run empirical posterior matches exhaustive enumeration") {
  World w = three_antecedent_world();
  PosteriorModel model(w.pool, w.data, w.hp);
  auto exact = oracle::exact_posterior(w.pool, w.data, w.hp);

  McmcConfig config;
  config.initial_iterations = 100000;
  config.max_iterations = 100000;
  PosteriorEnsemble ensemble = run_ensemble(model, config, 2);

  std::map<RuleList, double> empirical;
  for (const auto& s : ensemble.samples)
    empirical[s.list] += 1.0 / static_cast<double>(ensemble.samples.size());

  double tv = 0.0;
  for (const auto& [list, p] : exact) {
    const auto it = empirical.find(list);
    tv += std::abs((it == empirical.end() ? 0.0 : it->second) - p);
  }
  for (const auto& [list, p] : empirical)
    if (!exact.count(list)) tv += p;
  tv /= 2.0;
  CHECK(tv < 0.05);
}
