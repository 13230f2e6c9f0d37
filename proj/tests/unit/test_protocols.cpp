#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "popsim/errors.hpp"
#include "popsim/protocols.hpp"
#include "popsim/rational.hpp"
#include "popsim/stats.hpp"

using namespace popsim;

namespace {

// Fraction of ordered interactions from `c` after which fewer agents hold `s`.
double reduce_fraction(const Protocol& p, const Configuration& c, StateId s) {
  const std::size_t n = c.size();
  int hits = 0;
  for (AgentId u = 0; u < n; ++u) {
    for (AgentId v = 0; v < n; ++v) {
      if (u != v && apply_interaction(p, c, {u, v}).count(s) < c.count(s)) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(n * (n - 1));
}

}  // namespace

TEST_CASE("catalog protocols are well formed") {
  for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{17}, std::size_t{1} << 20}) {
    for (const auto& name : protocols::catalog_names()) {
      const auto entry = protocols::make(name, n);
      const auto& p = entry.protocol;
      CHECK(p.name() == name);
      CHECK(p.num_states() == 2);
      CHECK(p.initial_state().value < p.num_states());
      for (std::uint32_t a = 0; a < 2; ++a) {
        for (std::uint32_t b = 0; b < 2; ++b) {
          const auto [x, y] = p.transition(StateId{a}, StateId{b});
          CHECK(x.value < 2);
          CHECK(y.value < 2);
        }
      }
    }
  }
  CHECK_THROWS_AS(protocols::make("nope", 3), UsageError);
  CHECK_THROWS_AS(protocols::pairwise_elimination(0), UsageError);
}

TEST_CASE("pairwise elimination") {
  const auto p = protocols::pairwise_elimination(10);
  const StateId leader = p.state_by_name("leader");
  const StateId follower = p.state_by_name("follower");
  CHECK(p.initial_state() == leader);
  CHECK(p.output(leader) == OutputSymbol::Leader);
  CHECK(p.output(follower) == OutputSymbol::Follower);
  CHECK(p.transition(leader, leader) == Protocol::StatePair{leader, follower});
  CHECK(p.is_identity(leader, follower));
  CHECK(p.is_identity(follower, leader));
  CHECK(p.is_identity(follower, follower));

  Rng rng(9);
  auto c = Configuration::initial(p, 10);
  for (int i = 0; i < 2000; ++i) {
    const auto before = c.count(leader);
    apply_interaction_in_place(p, c, sample_interaction(rng, 10));
    CHECK(c.count(leader) <= before);
    CHECK(c.count(leader) >= 1);
  }
  CHECK(c.count(leader) == 1);
}

TEST_CASE("leave-init") {
  const auto p = protocols::leave_init(5);
  const StateId init = p.initial_state();
  const StateId done = p.state_by_name("done");

  SUBCASE("from all-init every step leaves") {
    CHECK(reduce_fraction(p, Configuration::initial(p, 5), init) == 1.0);
  }
  SUBCASE("two of five in init") {
    const Configuration c(std::vector<StateId>{init, init, done, done, done});
    CHECK(reduce_fraction(p, c, init) == doctest::Approx(0.7));
    CHECK(reduce_fraction(p, c, init) == doctest::Approx(stats::p_leave(2, 5)));
  }
  SUBCASE("the init count drops by the number of init participants") {
    Rng rng(4);
    auto c = Configuration::initial(p, 12);
    for (int i = 0; i < 200; ++i) {
      const auto e = sample_interaction(rng, 12);
      const auto touched = (c[e.initiator] == init) + (c[e.responder] == init);
      const auto before = c.count(init);
      apply_interaction_in_place(p, c, e);
      CHECK(before - c.count(init) == static_cast<std::size_t>(touched));
    }
  }
}

TEST_CASE("one-way epidemic") {
  const std::size_t n = 10;
  const auto entry = protocols::make("one-way-epidemic", n);
  const auto& p = entry.protocol;
  const StateId infected = p.state_by_name("infected");

  SUBCASE("infected count grows by one exactly on mixed pairs") {
    Rng rng(2);
    auto c = entry.initial(n);
    CHECK(c.count(infected) == 1);
    while (c.count(infected) < n) {
      const auto e = sample_interaction(rng, n);
      const bool mixed = (c[e.initiator] == infected) != (c[e.responder] == infected);
      const auto before = c.count(infected);
      apply_interaction_in_place(p, c, e);
      CHECK(c.count(infected) == before + (mixed ? 1 : 0));
    }
  }

  SUBCASE("expected completion time (n-1) H_{n-1}") {
    // Exact identity: n(n-1)/2 * sum_k 1/(k(n-k)) == (n-1) * H_{n-1}.
    for (std::size_t m = 2; m <= 30; ++m) {
      Rational lhs = 0, harmonic = 0;
      for (std::size_t k = 1; k < m; ++k) {
        lhs += Rational(1, k * (m - k));
        harmonic += Rational(1, k);
      }
      lhs *= Rational(m * (m - 1), 2);
      CHECK(lhs == Rational(m - 1) * harmonic);
    }

    TrialOptions options;
    options.stop = entry.stop;
    options.initial = entry.initial(n);
    std::vector<double> steps;
    for (int i = 0; i < 20000; ++i) {
      steps.push_back(static_cast<double>(run_trial(p, n, trial_seed(3, i), options).steps_taken));
    }
    const auto est = stats::summarize(steps);
    const double expected = (n - 1) * stats::harmonic(n - 1);
    CHECK(std::abs(est.mean - expected) < 4 * est.standard_error);
  }
}

TEST_CASE("protocol documents") {
  const auto pe = protocols::pairwise_elimination(4);

  SUBCASE("round trip gives the same traces") {
    const auto loaded = protocols::load_protocol(protocols::to_document(pe));
    CHECK(loaded.name() == pe.name());
    TrialOptions options;
    options.max_steps = 500;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      CHECK(run_trial(loaded, 12, seed, options).final_configuration_digest ==
            run_trial(pe, 12, seed, options).final_configuration_digest);
    }
  }

  SUBCASE("hand-written document, unlisted pairs are identity") {
    const auto p = protocols::load_protocol(R"({
      "name": "pe", "states": ["L", "F"], "initial": "L",
      "outputs": {"L": "L", "F": "F"},
      "rules": [["L", "L", "L", "F"]]
    })");
    CHECK(p.transition(StateId{0}, StateId{0}) == Protocol::StatePair{StateId{0}, StateId{1}});
    CHECK(p.is_identity(StateId{1}, StateId{0}));
    CHECK(p.output(StateId{1}) == OutputSymbol::Follower);
  }

  SUBCASE("file loader") {
    const std::string path = "popsim_test_protocol.json";
    {
      std::ofstream out(path);
      out << protocols::to_document(pe);
    }
    CHECK(protocols::load_protocol_file(path).num_states() == 2);
    std::remove(path.c_str());
    CHECK_THROWS_AS(protocols::load_protocol_file("/nonexistent/x.json"), ProtocolLoadError);
  }

  SUBCASE("validation errors") {
    auto message = [](const char* doc) -> std::string {
      try {
        protocols::load_protocol(doc);
      } catch (const ProtocolLoadError& err) {
        return err.what();
      }
      return "";
    };
    const std::string unknown = message(R"({"name":"x","states":["a","b"],"initial":"a",
        "outputs":{"a":"F","b":"L"},"rules":[["a","zz","a","b"]]})");
    CHECK(unknown.find("unknown state 'zz'") != std::string::npos);

    const std::string partial = message(R"({"name":"x","states":["a","b"],"initial":"a",
        "outputs":{"a":"F"}})");
    CHECK(partial.find("outputs not total") != std::string::npos);

    const std::string dup = message(R"({"name":"x","states":["a","b"],"initial":"a",
        "outputs":{"a":"F","b":"L"},"rules":[["a","b","b","b"],["a","b","a","a"]]})");
    CHECK(dup.find("duplicate rule") != std::string::npos);

    CHECK_FALSE(message(R"({"name":"x","states":["a"],"initial":"q","outputs":{"a":"F"}})").empty());
    CHECK_FALSE(message(R"({"name":"x","states":["a"],"initial":"a","outputs":{"a":"X"}})").empty());
    CHECK_FALSE(message(R"({"name":"x","states":[],"initial":"a","outputs":{}})").empty());
    CHECK_FALSE(message(R"({"states":["a"],"initial":"a","outputs":{"a":"F"}})").empty());
    CHECK_FALSE(message(R"({"name":"x","states":["a","a"],"initial":"a","outputs":{"a":"F"}})").empty());
    CHECK_FALSE(message(R"({"name":"x","states":["a"],"initial":"a","outputs":{"a":"F","b":"L"}})").empty());
    CHECK_FALSE(message(R"({"name":"x","states":["a"],"initial":"a","outputs":{"a":"F"},"rules":[["a","a"]]})").empty());
    CHECK_FALSE(message("not json").empty());
  }
}
