#include <map>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "recert/certainty.hpp"

using namespace recert;

namespace {

/// All histories of the game up to `depth`, grouped by observer class
/// sequence; checks per history that the library's certainty verdict equals
/// "every history in my group ends where I do".
void check_against_buckets(const GameStructure& g, int depth) {
  CertaintyAutomaton ca = build_certainty_automaton(g);
  MoveIndex index(g);
  std::vector<int> class_of = oracle::merged_observer_classes(g);

  struct Entry {
    int state;
    int bucket;
    int ca_state;
  };
  std::vector<Entry> level{{g.initial, 0, 0}};
  for (int d = 0; d <= depth; ++d) {
    // End states per bucket decide the brute-force verdict.
    std::map<int, std::set<int>> ends;
    for (const Entry& e : level) ends[e.bucket].insert(e.state);
    for (const Entry& e : level) {
      bool brute = ends[e.bucket].size() == 1;
      REQUIRE(e.ca_state >= 0);
      CHECK(ca.accepting[e.ca_state] == brute);
    }
    if (d == depth) break;

    std::map<std::pair<int, int>, int> bucket_id;  // (parent bucket, class) -> id
    std::vector<Entry> next;
    for (const Entry& e : level) {
      for (int code = 0; code < index.num_profiles(); ++code)
        for (int v : index.successors(e.state, code)) {
          auto key = std::make_pair(e.bucket, class_of[v]);
          int b = bucket_id.try_emplace(key, static_cast<int>(bucket_id.size())).first->second;
          next.push_back({v, b, ca.step(e.ca_state, code, v)});
        }
    }
    level = std::move(next);
  }
}

}  // namespace

TEST_SUITE("certainty") {

TEST_CASE("belief view of the transparent game") {
  GameStructure g = fixtures::transparent();
  CertaintyAutomaton ca = build_certainty_automaton(g);
  CHECK(ca.num_states() == 2);
  CHECK(ca.accepting == std::vector<bool>{true, true});

  CertaintyVerdict v = decide_recurring_certainty(g);
  CHECK(v.recurring);
  CHECK(v.minimal_period == 0);
  CHECK(v.automaton_bound == 3);
}

TEST_CASE("belief view of veil_and_reveal") {
  GameStructure g = fixtures::veil_and_reveal();
  CertaintyAutomaton ca = build_certainty_automaton(g);
  REQUIRE(ca.num_states() == 3);
  CHECK(ca.accepting[0]);
  CHECK_FALSE(ca.accepting[1]);
  CHECK_FALSE(ca.accepting[2]);

  CertaintyVerdict v = decide_recurring_certainty(g);
  CHECK(v.recurring);
  CHECK(v.minimal_period == 1);
  CHECK(v.automaton_bound == 4);

  CertaintyPeriod p = certainty_period(g);
  CHECK(p.minimal == 1);
  CHECK(p.automaton_bound == 4);
}

TEST_CASE("eternal fog never regains certainty") {
  GameStructure g = fixtures::eternal_fog();
  CertaintyVerdict v = decide_recurring_certainty(g);
  REQUIRE_FALSE(v.recurring);
  CHECK(v.automaton_bound == 4);
  REQUIRE(v.witness.has_value());

  const LassoPlay& w = *v.witness;
  REQUIRE(is_valid_lasso(g, w));
  CHECK(w.prefix.states == std::vector<int>{0, 1});
  REQUIRE(w.cycle.size() == 1);
  CHECK(w.cycle[0].second == 1);  // u1 loops on itself

  // Unrolled far beyond the a-priori bound, the cycle part stays uncertain.
  History h = w.unroll(2 * v.automaton_bound);
  BeliefRun run = belief_run(g, observe(g, h, kObserver));
  REQUIRE_FALSE(run.empty_from.has_value());
  for (std::size_t i = w.prefix.profiles.size(); i < run.beliefs.size(); ++i)
    CHECK(run.beliefs[i].size() > 1);

  CHECK_THROWS_AS(certainty_period(g), NotRecurringError);
}

TEST_CASE("no_signal and signal belief views") {
  GameStructure g4 = fixtures::no_signal();
  CertaintyAutomaton ca4 = build_certainty_automaton(g4);
  CHECK(ca4.num_states() == 5);
  CertaintyVerdict v4 = decide_recurring_certainty(g4);
  CHECK(v4.recurring);
  CHECK(v4.minimal_period == 1);
  CHECK(v4.automaton_bound == 6);

  GameStructure g5 = fixtures::signal();
  CertaintyAutomaton ca5 = build_certainty_automaton(g5);
  CHECK(ca5.num_states() == 9);
  int accepting = 0;
  for (bool b : ca5.accepting) accepting += b ? 1 : 0;
  CHECK(accepting == 3);
  CertaintyVerdict v5 = decide_recurring_certainty(g5);
  CHECK(v5.recurring);
  CHECK(v5.minimal_period == 2);
  CHECK(v5.automaton_bound == 10);
}

TEST_CASE("attains_certainty on concrete histories") {
  GameStructure g = fixtures::signal();
  ActionProfile aa{{0, 0}};
  History h1 = History::initial(g).extended(aa, 1);  // s0 -> x1
  CHECK_FALSE(attains_certainty(g, h1));
  History h2 = h1.extended(aa, 3);  // -> m1a
  CHECK_FALSE(attains_certainty(g, h2));
  History h3 = h2.extended(aa, 7);  // -> t
  CHECK(attains_certainty(g, h3));
  CHECK(attains_certainty(g, History::initial(g)));
}

TEST_CASE("belief_run reports dead observation sequences") {
  GameStructure g = fixtures::veil_and_reveal();
  // Class 0 is {s0}; staying there is impossible after the first step.
  BeliefRun run = belief_run(g, {0, 0});
  REQUIRE(run.empty_from.has_value());
  CHECK(*run.empty_from == 1);

  BeliefRun ok = belief_run(g, {0, 1, 0});
  REQUIRE_FALSE(ok.empty_from.has_value());
  CHECK(ok.beliefs[1] == std::vector<int>{1, 2});
  CHECK(ok.beliefs[2] == std::vector<int>{0});
}

TEST_CASE("automaton step rejects impossible symbols") {
  GameStructure g = fixtures::veil_and_reveal();
  CertaintyAutomaton ca = build_certainty_automaton(g);
  CHECK(ca.step(0, 0, 1) >= 0);
  CHECK(ca.step(0, 0, 0) == -1);  // no move s0 -> s0
}

TEST_CASE("pair subset tracker follows the guessed histories") {
  GameStructure g = fixtures::veil_and_reveal();

  PairSubsetTracker loose(g, PairObsMode::Agent0);
  CHECK(loose.certain());
  REQUIRE(loose.step(0, 1));  // real play enters u1
  CHECK_FALSE(loose.certain());
  CHECK(loose.pairs() == std::set<std::pair<int, int>>{{1, 1}, {1, 2}});
  REQUIRE(loose.step(0, 0));
  CHECK(loose.certain());

  // The strict reading compares every player's observation; P2 separates
  // u1 from u2, so no wrong guess survives.
  PairSubsetTracker strict(g, PairObsMode::AllPlayers);
  REQUIRE(strict.step(0, 1));
  CHECK(strict.certain());

  PairSubsetTracker bad(g, PairObsMode::Agent0);
  CHECK_FALSE(bad.step(0, 0));  // not a move of the game
}

TEST_CASE("pair construction agrees with the belief view everywhere") {
  for (const GameStructure& g :
       {fixtures::transparent(), fixtures::veil_and_reveal(), fixtures::eternal_fog(),
        fixtures::no_signal(), fixtures::signal()}) {
    CrossCheckReport report = cross_check_certainty(g, PairObsMode::Agent0);
    CAPTURE(g.states.size());
    CHECK(report.agree);
    CHECK(report.joint_states > 0);
  }
}

TEST_CASE("the strict pair reading is a genuinely finer diagnostic") {
  // With a perfectly informed second player the strict construction sees
  // certainty where the observer's belief does not.
  CrossCheckReport report =
      cross_check_certainty(fixtures::veil_and_reveal(), PairObsMode::AllPlayers);
  REQUIRE_FALSE(report.agree);
  REQUIRE(report.divergence.has_value());
  CHECK(report.divergence->length() == 1);

  // With a single player both readings coincide.
  CHECK(cross_check_certainty(fixtures::transparent(), PairObsMode::AllPlayers).agree);
}

TEST_CASE("certainty equals bucket uniformity on random games") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    GameStructure g = oracle::random_game(3000 + seed);
    CAPTURE(seed);
    check_against_buckets(g, 5);
  }
}

TEST_CASE("hub games always regain certainty") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GameStructure g = oracle::random_hub_game(4000 + seed);
    REQUIRE(validate_structure(g).empty());
    CertaintyVerdict v = decide_recurring_certainty(g);
    CAPTURE(seed);
    CHECK(v.recurring);
    REQUIRE(v.minimal_period.has_value());
    CHECK(*v.minimal_period <= v.automaton_bound);
  }
}

}  // TEST_SUITE
