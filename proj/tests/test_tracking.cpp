#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "recert/tracking.hpp"

using namespace recert;

namespace {

/// The unique assignment of a one-action-per-player game.
AdmissibleAssignment only_assignment(const GameStructure& g, const EpistemicModel& m) {
  std::vector<AdmissibleAssignment> all = admissible_assignments(g, m);
  REQUIRE(all.size() == 1);
  return all[0];
}

/// Random pointed structure for canonicalisation tests: small enough for the
/// all-permutations oracle.
EpistemicModel random_model(std::mt19937_64& rng) {
  EpistemicModel m;
  int worlds = 1 + static_cast<int>(rng() % 6);
  int agents = 2 + static_cast<int>(rng() % 2);
  m.world_state.resize(worlds);
  for (int& v : m.world_state) v = static_cast<int>(rng() % 4);
  m.agent_class.assign(agents, std::vector<int>(worlds));
  for (auto& cls : m.agent_class)
    for (int& c : cls) c = static_cast<int>(rng() % worlds);
  return normalise_classes(std::move(m));
}

/// Relabels worlds by `order` (new position -> old world) and shuffles class
/// ids; the canonical key must not notice.
EpistemicModel permuted(const EpistemicModel& m, const std::vector<int>& order,
                        std::mt19937_64& rng) {
  EpistemicModel out;
  out.world_state.resize(m.num_worlds());
  out.agent_class.assign(m.num_agents(), std::vector<int>(m.num_worlds()));
  std::vector<int> shift(m.num_agents());
  for (int& s : shift) s = static_cast<int>(rng() % 17);
  for (int pos = 0; pos < m.num_worlds(); ++pos) {
    out.world_state[pos] = m.world_state[order[pos]];
    for (int agent = 0; agent < m.num_agents(); ++agent)
      out.agent_class[agent][pos] = m.agent_class[agent][order[pos]] + shift[agent];
  }
  return out;
}

std::string key_string(const CanonicalKey& key) {
  std::string s;
  for (int b : key.bits) s += std::to_string(b) + ",";
  return s;
}

/// Distinguishes observation modes: the observer's closure relates a~c only
/// through the unreachable state b, so player relations alone keep a and c in
/// separate successor components.
GameStructure bridge_game() {
  using fixtures::make_game;
  return make_game({{"s", "0"}, {"a", "0"}, {"b", "0"}, {"c", "0"}}, "s",
                   {{"P1", {"w"}, {"os", "oa", "oa", "oc"}},
                    {"P2", {"w"}, {"os", "oa", "ob", "ob"}}},
                   {{"s", {"w", "w"}, {"a", "c"}},
                    {"a", {"w", "w"}, {"s"}},
                    {"b", {"w", "w"}, {"s"}},
                    {"c", {"w", "w"}, {"s"}}});
}

std::vector<int> sorted_group_counts(const TrackingArena& arena) {
  std::vector<int> counts;
  for (const TrackingArena::Node& node : arena.nodes)
    counts.push_back(static_cast<int>(node.groups.size()));
  std::sort(counts.begin(), counts.end());
  return counts;
}

}  // namespace

TEST_SUITE("tracking") {

TEST_CASE("initial and singleton models") {
  GameStructure g = fixtures::signal();
  EpistemicModel init = initial_model(g);
  CHECK(init.world_state == std::vector<int>{g.initial});
  CHECK(init.num_agents() == 3);
  CHECK(init.singleton());
  for (const std::vector<int>& cls : init.agent_class) CHECK(cls == std::vector<int>{0});
  CHECK(singleton_model(g, 7).world_state == std::vector<int>{7});
}

TEST_CASE("class normalisation uses first occurrence") {
  EpistemicModel m;
  m.world_state = {2, 0, 2};
  m.agent_class = {{5, 5, 3}, {9, 1, 9}};
  EpistemicModel n = normalise_classes(m);
  CHECK(n.agent_class[0] == std::vector<int>{0, 0, 1});
  CHECK(n.agent_class[1] == std::vector<int>{0, 1, 0});
  CHECK(n.world_state == m.world_state);
  CHECK(normalise_classes(n) == n);
}

TEST_CASE("model colour is the uniform colour or an error") {
  GameStructure g = fixtures::signal();
  EpistemicModel x;
  x.world_state = {1, 2};  // x1, x2: both colour "1"
  x.agent_class = {{0, 0}, {0, 0}, {0, 1}};
  CHECK(x.colour(g) == g.colour_id("1"));

  EpistemicModel mixed;
  mixed.world_state = {7, 8};  // t has colour "0", bot colour "1"
  mixed.agent_class = {{0, 0}, {0, 0}, {0, 1}};
  CHECK_THROWS_AS(mixed.colour(g), std::domain_error);
}

TEST_CASE("admissible assignments of the coin model") {
  GameStructure g = fixtures::signal();
  // After round one the observer holds {x1, x2}; P1 cannot separate them but
  // P2 can.
  EpistemicModel m;
  m.world_state = {1, 2};
  m.agent_class = {{0, 0}, {0, 0}, {0, 1}};

  CHECK(count_admissible_assignments(g, m) == 8);  // 2^1 * 2^2
  std::vector<AdmissibleAssignment> all = admissible_assignments(g, m);
  REQUIRE(all.size() == 8);

  // First one: everyone plays his first action everywhere.
  CHECK(all[0].profile_of ==
        std::vector<ActionProfile>{ActionProfile{{0, 0}}, ActionProfile{{0, 0}}});
  // Last digit (P2's class of x2) moves fastest.
  CHECK(all[1].profile_of ==
        std::vector<ActionProfile>{ActionProfile{{0, 0}}, ActionProfile{{0, 1}}});
  CHECK(all[4].profile_of ==
        std::vector<ActionProfile>{ActionProfile{{1, 0}}, ActionProfile{{1, 0}}});

  std::set<std::vector<ActionProfile>> distinct;
  for (const AdmissibleAssignment& a : all) {
    distinct.insert(a.profile_of);
    // P1 has one class, so his action is constant across worlds.
    CHECK(a.profile_of[0].actions[0] == a.profile_of[1].actions[0]);
  }
  CHECK(distinct.size() == 8);
}

TEST_CASE("count matches enumeration on random games") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    GameStructure g = oracle::random_game(seed);
    EpistemicModel init = initial_model(g);
    for (const AdmissibleAssignment& a : admissible_assignments(g, init))
      for (const UpdateComponent& comp : update_model(g, init, a)) {
        const EpistemicModel& m = comp.model;
        CHECK(count_admissible_assignments(g, m) ==
              static_cast<long long>(admissible_assignments(g, m).size()));
      }
  }
}

TEST_CASE("update splits on the signalled coin") {
  GameStructure g = fixtures::signal();
  EpistemicModel m;
  m.world_state = {1, 2};  // {x1, x2}
  m.agent_class = {{0, 0}, {0, 0}, {0, 1}};

  SUBCASE("P2 plays the coin: two certain branches") {
    // a at x1 reaches m1a; b at x2 reaches m2b. The observer tells Ma-states
    // from Mb-states apart, so the branches never share a component.
    AdmissibleAssignment a;
    a.profile_of = {ActionProfile{{0, 0}}, ActionProfile{{0, 1}}};
    std::vector<UpdateComponent> comps = update_model(g, m, a);
    REQUIRE(comps.size() == 2);
    for (const UpdateComponent& comp : comps) {
      CHECK(comp.model.singleton());
      CHECK_FALSE(comp.collapsed);  // born singleton, nothing collapsed
      CHECK(comp.children.size() == 1);
    }
    CHECK(comps[0].model.world_state == std::vector<int>{3});  // m1a
    CHECK(comps[1].model.world_state == std::vector<int>{6});  // m2b
    CHECK(comps[0].children[0] == std::pair<int, int>{0, 3});
    CHECK(comps[1].children[0] == std::pair<int, int>{1, 6});
  }

  SUBCASE("P2 plays a constant: uncertainty survives") {
    AdmissibleAssignment a;
    a.profile_of = {ActionProfile{{0, 0}}, ActionProfile{{0, 0}}};
    std::vector<UpdateComponent> comps = update_model(g, m, a);
    REQUIRE(comps.size() == 1);
    const UpdateComponent& comp = comps[0];
    CHECK_FALSE(comp.collapsed);
    CHECK(comp.model.world_state == std::vector<int>{3, 5});  // {m1a, m2a}
    CHECK(comp.model.agent_class[kObserver] == std::vector<int>{0, 0});
    CHECK(comp.model.agent_class[1] == std::vector<int>{0, 0});  // both look Ma
    CHECK(comp.model.agent_class[2] == std::vector<int>{0, 1});
    CHECK(comp.world_of_child == std::vector<int>{0, 1});
  }
}

TEST_CASE("update collapses the lifted veil") {
  GameStructure g = fixtures::veil_and_reveal();
  EpistemicModel init = initial_model(g);

  std::vector<UpdateComponent> first = update_model(g, init, only_assignment(g, init));
  REQUIRE(first.size() == 1);
  const EpistemicModel& fog = first[0].model;
  CHECK(fog.world_state == std::vector<int>{1, 2});
  CHECK_FALSE(first[0].collapsed);
  CHECK(first[0].children ==
        std::vector<std::pair<int, int>>{{0, 1}, {0, 2}});

  // Both fog worlds step to s0: one component, uniform state, collapsed.
  std::vector<UpdateComponent> second = update_model(g, fog, only_assignment(g, fog));
  REQUIRE(second.size() == 1);
  CHECK(second[0].collapsed);
  CHECK(second[0].model == singleton_model(g, 0));
  CHECK(second[0].world_of_child == std::vector<int>{0, 0});
  CHECK(second[0].children ==
        std::vector<std::pair<int, int>>{{0, 0}, {1, 0}});
}

TEST_CASE("certainty collapse") {
  EpistemicModel uniform;
  uniform.world_state = {4, 4, 4};
  uniform.agent_class = {{0, 0, 1}, {0, 1, 2}};
  EpistemicModel c = certainty_collapse(uniform);
  CHECK(c.world_state == std::vector<int>{4});
  CHECK(c.agent_class == std::vector<std::vector<int>>{{0}, {0}});

  EpistemicModel mixed;
  mixed.world_state = {4, 5};
  mixed.agent_class = {{0, 0}, {0, 1}};
  CHECK(certainty_collapse(mixed) == mixed);
}

TEST_CASE("canonical key ignores world order and class names") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    EpistemicModel m = random_model(rng);
    std::vector<int> order(m.num_worlds());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    EpistemicModel twin = permuted(m, order, rng);

    Canonicalised a = canonicalise(m);
    Canonicalised b = canonicalise(twin);
    CHECK(a.key == b.key);
    CHECK(a.model == b.model);
    // The canonical form is a fixpoint.
    CHECK(canonical_key(a.model) == a.key);

    // world_perm really is the old-world -> position map.
    REQUIRE(a.world_perm.size() == static_cast<std::size_t>(m.num_worlds()));
    EpistemicModel norm = normalise_classes(m);
    for (int w = 0; w < m.num_worlds(); ++w)
      CHECK(a.model.world_state[a.world_perm[w]] == norm.world_state[w]);
  }
}

TEST_CASE("canonical key agrees with the all-permutations signature") {
  std::mt19937_64 rng(23);
  std::vector<std::string> lib, perm;
  for (int trial = 0; trial < 150; ++trial) {
    EpistemicModel m = random_model(rng);
    lib.push_back(key_string(canonical_key(m)));
    perm.push_back(oracle::perm_canonical_string(m));
  }
  // Same partition into isomorphism classes.
  for (std::size_t i = 0; i < lib.size(); ++i)
    for (std::size_t j = i + 1; j < lib.size(); ++j)
      CHECK((lib[i] == lib[j]) == (perm[i] == perm[j]));
}

TEST_CASE("arena sizes on the shipped games") {
  CHECK(build_tracking_arena(fixtures::transparent()).num_nodes() == 2);
  CHECK(build_tracking_arena(fixtures::veil_and_reveal()).num_nodes() == 2);
  CHECK(build_tracking_arena(fixtures::no_signal()).num_nodes() == 4);
  CHECK(build_tracking_arena(fixtures::signal()).num_nodes() == 10);
}

TEST_CASE("arena structure of the signalling game") {
  GameStructure g = fixtures::signal();
  TrackingArena arena = build_tracking_arena(g);
  REQUIRE(arena.num_nodes() == 10);
  CHECK(arena.recurring);
  CHECK(arena.initial == 0);
  CHECK(arena.nodes[0].model == initial_model(g));

  for (int i = 0; i < arena.num_nodes(); ++i) {
    const TrackingArena::Node& node = arena.nodes[i];
    CHECK(node.colour == node.model.colour(g));
    CHECK(arena.find(node.key) == i);
    CHECK_FALSE(node.groups.empty());
    for (const TrackingArena::EdgeGroup& group : node.groups) {
      CHECK(std::is_sorted(group.successors.begin(), group.successors.end()));
      CHECK_FALSE(group.successors.empty());
      for (int s : group.successors) {
        CHECK(s >= 0);
        CHECK(s < arena.num_nodes());
      }
    }
  }

  // The coin node: P2's four class-wise choices yield four distinct successor
  // sets; P1's action never matters, so eight assignments fold into four
  // groups of two.
  int coin = -1;
  for (int i = 0; i < arena.num_nodes(); ++i)
    if (arena.nodes[i].model.world_state == std::vector<int>{1, 2}) coin = i;
  REQUIRE(coin >= 0);
  const TrackingArena::Node& node = arena.nodes[coin];
  REQUIRE(node.groups.size() == 4);
  // Enumeration-least representative: the all-first-actions assignment.
  CHECK(node.groups[0].representative.profile_of ==
        std::vector<ActionProfile>{ActionProfile{{0, 0}}, ActionProfile{{0, 0}}});
  std::vector<std::size_t> sizes;
  for (const TrackingArena::EdgeGroup& group : node.groups) sizes.push_back(group.successors.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{1, 1, 2, 2});

  // Whole-arena group profile, pinned against the independent unraveller.
  oracle::UnravelResult un = oracle::unravel_knowledge_graph(g, 64);
  CHECK_FALSE(un.capped);
  CHECK(un.nodes == 10);
  CHECK(sorted_group_counts(arena) == un.group_counts);
  CHECK(sorted_group_counts(arena) == std::vector<int>{1, 1, 1, 1, 1, 2, 2, 2, 2, 4});
}

TEST_CASE("arena matches the unraveller on the other fixtures") {
  for (const GameStructure& g : {fixtures::transparent(), fixtures::veil_and_reveal(),
                                 fixtures::no_signal()}) {
    TrackingArena arena = build_tracking_arena(g);
    oracle::UnravelResult un = oracle::unravel_knowledge_graph(g, 64);
    CHECK_FALSE(un.capped);
    CHECK(arena.num_nodes() == un.nodes);
    CHECK(sorted_group_counts(arena) == un.group_counts);
  }
}

TEST_CASE("find rejects unknown keys") {
  GameStructure g = fixtures::veil_and_reveal();
  TrackingArena arena = build_tracking_arena(g);
  CHECK(arena.find(canonical_key(singleton_model(g, 1))) == -1);
}

TEST_CASE("unbounded uncertainty hits the node limit") {
  GameStructure g = fixtures::eternal_fog();
  try {
    build_tracking_arena(g, 4);
    FAIL("expected NodeLimitError");
  } catch (const NodeLimitError& e) {
    CHECK(e.nodes == 5);
    CHECK(e.largest_model == 16);
  }
}

TEST_CASE("unbounded uncertainty hits the world limit first on default limits") {
  GameStructure g = fixtures::eternal_fog();
  try {
    build_tracking_arena(g);
    FAIL("expected NodeLimitError");
  } catch (const NodeLimitError& e) {
    CHECK(e.largest_model > kModelWorldLimit);
    CHECK(e.nodes == 22);
  }
}

TEST_CASE("player-only components are finer than the observer closure") {
  GameStructure g = bridge_game();
  REQUIRE(validate_structure(g).empty());
  // The observer merges a and c through the unreachable b, gluing the two
  // successors of s into one node; players alone keep them apart.
  TrackingArena all = build_tracking_arena(g, kDefaultNodeLimit, ComponentMode::AllAgents);
  TrackingArena players = build_tracking_arena(g, kDefaultNodeLimit, ComponentMode::PlayersOnly);
  CHECK(all.mode == ComponentMode::AllAgents);
  CHECK(players.mode == ComponentMode::PlayersOnly);
  CHECK(all.num_nodes() == 2);
  CHECK(players.num_nodes() == 3);

  int fused = 1 - all.initial;
  CHECK(all.nodes[fused].model.world_state == std::vector<int>{1, 3});
  CHECK(all.nodes[fused].model.agent_class[kObserver] == std::vector<int>{0, 0});
  CHECK(all.nodes[fused].model.agent_class[1] == std::vector<int>{0, 1});
  CHECK(all.nodes[fused].model.agent_class[2] == std::vector<int>{0, 1});
}

}  // TEST_SUITE
