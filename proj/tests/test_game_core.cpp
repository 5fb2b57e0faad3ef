#include "support.hpp"

#include <doctest.h>

using namespace ggame;
using namespace test_support;

TEST_SUITE_BEGIN("game_core");

TEST_CASE("validate accepts the bundled structures") {
  CHECK(validate(build_g2()).empty());
  CHECK(validate(build_g3()).empty());
  CHECK(validate(build_g1()).empty());
  CHECK(validate(build_gn(6)).empty());
}

TEST_CASE("validate flags a chance distribution that does not sum to 1") {
  GameStructure g = build_g1();
  for (auto& m : g.moves)
    if (m.from == "v0" && m.to == "v1") m.prob = make_rational(2, 5);  // 2/5 + 1/2 = 9/10
  auto issues = validate(g);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].code == "chance-mass");
  CHECK(issues[0].subject == "v0");
}

TEST_CASE("validate flags an arc out of a terminal") {
  GameStructure g = build_g2();
  g.moves.push_back({"a1", "v1", std::nullopt});
  auto issues = validate(g);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].code == "terminal-out-degree");
  CHECK(issues[0].subject == "a1");
}

TEST_CASE("validate flags structural problems") {
  GameStructure g = build_g2();
  g.positions.push_back({"c", PositionKind::terminal, 0});
  g.positions.push_back({"v1", PositionKind::player, 1});
  g.moves.push_back({"v9", "a1", std::nullopt});
  g.initial = "a1";
  auto issues = validate(g);
  auto has = [&](const std::string& code) {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const ValidationIssue& i) { return i.code == code; });
  };
  CHECK(has("reserved-id"));
  CHECK(has("duplicate-id"));
  CHECK(has("unknown-position"));
  CHECK(has("terminal-initial"));
}

TEST_CASE("every position has exactly one kind and moves reference known ids") {
  // Partition totality over the builders: the view construction re-checks
  // id uniqueness and reference integrity.
  for (int n = 2; n <= 6; ++n) CHECK_NOTHROW(ggame::detail::make_view(build_gn(n)));
}

TEST_CASE("contract_forced_moves merges a forced chain into its terminal") {
  GameStructure g;
  g.players = 1;
  g.positions = {{"v", PositionKind::player, 1},
                 {"w", PositionKind::player, 1},
                 {"t", PositionKind::terminal, 0}};
  g.moves = {{"v", "w", std::nullopt}, {"w", "t", std::nullopt}};
  GameStructure c = contract_forced_moves(g);
  REQUIRE(c.positions.size() == 1);
  CHECK(c.positions[0].id == "t");
  CHECK(c.moves.empty());
}

TEST_CASE("contract_forced_moves leaves the 2-cycle game unchanged") {
  GameStructure g = build_g2();
  CHECK(contract_forced_moves(g) == g);
}

TEST_CASE("contract_forced_moves rejects a forced cycle") {
  GameStructure g;
  g.players = 1;
  g.positions = {{"v", PositionKind::player, 1}, {"w", PositionKind::player, 1}};
  g.moves = {{"v", "w", std::nullopt}, {"w", "v", std::nullopt}};
  CHECK_THROWS_WITH_AS(contract_forced_moves(g), doctest::Contains("forced cycle"), Error);
}

TEST_CASE("contract_forced_moves preserves outcome semantics") {
  // v is forced into the 2-cycle game's v1; any profile plays out the same.
  GameStructure g = build_g2();
  g.positions.push_back({"w", PositionKind::player, 1});
  g.moves.push_back({"w", "v1", std::nullopt});
  GameStructure c = contract_forced_moves(g);
  CHECK(c == build_g2());
  for (const auto& s : enumerate_pure_profiles(build_g2()))
    for (const std::string v0 : {"v1", "v2"}) {
      PureProfile padded = s;
      padded.choice["w"] = "v1";
      CHECK(play_pure(g, padded, v0) == play_pure(c, s, v0));
    }
}

TEST_CASE("contraction preserves limiting distributions") {
  GameStructure g = build_g2();
  g.positions.push_back({"w", PositionKind::player, 1});
  g.moves.push_back({"w", "v1", std::nullopt});
  GameStructure c = contract_forced_moves(g);
  MixedProfile y = play_once_profile(c, {rat(1, 3), rat(3, 5)});
  MixedProfile y_full = y;
  y_full.dist["w"] = {{"v1", rat(1)}};
  for (const std::string v0 : {"v1", "v2"}) {
    CHECK(markov_limit(g, y_full, v0) == markov_limit(c, y, v0));
    CHECK(apriori_limit(g, y_full, v0) == apriori_limit(c, y, v0));
  }
  // The merged position inherits its merge target's distribution.
  CHECK(markov_limit(g, y_full, "w").probs == markov_limit(c, y, "v1").probs);
}

TEST_CASE("initializing_extension adds one chance start over all non-terminals") {
  GameStructure g = build_g2();
  auto ext = initializing_extension(g, {{"v1", rat(1, 2)}, {"v2", rat(1, 2)}});
  CHECK(validate(ext).empty());
  REQUIRE(ext.initial.has_value());
  CHECK(*ext.initial == "v0");
  int chance_count = 0;
  for (const auto& p : ext.positions) chance_count += p.kind == PositionKind::chance;
  CHECK(chance_count == 1);  // extension of a deterministic game is almost deterministic
  int v0_arcs = 0;
  for (const auto& m : ext.moves) v0_arcs += m.from == "v0";
  CHECK(v0_arcs == 2);
}

TEST_CASE("initializing_extension accepts the point-mass used by the 3-cycle variant") {
  auto ext = initializing_extension(build_g3(), {{"v1", rat(1)}});
  CHECK(validate(ext).empty());
  // Probability-0 arcs to the unnamed non-terminals still exist.
  int v0_arcs = 0;
  for (const auto& m : ext.moves) v0_arcs += m.from == "v0";
  CHECK(v0_arcs == 3);
}

TEST_CASE("initializing_extension rejects support outside the non-terminals") {
  CHECK_THROWS_AS(initializing_extension(build_g2(), {{"a1", rat(1)}}), Error);
  CHECK_THROWS_AS(initializing_extension(build_g2(), {{"v1", rat(1, 2)}}), Error);
}

TEST_CASE("play_pure on the 2-cycle game") {
  GameStructure g = build_g2();
  PureProfile ff{{{"v1", "v2"}, {"v2", "v1"}}};
  CHECK(play_pure(g, ff, "v1") == Outcome::cycle());
  PureProfile t1{{{"v1", "a1"}, {"v2", "v1"}}};
  CHECK(play_pure(g, t1, "v1") == Outcome::terminal("a1"));
}

TEST_CASE("play_pure walks the 3-cycle game to the first terminator") {
  GameStructure g = build_g3();
  PureProfile s{{{"v1", "v2"}, {"v2", "v3"}, {"v3", "a3"}}};
  CHECK(play_pure(g, s, "v1") == Outcome::terminal("a3"));
}

TEST_CASE("play_pure needs a committed choice at chance positions") {
  GameStructure g = build_g1();
  PureProfile s{{{"v1", "v0"}}};
  CHECK_THROWS_AS(play_pure(g, s, "v1"), Error);
  CHECK(play_pure(g, s, "v1", {{"v0", "a2"}}) == Outcome::terminal("a2"));
  CHECK(play_pure(g, s, "v1", {{"v0", "v1"}}) == Outcome::cycle());
}

TEST_CASE("normal_form matches play_pure everywhere") {
  for (int n : {2, 3}) {
    GameStructure g = build_gn(n);
    auto table = normal_form(g);
    CHECK(table.size() == (1u << n));
    for (const auto& [s, row] : table) {
      CHECK(row.size() == static_cast<size_t>(n));
      for (const auto& [v0, outcome] : row) CHECK(outcome == play_pure(g, s, v0));
    }
  }
}

TEST_CASE("normal_form of the 2-cycle game is the expected 2x2 table") {
  GameStructure g = build_g2();
  auto table = normal_form(g);
  auto at = [&](const std::string& c1, const std::string& c2, const std::string& v0) {
    return table.at(PureProfile{{{"v1", c1}, {"v2", c2}}}).at(v0);
  };
  // Rows: player 1 terminates / follows; columns likewise for player 2.
  CHECK(at("a1", "a2", "v1") == Outcome::terminal("a1"));
  CHECK(at("a1", "a2", "v2") == Outcome::terminal("a2"));
  CHECK(at("a1", "v1", "v1") == Outcome::terminal("a1"));
  CHECK(at("a1", "v1", "v2") == Outcome::terminal("a1"));
  CHECK(at("v2", "a2", "v1") == Outcome::terminal("a2"));
  CHECK(at("v2", "a2", "v2") == Outcome::terminal("a2"));
  CHECK(at("v2", "v1", "v1") == Outcome::cycle());
  CHECK(at("v2", "v1", "v2") == Outcome::cycle());
}

TEST_CASE("normal_form of an initialized game maps profiles at the initial position only") {
  auto ext = initializing_extension(build_g2(), {{"v1", rat(1, 2)}, {"v2", rat(1, 2)}});
  CHECK_THROWS_AS(normal_form(ext), Error);  // not deterministic
  GameStructure g = build_g2();
  g.initial = "v1";
  auto table = normal_form(g);
  for (const auto& [s, row] : table) {
    CHECK(row.size() == 1);
    CHECK(row.count("v1") == 1);
  }
}

TEST_CASE("single-player single-position normal form") {
  GameStructure g;
  g.players = 1;
  g.positions = {{"v", PositionKind::player, 1},
                 {"x", PositionKind::terminal, 0},
                 {"y", PositionKind::terminal, 0}};
  g.moves = {{"v", "x", std::nullopt}, {"v", "y", std::nullopt}};
  auto table = normal_form(g);
  REQUIRE(table.size() == 2);
  CHECK(table.at(PureProfile{{{"v", "x"}}}).at("v") == Outcome::terminal("x"));
  CHECK(table.at(PureProfile{{{"v", "y"}}}).at("v") == Outcome::terminal("y"));
}

TEST_CASE("effective_payoff is the expectation over outcomes") {
  Payoff u;
  u.values[1] = {{Outcome::terminal("a1"), rat(2)},
                 {Outcome::terminal("a2"), rat(0)},
                 {Outcome::cycle(), rat(3)}};
  OutcomeDistribution dist{"v1",
                           {{Outcome::terminal("a1"), rat(2, 3)},
                            {Outcome::terminal("a2"), rat(1, 3)},
                            {Outcome::cycle(), rat(0)}}};
  CHECK(effective_payoff(u, dist, 1) == rat(4, 3));

  OutcomeDistribution point{"v1",
                            {{Outcome::terminal("a1"), rat(1)},
                             {Outcome::terminal("a2"), rat(0)},
                             {Outcome::cycle(), rat(0)}}};
  CHECK(effective_payoff(u, point, 1) == rat(2));

  OutcomeDistribution all_cycle{"v1",
                                {{Outcome::terminal("a1"), rat(0)},
                                 {Outcome::terminal("a2"), rat(0)},
                                 {Outcome::cycle(), rat(1)}}};
  CHECK(effective_payoff(u, all_cycle, 1) == rat(3));
}

TEST_CASE("effective_payoff rejects an outcome set mismatch") {
  Payoff u;
  u.values[1] = {{Outcome::terminal("a1"), rat(1)}, {Outcome::cycle(), rat(0)}};
  OutcomeDistribution dist{"v1", {{Outcome::terminal("zzz"), rat(1)}}};
  CHECK_THROWS_AS(effective_payoff(u, dist, 1), Error);
}

TEST_CASE("effective_payoff is linear in the distribution") {
  std::mt19937_64 rng(77);
  Payoff u = sample_u3(5);
  auto random_dist = [&] {
    Rational p1 = random_probability(rng), rest = 1 - p1;
    Rational p2 = rest * random_probability(rng);
    Rational p3 = rest - p2 >= 0 ? (rest - p2) * random_probability(rng) : Rational(0);
    return OutcomeDistribution{"v1",
                               {{Outcome::terminal("a1"), p1},
                                {Outcome::terminal("a2"), p2},
                                {Outcome::terminal("a3"), p3},
                                {Outcome::cycle(), 1 - p1 - p2 - p3}}};
  };
  for (int trial = 0; trial < 25; ++trial) {
    OutcomeDistribution p = random_dist(), q = random_dist();
    Rational alpha = random_probability(rng);
    OutcomeDistribution mix{"v1", {}};
    for (const auto& [a, pp] : p.probs) mix.probs[a] = alpha * pp + (1 - alpha) * q.prob(a);
    CHECK(effective_payoff(u, mix, 2) ==
          alpha * effective_payoff(u, p, 2) + (1 - alpha) * effective_payoff(u, q, 2));
  }
}

TEST_CASE("count_strategies") {
  GameStructure g2 = build_g2();
  auto c = count_strategies(g2, 1);
  CHECK(c.pure_count == 2);
  CHECK(c.mixed_dimension == 1);

  GameStructure two_positions;
  two_positions.players = 1;
  two_positions.positions = {{"p", PositionKind::player, 1},
                             {"q", PositionKind::player, 1},
                             {"t1", PositionKind::terminal, 0},
                             {"t2", PositionKind::terminal, 0}};
  two_positions.moves = {{"p", "t1", std::nullopt},
                         {"p", "q", std::nullopt},
                         {"q", "t1", std::nullopt},
                         {"q", "t2", std::nullopt}};
  c = count_strategies(two_positions, 1);
  CHECK(c.pure_count == 4);
  CHECK(c.mixed_dimension == 2);

  GameStructure fan;
  fan.players = 1;
  fan.positions = {{"p", PositionKind::player, 1},
                   {"t1", PositionKind::terminal, 0},
                   {"t2", PositionKind::terminal, 0},
                   {"t3", PositionKind::terminal, 0}};
  fan.moves = {{"p", "t1", std::nullopt}, {"p", "t2", std::nullopt}, {"p", "t3", std::nullopt}};
  c = count_strategies(fan, 1);
  CHECK(c.pure_count == 3);
  CHECK(c.mixed_dimension == 2);
}

TEST_CASE("mixed dimension never exceeds pure count minus one, equality on one position") {
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 6; ++n) {
    GameStructure g = build_gn(n);
    for (int p = 1; p <= n; ++p) {
      auto c = count_strategies(g, p);
      CHECK(c.mixed_dimension == c.pure_count - 1);  // play-once: one position each
    }
  }
  GameStructure multi;
  multi.players = 1;
  multi.positions = {{"p", PositionKind::player, 1},
                     {"q", PositionKind::player, 1},
                     {"t", PositionKind::terminal, 0},
                     {"s", PositionKind::terminal, 0}};
  multi.moves = {{"p", "q", std::nullopt},
                 {"p", "t", std::nullopt},
                 {"q", "t", std::nullopt},
                 {"q", "s", std::nullopt}};
  auto c = count_strategies(multi, 1);
  CHECK(c.mixed_dimension < c.pure_count - 1);
}

TEST_SUITE_END();
