#include "support.hpp"

#include <doctest.h>

using namespace ggame;
using namespace test_support;

TEST_SUITE_BEGIN("families");

TEST_CASE("cycle game structure") {
  for (int n = 2; n <= 6; ++n) {
    GameStructure g = build_gn(n);
    CHECK(validate(g).empty());
    CHECK(g.players == n);
    int players = 0, terminals = 0;
    for (const auto& p : g.positions) {
      players += p.kind == PositionKind::player;
      terminals += p.kind == PositionKind::terminal;
    }
    CHECK(players == n);
    CHECK(terminals == n);
    auto v = ggame::detail::make_view(g);
    for (int i = 0; i < v.size(); ++i)
      if (!v.is_terminal(i)) CHECK(v.out[i].size() == 2);
    // The non-terminal arcs form a single directed n-cycle.
    std::string cur = "v1";
    for (int step = 0; step < n; ++step) {
      std::string next;
      for (const auto& arc : v.out[v.idx(cur)])
        if (!v.is_terminal(arc.to)) next = v.id(arc.to);
      REQUIRE(!next.empty());
      cur = next;
    }
    CHECK(cur == "v1");
  }
  CHECK_THROWS_AS(build_gn(1), Error);
}

TEST_CASE("the chance loop game plays as drawn") {
  GameStructure g = build_g1();
  CHECK(validate(g).empty());
  PureProfile terminate{{{"v1", "a1"}}};
  CHECK(play_pure(g, terminate, "v1") == Outcome::terminal("a1"));
}

TEST_CASE("2-cycle payoff family membership") {
  CHECK(in_u2(canonical_u2()));
  Payoff tie = canonical_u2();
  tie.values[1][Outcome::terminal("a2")] = tie.values[1][Outcome::terminal("a1")];
  CHECK(!in_u2(tie));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CHECK(in_u2(sample_u2(seed)));
    CHECK(!in_u2(sample_not_u2(seed)));
  }
}

TEST_CASE("3-cycle payoff family membership") {
  CHECK(in_u3(canonical_u3()));
  CHECK(!in_u3(canonical_u2()) == true);  // different outcome set entirely
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    CHECK(in_u3(sample_u3(seed)));
    CHECK(!in_u3(sample_not_u3(seed)));
  }
}

TEST_CASE("family conditions at n=3 coincide with the 3-cycle inequality chains") {
  // Exhaustive over all strict orderings: 4! value assignments per player.
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> base{0, 1, 2, 3};
  do {
    perms.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  REQUIRE(perms.size() == 24);

  int family_count = 0;
  for (const auto& p1 : perms)
    for (const auto& p2 : perms)
      for (const auto& p3 : perms) {
        Payoff u;
        const std::array<int, 4>* rows[3] = {&p1, &p2, &p3};
        for (int i = 1; i <= 3; ++i) {
          u.values[i] = {{Outcome::terminal("a1"), Rational((*rows[i - 1])[0])},
                         {Outcome::terminal("a2"), Rational((*rows[i - 1])[1])},
                         {Outcome::terminal("a3"), Rational((*rows[i - 1])[2])},
                         {Outcome::cycle(), Rational((*rows[i - 1])[3])}};
        }
        bool family = check_un_conditions(3, u).all();
        CHECK(family == in_u3(u));
        family_count += family;
      }
  CHECK(family_count == 1);  // one strict-order triple satisfies the chains
}

TEST_CASE("the 2-cycle family fails the cycle-worst condition") {
  auto c = check_un_conditions(2, canonical_u2());
  CHECK(!c.cycle_worst);  // the cycle outcome is player 1's best
  CHECK(!c.all());
}

TEST_CASE("violating the dominated-own-terminal condition is flagged") {
  Payoff u = canonical_u3();
  u.values[1][Outcome::terminal("a2")] = rat(0);  // now a2 < a1 for player 1
  auto c = check_un_conditions(3, u);
  CHECK(!c.own_terminal_dominated);
  CHECK(!c.all());
}

TEST_CASE("payoff sampler output always passes the checker") {
  for (int n = 3; n <= 6; ++n)
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Payoff u = sample_un(n, seed);
      CHECK(check_un_conditions(n, u).all());
      if (n == 3) CHECK(in_u3(u));
    }
  CHECK(sample_un(4, 42) == sample_un(4, 42));
  CHECK_THROWS_AS(sample_un(2, 1), Error);
}

TEST_CASE("closed-form spot values") {
  auto m = closed_form_markov(2, {rat(1, 2), rat(1, 2)}, "v1");
  CHECK(m.prob(Outcome::terminal("a1")) == rat(2, 3));
  CHECK(m.prob(Outcome::terminal("a2")) == rat(1, 3));
  CHECK(m.prob_cycle() == 0);

  auto apr = closed_form_apriori(3, {rat(1, 2), rat(1, 2), rat(1, 2)}, "v3");
  CHECK(apr.prob(Outcome::terminal("a1")) == rat(1, 4));
  CHECK(apr.prob(Outcome::terminal("a2")) == rat(1, 8));
  CHECK(apr.prob(Outcome::terminal("a3")) == rat(1, 2));
  CHECK(apr.prob_cycle() == rat(1, 8));

  auto degenerate = closed_form_apriori(2, {rat(0), rat(2, 3)}, "v1");
  CHECK(degenerate.prob(Outcome::terminal("a1")) == 1);

  CHECK(closed_form_markov(2, {rat(1), rat(1)}, "v2").prob_cycle() == 1);
  CHECK_THROWS_AS(closed_form_markov(4, {rat(1), rat(1), rat(1), rat(1)}, "v1"), Error);
}

TEST_CASE("UNE-free certification for the 3-cycle game") {
  auto certs = certify_une_free(3, canonical_u3());
  CHECK(certs.size() == 8);
  GameStructure g = build_g3();
  Payoff u = canonical_u3();
  for (const auto& c : certs) {
    int terminators = 0;
    for (int i = 1; i <= 3; ++i)
      terminators += c.profile.choice.at(gn_position(i)) == gn_terminal(i);
    ProfileClass expected = terminators == 0   ? ProfileClass::all_follow
                            : terminators == 1 ? ProfileClass::one_terminates
                                               : ProfileClass::many_terminate;
    CHECK(c.profile_class == expected);
    // Replay the improvement.
    PureProfile deviated = c.profile;
    for (const auto& [pos, target] : c.improvement.deviation) deviated.choice[pos] = target;
    CHECK(u(c.improvement.player, play_pure(g, c.profile, c.improvement.start)) ==
          c.improvement.old_value);
    CHECK(u(c.improvement.player, play_pure(g, deviated, c.improvement.start)) ==
          c.improvement.new_value);
    CHECK(c.improvement.new_value > c.improvement.old_value);
  }
}

TEST_CASE("UNE-free certification for larger cycle games") {
  for (int n = 4; n <= 6; ++n) {
    Payoff u = sample_un(n, 1000 + n);
    auto certs = certify_une_free(n, u);
    CHECK(certs.size() == (1u << n));
    GameStructure g = build_gn(n);
    for (const auto& c : certs) {
      PureProfile deviated = c.profile;
      for (const auto& [pos, target] : c.improvement.deviation) deviated.choice[pos] = target;
      CHECK(u(c.improvement.player, play_pure(g, deviated, c.improvement.start)) >
            u(c.improvement.player, play_pure(g, c.profile, c.improvement.start)));
    }
  }
}

TEST_CASE("certification refuses payoffs outside the family") {
  CHECK_THROWS_AS(certify_une_free(3, sample_not_u3(5)), Error);
}

TEST_CASE("mu-realizing payoffs hit their ratios exactly") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 15; ++trial) {
    Rational mu1(Integer(1 + rng() % 9), Integer(1 + rng() % 9));
    Rational mu2(Integer(1 + rng() % 9), Integer(1 + rng() % 9));
    Rational mu3(Integer(1 + rng() % 9), Integer(1 + rng() % 9));
    Payoff u = payoff_from_mu(mu1, mu2, mu3);
    CHECK(in_u3(u));
    Mu m = mu_values(u);
    CHECK(m.mu1 == mu1);
    CHECK(m.mu2 == mu2);
    CHECK(m.mu3 == mu3);
  }
}

TEST_SUITE_END();
