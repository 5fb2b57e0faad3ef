#pragma once

#include "ggame/ggame.hpp"

#include <random>

namespace test_support {

using namespace ggame;

inline Rational rat(long long num, long long den = 1) { return make_rational(num, den); }

inline std::vector<Rational> coarse_grid() {
  return {rat(0), rat(1, 4), rat(1, 2), rat(3, 4), rat(1)};
}

// Random payoff generators for the 2- and 3-cycle games. Values are distinct
// integers so family membership is a strict-ordering question.

inline std::vector<long long> distinct_values(std::mt19937_64& rng, int count) {
  std::set<long long> vals;
  std::uniform_int_distribution<long long> d(-50, 50);
  while (static_cast<int>(vals.size()) < count) vals.insert(d(rng));
  std::vector<long long> shuffled(vals.begin(), vals.end());
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  return shuffled;
}

/// u1c > u11 > u12 and u21 > u22 > u2c, random distinct integers.
inline Payoff sample_u2(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto a = distinct_values(rng, 3), b = distinct_values(rng, 3);
  std::sort(a.rbegin(), a.rend());
  std::sort(b.rbegin(), b.rend());
  Payoff u;
  u.values[1] = {{Outcome::cycle(), Rational(a[0])},
                 {Outcome::terminal("a1"), Rational(a[1])},
                 {Outcome::terminal("a2"), Rational(a[2])}};
  u.values[2] = {{Outcome::terminal("a1"), Rational(b[0])},
                 {Outcome::terminal("a2"), Rational(b[1])},
                 {Outcome::cycle(), Rational(b[2])}};
  return u;
}

/// The payoff of the relabeled 2-cycle game: swapping the two players (and
/// their terminals) is a structure automorphism, so a payoff is solvable
/// exactly when its mirror is.
inline Payoff mirror_u2(const Payoff& u) {
  Payoff m;
  m.values[1] = {{Outcome::terminal("a1"), u(2, Outcome::terminal("a2"))},
                 {Outcome::terminal("a2"), u(2, Outcome::terminal("a1"))},
                 {Outcome::cycle(), u(2, Outcome::cycle())}};
  m.values[2] = {{Outcome::terminal("a1"), u(1, Outcome::terminal("a2"))},
                 {Outcome::terminal("a2"), u(1, Outcome::terminal("a1"))},
                 {Outcome::cycle(), u(1, Outcome::cycle())}};
  return m;
}

/// Random strict ordering per player on the 2-cycle outcome set, outside the
/// family in both labelings. Exhaustive enumeration (all 36 strict
/// orderings) shows these are exactly the payoffs with a pure UNE.
inline Payoff sample_not_u2(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    auto a = distinct_values(rng, 3), b = distinct_values(rng, 3);
    Payoff u;
    u.values[1] = {{Outcome::terminal("a1"), Rational(a[0])},
                   {Outcome::terminal("a2"), Rational(a[1])},
                   {Outcome::cycle(), Rational(a[2])}};
    u.values[2] = {{Outcome::terminal("a1"), Rational(b[0])},
                   {Outcome::terminal("a2"), Rational(b[1])},
                   {Outcome::cycle(), Rational(b[2])}};
    if (!in_u2(u) && !in_u2(mirror_u2(u))) return u;
  }
}

/// u12 > u11 > u13 > u1c cyclically, random distinct integers.
inline Payoff sample_u3(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Payoff u;
  for (int i = 1; i <= 3; ++i) {
    auto vals = distinct_values(rng, 4);
    std::sort(vals.rbegin(), vals.rend());
    int next = i % 3 + 1, prev = (i + 1) % 3 + 1;
    u.values[i] = {{Outcome::terminal(gn_terminal(next)), Rational(vals[0])},
                   {Outcome::terminal(gn_terminal(i)), Rational(vals[1])},
                   {Outcome::terminal(gn_terminal(prev)), Rational(vals[2])},
                   {Outcome::cycle(), Rational(vals[3])}};
  }
  return u;
}

/// Random strict cycle-worst ordering on the 3-cycle outcome set, outside
/// U3. The solvability characterization lives on the cycle-worst domain:
/// exhaustive enumeration (all 216 such orderings) shows U3 is the single
/// one without a pure UNE, while orderings ranking the cycle outcome higher
/// can be UNE-free outside U3 as well.
inline Payoff sample_not_u3(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (;;) {
    Payoff u;
    for (int i = 1; i <= 3; ++i) {
      auto vals = distinct_values(rng, 3);
      long long worst = std::min({vals[0], vals[1], vals[2]});
      u.values[i] = {{Outcome::terminal("a1"), Rational(vals[0])},
                     {Outcome::terminal("a2"), Rational(vals[1])},
                     {Outcome::terminal("a3"), Rational(vals[2])},
                     {Outcome::cycle(), Rational(worst - 1)}};
    }
    if (!in_u3(u)) return u;
  }
}

inline Rational random_probability(std::mt19937_64& rng, int max_den = 12) {
  std::uniform_int_distribution<int> den_d(2, max_den);
  int den = den_d(rng);
  std::uniform_int_distribution<int> num_d(0, den);
  return make_rational(num_d(rng), den);
}

inline Rational random_interior_probability(std::mt19937_64& rng, int max_den = 12) {
  std::uniform_int_distribution<int> den_d(3, max_den);
  int den = den_d(rng);
  std::uniform_int_distribution<int> num_d(1, den - 1);
  return make_rational(num_d(rng), den);
}

/// Random distribution over the out-arcs of every position of one player.
inline void randomize_player_positions(const GameStructure& g, MixedProfile& y, int player,
                                       std::mt19937_64& rng) {
  auto v = ggame::detail::make_view(g);
  for (int i : v.positions_of_player(player)) {
    std::vector<long long> w;
    long long total = 0;
    std::uniform_int_distribution<long long> d(0, 6);
    for (size_t a = 0; a < v.out[i].size(); ++a) {
      w.push_back(d(rng));
      total += w.back();
    }
    if (total == 0) {
      w[0] = 1;
      total = 1;
    }
    std::map<std::string, Rational> dist;
    for (size_t a = 0; a < v.out[i].size(); ++a)
      dist[v.id(v.out[i][a].to)] = Rational(Integer(w[a]), Integer(total));
    y.dist[v.id(i)] = std::move(dist);
  }
}

}  // namespace test_support
