#pragma once

#include "ggame/game.hpp"

#include <cstdint>
#include <random>

namespace ggame {

// ---------------------------------------------------------------------------
// Builders
//
// gn(n): players 1..n on a directed n-cycle v1 -> v2 -> ... -> vn -> v1,
// each vi also owning a terminal exit to ai. Every position has exactly two
// moves: follow the cycle or terminate.

inline std::string gn_position(int i) { return "v" + std::to_string(i); }
inline std::string gn_terminal(int i) { return "a" + std::to_string(i); }

inline GameStructure build_gn(int n) {
  if (n < 2) throw Error("cycle game needs at least 2 players");
  GameStructure g;
  g.players = n;
  for (int i = 1; i <= n; ++i) g.positions.push_back({gn_position(i), PositionKind::player, i});
  for (int i = 1; i <= n; ++i) g.positions.push_back({gn_terminal(i), PositionKind::terminal, 0});
  for (int i = 1; i <= n; ++i) {
    g.moves.push_back({gn_position(i), gn_position(i % n + 1), std::nullopt});
    g.moves.push_back({gn_position(i), gn_terminal(i), std::nullopt});
  }
  return g;
}

inline GameStructure build_g2() { return build_gn(2); }
inline GameStructure build_g3() { return build_gn(3); }

/// One player position feeding a chance position that either terminates
/// or returns the play; the smallest game where per-start best responses
/// diverge under the a priori realization.
inline GameStructure build_g1() {
  GameStructure g;
  g.players = 1;
  g.positions = {{"v0", PositionKind::chance, 0},
                 {"v1", PositionKind::player, 1},
                 {"a1", PositionKind::terminal, 0},
                 {"a2", PositionKind::terminal, 0}};
  g.moves = {{"v0", "v1", make_rational(1, 2)},
             {"v0", "a2", make_rational(1, 2)},
             {"v1", "v0", std::nullopt},
             {"v1", "a1", std::nullopt}};
  return g;
}

// ---------------------------------------------------------------------------
// Payoff families

inline const Rational& u_at(const Payoff& u, int player, int terminal) {
  return u(player, Outcome::terminal(gn_terminal(terminal)));
}
inline const Rational& u_cycle(const Payoff& u, int player) { return u(player, Outcome::cycle()); }

/// u1c > u11 > u12 and u21 > u22 > u2c.
inline bool in_u2(const Payoff& u) {
  return u_cycle(u, 1) > u_at(u, 1, 1) && u_at(u, 1, 1) > u_at(u, 1, 2) &&
         u_at(u, 2, 1) > u_at(u, 2, 2) && u_at(u, 2, 2) > u_cycle(u, 2);
}

/// u12 > u11 > u13 > u1c, cyclically for all three players.
inline bool in_u3(const Payoff& u) {
  for (int i = 1; i <= 3; ++i) {
    int next = i % 3 + 1, prev = (i + 1) % 3 + 1;
    if (!(u_at(u, i, next) > u_at(u, i, i) && u_at(u, i, i) > u_at(u, i, prev) &&
          u_at(u, i, prev) > u_cycle(u, i)))
      return false;
  }
  return true;
}

inline Payoff canonical_u2() {
  Payoff u;
  u.values[1] = {{Outcome::cycle(), 3}, {Outcome::terminal("a1"), 2}, {Outcome::terminal("a2"), 1}};
  u.values[2] = {{Outcome::terminal("a1"), 3}, {Outcome::terminal("a2"), 2}, {Outcome::cycle(), 1}};
  return u;
}

inline Payoff canonical_u3() {
  Payoff u;
  for (int i = 1; i <= 3; ++i) {
    int next = i % 3 + 1, prev = (i + 1) % 3 + 1;
    u.values[i] = {{Outcome::terminal(gn_terminal(next)), 4},
                   {Outcome::terminal(gn_terminal(i)), 3},
                   {Outcome::terminal(gn_terminal(prev)), 2},
                   {Outcome::cycle(), 1}};
  }
  return u;
}

/// Membership conditions for the n-cycle payoff family, evaluated with
/// cyclic index arithmetic.
struct UnConditions {
  /// (a) each player's own terminal is worse for them than each of the next
  /// floor(n/2) terminals.
  bool own_terminal_dominated = false;
  /// (b) for each player i there is a j among the first floor((n-1)/2)
  /// positions after i whose owner prefers their own terminal to a_i.
  bool window_switch_improves = false;
  /// (c) the cycle outcome is strictly worse than every terminal for everyone.
  bool cycle_worst = false;

  bool all() const { return own_terminal_dominated && window_switch_improves && cycle_worst; }
};

inline UnConditions check_un_conditions(int n, const Payoff& u) {
  auto cyc = [n](int i) { return (i - 1) % n + 1; };
  UnConditions c;
  c.own_terminal_dominated = true;
  for (int i = 1; i <= n && c.own_terminal_dominated; ++i)
    for (int d = 1; d <= n / 2; ++d)
      if (!(u_at(u, i, i) < u_at(u, i, cyc(i + d)))) {
        c.own_terminal_dominated = false;
        break;
      }
  c.window_switch_improves = true;
  for (int i = 1; i <= n; ++i) {
    bool found = false;
    for (int d = 1; d <= (n - 1) / 2 && !found; ++d) {
      int j = cyc(i + d);
      found = u_at(u, j, i) < u_at(u, j, j);
    }
    if (!found) {
      c.window_switch_improves = false;
      break;
    }
  }
  c.cycle_worst = true;
  for (int i = 1; i <= n && c.cycle_worst; ++i)
    for (int j = 1; j <= n; ++j)
      if (!(u_cycle(u, i) < u_at(u, i, j))) {
        c.cycle_worst = false;
        break;
      }
  return c;
}

/// Integer payoff in the n-cycle family. Starts from the distance-based
/// witness (next floor(n/2) terminals good, the rest bad, cycle worst) and
/// randomizes values per player, repairing any condition the draw broke.
inline Payoff sample_un(int n, std::uint64_t seed) {
  if (n < 3) throw Error("the payoff family needs at least 3 players");
  std::mt19937_64 rng(seed);
  auto cyc = [n](int i) { return (i - 1) % n + 1; };
  std::uniform_int_distribution<int> jitter(0, 3);

  std::map<int, std::map<int, long long>> t;  // player -> terminal -> value
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      int d = (j - i + n) % n;
      long long base = d == 0 ? 10 : (d <= n / 2 ? 20 : 0);
      t[i][j] = base * 4 + jitter(rng);
    }
    // Repair (a): own terminal strictly below the next floor(n/2).
    for (int d = 1; d <= n / 2; ++d) t[i][i] = std::min(t[i][i], t[i][cyc(i + d)] - 1);
  }
  // Repair (b): lowering u(j, a_i) keeps (a) intact because a_i lies outside
  // player j's dominating window whenever j is inside player i's.
  for (int i = 1; i <= n; ++i) {
    bool found = false;
    for (int d = 1; d <= (n - 1) / 2 && !found; ++d) {
      int j = cyc(i + d);
      found = t[j][i] < t[j][j];
    }
    if (!found) {
      int j = cyc(i + 1);
      t[j][i] = t[j][j] - 1 - jitter(rng);
    }
  }
  Payoff u;
  for (int i = 1; i <= n; ++i) {
    long long min_terminal = t[i][1];
    for (int j = 2; j <= n; ++j) min_terminal = std::min(min_terminal, t[i][j]);
    for (int j = 1; j <= n; ++j) u.values[i][Outcome::terminal(gn_terminal(j))] = Rational(t[i][j]);
    u.values[i][Outcome::cycle()] = Rational(min_terminal - 1 - jitter(rng));
  }
  if (!check_un_conditions(n, u).all()) throw Error("payoff sampler produced invalid payoff (bug)");
  return u;
}

/// A 3-cycle family payoff realizing the given payoff-gap ratios exactly:
/// row i is anchored at (previous terminal, cycle) = (1, 0) and the remaining
/// two gaps are sized so the ratio comes out to mu_i.
inline Payoff payoff_from_mu(const Rational& mu1, const Rational& mu2, const Rational& mu3) {
  for (const Rational* m : {&mu1, &mu2, &mu3})
    if (!(*m > 0)) throw Error("payoff-gap ratios must be positive");
  Payoff u;
  const Rational mus[3] = {mu1, mu2, mu3};
  for (int i = 1; i <= 3; ++i) {
    int next = i % 3 + 1, prev = (i + 1) % 3 + 1;
    const Rational& m = mus[i - 1];
    Rational lo = 1;                              // u(i, a_prev)
    Rational mid = lo + denominator(m);           // u(i, a_i)
    Rational hi = mid + numerator(m);             // u(i, a_next); (hi-mid)/(mid-lo) = m
    u.values[i][Outcome::terminal(gn_terminal(prev))] = lo;
    u.values[i][Outcome::terminal(gn_terminal(i))] = mid;
    u.values[i][Outcome::terminal(gn_terminal(next))] = hi;
    u.values[i][Outcome::cycle()] = 0;
  }
  return u;
}

// ---------------------------------------------------------------------------
// Closed-form limiting distributions for the 2- and 3-cycle games, with
// p_i = probability that player i follows the cycle. These are transcribed
// once and serve as the independent oracle for the general solvers.

namespace detail {

inline OutcomeDistribution make_cycle_dist(int n, const std::string& v0,
                                           const std::vector<Rational>& terminal_probs,
                                           const Rational& cycle_prob) {
  OutcomeDistribution d{v0, {}};
  for (int i = 1; i <= n; ++i) d.probs[Outcome::terminal(gn_terminal(i))] = terminal_probs[i - 1];
  d.probs[Outcome::cycle()] = cycle_prob;
  return d;
}

}  // namespace detail

inline OutcomeDistribution closed_form_markov(int n, const std::vector<Rational>& p,
                                              const std::string& v0) {
  if (n != 2 && n != 3) throw Error("closed form available for 2 or 3 players only");
  if (static_cast<int>(p.size()) != n) throw Error("expected one probability per player");
  for (const auto& pi : p)
    if (pi < 0 || pi > 1) throw Error("probability outside [0, 1]");

  const Rational p1 = p[0], p2 = p[1];
  if (n == 2) {
    if (p1 == 1 && p2 == 1) return detail::make_cycle_dist(2, v0, {0, 0}, 1);
    const Rational d = 1 - p1 * p2;
    if (v0 == "v1") return detail::make_cycle_dist(2, v0, {(1 - p1) / d, p1 * (1 - p2) / d}, 0);
    if (v0 == "v2") return detail::make_cycle_dist(2, v0, {p2 * (1 - p1) / d, (1 - p2) / d}, 0);
    throw Error("unknown start \"" + v0 + "\"");
  }
  const Rational p3 = p[2];
  if (p1 == 1 && p2 == 1 && p3 == 1) return detail::make_cycle_dist(3, v0, {0, 0, 0}, 1);
  const Rational d = 1 - p1 * p2 * p3;
  if (v0 == "v1")
    return detail::make_cycle_dist(
        3, v0, {(1 - p1) / d, p1 * (1 - p2) / d, p1 * p2 * (1 - p3) / d}, 0);
  if (v0 == "v2")
    return detail::make_cycle_dist(
        3, v0, {p2 * p3 * (1 - p1) / d, (1 - p2) / d, p2 * (1 - p3) / d}, 0);
  if (v0 == "v3")
    return detail::make_cycle_dist(
        3, v0, {p3 * (1 - p1) / d, p1 * p3 * (1 - p2) / d, (1 - p3) / d}, 0);
  throw Error("unknown start \"" + v0 + "\"");
}

inline OutcomeDistribution closed_form_apriori(int n, const std::vector<Rational>& p,
                                               const std::string& v0) {
  if (n != 2 && n != 3) throw Error("closed form available for 2 or 3 players only");
  if (static_cast<int>(p.size()) != n) throw Error("expected one probability per player");
  for (const auto& pi : p)
    if (pi < 0 || pi > 1) throw Error("probability outside [0, 1]");

  const Rational p1 = p[0], p2 = p[1];
  if (n == 2) {
    if (v0 == "v1") return detail::make_cycle_dist(2, v0, {1 - p1, p1 * (1 - p2)}, p1 * p2);
    if (v0 == "v2") return detail::make_cycle_dist(2, v0, {p2 * (1 - p1), 1 - p2}, p1 * p2);
    throw Error("unknown start \"" + v0 + "\"");
  }
  const Rational p3 = p[2];
  const Rational c = p1 * p2 * p3;
  if (v0 == "v1")
    return detail::make_cycle_dist(3, v0, {1 - p1, p1 * (1 - p2), p1 * p2 * (1 - p3)}, c);
  if (v0 == "v2")
    return detail::make_cycle_dist(3, v0, {p2 * p3 * (1 - p1), 1 - p2, p2 * (1 - p3)}, c);
  if (v0 == "v3")
    return detail::make_cycle_dist(3, v0, {p3 * (1 - p1), p3 * p1 * (1 - p2), 1 - p3}, c);
  throw Error("unknown start \"" + v0 + "\"");
}

// ---------------------------------------------------------------------------
// UNE-freeness certification for the n-cycle family

enum class ProfileClass { all_follow, one_terminates, many_terminate };

struct UneFreeCertificate {
  PureProfile profile;
  ProfileClass profile_class = ProfileClass::all_follow;
  DeviationCertificate improvement;
};

namespace detail {

inline Rational gn_profile_value(const GameStructure& g, const Payoff& u, const PureProfile& s,
                                 const std::string& start, int player) {
  Outcome a = play_pure(g, s, start);
  return u(player, a);
}

}  // namespace detail

/// Certifies that the n-cycle game with a family payoff has no uniform pure
/// equilibrium: for each of the 2^n profiles, constructs the improving
/// deviation dictated by the profile's class and verifies it by replay.
inline std::vector<UneFreeCertificate> certify_une_free(int n, const Payoff& u,
                                                        std::size_t budget = kDefaultProfileBudget) {
  if (!check_un_conditions(n, u).all()) throw Error("payoff outside the n-cycle family");
  if (n >= 63 || (std::size_t(1) << n) * std::size_t(n) > budget)
    throw BudgetError("profile certification budget exceeded");
  const GameStructure g = build_gn(n);
  auto cyc = [n](int i) { return (i - 1) % n + 1; };

  std::vector<UneFreeCertificate> certs;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    PureProfile s;
    std::vector<int> terminators;
    for (int i = 1; i <= n; ++i) {
      bool terminates = (mask >> (i - 1)) & 1u;
      s.choice[gn_position(i)] = terminates ? gn_terminal(i) : gn_position(i % n + 1);
      if (terminates) terminators.push_back(i);
    }

    UneFreeCertificate cert;
    cert.profile = s;
    int player = 0, start = 0;
    std::map<std::string, std::string> deviation;
    if (terminators.empty()) {
      cert.profile_class = ProfileClass::all_follow;
      player = 1;
      start = 1;
      deviation = {{gn_position(1), gn_terminal(1)}};
    } else if (terminators.size() == 1) {
      cert.profile_class = ProfileClass::one_terminates;
      const int i = terminators[0];
      for (int d = 1; d <= (n - 1) / 2 && player == 0; ++d) {
        int j = cyc(i + d);
        if (u_at(u, j, i) < u_at(u, j, j)) player = j;
      }
      if (player == 0) throw Error("no improving switch in the window (family conditions violated)");
      start = player;
      deviation = {{gn_position(player), gn_terminal(player)}};
    } else {
      cert.profile_class = ProfileClass::many_terminate;
      // Pick a terminator whose next terminator sits within half the cycle;
      // with two or more terminators one always exists.
      for (int i : terminators) {
        int dist = 0;
        for (int d = 1; d <= n; ++d) {
          if (s.choice.at(gn_position(cyc(i + d))) == gn_terminal(cyc(i + d))) {
            dist = d;
            break;
          }
        }
        if (dist >= 1 && dist <= n / 2) {
          player = i;
          break;
        }
      }
      if (player == 0) throw Error("no close terminator pair (unreachable)");
      start = player;
      deviation = {{gn_position(player), gn_position(player % n + 1)}};
    }

    cert.improvement.player = player;
    cert.improvement.start = gn_position(start);
    cert.improvement.deviation = deviation;
    cert.improvement.old_value = detail::gn_profile_value(g, u, s, cert.improvement.start, player);
    PureProfile deviated = s;
    for (const auto& [pos, target] : deviation) deviated.choice[pos] = target;
    cert.improvement.new_value =
        detail::gn_profile_value(g, u, deviated, cert.improvement.start, player);
    if (!(cert.improvement.new_value > cert.improvement.old_value))
      throw Error("profile admits no class improvement (certifier bug)");
    certs.push_back(std::move(cert));
  }
  return certs;
}

}  // namespace ggame
