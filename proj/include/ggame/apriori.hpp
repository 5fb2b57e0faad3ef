#pragma once

#include "ggame/game.hpp"
#include "ggame/markov.hpp"  // SimOutcome, draw_exact

#include <cstdint>
#include <random>

namespace ggame {

constexpr std::size_t kDefaultAprioriBudget = 1'000'000;

namespace detail {

struct AprioriDfs {
  const GameView& v;
  const IndexedMixed& y;
  std::size_t budget;
  std::size_t nodes = 0;
  std::vector<char> on_walk;
  std::map<Outcome, Rational> acc;

  AprioriDfs(const GameView& view, const IndexedMixed& mixed, std::size_t b)
      : v(view), y(mixed), budget(b), on_walk(view.size(), 0) {}

  void run(int cur, Rational weight) {
    if (v.is_terminal(cur)) {
      acc[Outcome::terminal(v.id(cur))] += weight;
      return;
    }
    if (on_walk[cur]) {
      // Revisiting a committed position closes a lasso.
      acc[Outcome::cycle()] += weight;
      return;
    }
    if (++nodes > budget) throw BudgetError("a priori enumeration budget exceeded");
    on_walk[cur] = 1;
    for (const auto& [t, p] : transitions(v, y, cur)) run(t, weight * p);
    on_walk[cur] = 0;
  }
};

}  // namespace detail

/// Exact limiting distribution of the a priori realization: every position
/// (players' and chance alike) commits one move before play, so each play is
/// a walk whose probability is the product of its move probabilities, and
/// any revisit yields the cycle outcome.
inline OutcomeDistribution apriori_limit(const GameStructure& g, const MixedProfile& y,
                                         const std::string& v0,
                                         std::size_t budget = kDefaultAprioriBudget) {
  auto v = detail::make_view(g);
  auto iy = detail::index_mixed(v, y);
  int start = v.idx(v0);
  if (v.is_terminal(start)) throw Error("start position \"" + v0 + "\" is terminal");
  detail::AprioriDfs dfs(v, iy, budget);
  dfs.run(start, Rational(1));
  OutcomeDistribution dist{v0, {}};
  for (const auto& p : g.positions)
    if (p.kind == PositionKind::terminal) dist.probs[Outcome::terminal(p.id)] = 0;
  dist.probs[Outcome::cycle()] = 0;
  for (auto& [a, p] : dfs.acc) dist.probs[a] = std::move(p);
  return dist;
}

inline std::map<std::string, OutcomeDistribution> apriori_limit_all(
    const GameStructure& g, const MixedProfile& y, std::size_t budget = kDefaultAprioriBudget) {
  std::map<std::string, OutcomeDistribution> result;
  for (const auto& p : g.positions)
    if (p.kind != PositionKind::terminal) result.emplace(p.id, apriori_limit(g, y, p.id, budget));
  return result;
}

/// One sampled play under the a priori realization: the move at each position
/// is drawn on first visit and repeated thereafter, so the walk terminates or
/// cycles within |V| steps.
inline SimOutcome simulate_apriori(const GameStructure& g, const MixedProfile& y,
                                   const std::string& v0, std::uint64_t seed) {
  auto v = detail::make_view(g);
  auto iy = detail::index_mixed(v, y);
  std::mt19937_64 rng(seed);
  std::vector<int> committed(v.size(), -1);
  std::vector<char> visited(v.size(), 0);
  int cur = v.idx(v0);
  for (;;) {
    if (v.is_terminal(cur)) return {SimOutcome::Kind::terminal, v.id(cur)};
    if (visited[cur]) return {SimOutcome::Kind::cycle, {}};
    visited[cur] = 1;
    auto t = detail::transitions(v, iy, cur);
    if (committed[cur] < 0) committed[cur] = t[detail::draw_exact(t, rng())].first;
    cur = committed[cur];
  }
}

/// Best pure strategy of one player from one fixed start, under the a priori
/// realization. Ties break toward the lexicographically smallest strategy
/// fragment (by position id, then target id).
inline std::map<std::string, std::string> best_pure_response_at(
    const GameStructure& g, const Payoff& u, const MixedProfile& y, int player,
    const std::string& v0, std::size_t budget = kDefaultAprioriBudget) {
  std::optional<std::map<std::string, std::string>> best;
  Rational best_value;
  for (const auto& s : enumerate_player_strategies(g, player)) {
    MixedProfile swapped = y;
    detail::overwrite_with_point_mass(g, swapped, s);
    Rational value = effective_payoff(u, apriori_limit(g, swapped, v0, budget), player);
    if (!best || value > best_value || (value == best_value && s < *best)) {
      best = s;
      best_value = value;
    }
  }
  if (!best) throw Error("player " + std::to_string(player) + " has no strategy");
  return *best;
}

/// The per-start best-response sets may fail to share a common element under
/// the a priori realization; when they do intersect, returns the smallest
/// common strategy, otherwise nullopt.
inline std::optional<std::map<std::string, std::string>> apriori_uniform_best_response(
    const GameStructure& g, const Payoff& u, const MixedProfile& y, int player,
    std::size_t budget = kDefaultAprioriBudget) {
  auto strategies = enumerate_player_strategies(g, player);
  std::vector<std::map<std::string, Rational>> value;  // per strategy: start -> payoff
  std::vector<std::string> starts;
  for (const auto& p : g.positions)
    if (p.kind != PositionKind::terminal) starts.push_back(p.id);
  for (const auto& s : strategies) {
    MixedProfile swapped = y;
    detail::overwrite_with_point_mass(g, swapped, s);
    std::map<std::string, Rational> f;
    for (const auto& v0 : starts)
      f.emplace(v0, effective_payoff(u, apriori_limit(g, swapped, v0, budget), player));
    value.push_back(std::move(f));
  }
  std::vector<char> in_all(strategies.size(), 1);
  for (const auto& v0 : starts) {
    Rational best;
    bool first = true;
    for (const auto& f : value) {
      if (first || f.at(v0) > best) best = f.at(v0);
      first = false;
    }
    for (size_t i = 0; i < strategies.size(); ++i)
      if (value[i].at(v0) != best) in_all[i] = 0;
  }
  std::optional<std::map<std::string, std::string>> common;
  for (size_t i = 0; i < strategies.size(); ++i)
    if (in_all[i] && (!common || strategies[i] < *common)) common = strategies[i];
  return common;
}

}  // namespace ggame
