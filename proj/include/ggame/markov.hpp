#pragma once

#include "ggame/game.hpp"

#include <cstdint>
#include <random>

namespace ggame {

namespace detail {

/// Tarjan strongly connected components over the positive-probability arcs,
/// restricted to the given states. Returns component id per state (dense,
/// -1 for states outside the restriction).
inline std::vector<int> positive_sccs(const GameView& v, const IndexedMixed& y,
                                      const std::vector<char>& in_scope, int& scc_count) {
  const int n = v.size();
  std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  int counter = 0;
  scc_count = 0;

  // Iterative Tarjan: frame = (state, next-arc cursor). Frames are addressed
  // by index because pushing a child may reallocate the vector.
  std::vector<std::pair<int, size_t>> frames;
  for (int root = 0; root < n; ++root) {
    if (!in_scope[root] || num[root] != -1) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      const size_t top = frames.size() - 1;
      const int s = frames[top].first;
      if (frames[top].second == 0) {
        num[s] = low[s] = counter++;
        stack.push_back(s);
        on_stack[s] = 1;
      }
      bool descended = false;
      auto succ = v.is_terminal(s) ? std::vector<std::pair<int, Rational>>{} : transitions(v, y, s);
      while (frames[top].second < succ.size()) {
        int t = succ[frames[top].second++].first;
        if (!in_scope[t]) continue;
        if (num[t] == -1) {
          frames.emplace_back(t, 0);
          descended = true;
          break;
        }
        if (on_stack[t]) low[s] = std::min(low[s], num[t]);
      }
      if (descended) continue;
      if (low[s] == num[s]) {
        for (;;) {
          int t = stack.back();
          stack.pop_back();
          on_stack[t] = 0;
          comp[t] = scc_count;
          if (t == s) break;
        }
        ++scc_count;
      }
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().first;
        low[parent] = std::min(low[parent], low[s]);
      }
    }
  }
  return comp;
}

/// States reachable from `starts` through positive-probability arcs.
inline std::vector<char> positive_reachable(const GameView& v, const IndexedMixed& y,
                                            const std::vector<int>& starts) {
  std::vector<char> seen(v.size(), 0);
  std::vector<int> queue = starts;
  for (int s : starts) seen[s] = 1;
  while (!queue.empty()) {
    int s = queue.back();
    queue.pop_back();
    if (v.is_terminal(s)) continue;
    for (const auto& [t, p] : transitions(v, y, s)) {
      if (!seen[t]) {
        seen[t] = 1;
        queue.push_back(t);
      }
    }
  }
  return seen;
}

/// Exact absorption probabilities of the chain induced by (q, y), for every
/// start in `starts`. Closed recurrent classes of non-terminals are lumped
/// into the cycle outcome; the remaining transient states satisfy a
/// nonsingular linear system solved by rational Gaussian elimination.
inline std::map<int, std::map<Outcome, Rational>> absorb(const GameView& v, const IndexedMixed& y,
                                                         const std::vector<int>& starts) {
  for (int s : starts)
    if (v.is_terminal(s)) throw Error("start position \"" + v.id(s) + "\" is terminal");

  const std::vector<char> scope = positive_reachable(v, y, starts);
  int scc_count = 0;
  const std::vector<int> comp = positive_sccs(v, y, scope, scc_count);

  // A component of non-terminals is closed iff no positive arc leaves it.
  std::vector<char> comp_closed(scc_count, 1);
  std::vector<char> comp_has_terminal(scc_count, 0);
  for (int s = 0; s < v.size(); ++s) {
    if (!scope[s]) continue;
    if (v.is_terminal(s)) {
      comp_has_terminal[comp[s]] = 1;
      continue;
    }
    for (const auto& [t, p] : transitions(v, y, s))
      if (comp[t] != comp[s]) comp_closed[comp[s]] = 0;
  }
  auto trapped = [&](int s) {
    return !v.is_terminal(s) && comp_closed[comp[s]] && !comp_has_terminal[comp[s]];
  };

  std::vector<int> transient;
  std::vector<int> row_of(v.size(), -1);
  for (int s = 0; s < v.size(); ++s) {
    if (scope[s] && !v.is_terminal(s) && !trapped(s)) {
      row_of[s] = static_cast<int>(transient.size());
      transient.push_back(s);
    }
  }

  // Outcome columns: reachable terminals plus the lumped cycle outcome.
  std::vector<Outcome> cols;
  std::vector<int> col_of(v.size(), -1);
  for (int s = 0; s < v.size(); ++s) {
    if (scope[s] && v.is_terminal(s)) {
      col_of[s] = static_cast<int>(cols.size());
      cols.push_back(Outcome::terminal(v.id(s)));
    }
  }
  const int cycle_col = static_cast<int>(cols.size());
  cols.push_back(Outcome::cycle());

  // Augmented system [I - Q | R].
  const int n = static_cast<int>(transient.size());
  const int m = static_cast<int>(cols.size());
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + m, Rational(0)));
  for (int r = 0; r < n; ++r) {
    a[r][r] = 1;
    for (const auto& [t, p] : transitions(v, y, transient[r])) {
      if (row_of[t] >= 0) a[r][row_of[t]] -= p;
      else if (v.is_terminal(t)) a[r][n + col_of[t]] += p;
      else a[r][n + cycle_col] += p;  // enters a closed recurrent class
    }
  }

  // Forward elimination with nonzero pivoting, then back substitution.
  for (int c = 0; c < n; ++c) {
    int pivot = -1;
    for (int r = c; r < n; ++r) {
      if (a[r][c] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) throw Error("singular absorption system");  // cannot happen
    std::swap(a[c], a[pivot]);
    for (int r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      a[r][c] = 0;
      for (int k = c + 1; k < n + m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  for (int c = n - 1; c >= 0; --c) {
    for (int k = n; k < n + m; ++k) a[c][k] /= a[c][c];
    a[c][c] = 1;
    for (int r = 0; r < c; ++r) {
      if (a[r][c] == 0) continue;
      for (int k = n; k < n + m; ++k) a[r][k] -= a[r][c] * a[c][k];
      a[r][c] = 0;
    }
  }

  std::map<int, std::map<Outcome, Rational>> result;
  for (int s : starts) {
    std::map<Outcome, Rational> dist;
    for (const auto& p : v.game->positions)
      if (p.kind == PositionKind::terminal) dist[Outcome::terminal(p.id)] = 0;
    dist[Outcome::cycle()] = 0;
    if (trapped(s)) {
      dist[Outcome::cycle()] = 1;
    } else {
      for (int k = 0; k < m; ++k) dist[cols[k]] = a[row_of[s]][n + k];
    }
    result.emplace(s, std::move(dist));
  }
  return result;
}

}  // namespace detail

/// Exact limiting distribution of the Markov realization from one start.
inline OutcomeDistribution markov_limit(const GameStructure& g, const MixedProfile& y,
                                        const std::string& v0) {
  auto v = detail::make_view(g);
  auto iy = detail::index_mixed(v, y);
  auto dist = detail::absorb(v, iy, {v.idx(v0)});
  return OutcomeDistribution{v0, std::move(dist.begin()->second)};
}

/// Limiting distributions for every non-terminal start, from one solve.
inline std::map<std::string, OutcomeDistribution> markov_limit_all(const GameStructure& g,
                                                                   const MixedProfile& y) {
  auto v = detail::make_view(g);
  auto iy = detail::index_mixed(v, y);
  auto raw = detail::absorb(v, iy, v.non_terminals());
  std::map<std::string, OutcomeDistribution> result;
  for (auto& [s, dist] : raw) result.emplace(v.id(s), OutcomeDistribution{v.id(s), std::move(dist)});
  return result;
}

/// A pure strategy of one player that is optimal against y from every start
/// simultaneously. Existence is a structural fact of the Markov realization;
/// failure to find one means the solver is broken.
inline std::map<std::string, std::string> uniformly_best_pure_response(const GameStructure& g,
                                                                       const Payoff& u,
                                                                       const MixedProfile& y,
                                                                       int player) {
  auto strategies = enumerate_player_strategies(g, player);
  std::vector<std::map<std::string, Rational>> value;  // per strategy: start -> payoff
  for (const auto& s : strategies) {
    MixedProfile swapped = y;
    detail::overwrite_with_point_mass(g, swapped, s);
    std::map<std::string, Rational> f;
    for (auto& [start, dist] : markov_limit_all(g, swapped))
      f.emplace(start, effective_payoff(u, dist, player));
    value.push_back(std::move(f));
  }
  for (size_t i = 0; i < strategies.size(); ++i) {
    bool dominant = true;
    for (size_t j = 0; j < strategies.size() && dominant; ++j)
      for (const auto& [start, fj] : value[j]) {
        if (value[i].at(start) < fj) {
          dominant = false;
          break;
        }
      }
    if (dominant) return strategies[i];
  }
  throw Error("no uniformly best pure response found (solver bug)");
}

struct SimOutcome {
  enum class Kind { terminal, cycle, step_cap };
  Kind kind = Kind::cycle;
  std::string terminal_id;  // set iff kind == terminal

  bool operator==(const SimOutcome&) const = default;
};

namespace detail {

/// Draws an index from an exact rational distribution using one uniform
/// 64-bit word: pick the first arc whose cumulative mass exceeds r / 2^64.
inline int draw_exact(const std::vector<std::pair<int, Rational>>& dist, std::uint64_t r) {
  static const Integer two64 = Integer(1) << 64;
  Rational cumulative = 0;
  for (size_t k = 0; k < dist.size(); ++k) {
    cumulative += dist[k].second;
    if (Integer(r) * denominator(cumulative) < numerator(cumulative) * two64)
      return static_cast<int>(k);
  }
  return static_cast<int>(dist.size()) - 1;  // cumulative mass 1; guard rounding of the last step
}

}  // namespace detail

/// One sampled play under the Markov realization: a fresh move is drawn at
/// every visit. Reports the cycle outcome as soon as the walk is provably
/// trapped (no terminal positively reachable), and a distinct step-cap
/// marker if the cap elapses first.
inline SimOutcome simulate_markov(const GameStructure& g, const MixedProfile& y,
                                  const std::string& v0, std::uint64_t seed,
                                  std::size_t max_steps = 1u << 20) {
  auto v = detail::make_view(g);
  auto iy = detail::index_mixed(v, y);

  // States that can still reach a terminal with positive probability.
  std::vector<char> escaping(v.size(), 0);
  for (;;) {
    bool changed = false;
    for (int s = 0; s < v.size(); ++s) {
      if (escaping[s]) continue;
      if (v.is_terminal(s)) {
        escaping[s] = 1;
        changed = true;
        continue;
      }
      for (const auto& [t, p] : detail::transitions(v, iy, s)) {
        if (escaping[t]) {
          escaping[s] = 1;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }

  std::mt19937_64 rng(seed);
  int cur = v.idx(v0);
  for (std::size_t step = 0; step <= max_steps; ++step) {
    if (v.is_terminal(cur)) return {SimOutcome::Kind::terminal, v.id(cur)};
    if (!escaping[cur]) return {SimOutcome::Kind::cycle, {}};
    auto t = detail::transitions(v, iy, cur);
    cur = t[detail::draw_exact(t, rng())].first;
  }
  return {SimOutcome::Kind::step_cap, {}};
}

}  // namespace ggame
