#pragma once

#include "ggame/rational.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ggame {

enum class PositionKind { player, chance, terminal };

enum class Realization { markov, apriori };

struct Position {
  std::string id;
  PositionKind kind = PositionKind::player;
  int player = 0;  // 1..n, meaningful iff kind == player

  bool operator==(const Position&) const = default;
};

struct Move {
  std::string from;
  std::string to;
  std::optional<Rational> prob;  // set iff `from` is a chance position

  bool operator==(const Move&) const = default;
};

/// A finite digraph of positions and moves, a partition of the positions
/// into per-player, chance, and terminal sets, exact chance distributions,
/// and an optional initial position.
struct GameStructure {
  int players = 0;
  std::vector<Position> positions;
  std::vector<Move> moves;
  std::optional<std::string> initial;

  bool operator==(const GameStructure&) const = default;
};

/// Either a terminal position or the single outcome shared by all
/// infinite plays.
class Outcome {
 public:
  static Outcome terminal(std::string id) {
    Outcome o;
    o.id_ = std::move(id);
    return o;
  }
  static Outcome cycle() {
    Outcome o;
    o.cycle_ = true;
    return o;
  }

  bool is_cycle() const { return cycle_; }
  const std::string& terminal_id() const {
    if (cycle_) throw Error("cycle outcome has no terminal id");
    return id_;
  }
  /// Serialized key: the terminal id, or "c" for the cycle outcome.
  std::string key() const { return cycle_ ? "c" : id_; }

  friend auto operator<=>(const Outcome&, const Outcome&) = default;

 private:
  bool cycle_ = false;
  std::string id_;
};

/// Per-player value for every outcome.
struct Payoff {
  std::map<int, std::map<Outcome, Rational>> values;

  const Rational& operator()(int player, const Outcome& a) const {
    auto row = values.find(player);
    if (row == values.end()) throw Error("payoff missing player " + std::to_string(player));
    auto cell = row->second.find(a);
    if (cell == row->second.end()) throw Error("payoff missing outcome " + a.key());
    return cell->second;
  }

  bool operator==(const Payoff&) const = default;
};

/// One chosen outgoing move per player-controlled position.
struct PureProfile {
  std::map<std::string, std::string> choice;  // position id -> target id

  auto operator<=>(const PureProfile&) const = default;
};

/// An independent probability distribution over outgoing moves at each
/// player-controlled position.
struct MixedProfile {
  std::map<std::string, std::map<std::string, Rational>> dist;

  bool operator==(const MixedProfile&) const = default;
};

struct OutcomeDistribution {
  std::string initial;
  std::map<Outcome, Rational> probs;

  Rational prob(const Outcome& a) const {
    auto it = probs.find(a);
    return it == probs.end() ? Rational(0) : it->second;
  }
  Rational prob_cycle() const { return prob(Outcome::cycle()); }

  bool operator==(const OutcomeDistribution&) const = default;
};

struct ValidationIssue {
  std::string code;     // stable machine-readable tag
  std::string subject;  // offending position/arc
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

/// Witness of a strict unilateral improvement: replacing one player's
/// strategy by `deviation` raises that player's value from `start`.
struct DeviationCertificate {
  int player = 0;
  std::string start;
  std::map<std::string, std::string> deviation;  // the player's replacement strategy
  Rational old_value;
  Rational new_value;

  bool operator==(const DeviationCertificate&) const = default;
};

// ---------------------------------------------------------------------------
// Indexed view used by the solvers. Positions get dense indices; out-arcs are
// adjacency lists in move order.

namespace detail {

struct OutArc {
  int to = -1;
  Rational q;  // chance probability; unset (0) for player positions
};

struct GameView {
  const GameStructure* game = nullptr;
  std::vector<const Position*> pos;
  std::map<std::string, int> index;
  std::vector<std::vector<OutArc>> out;

  int idx(const std::string& id) const {
    auto it = index.find(id);
    if (it == index.end()) throw Error("unknown position \"" + id + "\"");
    return it->second;
  }
  const std::string& id(int i) const { return pos[i]->id; }
  PositionKind kind(int i) const { return pos[i]->kind; }
  int player(int i) const { return pos[i]->player; }
  bool is_terminal(int i) const { return kind(i) == PositionKind::terminal; }
  int size() const { return static_cast<int>(pos.size()); }

  std::vector<int> non_terminals() const {
    std::vector<int> r;
    for (int i = 0; i < size(); ++i)
      if (!is_terminal(i)) r.push_back(i);
    return r;
  }
  std::vector<int> positions_of_player(int p) const {
    std::vector<int> r;
    for (int i = 0; i < size(); ++i)
      if (kind(i) == PositionKind::player && player(i) == p) r.push_back(i);
    return r;
  }
};

inline GameView make_view(const GameStructure& g) {
  GameView v;
  v.game = &g;
  for (const auto& p : g.positions) {
    if (v.index.count(p.id)) throw Error("duplicate position id \"" + p.id + "\"");
    v.index[p.id] = static_cast<int>(v.pos.size());
    v.pos.push_back(&p);
  }
  v.out.resize(v.pos.size());
  for (const auto& m : g.moves) {
    auto from = v.index.find(m.from);
    auto to = v.index.find(m.to);
    if (from == v.index.end()) throw Error("move from unknown position \"" + m.from + "\"");
    if (to == v.index.end()) throw Error("move to unknown position \"" + m.to + "\"");
    v.out[from->second].push_back(OutArc{to->second, m.prob.value_or(Rational(0))});
  }
  return v;
}

/// Mixed profile resolved against a view: per player position, arc
/// probabilities aligned with the out-arc list.
struct IndexedMixed {
  std::vector<std::vector<Rational>> arc_prob;  // empty for non-player positions
};

inline IndexedMixed index_mixed(const GameView& v, const MixedProfile& y) {
  IndexedMixed m;
  m.arc_prob.resize(v.size());
  for (int i = 0; i < v.size(); ++i) {
    if (v.kind(i) != PositionKind::player) continue;
    auto it = y.dist.find(v.id(i));
    if (it == y.dist.end()) throw Error("profile missing position \"" + v.id(i) + "\"");
    const auto& dist = it->second;
    Rational sum = 0;
    std::vector<Rational> probs(v.out[i].size(), Rational(0));
    std::set<std::string> seen;
    for (const auto& [target, p] : dist) {
      if (p < 0) throw Error("negative probability at \"" + v.id(i) + "\"");
      bool found = false;
      for (size_t a = 0; a < v.out[i].size(); ++a) {
        if (v.id(v.out[i][a].to) == target) {
          probs[a] = p;
          found = true;
          break;
        }
      }
      if (!found) throw Error("profile names non-arc target \"" + target + "\" at \"" + v.id(i) + "\"");
      sum += p;
    }
    if (sum != 1) throw Error("profile at \"" + v.id(i) + "\" sums to " + format_rational(sum));
    m.arc_prob[i] = std::move(probs);
  }
  return m;
}

/// Replaces the distributions of the fragment's positions by point masses
/// on the fragment's chosen arcs.
inline void overwrite_with_point_mass(const GameStructure& g, MixedProfile& y,
                                      const std::map<std::string, std::string>& fragment) {
  auto v = make_view(g);
  for (const auto& [pos, target] : fragment) {
    int i = v.idx(pos);
    std::map<std::string, Rational> dist;
    bool found = false;
    for (const auto& arc : v.out[i]) {
      bool chosen = v.id(arc.to) == target;
      dist[v.id(arc.to)] = Rational(chosen ? 1 : 0);
      found = found || chosen;
    }
    if (!found) throw Error("choice \"" + target + "\" is not an arc out of \"" + pos + "\"");
    y.dist[pos] = std::move(dist);
  }
}

/// Transition row of the chain induced by (q, y) at a non-terminal.
inline std::vector<std::pair<int, Rational>> transitions(const GameView& v, const IndexedMixed& y,
                                                         int i) {
  std::vector<std::pair<int, Rational>> t;
  const auto& arcs = v.out[i];
  for (size_t a = 0; a < arcs.size(); ++a) {
    Rational p = v.kind(i) == PositionKind::chance ? arcs[a].q : y.arc_prob[i][a];
    if (p != 0) t.emplace_back(arcs[a].to, p);
  }
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Validation

inline std::vector<ValidationIssue> validate(const GameStructure& g) {
  std::vector<ValidationIssue> issues;
  auto flag = [&](std::string code, std::string subject, std::string message) {
    issues.push_back({std::move(code), std::move(subject), std::move(message)});
  };

  std::map<std::string, const Position*> by_id;
  for (const auto& p : g.positions) {
    if (p.id == "c") flag("reserved-id", p.id, "\"c\" names the cycle outcome, not a position");
    if (!by_id.emplace(p.id, &p).second)
      flag("duplicate-id", p.id, "position id declared twice");
    if (p.kind == PositionKind::player && (p.player < 1 || p.player > g.players))
      flag("player-range", p.id,
           "player index " + std::to_string(p.player) + " outside 1.." + std::to_string(g.players));
  }

  std::map<std::string, int> out_degree;
  std::set<std::pair<std::string, std::string>> arcs_seen;
  std::map<std::string, Rational> chance_mass;
  for (const auto& m : g.moves) {
    auto from = by_id.find(m.from);
    auto to = by_id.find(m.to);
    if (from == by_id.end()) {
      flag("unknown-position", m.from, "move from undeclared position");
      continue;
    }
    if (to == by_id.end()) {
      flag("unknown-position", m.to, "move to undeclared position");
      continue;
    }
    if (!arcs_seen.insert({m.from, m.to}).second)
      flag("duplicate-arc", m.from + "->" + m.to, "arc listed twice");
    ++out_degree[m.from];
    if (from->second->kind == PositionKind::terminal)
      flag("terminal-out-degree", m.from, "terminal position has an outgoing move");
    if (from->second->kind == PositionKind::chance) {
      if (!m.prob) {
        flag("missing-prob", m.from + "->" + m.to, "chance move without probability");
      } else {
        if (*m.prob < 0) flag("negative-prob", m.from + "->" + m.to, "negative probability");
        chance_mass[m.from] += *m.prob;
      }
    } else if (m.prob) {
      flag("unexpected-prob", m.from + "->" + m.to, "probability on a non-chance move");
    }
  }

  for (const auto& p : g.positions) {
    int deg = out_degree.count(p.id) ? out_degree[p.id] : 0;
    if (p.kind == PositionKind::terminal) continue;
    if (deg == 0) flag("dead-end", p.id, "non-terminal position with no moves");
    else if (deg == 1) flag("forced-move", p.id, "out-degree 1; contract forced moves first");
    if (p.kind == PositionKind::chance && chance_mass[p.id] != 1)
      flag("chance-mass", p.id, "chance mass " + format_rational(chance_mass[p.id]) + " != 1");
  }

  if (g.initial) {
    auto it = by_id.find(*g.initial);
    if (it == by_id.end()) flag("unknown-position", *g.initial, "initial position undeclared");
    else if (it->second->kind == PositionKind::terminal)
      flag("terminal-initial", *g.initial, "initial position is a terminal");
  }
  return issues;
}

inline bool is_deterministic(const GameStructure& g) {
  return std::none_of(g.positions.begin(), g.positions.end(),
                      [](const Position& p) { return p.kind == PositionKind::chance; });
}

inline std::vector<Outcome> outcome_set(const GameStructure& g) {
  std::vector<Outcome> a;
  for (const auto& p : g.positions)
    if (p.kind == PositionKind::terminal) a.push_back(Outcome::terminal(p.id));
  a.push_back(Outcome::cycle());
  return a;
}

// ---------------------------------------------------------------------------
// Forced-move contraction

/// Removes every out-degree-1 non-terminal by merging it into its successor,
/// repeated to fixpoint. A cycle consisting entirely of forced moves is an
/// error: every position on it could only ever produce the cycle outcome.
inline GameStructure contract_forced_moves(GameStructure g) {
  for (;;) {
    std::map<std::string, std::vector<size_t>> out;
    std::map<std::string, const Position*> by_id;
    for (const auto& p : g.positions) by_id[p.id] = &p;
    for (size_t i = 0; i < g.moves.size(); ++i) out[g.moves[i].from].push_back(i);

    std::string victim;
    for (const auto& p : g.positions) {
      if (p.kind != PositionKind::terminal && out[p.id].size() == 1) {
        victim = p.id;
        break;
      }
    }
    if (victim.empty()) return g;

    const std::string target = g.moves[out[victim][0]].to;
    if (target == victim) throw Error("forced cycle at \"" + victim + "\"");

    // Drop the forced move, redirect everything else, drop the position.
    std::vector<Move> moves;
    for (size_t i = 0; i < g.moves.size(); ++i) {
      if (i == out[victim][0]) continue;
      Move m = g.moves[i];
      if (m.from == victim) m.from = target;  // self-loop at victim (forced cycle caught above)
      if (m.to == victim) m.to = target;
      moves.push_back(std::move(m));
    }
    // Collapse duplicate arcs introduced by the merge: chance probabilities
    // add up, player/terminal duplicates are choice-equivalent.
    std::vector<Move> dedup;
    for (auto& m : moves) {
      auto same = std::find_if(dedup.begin(), dedup.end(), [&](const Move& d) {
        return d.from == m.from && d.to == m.to;
      });
      if (same == dedup.end()) {
        dedup.push_back(std::move(m));
      } else if (same->prob || m.prob) {
        same->prob = same->prob.value_or(Rational(0)) + m.prob.value_or(Rational(0));
      }
    }
    g.moves = std::move(dedup);
    std::erase_if(g.positions, [&](const Position& p) { return p.id == victim; });
    if (g.initial && *g.initial == victim) {
      if (by_id.at(target)->kind == PositionKind::terminal)
        throw Error("initial position contracts into terminal \"" + target + "\"");
      g.initial = target;
    }
  }
}

// ---------------------------------------------------------------------------
// Initializing extension

/// Adds a fresh chance position with a move to every non-terminal, carrying
/// the given distribution, and makes it the initial position.
inline GameStructure initializing_extension(const GameStructure& g,
                                            const std::map<std::string, Rational>& q0) {
  if (g.initial) throw Error("game is already initialized");
  std::set<std::string> non_terminals;
  for (const auto& p : g.positions)
    if (p.kind != PositionKind::terminal) non_terminals.insert(p.id);

  Rational mass = 0;
  for (const auto& [id, p] : q0) {
    if (!non_terminals.count(id))
      throw Error("initial distribution on \"" + id + "\" which is not a non-terminal");
    if (p < 0) throw Error("negative initial probability at \"" + id + "\"");
    mass += p;
  }
  if (mass != 1) throw Error("initial distribution sums to " + format_rational(mass));

  std::set<std::string> taken;
  for (const auto& p : g.positions) taken.insert(p.id);
  std::string v0 = "v0";
  while (taken.count(v0)) v0 += '\'';

  GameStructure ext = g;
  ext.positions.push_back({v0, PositionKind::chance, 0});
  for (const auto& id : non_terminals) {
    auto it = q0.find(id);
    ext.moves.push_back({v0, id, it == q0.end() ? Rational(0) : it->second});
  }
  ext.initial = v0;
  return ext;
}

// ---------------------------------------------------------------------------
// Pure play

/// Walks from v0 following the profile (and, at chance positions, the given
/// committed choice). Ends at a terminal or on the first revisit of any
/// position, which closes a lasso.
inline Outcome play_pure(const GameStructure& g, const PureProfile& s, const std::string& v0,
                         const std::map<std::string, std::string>& chance_choice = {}) {
  auto v = detail::make_view(g);
  std::vector<char> visited(v.size(), 0);
  int cur = v.idx(v0);
  for (;;) {
    if (v.is_terminal(cur)) return Outcome::terminal(v.id(cur));
    if (visited[cur]) return Outcome::cycle();
    visited[cur] = 1;
    const std::string& id = v.id(cur);
    const std::map<std::string, std::string>& table =
        v.kind(cur) == PositionKind::chance ? chance_choice : s.choice;
    auto it = table.find(id);
    if (it == table.end())
      throw Error(std::string(v.kind(cur) == PositionKind::chance ? "chance choice" : "profile") +
                  " missing position \"" + id + "\"");
    bool moved = false;
    for (const auto& arc : v.out[cur]) {
      if (v.id(arc.to) == it->second) {
        cur = arc.to;
        moved = true;
        break;
      }
    }
    if (!moved) throw Error("choice \"" + it->second + "\" is not an arc out of \"" + id + "\"");
  }
}

// ---------------------------------------------------------------------------
// Strategy enumeration

constexpr std::size_t kDefaultProfileBudget = 1u << 20;

/// All pure strategies of one player, as position->target fragments.
inline std::vector<std::map<std::string, std::string>> enumerate_player_strategies(
    const GameStructure& g, int player, std::size_t budget = kDefaultProfileBudget) {
  auto v = detail::make_view(g);
  std::vector<int> owned = v.positions_of_player(player);
  std::vector<std::map<std::string, std::string>> result;
  result.emplace_back();
  for (int i : owned) {
    if (v.out[i].empty()) throw Error("player position \"" + v.id(i) + "\" has no moves");
    std::vector<std::map<std::string, std::string>> next;
    if (result.size() * v.out[i].size() > budget)
      throw BudgetError("strategy enumeration budget exceeded");
    for (const auto& partial : result) {
      for (const auto& arc : v.out[i]) {
        auto s = partial;
        s[v.id(i)] = v.id(arc.to);
        next.push_back(std::move(s));
      }
    }
    result = std::move(next);
  }
  return result;
}

inline std::vector<PureProfile> enumerate_pure_profiles(const GameStructure& g,
                                                        std::size_t budget = kDefaultProfileBudget) {
  std::vector<PureProfile> profiles;
  profiles.emplace_back();
  for (int p = 1; p <= g.players; ++p) {
    auto strategies = enumerate_player_strategies(g, p, budget);
    if (profiles.size() * strategies.size() > budget)
      throw BudgetError("profile enumeration budget exceeded");
    std::vector<PureProfile> next;
    for (const auto& partial : profiles) {
      for (const auto& s : strategies) {
        PureProfile q = partial;
        q.choice.insert(s.begin(), s.end());
        next.push_back(std::move(q));
      }
    }
    profiles = std::move(next);
  }
  return profiles;
}

/// Point-mass mixed profile equivalent to a pure profile.
inline MixedProfile point_mass_profile(const GameStructure& g, const PureProfile& s) {
  auto v = detail::make_view(g);
  MixedProfile y;
  for (int i = 0; i < v.size(); ++i) {
    if (v.kind(i) != PositionKind::player) continue;
    auto it = s.choice.find(v.id(i));
    if (it == s.choice.end()) throw Error("profile missing position \"" + v.id(i) + "\"");
    std::map<std::string, Rational> dist;
    bool found = false;
    for (const auto& arc : v.out[i]) {
      bool chosen = v.id(arc.to) == it->second;
      dist[v.id(arc.to)] = Rational(chosen ? 1 : 0);
      found = found || chosen;
    }
    if (!found) throw Error("choice \"" + it->second + "\" is not an arc out of \"" + v.id(i) + "\"");
    y.dist[v.id(i)] = std::move(dist);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Normal form

/// For a deterministic structure: the outcome of every profile from every
/// non-terminal start (or only the initial position, when one is set).
inline std::map<PureProfile, std::map<std::string, Outcome>> normal_form(
    const GameStructure& g, std::size_t budget = kDefaultProfileBudget) {
  if (!is_deterministic(g)) throw Error("not deterministic");
  std::vector<std::string> starts;
  if (g.initial) {
    starts.push_back(*g.initial);
  } else {
    for (const auto& p : g.positions)
      if (p.kind != PositionKind::terminal) starts.push_back(p.id);
  }
  std::map<PureProfile, std::map<std::string, Outcome>> table;
  for (const auto& s : enumerate_pure_profiles(g, budget)) {
    auto& row = table[s];
    for (const auto& v0 : starts) row.emplace(v0, play_pure(g, s, v0));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Effective payoff

/// Expectation of the player's payoff under an outcome distribution.
inline Rational effective_payoff(const Payoff& u, const OutcomeDistribution& dist, int player) {
  auto row = u.values.find(player);
  if (row == u.values.end()) throw Error("payoff missing player " + std::to_string(player));
  Rational total = 0;
  for (const auto& [outcome, p] : dist.probs) {
    auto cell = row->second.find(outcome);
    if (cell == row->second.end())
      throw Error("payoff and distribution disagree on outcome \"" + outcome.key() + "\"");
    total += p * cell->second;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Strategy counts

struct StrategyCount {
  Integer pure_count;      // product of out-degrees over the player's positions
  Integer mixed_dimension; // sum of (out-degree - 1)
};

inline StrategyCount count_strategies(const GameStructure& g, int player) {
  auto v = detail::make_view(g);
  StrategyCount c{Integer(1), Integer(0)};
  for (int i : v.positions_of_player(player)) {
    c.pure_count *= Integer(v.out[i].size());
    c.mixed_dimension += Integer(v.out[i].size()) - 1;
  }
  return c;
}

}  // namespace ggame
