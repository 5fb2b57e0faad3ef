#pragma once

#include "ggame/apriori.hpp"
#include "ggame/families.hpp"
#include "ggame/game.hpp"
#include "ggame/markov.hpp"

#include <functional>

namespace ggame {

// ---------------------------------------------------------------------------
// Profile values

/// Expected payoff of `player` from `v0` under the given realization.
inline Rational mixed_value(const GameStructure& g, const Payoff& u, const MixedProfile& y,
                            const std::string& v0, int player, Realization realization,
                            std::size_t budget = kDefaultAprioriBudget) {
  OutcomeDistribution dist = realization == Realization::markov
                                 ? markov_limit(g, y, v0)
                                 : apriori_limit(g, y, v0, budget);
  return effective_payoff(u, dist, player);
}

/// Value of a pure profile. Deterministic games walk the play directly; with
/// chance positions the value is the Markov value of the point mass (chance
/// positions re-randomize on every visit).
inline Rational pure_profile_value(const GameStructure& g, const Payoff& u, const PureProfile& s,
                                   const std::string& v0, int player) {
  if (is_deterministic(g)) return u(player, play_pure(g, s, v0));
  return effective_payoff(u, markov_limit(g, point_mass_profile(g, s), v0), player);
}

// ---------------------------------------------------------------------------
// Pure equilibria

/// First strict unilateral pure improvement from `v0`, if any.
inline std::optional<DeviationCertificate> find_pure_deviation(const GameStructure& g,
                                                               const Payoff& u,
                                                               const PureProfile& s,
                                                               const std::string& v0) {
  for (int player = 1; player <= g.players; ++player) {
    const Rational base = pure_profile_value(g, u, s, v0, player);
    for (const auto& alt : enumerate_player_strategies(g, player)) {
      PureProfile deviated = s;
      bool same = true;
      for (const auto& [pos, target] : alt) {
        if (deviated.choice.at(pos) != target) same = false;
        deviated.choice[pos] = target;
      }
      if (same) continue;
      Rational value = pure_profile_value(g, u, deviated, v0, player);
      if (value > base) return DeviationCertificate{player, v0, alt, base, value};
    }
  }
  return std::nullopt;
}

inline std::optional<DeviationCertificate> find_pure_une_deviation(const GameStructure& g,
                                                                   const Payoff& u,
                                                                   const PureProfile& s) {
  for (const auto& p : g.positions) {
    if (p.kind == PositionKind::terminal) continue;
    if (auto cert = find_pure_deviation(g, u, s, p.id)) return cert;
  }
  return std::nullopt;
}

inline bool is_pure_ne(const GameStructure& g, const Payoff& u, const PureProfile& s,
                       const std::string& v0) {
  return !find_pure_deviation(g, u, s, v0);
}

inline bool is_pure_une(const GameStructure& g, const Payoff& u, const PureProfile& s) {
  return !find_pure_une_deviation(g, u, s);
}

// ---------------------------------------------------------------------------
// Improvement graph over pure profiles

enum class ImprovementMode { fixed_start, uniform };

struct ImprovementArc {
  int from = 0;
  int to = 0;
  DeviationCertificate cert;
};

struct ImprovementGraph {
  std::vector<PureProfile> profiles;
  std::vector<ImprovementArc> arcs;
};

/// Arc s -> s' whenever s' differs in one player's strategy and strictly
/// improves that player (at the fixed start, or at some start in uniform
/// mode). Deterministic games only.
inline ImprovementGraph improvement_graph(const GameStructure& g, const Payoff& u,
                                          ImprovementMode mode, const std::string& v0 = "",
                                          std::size_t budget = kDefaultProfileBudget) {
  if (!is_deterministic(g)) throw Error("improvement graph needs a deterministic game");
  ImprovementGraph gr;
  gr.profiles = enumerate_pure_profiles(g, budget);
  std::map<PureProfile, int> index;
  for (size_t i = 0; i < gr.profiles.size(); ++i) index[gr.profiles[i]] = static_cast<int>(i);

  std::vector<std::string> starts;
  if (mode == ImprovementMode::fixed_start) {
    starts.push_back(v0);
  } else {
    for (const auto& p : g.positions)
      if (p.kind != PositionKind::terminal) starts.push_back(p.id);
  }

  for (size_t i = 0; i < gr.profiles.size(); ++i) {
    const PureProfile& s = gr.profiles[i];
    for (int player = 1; player <= g.players; ++player) {
      for (const auto& alt : enumerate_player_strategies(g, player)) {
        PureProfile deviated = s;
        bool same = true;
        for (const auto& [pos, target] : alt) {
          if (deviated.choice.at(pos) != target) same = false;
          deviated.choice[pos] = target;
        }
        if (same) continue;
        for (const auto& start : starts) {
          Rational base = u(player, play_pure(g, s, start));
          Rational value = u(player, play_pure(g, deviated, start));
          if (value > base) {
            gr.arcs.push_back({static_cast<int>(i), index.at(deviated),
                               DeviationCertificate{player, start, alt, base, value}});
            break;
          }
        }
      }
    }
  }
  return gr;
}

/// Elementary cycles, each reported once, rooted at its smallest profile
/// index. Bounded by length and count caps; a zero length cap means the
/// number of profiles.
inline std::vector<std::vector<int>> find_improvement_cycles(const ImprovementGraph& gr,
                                                             std::size_t max_len = 0,
                                                             std::size_t max_count = 4096) {
  const int n = static_cast<int>(gr.profiles.size());
  if (max_len == 0) max_len = gr.profiles.size();
  std::vector<std::vector<int>> succ(n);
  for (const auto& a : gr.arcs) succ[a.from].push_back(a.to);

  std::vector<std::vector<int>> cycles;
  std::vector<int> path;
  std::vector<char> on_path(n, 0);
  std::function<void(int, int)> dfs = [&](int root, int cur) {
    if (cycles.size() >= max_count) return;
    path.push_back(cur);
    on_path[cur] = 1;
    for (int next : succ[cur]) {
      if (next == root) {
        cycles.push_back(path);
      } else if (next > root && !on_path[next] && path.size() < max_len) {
        dfs(root, next);
      }
      if (cycles.size() >= max_count) break;
    }
    on_path[cur] = 0;
    path.pop_back();
  };
  for (int root = 0; root < n && cycles.size() < max_count; ++root) dfs(root, root);
  return cycles;
}

// ---------------------------------------------------------------------------
// Mixed equilibria via pure deviations
//
// Checking pure deviations suffices under both realizations: the Markov
// realization admits a uniformly best pure response, and the a priori payoff
// is affine in each position's distribution, so box vertices attain the
// optimum.

inline std::optional<DeviationCertificate> find_mixed_deviation(
    const GameStructure& g, const Payoff& u, const MixedProfile& y, const std::string& v0,
    Realization realization, std::size_t budget = kDefaultAprioriBudget) {
  for (int player = 1; player <= g.players; ++player) {
    const Rational base = mixed_value(g, u, y, v0, player, realization, budget);
    for (const auto& alt : enumerate_player_strategies(g, player)) {
      MixedProfile swapped = y;
      detail::overwrite_with_point_mass(g, swapped, alt);
      Rational value = mixed_value(g, u, swapped, v0, player, realization, budget);
      if (value > base) return DeviationCertificate{player, v0, alt, base, value};
    }
  }
  return std::nullopt;
}

inline std::optional<DeviationCertificate> find_mixed_une_deviation(
    const GameStructure& g, const Payoff& u, const MixedProfile& y, Realization realization,
    std::size_t budget = kDefaultAprioriBudget) {
  // One absorption solve covers all starts; deviations are checked start by
  // start against it.
  std::map<std::string, std::map<int, Rational>> base;
  auto limits = realization == Realization::markov ? markov_limit_all(g, y)
                                                   : apriori_limit_all(g, y, budget);
  for (const auto& [start, dist] : limits)
    for (int player = 1; player <= g.players; ++player)
      base[start][player] = effective_payoff(u, dist, player);

  for (int player = 1; player <= g.players; ++player) {
    for (const auto& alt : enumerate_player_strategies(g, player)) {
      MixedProfile swapped = y;
      detail::overwrite_with_point_mass(g, swapped, alt);
      auto dev_limits = realization == Realization::markov ? markov_limit_all(g, swapped)
                                                           : apriori_limit_all(g, swapped, budget);
      for (const auto& [start, dist] : dev_limits) {
        Rational value = effective_payoff(u, dist, player);
        if (value > base.at(start).at(player))
          return DeviationCertificate{player, start, alt, base.at(start).at(player), value};
      }
    }
  }
  return std::nullopt;
}

inline bool is_mixed_ne(const GameStructure& g, const Payoff& u, const MixedProfile& y,
                        const std::string& v0, Realization realization,
                        std::size_t budget = kDefaultAprioriBudget) {
  return !find_mixed_deviation(g, u, y, v0, realization, budget);
}

inline bool is_mixed_une(const GameStructure& g, const Payoff& u, const MixedProfile& y,
                         Realization realization, std::size_t budget = kDefaultAprioriBudget) {
  return !find_mixed_une_deviation(g, u, y, realization, budget);
}

// ---------------------------------------------------------------------------
// Payoff-gap ratios and the closed-form equilibrium of the 3-cycle game

struct Mu {
  Rational mu1, mu2, mu3;
  Rational product() const { return mu1 * mu2 * mu3; }
};

/// mu1 = (u12-u11)/(u11-u13), mu2 = (u23-u22)/(u22-u21),
/// mu3 = (u31-u33)/(u33-u32); all positive on the 3-cycle family.
inline Mu mu_values(const Payoff& u) {
  auto ratio = [](const Rational& num, const Rational& den) {
    if (den == 0) throw Error("degenerate payoff: zero gap in a mu denominator");
    return num / den;
  };
  return Mu{
      ratio(u_at(u, 1, 2) - u_at(u, 1, 1), u_at(u, 1, 1) - u_at(u, 1, 3)),
      ratio(u_at(u, 2, 3) - u_at(u, 2, 2), u_at(u, 2, 2) - u_at(u, 2, 1)),
      ratio(u_at(u, 3, 1) - u_at(u, 3, 3), u_at(u, 3, 3) - u_at(u, 3, 2)),
  };
}

/// The unique interior equilibrium of the 3-cycle game under the Markov
/// realization, when the mu product is below 1; none otherwise. The returned
/// point is checked against the stationarity identities
/// mu_i (1 - p_{i+1}) = p_{i+1} (1 - p_{i+2}) before being handed out.
inline std::optional<MixedProfile> g3_closed_form_ne(const Payoff& u) {
  if (!in_u3(u)) throw Error("payoff outside the 3-cycle family");
  const Mu m = mu_values(u);
  if (m.product() >= 1) return std::nullopt;

  const Rational a = 1 + m.mu1 + m.mu1 * m.mu2;
  const Rational b = 1 + m.mu2 + m.mu2 * m.mu3;
  const Rational c = 1 + m.mu3 + m.mu3 * m.mu1;
  const Rational p1 = m.mu3 * a / c;
  const Rational p2 = m.mu1 * b / a;
  const Rational p3 = m.mu2 * c / b;

  for (const Rational& p : {p1, p2, p3})
    if (!(p > 0 && p < 1)) throw Error("closed-form point left the open box (bug)");
  if (m.mu1 * (1 - p2) != p2 * (1 - p3) || m.mu2 * (1 - p3) != p3 * (1 - p1) ||
      m.mu3 * (1 - p1) != p1 * (1 - p2))
    throw Error("closed-form point fails the stationarity identities (bug)");

  MixedProfile y;
  y.dist["v1"] = {{"v2", p1}, {"a1", 1 - p1}};
  y.dist["v2"] = {{"v3", p2}, {"a2", 1 - p2}};
  y.dist["v3"] = {{"v1", p3}, {"a3", 1 - p3}};
  return y;
}

// ---------------------------------------------------------------------------
// Play-once parameterization
//
// In a play-once game whose positions all have two moves, a profile is one
// probability per player. The free coordinate p_i is the probability of the
// arc toward a non-terminal (the cycle-continuation move) when exactly one
// of the two arcs has a non-terminal target, otherwise of the arc with the
// lexicographically larger target.

struct PlayOncePosition {
  int player = 0;
  std::string position;
  std::string free_target;
  std::string other_target;
};

inline std::vector<PlayOncePosition> play_once_positions(const GameStructure& g) {
  auto v = detail::make_view(g);
  std::vector<PlayOncePosition> result;
  for (int player = 1; player <= g.players; ++player) {
    auto owned = v.positions_of_player(player);
    if (owned.size() != 1)
      throw Error("player " + std::to_string(player) + " controls " +
                  std::to_string(owned.size()) + " positions; need exactly one");
    int i = owned[0];
    if (v.out[i].size() != 2)
      throw Error("position \"" + v.id(i) + "\" has out-degree " +
                  std::to_string(v.out[i].size()) + "; need exactly 2");
    std::string t0 = v.id(v.out[i][0].to), t1 = v.id(v.out[i][1].to);
    bool nt0 = !v.is_terminal(v.out[i][0].to), nt1 = !v.is_terminal(v.out[i][1].to);
    std::string free_target, other;
    if (nt0 != nt1) {
      free_target = nt0 ? t0 : t1;
      other = nt0 ? t1 : t0;
    } else {
      free_target = std::max(t0, t1);
      other = std::min(t0, t1);
    }
    result.push_back({player, v.id(i), free_target, other});
  }
  return result;
}

inline MixedProfile play_once_profile(const GameStructure& g, const std::vector<Rational>& p) {
  auto positions = play_once_positions(g);
  if (p.size() != positions.size()) throw Error("expected one probability per player");
  MixedProfile y;
  for (size_t i = 0; i < positions.size(); ++i) {
    if (p[i] < 0 || p[i] > 1) throw Error("probability outside [0, 1]");
    y.dist[positions[i].position] = {{positions[i].free_target, p[i]},
                                     {positions[i].other_target, 1 - p[i]}};
  }
  return y;
}

inline std::vector<Rational> cycle_probs_of(const GameStructure& g, const MixedProfile& y) {
  std::vector<Rational> p;
  for (const auto& pos : play_once_positions(g)) {
    const auto& dist = y.dist.at(pos.position);
    auto it = dist.find(pos.free_target);
    p.push_back(it == dist.end() ? Rational(0) : it->second);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Stationarity residuals

struct StationarityResiduals {
  std::vector<std::string> starts;             // row labels
  std::vector<std::vector<Rational>> values;   // [start][player-1]
};

/// Central finite differences of the per-start payoffs in each player's free
/// coordinate, computed in exact arithmetic. An interior uniform equilibrium
/// must have every residual equal (up to O(h^2)) to zero.
inline StationarityResiduals stationarity_residuals(const GameStructure& g, const Payoff& u,
                                                    const MixedProfile& y, Realization realization,
                                                    Rational h = Rational(Integer(1), Integer(1) << 20),
                                                    std::size_t budget = kDefaultAprioriBudget) {
  auto positions = play_once_positions(g);
  auto p = cycle_probs_of(g, y);
  for (const auto& pi : p)
    if (!(pi > 0 && pi < 1)) throw Error("boundary point: residuals need a strictly interior profile");

  StationarityResiduals r;
  for (const auto& pos : g.positions)
    if (pos.kind != PositionKind::terminal) r.starts.push_back(pos.id);
  std::sort(r.starts.begin(), r.starts.end());
  r.values.assign(r.starts.size(), std::vector<Rational>(positions.size(), Rational(0)));

  for (size_t i = 0; i < positions.size(); ++i) {
    Rational hi = h;
    while (p[i] - hi <= 0 || p[i] + hi >= 1) hi /= 2;
    auto shifted = [&](const Rational& pi) {
      MixedProfile z = y;
      z.dist[positions[i].position] = {{positions[i].free_target, pi},
                                       {positions[i].other_target, 1 - pi}};
      return z;
    };
    MixedProfile plus = shifted(p[i] + hi), minus = shifted(p[i] - hi);
    for (size_t row = 0; row < r.starts.size(); ++row) {
      Rational fp = mixed_value(g, u, plus, r.starts[row], positions[i].player, realization, budget);
      Rational fm = mixed_value(g, u, minus, r.starts[row], positions[i].player, realization, budget);
      r.values[row][i] = (fp - fm) / (2 * hi);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Grid sweeps

struct SweepEntry {
  std::vector<Rational> point;
  std::optional<DeviationCertificate> cert;  // empty: equilibrium candidate
};

namespace detail {

inline std::vector<std::vector<Rational>> box_grid(int dims, const Rational& step,
                                                   bool include_vertices) {
  std::vector<Rational> interior;
  for (Rational x = step; x < 1; x += step) interior.push_back(x);
  std::vector<std::vector<Rational>> points;
  std::vector<Rational> cur(dims);
  std::function<void(int)> rec = [&](int d) {
    if (d == dims) {
      points.push_back(cur);
      return;
    }
    for (const auto& x : interior) {
      cur[d] = x;
      rec(d + 1);
    }
  };
  rec(0);
  if (include_vertices) {
    for (unsigned mask = 0; mask < (1u << dims); ++mask) {
      std::vector<Rational> vertex(dims);
      for (int d = 0; d < dims; ++d) vertex[d] = Rational((mask >> d) & 1u);
      points.push_back(std::move(vertex));
    }
  }
  return points;
}

}  // namespace detail

/// Certificate search over the probability grid {step, ..., 1-step}^n plus
/// the pure vertices. Initialized games are checked at their initial
/// position, non-initialized ones uniformly over all starts. Entries without
/// a certificate are equilibrium candidates for exact follow-up.
inline std::vector<SweepEntry> grid_sweep_no_une(const GameStructure& g, const Payoff& u,
                                                 Realization realization, const Rational& step,
                                                 std::size_t budget = kDefaultAprioriBudget) {
  if (!(step > 0 && step < 1)) throw Error("step must lie in (0, 1)");
  const int dims = static_cast<int>(play_once_positions(g).size());
  std::vector<SweepEntry> entries;
  for (auto& point : detail::box_grid(dims, step, true)) {
    MixedProfile y = play_once_profile(g, point);
    auto cert = g.initial ? find_mixed_deviation(g, u, y, *g.initial, realization, budget)
                          : find_mixed_une_deviation(g, u, y, realization, budget);
    entries.push_back({std::move(point), std::move(cert)});
  }
  return entries;
}

struct BoundaryCheck {
  bool all_eliminated = true;
  std::vector<SweepEntry> failures;
};

/// Checks that every profile with some coordinate at 0 or 1 admits a strict
/// improvement (the other coordinates ranging over the step grid).
inline BoundaryCheck boundary_profiles_eliminated(const GameStructure& g, const Payoff& u,
                                                  Realization realization, const Rational& step,
                                                  std::size_t budget = kDefaultAprioriBudget) {
  if (!(step > 0 && step < 1)) throw Error("step must lie in (0, 1)");
  const int dims = static_cast<int>(play_once_positions(g).size());
  std::vector<Rational> coords{Rational(0), Rational(1)};
  for (Rational x = step; x < 1; x += step) coords.push_back(x);

  BoundaryCheck check;
  std::vector<Rational> cur(dims);
  std::function<void(int, bool)> rec = [&](int d, bool has_boundary) {
    if (d == dims) {
      if (!has_boundary) return;
      MixedProfile y = play_once_profile(g, cur);
      auto cert = g.initial ? find_mixed_deviation(g, u, y, *g.initial, realization, budget)
                            : find_mixed_une_deviation(g, u, y, realization, budget);
      if (!cert) {
        check.all_eliminated = false;
        check.failures.push_back({cur, std::nullopt});
      }
      return;
    }
    for (const auto& x : coords) {
      cur[d] = x;
      rec(d + 1, has_boundary || x == 0 || x == 1);
    }
  };
  rec(0, false);
  return check;
}

// ---------------------------------------------------------------------------
// Equilibrium transfer between a game and its initializing extension

struct ExtensionTransferEntry {
  PureProfile profile;
  bool une_in_base = false;
  bool ne_in_extension = false;
  bool consistent = true;
};

struct ExtensionTransferReport {
  bool q0_strictly_positive = false;
  std::vector<ExtensionTransferEntry> entries;
  bool all_consistent = true;
};

/// For each profile: a uniform equilibrium of the base game must be an
/// equilibrium of the extension, and with a strictly positive initial
/// distribution the converse holds as well.
inline ExtensionTransferReport check_extension_ne_transfer(const GameStructure& g, const Payoff& u,
                                                           const std::map<std::string, Rational>& q0,
                                                           const std::vector<PureProfile>& profiles) {
  const GameStructure ext = initializing_extension(g, q0);
  ExtensionTransferReport report;
  report.q0_strictly_positive = true;
  for (const auto& p : g.positions) {
    if (p.kind == PositionKind::terminal) continue;
    auto it = q0.find(p.id);
    if (it == q0.end() || !(it->second > 0)) report.q0_strictly_positive = false;
  }
  for (const auto& s : profiles) {
    ExtensionTransferEntry entry;
    entry.profile = s;
    entry.une_in_base = is_pure_une(g, u, s);
    entry.ne_in_extension = is_pure_ne(ext, u, s, *ext.initial);
    entry.consistent = (!entry.une_in_base || entry.ne_in_extension) &&
                       (!(entry.ne_in_extension && report.q0_strictly_positive) || entry.une_in_base);
    report.all_consistent = report.all_consistent && entry.consistent;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace ggame
