#pragma once

#include "ggame/ggame.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>

namespace ggame::cli {

// Exit codes: 0 success, 1 negative verdict, 2 usage or parse error,
// 3 enumeration budget exceeded.
constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kBudget = 3;

namespace detail {

inline std::string decimal_str(const Rational& r) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", to_double(r));
  return buf;
}

inline std::string fragment_str(const std::map<std::string, std::string>& frag) {
  std::string s;
  for (const auto& [pos, target] : frag) {
    if (!s.empty()) s += ", ";
    s += pos + "->" + target;
  }
  return s;
}

inline std::string point_str(const std::vector<Rational>& p) {
  std::string s = "(";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += format_rational(p[i]);
  }
  return s + ")";
}

inline std::string cert_str(const DeviationCertificate& c) {
  return "player " + std::to_string(c.player) + " improves from " + c.start + " via " +
         fragment_str(c.deviation) + " (" + format_rational(c.old_value) + " -> " +
         format_rational(c.new_value) + ")";
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::size_t budget = kDefaultAprioriBudget;          // a priori branch nodes
  std::size_t profile_budget = kDefaultProfileBudget;  // pure-profile enumerations
};

inline GameFile load_game_checked(Context& ctx, const std::string& path, bool& clean) {
  GameFile gf = parse_game(read_file(path));
  auto issues = validate(gf.game);
  clean = issues.empty();
  for (const auto& i : issues) ctx.err << i.code << " " << i.subject << ": " << i.message << "\n";
  return gf;
}

inline Payoff resolve_payoffs(Context& ctx, const GameFile& gf, const std::string& payoff_path) {
  std::optional<Payoff> u = gf.payoffs;
  if (!payoff_path.empty()) u = parse_payoffs(read_file(payoff_path));
  if (!u) throw ParseError("no payoffs in the game file; pass --payoffs");
  auto issues = validate_payoff(gf.game, *u);
  if (!issues.empty()) {
    for (const auto& i : issues) ctx.err << i.code << " " << i.subject << ": " << i.message << "\n";
    throw ParseError("payoffs do not cover the game's players and outcomes");
  }
  return *u;
}

inline MixedProfile resolve_profile(const GameStructure& g, const std::string& profile_path,
                                    const std::string& inline_p) {
  if (!profile_path.empty() && !inline_p.empty())
    throw ParseError("pass either --profile or --p, not both");
  if (!profile_path.empty()) return parse_profile(read_file(profile_path));
  if (!inline_p.empty()) {
    std::vector<Rational> p;
    std::string item;
    std::istringstream in(inline_p);
    while (std::getline(in, item, ',')) p.push_back(parse_rational(item));
    return play_once_profile(g, p);
  }
  throw ParseError("a profile is required; pass --profile FILE or --p p1,p2,...");
}

inline std::vector<std::string> resolve_starts(const GameStructure& g, const std::string& start,
                                               bool all_starts) {
  std::vector<std::string> starts;
  if (all_starts) {
    for (const auto& p : g.positions)
      if (p.kind != PositionKind::terminal) starts.push_back(p.id);
    return starts;
  }
  if (!start.empty()) return {start};
  if (g.initial) return {*g.initial};
  throw ParseError("no start position; pass --start or use an initialized game");
}

// ---------------------------------------------------------------------------

struct LimitArgs {
  std::string path, realization = "markov", profile_path, inline_p, start;
  bool all_starts = false, csv = false;
};

inline int cmd_limit(Context& ctx, const LimitArgs& args) {
  bool clean = false;
  GameFile gf = load_game_checked(ctx, args.path, clean);
  if (!clean) return kNegative;
  Realization realization = args.realization == "apriori" ? Realization::apriori : Realization::markov;
  MixedProfile y = resolve_profile(gf.game, args.profile_path, args.inline_p);
  auto starts = resolve_starts(gf.game, args.start, args.all_starts);

  if (args.csv) ctx.out << "start,outcome,exact,decimal\n";
  for (const auto& v0 : starts) {
    OutcomeDistribution dist = realization == Realization::markov
                                   ? markov_limit(gf.game, y, v0)
                                   : apriori_limit(gf.game, y, v0, ctx.budget);
    if (args.csv) {
      for (const auto& [a, p] : dist.probs)
        ctx.out << v0 << "," << a.key() << "," << format_rational(p) << "," << decimal_str(p)
                << "\n";
    } else {
      ctx.out << "start " << v0 << "\n";
      for (const auto& [a, p] : dist.probs)
        ctx.out << "  " << std::left << std::setw(10) << a.key() << std::setw(12)
                << format_rational(p) << decimal_str(p) << "\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct PureArgs {
  std::string path, payoff_path, mode = "une", start;
  bool cycles = false, csv = false;
};

inline int cmd_pure(Context& ctx, const PureArgs& args) {
  bool clean = false;
  GameFile gf = load_game_checked(ctx, args.path, clean);
  if (!clean) return kNegative;
  Payoff u = resolve_payoffs(ctx, gf, args.payoff_path);
  if (args.mode != "ne" && args.mode != "une") throw ParseError("--mode must be ne or une");
  const bool uniform = args.mode == "une";
  std::string v0;
  if (!uniform) v0 = resolve_starts(gf.game, args.start, false).front();

  auto profiles = enumerate_pure_profiles(gf.game, ctx.profile_budget);
  std::vector<PureProfile> equilibria;
  for (const auto& s : profiles) {
    bool ok = uniform ? is_pure_une(gf.game, u, s) : is_pure_ne(gf.game, u, s, v0);
    if (ok) equilibria.push_back(s);
  }
  const std::string label = uniform ? "UNE" : "NE";

  if (args.csv) {
    ctx.out << "profile,is_" << (uniform ? "une" : "ne") << "\n";
    for (const auto& s : profiles) {
      bool ok = std::find(equilibria.begin(), equilibria.end(), s) != equilibria.end();
      ctx.out << "\"" << fragment_str(s.choice) << "\"," << (ok ? "yes" : "no") << "\n";
    }
  } else if (equilibria.empty()) {
    ctx.out << "no " << label << "\n";
  } else {
    for (const auto& s : equilibria) ctx.out << label << ": " << fragment_str(s.choice) << "\n";
  }

  if (args.cycles) {
    auto graph = improvement_graph(gf.game, u,
                                   uniform ? ImprovementMode::uniform : ImprovementMode::fixed_start,
                                   v0, ctx.profile_budget);
    auto cycles = find_improvement_cycles(graph);
    for (const auto& cycle : cycles) {
      ctx.out << "improvement cycle of length " << cycle.size() << ":";
      for (int node : cycle) ctx.out << " [" << fragment_str(graph.profiles[node].choice) << "]";
      ctx.out << "\n";
    }
    if (cycles.empty()) ctx.out << "no improvement cycles\n";
  }
  return equilibria.empty() ? kNegative : kOk;
}

// ---------------------------------------------------------------------------

struct MixedArgs {
  std::string path, payoff_path, realization = "markov", profile_path, inline_p, start, sweep_step;
  bool check = false, closed_form = false, csv = false;
};

inline bool is_canonical_g3(const GameStructure& g) {
  auto normalize = [](GameStructure s) {
    std::sort(s.positions.begin(), s.positions.end(),
              [](const Position& a, const Position& b) { return a.id < b.id; });
    std::sort(s.moves.begin(), s.moves.end(), [](const Move& a, const Move& b) {
      return std::tie(a.from, a.to) < std::tie(b.from, b.to);
    });
    s.initial.reset();
    return s;
  };
  return normalize(g) == normalize(build_g3());
}

inline int cmd_mixed(Context& ctx, const MixedArgs& args) {
  bool clean = false;
  GameFile gf = load_game_checked(ctx, args.path, clean);
  if (!clean) return kNegative;
  Payoff u = resolve_payoffs(ctx, gf, args.payoff_path);
  Realization realization = args.realization == "apriori" ? Realization::apriori : Realization::markov;
  const int modes = int(args.check) + int(args.closed_form) + int(!args.sweep_step.empty());
  if (modes != 1) throw ParseError("pass exactly one of --check, --closed-form, --sweep STEP");

  if (args.closed_form) {
    if (!is_canonical_g3(gf.game))
      throw ParseError("--closed-form needs the canonical 3-cycle game (v1..v3, a1..a3)");
    Mu m = mu_values(u);
    ctx.out << "mu = (" << format_rational(m.mu1) << ", " << format_rational(m.mu2) << ", "
            << format_rational(m.mu3) << ")\n";
    ctx.out << "mu product = " << format_rational(m.product()) << "\n";
    auto y = g3_closed_form_ne(u);
    if (!y) {
      ctx.out << "closed-form NE: none (mu product >= 1)\n";
      return kNegative;
    }
    ctx.out << "closed-form NE: p = " << point_str(cycle_probs_of(gf.game, *y)) << "\n";
    bool une = is_mixed_une(gf.game, u, *y, Realization::markov, ctx.budget);
    ctx.out << "UNE (markov): " << (une ? "yes" : "no") << "\n";
    return kOk;
  }

  if (args.check) {
    MixedProfile y = resolve_profile(gf.game, args.profile_path, args.inline_p);
    std::optional<DeviationCertificate> cert;
    std::string what;
    if (!args.start.empty() || gf.game.initial) {
      std::string v0 = resolve_starts(gf.game, args.start, false).front();
      what = "NE at " + v0;
      cert = find_mixed_deviation(gf.game, u, y, v0, realization, ctx.budget);
    } else {
      what = "UNE";
      cert = find_mixed_une_deviation(gf.game, u, y, realization, ctx.budget);
    }
    ctx.out << "verdict (" << args.realization << "): " << what << ": " << (cert ? "no" : "yes")
            << "\n";
    if (cert) {
      ctx.out << cert_str(*cert) << "\n";
      return kNegative;
    }
    return kOk;
  }

  const Rational step = parse_rational(args.sweep_step);
  auto entries = grid_sweep_no_une(gf.game, u, realization, step, ctx.budget);
  std::size_t candidates = 0;
  if (args.csv) ctx.out << "point,certificate\n";
  for (const auto& e : entries) {
    std::string cert = e.cert ? cert_str(*e.cert) : "CANDIDATE";
    if (!e.cert) ++candidates;
    if (args.csv)
      ctx.out << "\"" << point_str(e.point) << "\",\"" << cert << "\"\n";
    else
      ctx.out << point_str(e.point) << ": " << cert << "\n";
  }
  ctx.out << entries.size() << " points, " << candidates << " equilibrium candidates\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string path, realization = "markov", profile_path, inline_p, start;
  std::uint64_t n = 10000, seed = 1;
  bool csv = false;
};

inline int cmd_simulate(Context& ctx, const SimulateArgs& args) {
  bool clean = false;
  GameFile gf = load_game_checked(ctx, args.path, clean);
  if (!clean) return kNegative;
  Realization realization = args.realization == "apriori" ? Realization::apriori : Realization::markov;
  MixedProfile y = resolve_profile(gf.game, args.profile_path, args.inline_p);
  std::string v0 = resolve_starts(gf.game, args.start, false).front();

  OutcomeDistribution exact = realization == Realization::markov
                                  ? markov_limit(gf.game, y, v0)
                                  : apriori_limit(gf.game, y, v0, ctx.budget);

  std::map<std::string, std::uint64_t> counts;
  std::uint64_t capped = 0;
  std::mt19937_64 seeder(args.seed);
  for (std::uint64_t i = 0; i < args.n; ++i) {
    SimOutcome s = realization == Realization::markov
                       ? simulate_markov(gf.game, y, v0, seeder())
                       : simulate_apriori(gf.game, y, v0, seeder());
    if (s.kind == SimOutcome::Kind::step_cap) ++capped;
    else ++counts[s.kind == SimOutcome::Kind::cycle ? "c" : s.terminal_id];
  }

  double max_dev = 0, chi2 = 0;
  if (args.csv) ctx.out << "outcome,count,empirical,exact,decimal,abs_deviation\n";
  for (const auto& [a, p] : exact.probs) {
    double expected = to_double(p);
    double empirical = args.n ? double(counts[a.key()]) / double(args.n) : 0;
    double dev = std::abs(empirical - expected);
    max_dev = std::max(max_dev, dev);
    if (expected > 0) {
      double diff = double(counts[a.key()]) - double(args.n) * expected;
      chi2 += diff * diff / (double(args.n) * expected);
    }
    if (args.csv)
      ctx.out << a.key() << "," << counts[a.key()] << "," << empirical << ","
              << format_rational(p) << "," << decimal_str(p) << "," << dev << "\n";
    else
      ctx.out << "  " << std::left << std::setw(10) << a.key() << std::setw(12) << empirical
              << std::setw(12) << format_rational(p) << std::setw(14) << decimal_str(p) << dev
              << "\n";
  }
  if (capped) ctx.out << "step-cap samples: " << capped << "\n";
  ctx.out << "max abs deviation: " << max_dev << "\n";
  ctx.out << "chi-square: " << chi2 << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string family = "gn", payoff = "sample", out_base;
  int n = 0;
  std::uint64_t seed = 1;
  bool verify = false;
};

inline int cmd_gen(Context& ctx, const GenArgs& args) {
  if (args.family != "gn") throw ParseError("unknown family \"" + args.family + "\"");
  if (args.n < 2) throw ParseError("--n must be at least 2");
  GameStructure g = build_gn(args.n);
  Payoff u;
  if (args.payoff == "sample") {
    u = args.n >= 3 ? sample_un(args.n, args.seed) : canonical_u2();
  } else {
    std::string path = args.payoff;
    if (path.rfind("file:", 0) == 0) path = path.substr(5);
    u = parse_payoffs(read_file(path));
  }
  auto issues = validate_payoff(g, u);
  if (!issues.empty()) {
    for (const auto& i : issues) ctx.err << i.code << " " << i.subject << ": " << i.message << "\n";
    throw ParseError("payoffs do not cover the generated game");
  }

  write_file(args.out_base + ".game", emit_game(g, &u));
  write_file(args.out_base + ".payoffs", emit_payoffs(u));
  ctx.out << "wrote " << args.out_base << ".game\n";
  ctx.out << "wrote " << args.out_base << ".payoffs\n";

  if (!args.verify) return kOk;

  auto render = [&](const PureProfile& s) {
    std::string r = "(";
    for (int i = 1; i <= args.n; ++i) {
      if (i > 1) r += ",";
      r += s.choice.at(gn_position(i)) == gn_terminal(i) ? "t" : "f";
    }
    return r + ")";
  };

  if (args.n >= 3 && check_un_conditions(args.n, u).all()) {
    auto certs = certify_une_free(args.n, u, ctx.profile_budget);
    for (const auto& c : certs) {
      const char* tag = c.profile_class == ProfileClass::all_follow       ? "all-follow"
                        : c.profile_class == ProfileClass::one_terminates ? "one-terminates"
                                                                          : "many-terminate";
      ctx.out << "profile " << render(c.profile) << ": " << cert_str(c.improvement) << " [" << tag
              << "]\n";
    }
    ctx.out << certs.size() << "/" << certs.size() << " profiles improved; UNE-free confirmed\n";
    return kOk;
  }

  // Outside the family (or n = 2): plain brute force over all profiles.
  auto profiles = enumerate_pure_profiles(g, ctx.profile_budget);
  std::size_t improved = 0;
  for (const auto& s : profiles) {
    auto cert = find_pure_une_deviation(g, u, s);
    if (cert) {
      ++improved;
      ctx.out << "profile " << render(s) << ": " << cert_str(*cert) << "\n";
    } else {
      ctx.out << "profile " << render(s) << ": UNE (no improvement)\n";
    }
  }
  ctx.out << improved << "/" << profiles.size() << " profiles improved; "
          << (improved == profiles.size() ? "UNE-free confirmed" : "UNE found") << "\n";
  return improved == profiles.size() ? kOk : kNegative;
}

}  // namespace detail

/// Entry point shared by the binary and the tests.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  detail::Context ctx{out, err};
  if (const char* env = std::getenv("GG_BUDGET")) {
    try {
      ctx.budget = std::stoull(env);
      ctx.profile_budget = ctx.budget;
    } catch (const std::exception&) {
      err << "ignoring malformed GG_BUDGET\n";
    }
  }

  CLI::App app{"finite graphical games: exact outcome distributions and equilibria"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* c_validate = app.add_subcommand("validate", "check a game file against the format rules");
  c_validate->add_option("path", validate_path, "game file")->required();

  detail::LimitArgs limit;
  auto* c_limit = app.add_subcommand("limit", "exact outcome distribution of a mixed profile");
  c_limit->add_option("path", limit.path, "game file")->required();
  c_limit->add_option("--realization", limit.realization, "markov or apriori")
      ->check(CLI::IsMember({"markov", "apriori"}));
  c_limit->add_option("--profile", limit.profile_path, "profile file");
  c_limit->add_option("--p", limit.inline_p, "inline probabilities p1,p2,... (play-once games)");
  c_limit->add_option("--start", limit.start, "start position");
  c_limit->add_flag("--all-starts", limit.all_starts, "one table per non-terminal start");
  c_limit->add_flag("--csv", limit.csv, "CSV output");

  detail::PureArgs pure;
  auto* c_pure = app.add_subcommand("pure", "enumerate pure equilibria");
  c_pure->add_option("path", pure.path, "game file")->required();
  c_pure->add_option("--payoffs", pure.payoff_path, "payoff file (overrides the game file)");
  c_pure->add_option("--mode", pure.mode, "ne or une")->check(CLI::IsMember({"ne", "une"}));
  c_pure->add_option("--start", pure.start, "start position (ne mode)");
  c_pure->add_flag("--cycles", pure.cycles, "report improvement cycles");
  c_pure->add_flag("--csv", pure.csv, "CSV output");

  detail::MixedArgs mixed;
  auto* c_mixed = app.add_subcommand("mixed", "mixed equilibrium checks and sweeps");
  c_mixed->add_option("path", mixed.path, "game file")->required();
  c_mixed->add_option("--payoffs", mixed.payoff_path, "payoff file (overrides the game file)");
  c_mixed->add_option("--realization", mixed.realization, "markov or apriori")
      ->check(CLI::IsMember({"markov", "apriori"}));
  c_mixed->add_flag("--check", mixed.check, "verify the supplied profile");
  c_mixed->add_flag("--closed-form", mixed.closed_form, "closed-form NE of the 3-cycle game");
  c_mixed->add_option("--sweep", mixed.sweep_step, "grid sweep with the given step (rational)");
  c_mixed->add_option("--profile", mixed.profile_path, "profile file (for --check)");
  c_mixed->add_option("--p", mixed.inline_p, "inline probabilities (for --check)");
  c_mixed->add_option("--start", mixed.start, "check NE at this start (default: uniform)");
  c_mixed->add_flag("--csv", mixed.csv, "CSV output");

  detail::SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "sample plays and compare with the exact limit");
  c_sim->add_option("path", sim.path, "game file")->required();
  c_sim->add_option("--realization", sim.realization, "markov or apriori")
      ->check(CLI::IsMember({"markov", "apriori"}));
  c_sim->add_option("--profile", sim.profile_path, "profile file");
  c_sim->add_option("--p", sim.inline_p, "inline probabilities");
  c_sim->add_option("--start", sim.start, "start position");
  c_sim->add_option("--n", sim.n, "number of samples");
  c_sim->add_option("--seed", sim.seed, "random seed");
  c_sim->add_flag("--csv", sim.csv, "CSV output");

  detail::GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "generate a cycle-family game and payoffs");
  c_gen->add_option("--family", gen.family, "family name (gn)");
  c_gen->add_option("--n", gen.n, "number of players")->required();
  c_gen->add_option("--payoff", gen.payoff, "\"sample\" or a payoff file path");
  c_gen->add_option("--seed", gen.seed, "sampling seed");
  c_gen->add_option("--out", gen.out_base, "output base path")->required();
  c_gen->add_flag("--verify", gen.verify, "certify UNE-freeness of every pure profile");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*c_validate) {
      bool clean = false;
      GameFile gf = detail::load_game_checked(ctx, validate_path, clean);
      if (clean && gf.payoffs) {
        auto issues = validate_payoff(gf.game, *gf.payoffs);
        for (const auto& i : issues)
          ctx.err << i.code << " " << i.subject << ": " << i.message << "\n";
        clean = issues.empty();
      }
      out << (clean ? "ok" : "invalid") << "\n";
      return clean ? kOk : kNegative;
    }
    if (*c_limit) return detail::cmd_limit(ctx, limit);
    if (*c_pure) return detail::cmd_pure(ctx, pure);
    if (*c_mixed) return detail::cmd_mixed(ctx, mixed);
    if (*c_sim) return detail::cmd_simulate(ctx, sim);
    if (*c_gen) return detail::cmd_gen(ctx, gen);
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace ggame::cli
