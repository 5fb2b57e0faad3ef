#pragma once

#include "ggame/game.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ggame {

// Game file format: one JSON document.
//
//   {
//     "players": 2,
//     "positions": [{"id": "v1", "kind": "player", "player": 1}, ...],
//     "moves": [{"from": "v0", "to": "v1", "prob": "1/2"}, ...],
//     "payoffs": {"1": {"a1": "2", "c": "3/1"}, ...},        (optional)
//     "initial": "v0"                                        (optional)
//   }
//
// "player" is required exactly when kind is "player"; "prob" belongs on
// moves out of chance positions (the validator reports misuse). Rationals
// travel as "numerator/denominator" strings to stay exact. "c" is the
// reserved payoff key for the cycle outcome.

struct GameFile {
  GameStructure game;
  std::optional<Payoff> payoffs;

  bool operator==(const GameFile&) const = default;
};

namespace detail {

using Json = nlohmann::ordered_json;

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> known,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ParseError("unknown key \"" + key + "\" in " + where);
  }
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

inline Payoff payoff_from_json(const Json& node) {
  if (!node.is_object()) throw ParseError("\"payoffs\" must map player indices to outcome maps");
  Payoff u;
  for (const auto& [player_key, row] : node.items()) {
    int player = 0;
    try {
      player = std::stoi(player_key);
    } catch (const std::exception&) {
      throw ParseError("payoff key \"" + player_key + "\" is not a player index");
    }
    if (!row.is_object()) throw ParseError("payoff row for player " + player_key + " must be a map");
    for (const auto& [outcome_key, value] : row.items()) {
      Outcome a = outcome_key == "c" ? Outcome::cycle() : Outcome::terminal(outcome_key);
      u.values[player][a] = parse_rational(value.get<std::string>());
    }
  }
  return u;
}

inline Json payoff_to_json(const Payoff& u) {
  Json node = Json::object();
  for (const auto& [player, row] : u.values) {
    Json jrow = Json::object();
    for (const auto& [outcome, value] : row) jrow[outcome.key()] = format_rational(value);
    node[std::to_string(player)] = std::move(jrow);
  }
  return node;
}

}  // namespace detail

inline GameFile parse_game(const std::string& text) {
  using detail::Json;
  Json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("game document must be a JSON object");
  detail::reject_unknown_keys(doc, {"players", "positions", "moves", "payoffs", "initial"},
                              "game document");
  if (!doc.contains("players") || !doc["players"].is_number_integer())
    throw ParseError("\"players\" must be an integer");
  if (!doc.contains("positions") || !doc["positions"].is_array())
    throw ParseError("\"positions\" must be an array");
  if (!doc.contains("moves") || !doc["moves"].is_array())
    throw ParseError("\"moves\" must be an array");

  GameFile file;
  file.game.players = doc["players"].get<int>();
  for (const auto& node : doc["positions"]) {
    detail::reject_unknown_keys(node, {"id", "kind", "player"}, "position");
    if (!node.contains("id") || !node.contains("kind"))
      throw ParseError("position needs \"id\" and \"kind\"");
    Position p;
    p.id = node["id"].get<std::string>();
    const std::string kind = node["kind"].get<std::string>();
    if (kind == "player") {
      p.kind = PositionKind::player;
      if (!node.contains("player"))
        throw ParseError("position \"" + p.id + "\" of kind player needs \"player\"");
      p.player = node["player"].get<int>();
    } else if (kind == "chance" || kind == "terminal") {
      p.kind = kind == "chance" ? PositionKind::chance : PositionKind::terminal;
      if (node.contains("player"))
        throw ParseError("position \"" + p.id + "\" of kind " + kind + " must not name a player");
    } else {
      throw ParseError("position \"" + p.id + "\" has unknown kind \"" + kind + "\"");
    }
    file.game.positions.push_back(std::move(p));
  }
  for (const auto& node : doc["moves"]) {
    detail::reject_unknown_keys(node, {"from", "to", "prob"}, "move");
    if (!node.contains("from") || !node.contains("to"))
      throw ParseError("move needs \"from\" and \"to\"");
    Move m;
    m.from = node["from"].get<std::string>();
    m.to = node["to"].get<std::string>();
    if (node.contains("prob")) m.prob = parse_rational(node["prob"].get<std::string>());
    file.game.moves.push_back(std::move(m));
  }
  if (doc.contains("payoffs")) file.payoffs = detail::payoff_from_json(doc["payoffs"]);
  if (doc.contains("initial")) file.game.initial = doc["initial"].get<std::string>();
  return file;
}

inline std::string emit_game(const GameStructure& g, const Payoff* payoffs = nullptr) {
  using detail::Json;
  Json doc = Json::object();
  doc["players"] = g.players;
  doc["positions"] = Json::array();
  for (const auto& p : g.positions) {
    Json node = Json::object();
    node["id"] = p.id;
    switch (p.kind) {
      case PositionKind::player:
        node["kind"] = "player";
        node["player"] = p.player;
        break;
      case PositionKind::chance:
        node["kind"] = "chance";
        break;
      case PositionKind::terminal:
        node["kind"] = "terminal";
        break;
    }
    doc["positions"].push_back(std::move(node));
  }
  doc["moves"] = Json::array();
  for (const auto& m : g.moves) {
    Json node = Json::object();
    node["from"] = m.from;
    node["to"] = m.to;
    if (m.prob) node["prob"] = format_rational(*m.prob);
    doc["moves"].push_back(std::move(node));
  }
  if (payoffs) doc["payoffs"] = detail::payoff_to_json(*payoffs);
  if (g.initial) doc["initial"] = *g.initial;
  return doc.dump(2) + "\n";
}

// Profile file: {"v1": {"v2": "1/2", "a1": "1/2"}, ...}

inline MixedProfile parse_profile(const std::string& text) {
  using detail::Json;
  Json doc = detail::parse_json(text);
  if (!doc.is_object()) throw ParseError("profile document must be a JSON object");
  MixedProfile y;
  for (const auto& [position, row] : doc.items()) {
    if (!row.is_object())
      throw ParseError("profile entry for \"" + position + "\" must map targets to rationals");
    for (const auto& [target, value] : row.items())
      y.dist[position][target] = parse_rational(value.get<std::string>());
  }
  return y;
}

inline std::string emit_profile(const MixedProfile& y) {
  using detail::Json;
  Json doc = Json::object();
  for (const auto& [position, row] : y.dist) {
    Json jrow = Json::object();
    for (const auto& [target, p] : row) jrow[target] = format_rational(p);
    doc[position] = std::move(jrow);
  }
  return doc.dump(2) + "\n";
}

// Payoff file: either the bare payoff map or {"payoffs": ...}.

inline Payoff parse_payoffs(const std::string& text) {
  using detail::Json;
  Json doc = detail::parse_json(text);
  if (doc.is_object() && doc.contains("payoffs")) return detail::payoff_from_json(doc["payoffs"]);
  return detail::payoff_from_json(doc);
}

inline std::string emit_payoffs(const Payoff& u) {
  return detail::payoff_to_json(u).dump(2) + "\n";
}

/// Coverage check of a payoff against a structure: a value for every player
/// and every outcome, no unknown players or outcomes.
inline std::vector<ValidationIssue> validate_payoff(const GameStructure& g, const Payoff& u) {
  std::vector<ValidationIssue> issues;
  auto outcomes = outcome_set(g);
  for (int player = 1; player <= g.players; ++player) {
    auto row = u.values.find(player);
    if (row == u.values.end()) {
      issues.push_back({"payoff-player", std::to_string(player), "no payoff row for player"});
      continue;
    }
    for (const auto& a : outcomes)
      if (!row->second.count(a))
        issues.push_back({"payoff-outcome", a.key(),
                          "player " + std::to_string(player) + " has no value for outcome"});
  }
  for (const auto& [player, row] : u.values) {
    if (player < 1 || player > g.players) {
      issues.push_back({"payoff-player", std::to_string(player), "payoff row for unknown player"});
      continue;
    }
    for (const auto& [a, value] : row)
      if (!a.is_cycle() && std::find(outcomes.begin(), outcomes.end(), a) == outcomes.end())
        issues.push_back({"payoff-outcome", a.key(), "payoff value for unknown terminal"});
  }
  return issues;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write \"" + path + "\"");
  out << content;
}

}  // namespace ggame
