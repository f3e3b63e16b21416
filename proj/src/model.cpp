#include "rmlkit/model.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rmlkit/errors.hpp"

namespace rmlkit {

using nlohmann::json;

std::set<State> Model::successors(const Agent& a, const State& s) const {
  std::set<State> out;
  auto it = relations.find(a);
  if (it == relations.end()) return out;
  for (const auto& [x, y] : it->second)
    if (x == s) out.insert(y);
  return out;
}

bool Model::has_prop(const Prop& p, const State& s) const {
  auto it = valuation.find(p);
  return it != valuation.end() && it->second.count(s) > 0;
}

std::set<Agent> Model::agents() const {
  std::set<Agent> out;
  for (const auto& [a, _] : relations) out.insert(a);
  return out;
}

std::set<Prop> Model::props() const {
  std::set<Prop> out;
  for (const auto& [p, _] : valuation) out.insert(p);
  return out;
}

void validate(const Model& m) {
  if (m.states.empty()) throw ModelError("no states");
  for (const auto& [a, pairs] : m.relations) {
    if (a.name.empty()) throw ModelError("empty agent name");
    for (const auto& [s, t] : pairs) {
      if (!m.states.count(s))
        throw ModelError("relation for agent '" + a.name + "' uses undeclared state '" + s + "'");
      if (!m.states.count(t))
        throw ModelError("relation for agent '" + a.name + "' uses undeclared state '" + t + "'");
    }
  }
  for (const auto& [p, ext] : m.valuation) {
    if (p.name.empty()) throw ModelError("empty proposition name");
    for (const auto& s : ext)
      if (!m.states.count(s))
        throw ModelError("valuation of '" + p.name + "' uses undeclared state '" + s + "'");
  }
}

void validate(const PointedModel& pm) {
  validate(pm.model);
  if (!pm.model.states.count(pm.point))
    throw ModelError("point '" + pm.point + "' is not a declared state");
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw ModelError("unknown key '" + it.key() + "'");
}

std::set<State> state_array(const json& j, const std::string& what) {
  if (!j.is_array()) throw ModelError(what + " must be an array of state names");
  std::set<State> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw ModelError(what + " must contain strings");
    out.insert(e.get<std::string>());
  }
  return out;
}

}  // namespace

PointedModel pointed_model_from_json(const json& j) {
  if (!j.is_object()) throw ModelError("model must be a JSON object");
  reject_unknown_keys(j, {"states", "point", "valuation", "relations"});
  if (!j.contains("states")) throw ModelError("missing key 'states'");
  if (!j.contains("point")) throw ModelError("missing key 'point'");

  PointedModel pm;
  pm.model.states = state_array(j.at("states"), "'states'");
  if (!j.at("point").is_string()) throw ModelError("'point' must be a string");
  pm.point = j.at("point").get<std::string>();

  if (j.contains("valuation")) {
    const json& v = j.at("valuation");
    if (!v.is_object()) throw ModelError("'valuation' must be an object");
    for (auto it = v.begin(); it != v.end(); ++it)
      pm.model.valuation[Prop{it.key()}] = state_array(it.value(), "valuation of '" + it.key() + "'");
  }
  if (j.contains("relations")) {
    const json& r = j.at("relations");
    if (!r.is_object()) throw ModelError("'relations' must be an object");
    for (auto it = r.begin(); it != r.end(); ++it) {
      if (!it.value().is_array()) throw ModelError("relation '" + it.key() + "' must be an array");
      std::set<StatePair>& pairs = pm.model.relations[Agent{it.key()}];
      for (const auto& e : it.value()) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
          throw ModelError("relation '" + it.key() + "' must contain [from, to] pairs");
        pairs.emplace(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
  }
  validate(pm);
  return pm;
}

json pointed_model_to_json(const PointedModel& pm) {
  json j;
  j["states"] = json::array();
  for (const auto& s : pm.model.states) j["states"].push_back(s);
  j["point"] = pm.point;
  j["valuation"] = json::object();
  for (const auto& [p, ext] : pm.model.valuation) {
    json arr = json::array();
    for (const auto& s : ext) arr.push_back(s);
    j["valuation"][p.name] = std::move(arr);
  }
  j["relations"] = json::object();
  for (const auto& [a, pairs] : pm.model.relations) {
    json arr = json::array();
    for (const auto& [s, t] : pairs) arr.push_back(json::array({s, t}));
    j["relations"][a.name] = std::move(arr);
  }
  return j;
}

PointedModel load_pointed_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ModelError("invalid JSON in '" + path + "': " + e.what());
  }
  return pointed_model_from_json(j);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const PointedModel& pm) {
  std::ostringstream out;
  out << "digraph model {\n  rankdir=LR;\n";
  for (const auto& s : pm.model.states) {
    std::string label = s;
    std::string truep;
    for (const auto& [p, ext] : pm.model.valuation)
      if (ext.count(s)) truep += (truep.empty() ? "" : ",") + p.name;
    if (!truep.empty()) label += "\\n" + truep;
    out << "  \"" << dot_escape(s) << "\" [label=\"" << dot_escape(label) << "\""
        << (s == pm.point ? ", peripheries=2" : "") << "];\n";
  }
  // one edge per state pair, labelled with every agent that has it
  std::map<StatePair, std::string> edges;
  for (const auto& [a, pairs] : pm.model.relations)
    for (const auto& pr : pairs) {
      std::string& lbl = edges[pr];
      lbl += (lbl.empty() ? "" : ",") + a.name;
    }
  for (const auto& [pr, lbl] : edges)
    out << "  \"" << dot_escape(pr.first) << "\" -> \"" << dot_escape(pr.second)
        << "\" [label=\"" << dot_escape(lbl) << "\"];\n";
  out << "}\n";
  return out.str();
}

PointedModel reachable_part(const PointedModel& pm) {
  std::set<State> seen{pm.point};
  std::vector<State> frontier{pm.point};
  while (!frontier.empty()) {
    State s = frontier.back();
    frontier.pop_back();
    for (const auto& [a, pairs] : pm.model.relations)
      for (const auto& [x, y] : pairs)
        if (x == s && seen.insert(y).second) frontier.push_back(y);
  }
  PointedModel out;
  out.point = pm.point;
  out.model.states = seen;
  for (const auto& [a, pairs] : pm.model.relations) {
    std::set<StatePair> kept;
    for (const auto& pr : pairs)
      if (seen.count(pr.first)) kept.insert(pr);
    out.model.relations[a] = std::move(kept);
  }
  for (const auto& [p, ext] : pm.model.valuation) {
    std::set<State> kept;
    for (const auto& s : ext)
      if (seen.count(s)) kept.insert(s);
    out.model.valuation[p] = std::move(kept);
  }
  return out;
}

}  // namespace rmlkit
