#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json_fwd.hpp>

#include "rmlkit/formula.hpp"

namespace rmlkit {

using State = std::string;
using StatePair = std::pair<State, State>;

// Finite Kripke model. Agents and props are exactly the map keys; every
// relation endpoint and valuation member must be a declared state.
struct Model {
  std::set<State> states;
  std::map<Agent, std::set<StatePair>> relations;
  std::map<Prop, std::set<State>> valuation;

  bool operator==(const Model&) const = default;

  std::set<State> successors(const Agent& a, const State& s) const;
  bool has_prop(const Prop& p, const State& s) const;
  std::set<Agent> agents() const;
  std::set<Prop> props() const;
};

struct PointedModel {
  Model model;
  State point;

  bool operator==(const PointedModel&) const = default;
};

// A set of state pairs between two models (bisimulation or refinement
// witness).
struct StateRelation {
  Model left;
  Model right;
  std::set<StatePair> pairs;
};

struct RefinementCheck {
  bool holds = false;
  std::optional<StateRelation> witness;
  std::optional<Formula> distinguisher;
};

// Throws ModelError naming the first violated invariant.
void validate(const Model& m);
void validate(const PointedModel& pm);

// JSON form: {"states": [...], "point": "s", "valuation": {"p": [...]},
// "relations": {"a": [["s","t"], ...]}}. Unknown keys are rejected.
PointedModel pointed_model_from_json(const nlohmann::json& j);
nlohmann::json pointed_model_to_json(const PointedModel& pm);
PointedModel load_pointed_model(const std::string& path);

std::string to_dot(const PointedModel& pm);

// Restrict to the states reachable from the point (any agent).
PointedModel reachable_part(const PointedModel& pm);

}  // namespace rmlkit
