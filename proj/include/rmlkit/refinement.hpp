#pragma once

#include <optional>
#include <set>

#include "rmlkit/model.hpp"

namespace rmlkit {

// Greatest-fixpoint bisimulation test linking the two points. With `except`,
// atom agreement is not required for that variable (restricted bisimulation).
// On failure the distinguisher holds at nt and fails at ms.
RefinementCheck check_bisimulation(const PointedModel& ms, const PointedModel& nt,
                                   const std::optional<Prop>& except = std::nullopt);

// Does ms B-refine to nt (ms >=_B nt)? Clauses: atoms, back for every agent,
// forth for agents outside B. For singleton B the failure distinguisher is an
// a-positive formula true at nt and false at ms.
RefinementCheck check_refinement(const PointedModel& ms, const PointedModel& nt,
                                 const std::set<Agent>& B);

// Clause check for an explicitly given relation (atoms, back-all, forth
// outside B, both points linked when provided).
bool is_refinement_relation(const StateRelation& rel, const std::set<Agent>& B,
                            const std::optional<Prop>& except = std::nullopt);
bool is_bisimulation_relation(const StateRelation& rel,
                              const std::optional<Prop>& except = std::nullopt);

// Relational composition; requires r1.right == r2.left.
StateRelation compose_refinements(const StateRelation& r1, const StateRelation& r2);

// Quotient by the greatest auto-bisimulation. Each class is named after its
// least member.
PointedModel contract(const PointedModel& pm);

// Modal formula true at s and false at t; error if s and t are bisimilar.
Formula distinguishing_formula(const Model& m, const State& s, const State& t);

}  // namespace rmlkit
