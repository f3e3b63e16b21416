#pragma once

#include <map>
#include <vector>

#include "rmlkit/formula.hpp"

namespace rmlkit {

// Disjunction of conjuncts; each conjunct is a propositional literal set plus
// at most one cover per agent, whose members are again disjunctive. The empty
// disjunction is bottom, a conjunct with no literals and no covers is top.
struct DisjunctiveForm {
  struct Conjunct {
    std::vector<Formula> literals;  // canonical order, no duplicates
    std::map<Agent, std::vector<DisjunctiveForm>> covers;
  };
  std::vector<Conjunct> disjuncts;

  Formula to_formula() const;
  bool is_false() const { return disjuncts.empty(); }
};

// Equivalence-preserving cleanup: constant folding, double negation,
// idempotence and absorption on /\ and \/, box/diamond constants, and the
// cover rules (a member equal to bottom makes the whole cover bottom; the
// empty cover is kept, it means "no successors").
Formula simplify(const Formula& f);

// Rewrite every box as (empty cover or singleton cover) and every diamond as
// a {phi, top} cover. Input must be refinement-free.
Formula box_diamond_to_cover(const Formula& f);

// Expand every cover through its definition: box over the member disjunction
// plus a diamond per member.
Formula cover_to_box_diamond(const Formula& f);

// Conjunction of two covers for the same agent as a single cover:
// nabla Phi & nabla Psi == nabla ({phi & \/Psi} U {\/Phi & psi}).
// Both arguments must be Cover nodes for the same agent. The result is the
// raw merge; callers simplify.
Formula merge_covers(const Formula& c1, const Formula& c2);

// Disjunctive normal form of a refinement-free formula.
DisjunctiveForm to_disjunctive(const Formula& f);

// Grammar check for the disjunctive shape.
bool is_disjunctive(const Formula& f);

}  // namespace rmlkit
