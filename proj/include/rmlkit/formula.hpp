#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace rmlkit {

struct Agent {
  std::string name;
  auto operator<=>(const Agent&) const = default;
};

struct Prop {
  std::string name;
  auto operator<=>(const Prop&) const = default;
};

// Immutable formula of the full language: modal operators, the cover
// operator, refinement quantifiers (A_a / E_a) and bisimulation quantifiers
// (BA_p / BE_p). Values are cheap to copy and share structure.
class Formula {
 public:
  enum class Kind {
    Top,
    Bottom,
    Prop,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Box,
    Diamond,
    Cover,
    AllRef,
    SomeRef,
    BisimAll,
    BisimSome,
  };

  static Formula top();
  static Formula bottom();
  static Formula prop(Prop p);
  static Formula prop(std::string name) { return prop(Prop{std::move(name)}); }
  static Formula negation(Formula f);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);
  static Formula box(Agent a, Formula f);
  static Formula diamond(Agent a, Formula f);
  // Members are deduplicated and stored in canonical (printed) order.
  static Formula cover(Agent a, std::vector<Formula> members);
  static Formula all_ref(Agent a, Formula f);
  static Formula some_ref(Agent a, Formula f);
  static Formula bisim_all(Prop p, Formula f);
  static Formula bisim_some(Prop p, Formula f);

  // Empty conjunction is top, empty disjunction is bottom.
  static Formula big_and(const std::vector<Formula>& fs);
  static Formula big_or(const std::vector<Formula>& fs);

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }

  const Prop& prop_name() const;            // Prop, BisimAll, BisimSome
  const Agent& agent() const;               // Box, Diamond, Cover, AllRef, SomeRef
  const Formula& child() const;             // unary operators
  const Formula& left() const;              // binary operators
  const Formula& right() const;             // binary operators
  const std::vector<Formula>& members() const;  // Cover

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }
  // Total order on structure; used for canonical sets of formulas.
  bool operator<(const Formula& other) const { return compare(other) < 0; }
  int compare(const Formula& other) const;

  std::size_t hash() const { return node_->hash; }
  std::string str() const;

  long node_count() const { return node_->nodes; }
  int modal_depth() const { return node_->depth; }
  int quantifier_count() const { return node_->quants; }
  bool refinement_free() const { return node_->quants == 0; }

  std::set<Prop> props() const;        // every propositional name, bound or free
  std::set<Prop> free_props() const;   // minus bisimulation-quantifier bound occurrences
  std::set<Agent> agents() const;

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend struct FormulaHash;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

// Deterministic fresh name outside `avoid`: "_v0", "_v1", ... first unused.
Prop fresh_prop(const std::set<Prop>& avoid);

// Negation normal form: Implies/Iff eliminated, negation pushed to atoms.
// Covers are kept (their members are normalized); a negated cover is
// rewritten through its box/diamond definition first.
Formula to_nnf(const Formula& f);

// Replace every free occurrence of p by psi. Bisimulation binders for p
// shield their body.
Formula substitute(const Formula& f, const Prop& p, const Formula& psi);

// The a-positive fragment: negation only on atoms, no box for agent a.
bool is_a_positive(const Formula& f, const Agent& a);

}  // namespace rmlkit
