#include "rmlkit/normal_forms.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "rmlkit/errors.hpp"

namespace rmlkit {

using Kind = Formula::Kind;

namespace {

bool is_literal(const Formula& f) {
  return f.is(Kind::Prop) || (f.is(Kind::Not) && f.child().is(Kind::Prop));
}

}  // namespace

Formula simplify(const Formula& f) {
  switch (f.kind()) {
    case Kind::Top:
    case Kind::Bottom:
    case Kind::Prop:
      return f;
    case Kind::Not: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Top)) return Formula::bottom();
      if (c.is(Kind::Bottom)) return Formula::top();
      if (c.is(Kind::Not)) return c.child();
      return Formula::negation(c);
    }
    case Kind::And: {
      Formula l = simplify(f.left()), r = simplify(f.right());
      if (l.is(Kind::Bottom) || r.is(Kind::Bottom)) return Formula::bottom();
      if (l.is(Kind::Top)) return r;
      if (r.is(Kind::Top)) return l;
      if (l == r) return l;
      // absorption and direct contradiction
      if (r.is(Kind::Or) && (r.left() == l || r.right() == l)) return l;
      if (l.is(Kind::Or) && (l.left() == r || l.right() == r)) return r;
      if (l.is(Kind::Not) && l.child() == r) return Formula::bottom();
      if (r.is(Kind::Not) && r.child() == l) return Formula::bottom();
      return Formula::conj(l, r);
    }
    case Kind::Or: {
      Formula l = simplify(f.left()), r = simplify(f.right());
      if (l.is(Kind::Top) || r.is(Kind::Top)) return Formula::top();
      if (l.is(Kind::Bottom)) return r;
      if (r.is(Kind::Bottom)) return l;
      if (l == r) return l;
      if (r.is(Kind::And) && (r.left() == l || r.right() == l)) return l;
      if (l.is(Kind::And) && (l.left() == r || l.right() == r)) return r;
      if (l.is(Kind::Not) && l.child() == r) return Formula::top();
      if (r.is(Kind::Not) && r.child() == l) return Formula::top();
      return Formula::disj(l, r);
    }
    case Kind::Implies: {
      Formula l = simplify(f.left()), r = simplify(f.right());
      if (l.is(Kind::Bottom) || r.is(Kind::Top)) return Formula::top();
      if (l.is(Kind::Top)) return r;
      if (r.is(Kind::Bottom)) return simplify(Formula::negation(l));
      return Formula::implies(l, r);
    }
    case Kind::Iff: {
      Formula l = simplify(f.left()), r = simplify(f.right());
      if (l.is(Kind::Top)) return r;
      if (r.is(Kind::Top)) return l;
      if (l.is(Kind::Bottom)) return simplify(Formula::negation(r));
      if (r.is(Kind::Bottom)) return simplify(Formula::negation(l));
      if (l == r) return Formula::top();
      return Formula::iff(l, r);
    }
    case Kind::Box: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Top)) return Formula::top();
      return Formula::box(f.agent(), c);
    }
    case Kind::Diamond: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Bottom)) return Formula::bottom();
      return Formula::diamond(f.agent(), c);
    }
    case Kind::Cover: {
      std::vector<Formula> ms;
      ms.reserve(f.members().size());
      for (const auto& m : f.members()) {
        Formula s = simplify(m);
        // a bottom member makes the diamond conjunct of the cover false
        if (s.is(Kind::Bottom)) return Formula::bottom();
        ms.push_back(std::move(s));
      }
      return Formula::cover(f.agent(), std::move(ms));
    }
    case Kind::AllRef: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Top) || c.is(Kind::Bottom)) return c;  // refinement is reflexive
      return Formula::all_ref(f.agent(), c);
    }
    case Kind::SomeRef: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Top) || c.is(Kind::Bottom)) return c;
      return Formula::some_ref(f.agent(), c);
    }
    case Kind::BisimAll: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Top) || c.is(Kind::Bottom)) return c;
      return Formula::bisim_all(f.prop_name(), c);
    }
    case Kind::BisimSome: {
      Formula c = simplify(f.child());
      if (c.is(Kind::Top) || c.is(Kind::Bottom)) return c;
      return Formula::bisim_some(f.prop_name(), c);
    }
  }
  throw DomainError("unreachable formula kind");
}

Formula box_diamond_to_cover(const Formula& f) {
  switch (f.kind()) {
    case Kind::Top:
    case Kind::Bottom:
    case Kind::Prop:
      return f;
    case Kind::Not: return Formula::negation(box_diamond_to_cover(f.child()));
    case Kind::And:
      return Formula::conj(box_diamond_to_cover(f.left()), box_diamond_to_cover(f.right()));
    case Kind::Or:
      return Formula::disj(box_diamond_to_cover(f.left()), box_diamond_to_cover(f.right()));
    case Kind::Implies:
      return Formula::implies(box_diamond_to_cover(f.left()), box_diamond_to_cover(f.right()));
    case Kind::Iff:
      return Formula::iff(box_diamond_to_cover(f.left()), box_diamond_to_cover(f.right()));
    case Kind::Box: {
      Formula c = box_diamond_to_cover(f.child());
      return Formula::disj(Formula::cover(f.agent(), {}),
                           Formula::cover(f.agent(), {c}));
    }
    case Kind::Diamond: {
      Formula c = box_diamond_to_cover(f.child());
      return Formula::cover(f.agent(), {c, Formula::top()});
    }
    case Kind::Cover: {
      std::vector<Formula> ms;
      for (const auto& m : f.members()) ms.push_back(box_diamond_to_cover(m));
      return Formula::cover(f.agent(), std::move(ms));
    }
    default:
      throw DomainError("refinement quantifier in box_diamond_to_cover");
  }
}

Formula cover_to_box_diamond(const Formula& f) {
  switch (f.kind()) {
    case Kind::Top:
    case Kind::Bottom:
    case Kind::Prop:
      return f;
    case Kind::Not: return Formula::negation(cover_to_box_diamond(f.child()));
    case Kind::And:
      return Formula::conj(cover_to_box_diamond(f.left()), cover_to_box_diamond(f.right()));
    case Kind::Or:
      return Formula::disj(cover_to_box_diamond(f.left()), cover_to_box_diamond(f.right()));
    case Kind::Implies:
      return Formula::implies(cover_to_box_diamond(f.left()), cover_to_box_diamond(f.right()));
    case Kind::Iff:
      return Formula::iff(cover_to_box_diamond(f.left()), cover_to_box_diamond(f.right()));
    case Kind::Box: return Formula::box(f.agent(), cover_to_box_diamond(f.child()));
    case Kind::Diamond: return Formula::diamond(f.agent(), cover_to_box_diamond(f.child()));
    case Kind::Cover: {
      std::vector<Formula> ms, diamonds;
      for (const auto& m : f.members()) {
        ms.push_back(cover_to_box_diamond(m));
        diamonds.push_back(Formula::diamond(f.agent(), ms.back()));
      }
      return Formula::conj(Formula::box(f.agent(), Formula::big_or(ms)),
                           Formula::big_and(diamonds));
    }
    case Kind::AllRef: return Formula::all_ref(f.agent(), cover_to_box_diamond(f.child()));
    case Kind::SomeRef: return Formula::some_ref(f.agent(), cover_to_box_diamond(f.child()));
    case Kind::BisimAll: return Formula::bisim_all(f.prop_name(), cover_to_box_diamond(f.child()));
    case Kind::BisimSome:
      return Formula::bisim_some(f.prop_name(), cover_to_box_diamond(f.child()));
  }
  throw DomainError("unreachable formula kind");
}

Formula merge_covers(const Formula& c1, const Formula& c2) {
  if (!c1.is(Kind::Cover) || !c2.is(Kind::Cover)) throw DomainError("merge_covers needs covers");
  if (c1.agent() != c2.agent()) throw DomainError("merge_covers needs a single agent");
  const Formula any1 = Formula::big_or(c1.members());
  const Formula any2 = Formula::big_or(c2.members());
  std::vector<Formula> merged;
  for (const auto& m : c1.members()) merged.push_back(Formula::conj(m, any2));
  for (const auto& m : c2.members()) merged.push_back(Formula::conj(any1, m));
  return Formula::cover(c1.agent(), std::move(merged));
}

namespace {

using DF = DisjunctiveForm;
using Conjunct = DF::Conjunct;

DF df_false() { return DF{}; }

DF df_true() {
  DF d;
  d.disjuncts.push_back(Conjunct{});
  return d;
}

bool conjunct_is_top(const Conjunct& c) { return c.literals.empty() && c.covers.empty(); }

std::string conjunct_key(const Conjunct& c);

// Literal set union; nullopt on a complementary pair.
std::optional<std::vector<Formula>> merge_literals(const std::vector<Formula>& a,
                                                   const std::vector<Formula>& b) {
  std::set<Formula> out(a.begin(), a.end());
  out.insert(b.begin(), b.end());
  for (const auto& lit : out) {
    const Formula neg = lit.is(Kind::Not) ? lit.child() : Formula::negation(lit);
    if (out.count(neg)) return std::nullopt;
  }
  return std::vector<Formula>(out.begin(), out.end());
}

void dedup_members(std::vector<DF>& members) {
  std::set<std::string> seen;
  std::vector<DF> kept;
  for (auto& m : members) {
    if (seen.insert(m.to_formula().str()).second) kept.push_back(std::move(m));
  }
  members = std::move(kept);
}

DF df_or(DF a, const DF& b);
DF df_and(const DF& a, const DF& b);

// nabla merge at member level; any bottom member collapses the conjunct.
std::optional<std::vector<DF>> merge_cover_members(const std::vector<DF>& phis,
                                                   const std::vector<DF>& psis) {
  DF any_phi = df_false(), any_psi = df_false();
  for (const auto& m : phis) any_phi = df_or(any_phi, m);
  for (const auto& m : psis) any_psi = df_or(any_psi, m);
  std::vector<DF> out;
  for (const auto& m : phis) {
    DF x = df_and(m, any_psi);
    if (x.is_false()) return std::nullopt;
    out.push_back(std::move(x));
  }
  for (const auto& m : psis) {
    DF x = df_and(any_phi, m);
    if (x.is_false()) return std::nullopt;
    out.push_back(std::move(x));
  }
  dedup_members(out);
  return out;
}

std::optional<Conjunct> merge_conjuncts(const Conjunct& a, const Conjunct& b) {
  Conjunct out;
  auto lits = merge_literals(a.literals, b.literals);
  if (!lits) return std::nullopt;
  out.literals = std::move(*lits);
  out.covers = a.covers;
  for (const auto& [agent, members] : b.covers) {
    auto it = out.covers.find(agent);
    if (it == out.covers.end()) {
      out.covers[agent] = members;
    } else {
      auto merged = merge_cover_members(it->second, members);
      if (!merged) return std::nullopt;
      it->second = std::move(*merged);
    }
  }
  return out;
}

DF df_or(DF a, const DF& b) {
  for (const auto& c : b.disjuncts) a.disjuncts.push_back(c);
  // a top conjunct absorbs everything; duplicates are dropped
  for (const auto& c : a.disjuncts)
    if (conjunct_is_top(c)) return df_true();
  std::set<std::string> seen;
  std::vector<Conjunct> kept;
  for (auto& c : a.disjuncts)
    if (seen.insert(conjunct_key(c)).second) kept.push_back(std::move(c));
  a.disjuncts = std::move(kept);
  return a;
}

DF df_and(const DF& a, const DF& b) {
  DF out = df_false();
  for (const auto& ca : a.disjuncts)
    for (const auto& cb : b.disjuncts) {
      auto merged = merge_conjuncts(ca, cb);
      if (merged) {
        DF one;
        one.disjuncts.push_back(std::move(*merged));
        out = df_or(std::move(out), one);
      }
    }
  return out;
}

std::string conjunct_key(const Conjunct& c) {
  std::string key;
  for (const auto& l : c.literals) key += l.str() + "&";
  for (const auto& [agent, members] : c.covers) {
    key += "@" + agent.name + "{";
    for (const auto& m : members) key += m.to_formula().str() + ",";
    key += "}";
  }
  return key;
}

DF build_df(const Formula& f) {
  switch (f.kind()) {
    case Kind::Top: return df_true();
    case Kind::Bottom: return df_false();
    case Kind::Prop:
    case Kind::Not: {
      if (!is_literal(f)) throw DomainError("negation not on an atom in disjunctive conversion");
      DF d;
      Conjunct c;
      c.literals.push_back(f);
      d.disjuncts.push_back(std::move(c));
      return d;
    }
    case Kind::Or: return df_or(build_df(f.left()), build_df(f.right()));
    case Kind::And: return df_and(build_df(f.left()), build_df(f.right()));
    case Kind::Box: {
      // [a]x == nabla_a {} | nabla_a {x}; the disjunction floats to the top
      DF member = build_df(f.child());
      DF d;
      Conjunct empty_cover;
      empty_cover.covers[f.agent()] = {};
      d.disjuncts.push_back(std::move(empty_cover));
      if (!member.is_false()) {
        Conjunct single;
        single.covers[f.agent()] = {std::move(member)};
        d.disjuncts.push_back(std::move(single));
      }
      return d;
    }
    case Kind::Diamond: {
      // <a>x == nabla_a {x, top}
      DF member = build_df(f.child());
      if (member.is_false()) return df_false();
      Conjunct c;
      std::vector<DF> ms;
      ms.push_back(std::move(member));
      ms.push_back(df_true());
      dedup_members(ms);
      c.covers[f.agent()] = std::move(ms);
      DF d;
      d.disjuncts.push_back(std::move(c));
      return d;
    }
    case Kind::Cover: {
      std::vector<DF> ms;
      for (const auto& m : f.members()) {
        DF dm = build_df(m);
        if (dm.is_false()) return df_false();
        ms.push_back(std::move(dm));
      }
      dedup_members(ms);
      Conjunct c;
      c.covers[f.agent()] = std::move(ms);
      DF d;
      d.disjuncts.push_back(std::move(c));
      return d;
    }
    default:
      throw DomainError("refinement quantifier in disjunctive conversion");
  }
}

}  // namespace

Formula DisjunctiveForm::to_formula() const {
  std::vector<Formula> parts;
  for (const auto& c : disjuncts) {
    std::vector<Formula> bits = c.literals;
    for (const auto& [agent, members] : c.covers) {
      std::vector<Formula> ms;
      for (const auto& m : members) ms.push_back(m.to_formula());
      bits.push_back(Formula::cover(agent, std::move(ms)));
    }
    parts.push_back(Formula::big_and(bits));
  }
  return Formula::big_or(parts);
}

DisjunctiveForm to_disjunctive(const Formula& f) {
  if (!f.refinement_free()) throw DomainError("refinement quantifier in to_disjunctive");
  return build_df(simplify(to_nnf(f)));
}

namespace {

bool is_disjunctive_conjunct(const Formula& f) {
  // /\-tree over literals, top, and at most one cover per agent
  std::set<Agent> used;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (g.is(Kind::And)) {
      stack.push_back(g.left());
      stack.push_back(g.right());
    } else if (g.is(Kind::Cover)) {
      if (!used.insert(g.agent()).second) return false;
      for (const auto& m : g.members())
        if (!is_disjunctive(m)) return false;
    } else if (!(is_literal(g) || g.is(Kind::Top) || g.is(Kind::Bottom))) {
      return false;
    }
  }
  return true;
}

}  // namespace

bool is_disjunctive(const Formula& f) {
  if (f.is(Kind::Or)) return is_disjunctive(f.left()) && is_disjunctive(f.right());
  return is_disjunctive_conjunct(f);
}

}  // namespace rmlkit
