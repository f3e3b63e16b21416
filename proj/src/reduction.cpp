#include "rmlkit/reduction.hpp"

#include <cassert>
#include <map>

#include <nlohmann/json.hpp>

#include "rmlkit/errors.hpp"
#include "rmlkit/modelcheck.hpp"

namespace rmlkit {

using Kind = Formula::Kind;
using DF = DisjunctiveForm;

nlohmann::json trace_to_json(const ReductionTrace& trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : trace.steps)
    arr.push_back({{"rule", s.rule}, {"before", s.before.str()}, {"after", s.after.str()}});
  return arr;
}

namespace {

void charge(const Formula& f, const ReduceOptions& opts) {
  if (f.node_count() > opts.max_nodes)
    throw BudgetExceeded("formula grew past the node budget of " +
                         std::to_string(opts.max_nodes) + " (" +
                         std::to_string(f.node_count()) + " nodes)");
}

void record(ReductionTrace* trace, const char* rule, Formula before, Formula after) {
  if (trace) trace->steps.push_back({rule, std::move(before), std::move(after)});
}

Formula conjunct_formula(const DF::Conjunct& c) {
  std::vector<Formula> bits = c.literals;
  for (const auto& [agent, members] : c.covers) {
    std::vector<Formula> ms;
    for (const auto& m : members) ms.push_back(m.to_formula());
    bits.push_back(Formula::cover(agent, std::move(ms)));
  }
  return Formula::big_and(bits);
}

class Eliminator {
 public:
  Eliminator(Agent a, ReductionTrace* trace, const ReduceOptions& opts)
      : a_(std::move(a)), trace_(trace), opts_(opts) {}

  Formula run(const DF& d) {
    if (d.disjuncts.empty()) {
      record(trace_, "RProp", Formula::some_ref(a_, Formula::bottom()), Formula::bottom());
      return Formula::bottom();
    }
    if (d.disjuncts.size() > 1) {
      std::vector<Formula> split;
      for (const auto& c : d.disjuncts)
        split.push_back(Formula::some_ref(a_, conjunct_formula(c)));
      record(trace_, "OrSplit", Formula::some_ref(a_, d.to_formula()), Formula::big_or(split));
    }
    std::vector<Formula> parts;
    for (const auto& c : d.disjuncts) parts.push_back(conjunct(c));
    Formula out = simplify(Formula::big_or(parts));
    charge(out, opts_);
    return out;
  }

 private:
  Agent a_;
  ReductionTrace* trace_;
  const ReduceOptions& opts_;

  Formula conjunct(const DF::Conjunct& c) {
    const Formula lits = Formula::big_and(c.literals);
    if (c.covers.empty()) {
      record(trace_, "RProp", Formula::some_ref(a_, lits), lits);
      return lits;
    }
    std::vector<Formula> cover_formulas;
    for (const auto& [agent, members] : c.covers) {
      std::vector<Formula> ms;
      for (const auto& m : members) ms.push_back(m.to_formula());
      cover_formulas.push_back(Formula::cover(agent, std::move(ms)));
    }
    const Formula covers_part = Formula::big_and(cover_formulas);
    if (!c.literals.empty())
      record(trace_, "PropFactor", Formula::some_ref(a_, conjunct_formula(c)),
             Formula::conj(lits, Formula::some_ref(a_, covers_part)));
    if (c.covers.size() > 1) {
      std::vector<Formula> per_agent;
      for (const auto& cf : cover_formulas) per_agent.push_back(Formula::some_ref(a_, cf));
      record(trace_, "RKconj", Formula::some_ref(a_, covers_part), Formula::big_and(per_agent));
    }
    std::vector<Formula> results;
    std::size_t idx = 0;
    for (const auto& [agent, members] : c.covers) {
      const Formula& cf = cover_formulas[idx++];
      if (agent == a_) {
        // E_a nabla_a {m..}  ->  /\ <a> E_a m
        std::vector<Formula> axiom_rhs, built;
        for (const auto& m : members) {
          axiom_rhs.push_back(Formula::diamond(a_, Formula::some_ref(a_, m.to_formula())));
        }
        record(trace_, "RK", Formula::some_ref(a_, cf), Formula::big_and(axiom_rhs));
        for (const auto& m : members) built.push_back(Formula::diamond(a_, run(m)));
        results.push_back(Formula::big_and(built));
      } else {
        // E_a nabla_b {m..}  ->  nabla_b {E_a m ..}
        std::vector<Formula> axiom_rhs, built;
        for (const auto& m : members)
          axiom_rhs.push_back(Formula::some_ref(a_, m.to_formula()));
        record(trace_, "RKmulti", Formula::some_ref(a_, cf),
               Formula::cover(agent, std::move(axiom_rhs)));
        for (const auto& m : members) built.push_back(run(m));
        results.push_back(Formula::cover(agent, std::move(built)));
      }
    }
    Formula out = simplify(Formula::conj(lits, Formula::big_and(results)));
    charge(out, opts_);
    return out;
  }
};

}  // namespace

Formula eliminate_innermost(const Formula& some_ref, ReductionTrace* trace,
                            const ReduceOptions& opts) {
  if (!some_ref.is(Kind::SomeRef) || !some_ref.child().refinement_free())
    throw DomainError("eliminate_innermost needs E_a over a refinement-free body");
  const Agent a = some_ref.agent();
  DF d = to_disjunctive(some_ref.child());
  Formula dnf_form = d.to_formula();
  charge(dnf_form, opts);
  if (dnf_form != some_ref.child())
    record(trace, "DNF", some_ref, Formula::some_ref(a, dnf_form));
  return Eliminator(a, trace, opts).run(d);
}

namespace {

// Eliminate the first innermost quantifier found (leftmost, depth first).
std::optional<Formula> eliminate_one(const Formula& f, ReductionTrace* trace,
                                     const ReduceOptions& opts) {
  if (f.refinement_free()) return std::nullopt;
  switch (f.kind()) {
    case Kind::SomeRef:
    case Kind::AllRef: {
      if (!f.child().refinement_free()) {
        auto inner = eliminate_one(f.child(), trace, opts);
        assert(inner);
        return f.is(Kind::SomeRef) ? Formula::some_ref(f.agent(), *inner)
                                   : Formula::all_ref(f.agent(), *inner);
      }
      if (f.is(Kind::SomeRef)) return eliminate_innermost(f, trace, opts);
      // A_a x == ~E_a ~x, unfolded by duality before elimination
      Formula dual = Formula::some_ref(f.agent(), simplify(to_nnf(Formula::negation(f.child()))));
      return simplify(Formula::negation(eliminate_innermost(dual, trace, opts)));
    }
    case Kind::Not: {
      auto c = eliminate_one(f.child(), trace, opts);
      if (!c) return std::nullopt;
      return Formula::negation(*c);
    }
    case Kind::Box: {
      auto c = eliminate_one(f.child(), trace, opts);
      if (!c) return std::nullopt;
      return Formula::box(f.agent(), *c);
    }
    case Kind::Diamond: {
      auto c = eliminate_one(f.child(), trace, opts);
      if (!c) return std::nullopt;
      return Formula::diamond(f.agent(), *c);
    }
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Iff: {
      if (auto l = eliminate_one(f.left(), trace, opts)) {
        switch (f.kind()) {
          case Kind::And: return Formula::conj(*l, f.right());
          case Kind::Or: return Formula::disj(*l, f.right());
          case Kind::Implies: return Formula::implies(*l, f.right());
          default: return Formula::iff(*l, f.right());
        }
      }
      auto r = eliminate_one(f.right(), trace, opts);
      assert(r);
      switch (f.kind()) {
        case Kind::And: return Formula::conj(f.left(), *r);
        case Kind::Or: return Formula::disj(f.left(), *r);
        case Kind::Implies: return Formula::implies(f.left(), *r);
        default: return Formula::iff(f.left(), *r);
      }
    }
    case Kind::Cover: {
      std::vector<Formula> ms;
      bool changed = false;
      for (const auto& m : f.members()) {
        if (!changed) {
          if (auto r = eliminate_one(m, trace, opts)) {
            ms.push_back(*r);
            changed = true;
            continue;
          }
        }
        ms.push_back(m);
      }
      assert(changed);
      return Formula::cover(f.agent(), std::move(ms));
    }
    case Kind::BisimAll:
    case Kind::BisimSome:
      throw DomainError("reduce does not handle bisimulation quantifiers");
    default:
      return std::nullopt;  // atoms are refinement-free, unreachable
  }
}

}  // namespace

ReduceResult reduce(const Formula& f, const ReduceOptions& opts) {
  ReduceResult out{f, {}};
  charge(f, opts);
  while (!out.formula.refinement_free()) {
    auto next = eliminate_one(out.formula, &out.trace, opts);
    assert(next);
    out.formula = *next;
    charge(out.formula, opts);
  }
  out.formula = simplify(out.formula);
  return out;
}

// ---------------------------------------------------------------------------
// Witness synthesis, following the model construction behind the RK axiom:
// a fresh point keeps the atoms of the old one, a-arrows lead to recursively
// built member witnesses, covered foreign agents fan out over all successors,
// and unconstrained agents continue into an untouched copy of the base model.

namespace {

class WitnessBuilder {
 public:
  WitnessBuilder(const PointedModel& base, Agent a, const ReduceOptions& opts)
      : base_(base.model), a_(std::move(a)), opts_(opts) {
    for (const auto& s : base_.states) copy_of_[s] = "m:" + s;
  }

  std::optional<PointedModel> run(const Formula& psi) {
    DF d = to_disjunctive(psi);
    // materialize the grafted copy
    out_.states.clear();
    for (const auto& [s, cs] : copy_of_) out_.states.insert(cs);
    for (const auto& [c, pairs] : base_.relations)
      for (const auto& [s, t] : pairs) out_.relations[c].emplace(copy_of_[s], copy_of_[t]);
    for (const auto& [p, ext] : base_.valuation)
      for (const auto& s : ext) out_.valuation[p].insert(copy_of_[s]);

    auto point = build(base_point_, d);
    if (!point) return std::nullopt;
    PointedModel pm{std::move(out_), *point};
    return reachable_part(pm);
  }

  void set_point(State s) { base_point_ = std::move(s); }

 private:
  const Model& base_;
  Agent a_;
  const ReduceOptions& opts_;
  Model out_;
  State base_point_;
  long counter_ = 0;
  std::map<std::string, Formula> eliminated_;  // conjunct / member key -> E_a-free form

  Formula eliminated(const DF& d) {
    std::string key = d.to_formula().str();
    auto it = eliminated_.find(key);
    if (it == eliminated_.end()) {
      Eliminator elim(a_, nullptr, opts_);
      it = eliminated_.emplace(key, elim.run(d)).first;
    }
    return it->second;
  }

  bool holds_at(const State& s, const Formula& f) const {
    return evaluate(PointedModel{base_, s}, f);
  }

  DF wrap(const DF::Conjunct& c) {
    DF d;
    d.disjuncts.push_back(c);
    return d;
  }

  // Witness point for d at base state s, or nothing if E_a d fails there.
  std::optional<State> build(const State& s, const DF& d) {
    for (const auto& c : d.disjuncts) {
      if (!holds_at(s, eliminated(wrap(c)))) continue;
      return build_conjunct(s, c);
    }
    return std::nullopt;
  }

  State build_conjunct(const State& s, const DF::Conjunct& c) {
    if (c.covers.empty()) return copy_of_.at(s);  // propositional: the copy itself refines
    State w = "w" + std::to_string(counter_++);
    out_.states.insert(w);
    for (const auto& [p, ext] : base_.valuation)
      if (ext.count(s)) out_.valuation[p].insert(w);

    for (const auto& [b, members] : c.covers) {
      if (b == a_) {
        // pick one origin per member; forth for a is not required
        for (const auto& m : members) {
          std::optional<State> chosen;
          for (const auto& t : base_.successors(a_, s))
            if (holds_at(t, eliminated(m))) { chosen = t; break; }
          if (!chosen) throw DomainError("witness construction lost a member obligation");
          auto u = build(*chosen, m);
          assert(u);
          out_.relations[a_].emplace(w, *u);
        }
      } else {
        // all b-successors take part: cover each member, then route the rest
        std::vector<std::pair<State, const DF*>> jobs;
        std::set<State> covered;
        for (const auto& m : members) {
          std::optional<State> chosen;
          for (const auto& t : base_.successors(b, s))
            if (holds_at(t, eliminated(m))) { chosen = t; break; }
          if (!chosen) throw DomainError("witness construction lost a member obligation");
          jobs.emplace_back(*chosen, &m);
          covered.insert(*chosen);
        }
        for (const auto& t : base_.successors(b, s)) {
          if (covered.count(t)) continue;
          const DF* pick = nullptr;
          for (const auto& m : members)
            if (holds_at(t, eliminated(m))) { pick = &m; break; }
          if (!pick) throw DomainError("witness construction lost a successor obligation");
          jobs.emplace_back(t, pick);
        }
        for (const auto& [t, m] : jobs) {
          auto u = build(t, *m);
          assert(u);
          out_.relations[b].emplace(w, *u);
        }
      }
    }
    // unconstrained agents continue exactly as in the base model
    for (const auto& [cagent, _] : base_.relations) {
      if (c.covers.count(cagent)) continue;
      for (const auto& t : base_.successors(cagent, s))
        out_.relations[cagent].emplace(w, copy_of_.at(t));
    }
    return w;
  }

  std::map<State, State> copy_of_;
};

}  // namespace

std::optional<PointedModel> synthesize_witness(const PointedModel& ms, const Agent& a,
                                               const Formula& psi, const ReduceOptions& opts) {
  validate(ms);
  if (!psi.refinement_free()) throw DomainError("witness synthesis needs a refinement-free body");
  WitnessBuilder builder(ms, a, opts);
  builder.set_point(ms.point);
  return builder.run(psi);
}

}  // namespace rmlkit
