#include "rmlkit/refinement.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <vector>

#include "rmlkit/errors.hpp"
#include "rmlkit/normal_forms.hpp"

namespace rmlkit {

namespace {

struct Indexed {
  std::vector<State> states;
  std::map<State, int> index;
  // adjacency per agent name
  std::map<Agent, std::vector<std::vector<int>>> succ;
  std::vector<std::set<Prop>> atoms;

  explicit Indexed(const Model& m) {
    states.assign(m.states.begin(), m.states.end());
    for (int i = 0; i < static_cast<int>(states.size()); ++i) index[states[i]] = i;
    atoms.resize(states.size());
    for (const auto& [p, ext] : m.valuation)
      for (const auto& s : ext) atoms[index.at(s)].insert(p);
    for (const auto& [a, pairs] : m.relations) {
      auto& adj = succ[a];
      adj.resize(states.size());
      for (const auto& [s, t] : pairs) adj[index.at(s)].push_back(index.at(t));
    }
  }

  const std::vector<int>& successors(const Agent& a, int s) const {
    static const std::vector<int> none;
    auto it = succ.find(a);
    if (it == succ.end()) return none;
    return it->second[s];
  }
};

struct Death {
  enum Why { Atoms, Forth, Back } why = Atoms;
  int round = 0;
  Agent agent;
  int succ = -1;        // offending left successor (Forth) / right successor (Back)
  Prop prop;            // Atoms
  bool prop_on_right = false;
};

// Pair (i, j) reads: left state i against right state j.
struct GameResult {
  const Indexed* left;
  const Indexed* right;
  std::vector<std::vector<bool>> alive;
  std::vector<std::vector<Death>> death;
};

GameResult run_game(const Indexed& L, const Indexed& R, const std::set<Agent>& forth_agents,
                    const std::set<Agent>& back_agents, const std::optional<Prop>& except) {
  const int n = static_cast<int>(L.states.size());
  const int m = static_cast<int>(R.states.size());
  GameResult res;
  res.left = &L;
  res.right = &R;
  res.alive.assign(n, std::vector<bool>(m, true));
  res.death.assign(n, std::vector<Death>(m));

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      std::set<Prop> all = L.atoms[i];
      all.insert(R.atoms[j].begin(), R.atoms[j].end());
      for (const auto& p : all) {
        if (except && p == *except) continue;
        const bool onL = L.atoms[i].count(p) > 0;
        const bool onR = R.atoms[j].count(p) > 0;
        if (onL != onR) {
          res.alive[i][j] = false;
          res.death[i][j] = {Death::Atoms, 0, Agent{}, -1, p, onR};
          break;
        }
      }
    }

  for (int round = 1;; ++round) {
    std::vector<std::tuple<int, int, Death>> kills;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        if (!res.alive[i][j]) continue;
        std::optional<Death> d;
        for (const auto& a : forth_agents) {
          for (int si : L.successors(a, i)) {
            bool matched = false;
            for (int tj : R.successors(a, j))
              if (res.alive[si][tj]) { matched = true; break; }
            if (!matched) { d = Death{Death::Forth, round, a, si, Prop{}, false}; break; }
          }
          if (d) break;
        }
        if (!d) {
          for (const auto& a : back_agents) {
            for (int tj : R.successors(a, j)) {
              bool matched = false;
              for (int si : L.successors(a, i))
                if (res.alive[si][tj]) { matched = true; break; }
              if (!matched) { d = Death{Death::Back, round, a, tj, Prop{}, false}; break; }
            }
            if (d) break;
          }
        }
        if (d) kills.emplace_back(i, j, *d);
      }
    if (kills.empty()) break;
    for (const auto& [i, j, d] : kills) {
      res.alive[i][j] = false;
      res.death[i][j] = d;
    }
  }
  return res;
}

// Distinguisher for a dead pair: true at the right state, false at the left
// state, built by induction on the deletion round.
class Extractor {
 public:
  explicit Extractor(const GameResult& g) : g_(g) {}

  Formula formula(int i, int j) {
    auto key = std::make_pair(i, j);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    assert(!g_.alive[i][j]);
    const Death& d = g_.death[i][j];
    Formula out = Formula::top();
    switch (d.why) {
      case Death::Atoms:
        out = d.prop_on_right ? Formula::prop(d.prop)
                              : Formula::negation(Formula::prop(d.prop));
        break;
      case Death::Forth: {
        // every right successor pairs dead against the offending left one
        std::vector<Formula> parts;
        for (int tj : g_.right->successors(d.agent, j)) parts.push_back(formula(d.succ, tj));
        out = Formula::box(d.agent, Formula::big_or(parts));
        break;
      }
      case Death::Back: {
        std::vector<Formula> parts;
        for (int si : g_.left->successors(d.agent, i)) parts.push_back(formula(si, d.succ));
        out = Formula::diamond(d.agent, Formula::big_and(parts));
        break;
      }
    }
    memo_.emplace(key, out);
    return out;
  }

 private:
  const GameResult& g_;
  std::map<std::pair<int, int>, Formula> memo_;
};

std::set<Agent> agent_universe(const Model& a, const Model& b) {
  std::set<Agent> out = a.agents();
  auto more = b.agents();
  out.insert(more.begin(), more.end());
  return out;
}

RefinementCheck finish_check(const PointedModel& ms, const PointedModel& nt, const Indexed& L,
                             const Indexed& R, const GameResult& game, bool extract) {
  RefinementCheck out;
  const int pi = L.index.at(ms.point);
  const int pj = R.index.at(nt.point);
  out.holds = game.alive[pi][pj];
  if (out.holds) {
    StateRelation rel;
    rel.left = ms.model;
    rel.right = nt.model;
    for (std::size_t i = 0; i < L.states.size(); ++i)
      for (std::size_t j = 0; j < R.states.size(); ++j)
        if (game.alive[i][j]) rel.pairs.emplace(L.states[i], R.states[j]);
    out.witness = std::move(rel);
  } else if (extract) {
    Extractor ex(game);
    out.distinguisher = simplify(ex.formula(pi, pj));
  }
  return out;
}

}  // namespace

RefinementCheck check_bisimulation(const PointedModel& ms, const PointedModel& nt,
                                   const std::optional<Prop>& except) {
  Indexed L(ms.model), R(nt.model);
  const std::set<Agent> all = agent_universe(ms.model, nt.model);
  GameResult game = run_game(L, R, all, all, except);
  return finish_check(ms, nt, L, R, game, /*extract=*/true);
}

RefinementCheck check_refinement(const PointedModel& ms, const PointedModel& nt,
                                 const std::set<Agent>& B) {
  if (B.empty()) throw DomainError("refinement check needs a non-empty agent set");
  Indexed L(ms.model), R(nt.model);
  std::set<Agent> all = agent_universe(ms.model, nt.model);
  all.insert(B.begin(), B.end());
  std::set<Agent> forth;
  for (const auto& a : all)
    if (!B.count(a)) forth.insert(a);
  GameResult game = run_game(L, R, forth, all, std::nullopt);
  // Distinguisher extraction is defined per agent, so only for singleton B;
  // there it lands in the a-positive fragment (no forth move for a means no
  // box over a ever enters the formula).
  return finish_check(ms, nt, L, R, game, /*extract=*/B.size() == 1);
}

bool is_refinement_relation(const StateRelation& rel, const std::set<Agent>& B,
                            const std::optional<Prop>& except) {
  if (rel.pairs.empty()) return false;
  std::set<Agent> all = agent_universe(rel.left, rel.right);
  all.insert(B.begin(), B.end());
  std::set<Prop> props = rel.left.props();
  auto more = rel.right.props();
  props.insert(more.begin(), more.end());
  for (const auto& [s, t] : rel.pairs) {
    if (!rel.left.states.count(s) || !rel.right.states.count(t)) return false;
    for (const auto& p : props) {
      if (except && p == *except) continue;
      if (rel.left.has_prop(p, s) != rel.right.has_prop(p, t)) return false;
    }
    for (const auto& a : all) {
      // back-a for everyone
      for (const auto& t2 : rel.right.successors(a, t)) {
        bool matched = false;
        for (const auto& s2 : rel.left.successors(a, s))
          if (rel.pairs.count({s2, t2})) { matched = true; break; }
        if (!matched) return false;
      }
      if (B.count(a)) continue;
      // forth-a outside B
      for (const auto& s2 : rel.left.successors(a, s)) {
        bool matched = false;
        for (const auto& t2 : rel.right.successors(a, t))
          if (rel.pairs.count({s2, t2})) { matched = true; break; }
        if (!matched) return false;
      }
    }
  }
  return true;
}

bool is_bisimulation_relation(const StateRelation& rel, const std::optional<Prop>& except) {
  // bisimulation = refinement with forth required for every agent
  return is_refinement_relation(rel, {}, except);
}

StateRelation compose_refinements(const StateRelation& r1, const StateRelation& r2) {
  if (!(r1.right == r2.left)) throw ModelError("composition requires r1.right == r2.left");
  StateRelation out;
  out.left = r1.left;
  out.right = r2.right;
  for (const auto& [x, y] : r1.pairs)
    for (const auto& [y2, z] : r2.pairs)
      if (y == y2) out.pairs.emplace(x, z);
  return out;
}

PointedModel contract(const PointedModel& pm) {
  const Model& m = pm.model;
  std::vector<State> states(m.states.begin(), m.states.end());
  std::map<State, int> cls;
  {
    // initial partition: atom signature
    std::map<std::string, int> sig_ids;
    for (const auto& s : states) {
      std::string sig;
      for (const auto& [p, ext] : m.valuation)
        if (ext.count(s)) sig += p.name + ";";
      auto [it, _] = sig_ids.emplace(sig, static_cast<int>(sig_ids.size()));
      cls[s] = it->second;
    }
  }
  // refinement only ever splits classes, so the partition is stable exactly
  // when the class count stops growing
  for (;;) {
    std::map<std::string, int> sig_ids;
    std::map<State, int> next;
    for (const auto& s : states) {
      std::string sig = std::to_string(cls[s]);
      for (const auto& [a, _] : m.relations) {
        std::set<int> target_classes;
        for (const auto& t : m.successors(a, s)) target_classes.insert(cls[t]);
        sig += "|" + a.name + ":";
        for (int c : target_classes) sig += std::to_string(c) + ",";
      }
      auto [it, _] = sig_ids.emplace(sig, static_cast<int>(sig_ids.size()));
      next[s] = it->second;
    }
    std::set<int> old_ids, new_ids;
    for (const auto& s : states) { old_ids.insert(cls[s]); new_ids.insert(next[s]); }
    const bool stable = new_ids.size() == old_ids.size();
    cls = std::move(next);
    if (stable) break;
  }

  std::map<int, State> rep;
  for (const auto& s : states) {
    auto it = rep.find(cls[s]);
    if (it == rep.end() || s < it->second) rep[cls[s]] = s;
  }

  PointedModel out;
  for (const auto& [_, r] : rep) out.model.states.insert(r);
  out.point = rep.at(cls.at(pm.point));
  for (const auto& [a, pairs] : m.relations) {
    std::set<StatePair> quotient;
    for (const auto& [s, t] : pairs) quotient.emplace(rep.at(cls.at(s)), rep.at(cls.at(t)));
    out.model.relations[a] = std::move(quotient);
  }
  for (const auto& [p, ext] : m.valuation) {
    std::set<State> kept;
    for (const auto& s : ext) kept.insert(rep.at(cls.at(s)));
    out.model.valuation[p] = std::move(kept);
  }
  return out;
}

Formula distinguishing_formula(const Model& m, const State& s, const State& t) {
  if (!m.states.count(s) || !m.states.count(t)) throw ModelError("undeclared state");
  Indexed idx(m);
  const std::set<Agent> all = m.agents();
  GameResult game = run_game(idx, idx, all, all, std::nullopt);
  const int i = idx.index.at(t);  // left = t so the result is true at s
  const int j = idx.index.at(s);
  if (game.alive[i][j]) throw DomainError("states '" + s + "' and '" + t + "' are bisimilar");
  Extractor ex(game);
  return simplify(ex.formula(i, j));
}

}  // namespace rmlkit
