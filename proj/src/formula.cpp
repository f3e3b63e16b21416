#include "rmlkit/formula.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "rmlkit/errors.hpp"

namespace rmlkit {

struct Formula::Node {
  Kind kind;
  Agent agent;
  Prop prop;
  std::vector<Formula> kids;
  std::size_t hash = 0;
  long nodes = 1;
  int depth = 0;
  int quants = 0;
};

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_string(const std::string& s) { return std::hash<std::string>{}(s); }

bool is_unary(Formula::Kind k) {
  using K = Formula::Kind;
  return k == K::Not || k == K::Box || k == K::Diamond || k == K::AllRef ||
         k == K::SomeRef || k == K::BisimAll || k == K::BisimSome;
}

bool is_binary(Formula::Kind k) {
  using K = Formula::Kind;
  return k == K::And || k == K::Or || k == K::Implies || k == K::Iff;
}

}  // namespace

Formula Formula::top() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Top;
    n->hash = hash_string("top");
    return Formula(std::move(n));
  }();
  return f;
}

Formula Formula::bottom() {
  static const Formula f = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bottom;
    n->hash = hash_string("bottom");
    return Formula(std::move(n));
  }();
  return f;
}

namespace {

std::shared_ptr<Formula::Node> make_node(Formula::Kind kind) {
  auto n = std::make_shared<Formula::Node>();
  n->kind = kind;
  n->hash = hash_combine(0xabcd, static_cast<std::size_t>(kind));
  return n;
}

void finish_node(Formula::Node& n) {
  for (const auto& k : n.kids) {
    n.hash = hash_combine(n.hash, k.hash());
    n.nodes += k.node_count();
    n.quants += k.quantifier_count();
    n.depth = std::max(n.depth, k.modal_depth());
  }
  using K = Formula::Kind;
  if (n.kind == K::Box || n.kind == K::Diamond || n.kind == K::Cover) ++n.depth;
  if (n.kind == K::AllRef || n.kind == K::SomeRef) ++n.quants;
}

}  // namespace

Formula Formula::prop(Prop p) {
  auto n = make_node(Kind::Prop);
  n->hash = hash_combine(n->hash, hash_string(p.name));
  n->prop = std::move(p);
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = make_node(Kind::Not);
  n->kids.push_back(std::move(f));
  finish_node(*n);
  return Formula(std::move(n));
}

namespace {
Formula make_binary(Formula::Kind k, Formula lhs, Formula rhs);
Formula make_modal(Formula::Kind k, Agent a, Formula f);
Formula make_binder(Formula::Kind k, Prop p, Formula f);
}  // namespace

Formula Formula::conj(Formula lhs, Formula rhs) { return make_binary(Kind::And, std::move(lhs), std::move(rhs)); }
Formula Formula::disj(Formula lhs, Formula rhs) { return make_binary(Kind::Or, std::move(lhs), std::move(rhs)); }
Formula Formula::implies(Formula lhs, Formula rhs) { return make_binary(Kind::Implies, std::move(lhs), std::move(rhs)); }
Formula Formula::iff(Formula lhs, Formula rhs) { return make_binary(Kind::Iff, std::move(lhs), std::move(rhs)); }
Formula Formula::box(Agent a, Formula f) { return make_modal(Kind::Box, std::move(a), std::move(f)); }
Formula Formula::diamond(Agent a, Formula f) { return make_modal(Kind::Diamond, std::move(a), std::move(f)); }
Formula Formula::all_ref(Agent a, Formula f) { return make_modal(Kind::AllRef, std::move(a), std::move(f)); }
Formula Formula::some_ref(Agent a, Formula f) { return make_modal(Kind::SomeRef, std::move(a), std::move(f)); }
Formula Formula::bisim_all(Prop p, Formula f) { return make_binder(Kind::BisimAll, std::move(p), std::move(f)); }
Formula Formula::bisim_some(Prop p, Formula f) { return make_binder(Kind::BisimSome, std::move(p), std::move(f)); }

namespace {

Formula make_binary(Formula::Kind k, Formula lhs, Formula rhs) {
  auto n = make_node(k);
  n->kids.push_back(std::move(lhs));
  n->kids.push_back(std::move(rhs));
  finish_node(*n);
  return Formula(std::move(n));
}

Formula make_modal(Formula::Kind k, Agent a, Formula f) {
  auto n = make_node(k);
  n->hash = hash_combine(n->hash, hash_string(a.name));
  n->agent = std::move(a);
  n->kids.push_back(std::move(f));
  finish_node(*n);
  return Formula(std::move(n));
}

Formula make_binder(Formula::Kind k, Prop p, Formula f) {
  auto n = make_node(k);
  n->hash = hash_combine(n->hash, hash_string(p.name));
  n->prop = std::move(p);
  n->kids.push_back(std::move(f));
  finish_node(*n);
  return Formula(std::move(n));
}

}  // namespace

Formula Formula::cover(Agent a, std::vector<Formula> members) {
  // Set semantics: order by printed form, drop structural duplicates.
  std::vector<std::pair<std::string, Formula>> keyed;
  keyed.reserve(members.size());
  for (auto& m : members) keyed.emplace_back(m.str(), std::move(m));
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  auto n = make_node(Kind::Cover);
  n->hash = hash_combine(n->hash, hash_string(a.name));
  n->agent = std::move(a);
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i > 0 && keyed[i].first == keyed[i - 1].first) continue;
    n->kids.push_back(std::move(keyed[i].second));
  }
  finish_node(*n);
  return Formula(std::move(n));
}

Formula Formula::big_and(const std::vector<Formula>& fs) {
  if (fs.empty()) return top();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
  return acc;
}

Formula Formula::big_or(const std::vector<Formula>& fs) {
  if (fs.empty()) return bottom();
  Formula acc = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
  return acc;
}

const Prop& Formula::prop_name() const {
  assert(node_->kind == Kind::Prop || node_->kind == Kind::BisimAll ||
         node_->kind == Kind::BisimSome);
  return node_->prop;
}

const Agent& Formula::agent() const {
  assert(node_->kind == Kind::Box || node_->kind == Kind::Diamond ||
         node_->kind == Kind::Cover || node_->kind == Kind::AllRef ||
         node_->kind == Kind::SomeRef);
  return node_->agent;
}

const Formula& Formula::child() const {
  assert(is_unary(node_->kind));
  return node_->kids.front();
}

const Formula& Formula::left() const {
  assert(is_binary(node_->kind));
  return node_->kids[0];
}

const Formula& Formula::right() const {
  assert(is_binary(node_->kind));
  return node_->kids[1];
}

const std::vector<Formula>& Formula::members() const {
  assert(node_->kind == Kind::Cover);
  return node_->kids;
}

int Formula::compare(const Formula& other) const {
  if (node_ == other.node_) return 0;
  if (node_->kind != other.node_->kind)
    return node_->kind < other.node_->kind ? -1 : 1;
  if (int c = node_->prop.name.compare(other.node_->prop.name); c != 0) return c < 0 ? -1 : 1;
  if (int c = node_->agent.name.compare(other.node_->agent.name); c != 0) return c < 0 ? -1 : 1;
  if (node_->kids.size() != other.node_->kids.size())
    return node_->kids.size() < other.node_->kids.size() ? -1 : 1;
  for (std::size_t i = 0; i < node_->kids.size(); ++i) {
    if (int c = node_->kids[i].compare(other.node_->kids[i]); c != 0) return c;
  }
  return 0;
}

bool Formula::operator==(const Formula& other) const {
  if (node_ == other.node_) return true;
  if (node_->hash != other.node_->hash) return false;
  return compare(other) == 0;
}

namespace {

// Precedence: <-> (1) < -> (2) < | (3) < & (4) < unary and atoms (5).
int precedence(Formula::Kind k) {
  using K = Formula::Kind;
  switch (k) {
    case K::Iff: return 1;
    case K::Implies: return 2;
    case K::Or: return 3;
    case K::And: return 4;
    default: return 5;
  }
}

void print_to(const Formula& f, int min_prec, std::string& out) {
  using K = Formula::Kind;
  const int prec = precedence(f.kind());
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (f.kind()) {
    case K::Top: out += "top"; break;
    case K::Bottom: out += "bottom"; break;
    case K::Prop: out += f.prop_name().name; break;
    case K::Not:
      out += '~';
      print_to(f.child(), 5, out);
      break;
    case K::And:
      print_to(f.left(), 4, out);
      out += " & ";
      print_to(f.right(), 5, out);
      break;
    case K::Or:
      print_to(f.left(), 3, out);
      out += " | ";
      print_to(f.right(), 4, out);
      break;
    case K::Implies:
      print_to(f.left(), 3, out);
      out += " -> ";
      print_to(f.right(), 2, out);
      break;
    case K::Iff:
      print_to(f.left(), 2, out);
      out += " <-> ";
      print_to(f.right(), 1, out);
      break;
    case K::Box:
      out += '[';
      out += f.agent().name;
      out += ']';
      print_to(f.child(), 5, out);
      break;
    case K::Diamond:
      out += '<';
      out += f.agent().name;
      out += '>';
      print_to(f.child(), 5, out);
      break;
    case K::Cover: {
      out += "nabla_";
      out += f.agent().name;
      out += " {";
      bool first = true;
      for (const auto& m : f.members()) {
        if (!first) out += ", ";
        first = false;
        print_to(m, 0, out);
      }
      out += '}';
      break;
    }
    case K::AllRef:
      out += "A_";
      out += f.agent().name;
      out += ' ';
      print_to(f.child(), 5, out);
      break;
    case K::SomeRef:
      out += "E_";
      out += f.agent().name;
      out += ' ';
      print_to(f.child(), 5, out);
      break;
    case K::BisimAll:
      out += "BA_";
      out += f.prop_name().name;
      out += ' ';
      print_to(f.child(), 5, out);
      break;
    case K::BisimSome:
      out += "BE_";
      out += f.prop_name().name;
      out += ' ';
      print_to(f.child(), 5, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Formula::str() const {
  std::string out;
  print_to(*this, 0, out);
  return out;
}

namespace {

void collect_props(const Formula& f, std::set<Prop>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Prop: out.insert(f.prop_name()); break;
    case K::BisimAll:
    case K::BisimSome:
      out.insert(f.prop_name());
      collect_props(f.child(), out);
      break;
    case K::Top:
    case K::Bottom: break;
    case K::Cover:
      for (const auto& m : f.members()) collect_props(m, out);
      break;
    case K::Not:
    case K::Box:
    case K::Diamond:
    case K::AllRef:
    case K::SomeRef:
      collect_props(f.child(), out);
      break;
    default:
      collect_props(f.left(), out);
      collect_props(f.right(), out);
  }
}

void collect_free_props(const Formula& f, std::set<Prop>& bound, std::set<Prop>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Prop:
      if (!bound.count(f.prop_name())) out.insert(f.prop_name());
      break;
    case K::BisimAll:
    case K::BisimSome: {
      const bool was_bound = bound.count(f.prop_name()) > 0;
      bound.insert(f.prop_name());
      collect_free_props(f.child(), bound, out);
      if (!was_bound) bound.erase(f.prop_name());
      break;
    }
    case K::Top:
    case K::Bottom: break;
    case K::Cover:
      for (const auto& m : f.members()) collect_free_props(m, bound, out);
      break;
    case K::Not:
    case K::Box:
    case K::Diamond:
    case K::AllRef:
    case K::SomeRef:
      collect_free_props(f.child(), bound, out);
      break;
    default:
      collect_free_props(f.left(), bound, out);
      collect_free_props(f.right(), bound, out);
  }
}

void collect_agents(const Formula& f, std::set<Agent>& out) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Box:
    case K::Diamond:
    case K::AllRef:
    case K::SomeRef:
      out.insert(f.agent());
      collect_agents(f.child(), out);
      break;
    case K::Cover:
      out.insert(f.agent());
      for (const auto& m : f.members()) collect_agents(m, out);
      break;
    case K::Not:
    case K::BisimAll:
    case K::BisimSome:
      collect_agents(f.child(), out);
      break;
    case K::Top:
    case K::Bottom:
    case K::Prop: break;
    default:
      collect_agents(f.left(), out);
      collect_agents(f.right(), out);
  }
}

}  // namespace

std::set<Prop> Formula::props() const {
  std::set<Prop> out;
  collect_props(*this, out);
  return out;
}

std::set<Prop> Formula::free_props() const {
  std::set<Prop> bound, out;
  collect_free_props(*this, bound, out);
  return out;
}

std::set<Agent> Formula::agents() const {
  std::set<Agent> out;
  collect_agents(*this, out);
  return out;
}

Prop fresh_prop(const std::set<Prop>& avoid) {
  for (long i = 0;; ++i) {
    Prop cand{"_v" + std::to_string(i)};
    if (!avoid.count(cand)) return cand;
  }
}

namespace {

Formula nnf_pos(const Formula& f);
Formula nnf_neg(const Formula& f);

Formula nnf_pos(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Top:
    case K::Bottom:
    case K::Prop: return f;
    case K::Not: return nnf_neg(f.child());
    case K::And: return Formula::conj(nnf_pos(f.left()), nnf_pos(f.right()));
    case K::Or: return Formula::disj(nnf_pos(f.left()), nnf_pos(f.right()));
    case K::Implies: return Formula::disj(nnf_neg(f.left()), nnf_pos(f.right()));
    case K::Iff:
      return Formula::conj(Formula::disj(nnf_neg(f.left()), nnf_pos(f.right())),
                           Formula::disj(nnf_pos(f.left()), nnf_neg(f.right())));
    case K::Box: return Formula::box(f.agent(), nnf_pos(f.child()));
    case K::Diamond: return Formula::diamond(f.agent(), nnf_pos(f.child()));
    case K::Cover: {
      std::vector<Formula> ms;
      ms.reserve(f.members().size());
      for (const auto& m : f.members()) ms.push_back(nnf_pos(m));
      return Formula::cover(f.agent(), std::move(ms));
    }
    case K::AllRef: return Formula::all_ref(f.agent(), nnf_pos(f.child()));
    case K::SomeRef: return Formula::some_ref(f.agent(), nnf_pos(f.child()));
    case K::BisimAll: return Formula::bisim_all(f.prop_name(), nnf_pos(f.child()));
    case K::BisimSome: return Formula::bisim_some(f.prop_name(), nnf_pos(f.child()));
  }
  throw DomainError("unreachable formula kind");
}

Formula nnf_neg(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Top: return Formula::bottom();
    case K::Bottom: return Formula::top();
    case K::Prop: return Formula::negation(f);
    case K::Not: return nnf_pos(f.child());
    case K::And: return Formula::disj(nnf_neg(f.left()), nnf_neg(f.right()));
    case K::Or: return Formula::conj(nnf_neg(f.left()), nnf_neg(f.right()));
    case K::Implies: return Formula::conj(nnf_pos(f.left()), nnf_neg(f.right()));
    case K::Iff:
      return Formula::conj(Formula::disj(nnf_pos(f.left()), nnf_pos(f.right())),
                           Formula::disj(nnf_neg(f.left()), nnf_neg(f.right())));
    case K::Box: return Formula::diamond(f.agent(), nnf_neg(f.child()));
    case K::Diamond: return Formula::box(f.agent(), nnf_neg(f.child()));
    case K::Cover: {
      // ~nabla_a {m..} == <a>(& of ~m) | (| of [a]~m)
      std::vector<Formula> negs, boxes;
      for (const auto& m : f.members()) {
        negs.push_back(nnf_neg(m));
        boxes.push_back(Formula::box(f.agent(), negs.back()));
      }
      return Formula::disj(Formula::diamond(f.agent(), Formula::big_and(negs)),
                           Formula::big_or(boxes));
    }
    case K::AllRef: return Formula::some_ref(f.agent(), nnf_neg(f.child()));
    case K::SomeRef: return Formula::all_ref(f.agent(), nnf_neg(f.child()));
    case K::BisimAll: return Formula::bisim_some(f.prop_name(), nnf_neg(f.child()));
    case K::BisimSome: return Formula::bisim_all(f.prop_name(), nnf_neg(f.child()));
  }
  throw DomainError("unreachable formula kind");
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf_pos(f); }

Formula substitute(const Formula& f, const Prop& p, const Formula& psi) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Top:
    case K::Bottom: return f;
    case K::Prop: return f.prop_name() == p ? psi : f;
    case K::Not: return Formula::negation(substitute(f.child(), p, psi));
    case K::And: return Formula::conj(substitute(f.left(), p, psi), substitute(f.right(), p, psi));
    case K::Or: return Formula::disj(substitute(f.left(), p, psi), substitute(f.right(), p, psi));
    case K::Implies:
      return Formula::implies(substitute(f.left(), p, psi), substitute(f.right(), p, psi));
    case K::Iff: return Formula::iff(substitute(f.left(), p, psi), substitute(f.right(), p, psi));
    case K::Box: return Formula::box(f.agent(), substitute(f.child(), p, psi));
    case K::Diamond: return Formula::diamond(f.agent(), substitute(f.child(), p, psi));
    case K::Cover: {
      std::vector<Formula> ms;
      ms.reserve(f.members().size());
      for (const auto& m : f.members()) ms.push_back(substitute(m, p, psi));
      return Formula::cover(f.agent(), std::move(ms));
    }
    case K::AllRef: return Formula::all_ref(f.agent(), substitute(f.child(), p, psi));
    case K::SomeRef: return Formula::some_ref(f.agent(), substitute(f.child(), p, psi));
    case K::BisimAll:
      if (f.prop_name() == p) return f;
      return Formula::bisim_all(f.prop_name(), substitute(f.child(), p, psi));
    case K::BisimSome:
      if (f.prop_name() == p) return f;
      return Formula::bisim_some(f.prop_name(), substitute(f.child(), p, psi));
  }
  throw DomainError("unreachable formula kind");
}

bool is_a_positive(const Formula& f, const Agent& a) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::Top:
    case K::Bottom:
    case K::Prop: return true;
    case K::Not: return f.child().is(K::Prop);
    case K::And:
    case K::Or: return is_a_positive(f.left(), a) && is_a_positive(f.right(), a);
    case K::Box: return f.agent() != a && is_a_positive(f.child(), a);
    case K::Diamond: return is_a_positive(f.child(), a);
    default: return false;
  }
}

}  // namespace rmlkit
