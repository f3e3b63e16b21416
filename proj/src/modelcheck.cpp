#include "rmlkit/modelcheck.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>
#include <vector>

#include "rmlkit/errors.hpp"
#include "rmlkit/reduction.hpp"

namespace rmlkit {

namespace {

using Kind = Formula::Kind;

struct Labeller {
  std::vector<State> states;
  std::map<State, int> index;
  std::map<Agent, std::vector<std::vector<int>>> succ;
  const Model* model;
  std::unordered_map<Formula, std::vector<bool>, FormulaHash> memo;

  explicit Labeller(const Model& m) : model(&m) {
    states.assign(m.states.begin(), m.states.end());
    for (int i = 0; i < static_cast<int>(states.size()); ++i) index[states[i]] = i;
    for (const auto& [a, pairs] : m.relations) {
      auto& adj = succ[a];
      adj.resize(states.size());
      for (const auto& [s, t] : pairs) adj[index.at(s)].push_back(index.at(t));
    }
  }

  const std::vector<int>& successors(const Agent& a, int s) const {
    static const std::vector<int> none;
    auto it = succ.find(a);
    return it == succ.end() ? none : it->second[s];
  }

  const std::vector<bool>& extension(const Formula& f) {
    auto it = memo.find(f);
    if (it != memo.end()) return it->second;
    const int n = static_cast<int>(states.size());
    std::vector<bool> ext(n, false);
    switch (f.kind()) {
      case Kind::Top: ext.assign(n, true); break;
      case Kind::Bottom: break;
      case Kind::Prop: {
        auto vit = model->valuation.find(f.prop_name());
        if (vit != model->valuation.end())
          for (const auto& s : vit->second) ext[index.at(s)] = true;
        break;
      }
      case Kind::Not: {
        const auto& c = extension(f.child());
        for (int i = 0; i < n; ++i) ext[i] = !c[i];
        break;
      }
      case Kind::And: {
        const auto l = extension(f.left());
        const auto& r = extension(f.right());
        for (int i = 0; i < n; ++i) ext[i] = l[i] && r[i];
        break;
      }
      case Kind::Or: {
        const auto l = extension(f.left());
        const auto& r = extension(f.right());
        for (int i = 0; i < n; ++i) ext[i] = l[i] || r[i];
        break;
      }
      case Kind::Implies: {
        const auto l = extension(f.left());
        const auto& r = extension(f.right());
        for (int i = 0; i < n; ++i) ext[i] = !l[i] || r[i];
        break;
      }
      case Kind::Iff: {
        const auto l = extension(f.left());
        const auto& r = extension(f.right());
        for (int i = 0; i < n; ++i) ext[i] = l[i] == r[i];
        break;
      }
      case Kind::Box: {
        const auto& c = extension(f.child());
        for (int i = 0; i < n; ++i) {
          bool all = true;
          for (int t : successors(f.agent(), i))
            if (!c[t]) { all = false; break; }
          ext[i] = all;
        }
        break;
      }
      case Kind::Diamond: {
        const auto& c = extension(f.child());
        for (int i = 0; i < n; ++i) {
          bool some = false;
          for (int t : successors(f.agent(), i))
            if (c[t]) { some = true; break; }
          ext[i] = some;
        }
        break;
      }
      case Kind::Cover: {
        std::vector<const std::vector<bool>*> ms;
        for (const auto& m : f.members()) ms.push_back(&extension(m));
        for (int i = 0; i < n; ++i) {
          bool ok = true;
          // every member at some successor
          for (const auto* me : ms) {
            bool some = false;
            for (int t : successors(f.agent(), i))
              if ((*me)[t]) { some = true; break; }
            if (!some) { ok = false; break; }
          }
          // every successor in some member
          if (ok) {
            for (int t : successors(f.agent(), i)) {
              bool some = false;
              for (const auto* me : ms)
                if ((*me)[t]) { some = true; break; }
              if (!some) { ok = false; break; }
            }
          }
          ext[i] = ok;
        }
        break;
      }
      default:
        throw DomainError("evaluate needs a refinement-free modal formula, got: " + f.str());
    }
    auto [mit, _] = memo.emplace(f, std::move(ext));
    return mit->second;
  }
};

}  // namespace

bool evaluate(const PointedModel& pm, const Formula& f) {
  Labeller lab(pm.model);
  auto it = lab.index.find(pm.point);
  if (it == lab.index.end()) throw ModelError("point '" + pm.point + "' is not a declared state");
  return lab.extension(f)[it->second];
}

bool evaluate_rml(const PointedModel& pm, const Formula& f) {
  return evaluate_rml(pm, f, ReduceOptions{});
}

bool evaluate_rml(const PointedModel& pm, const Formula& f, const ReduceOptions& opts) {
  return evaluate(pm, reduce(f, opts).formula);
}

// ---------------------------------------------------------------------------
// Refinement enumeration

namespace {

struct TreeNode {
  State id;
  State underlying;
  int depth;
};

}  // namespace

struct RefinementEnumerator::Impl {
  PointedModel base;
  Agent agent;
  int depth;
  std::uint64_t max_yield;

  Model skeleton;                    // everything except the prunable arrows
  State root;
  std::vector<std::pair<State, State>> prunable;  // a-arrows rooted in the tree
  std::uint64_t yielded = 0;
  std::uint64_t tried = 0;
  std::uint64_t space = 0;           // 2^k, saturated
  bool exhaustive;
  std::uint64_t counter_mask = 0;    // descending counter when exhaustive
  std::mt19937_64 rng{0x5eed};
  std::set<std::string> seen_masks;
  std::set<std::string> seen_models;

  Impl(const PointedModel& b, Agent a, int d, int dup, std::uint64_t cap)
      : base(b), agent(std::move(a)), depth(d), max_yield(cap) {
    validate(base);
    if (d < 0 || dup < 1) throw DomainError("enumeration needs depth >= 0 and dup >= 1");

    const std::string copy_prefix = "m:";
    // grafted copy of the base model
    for (const auto& s : base.model.states) skeleton.states.insert(copy_prefix + s);
    for (const auto& [c, pairs] : base.model.relations)
      for (const auto& [s, t] : pairs)
        skeleton.relations[c].emplace(copy_prefix + s, copy_prefix + t);
    for (const auto& [p, ext] : base.model.valuation)
      for (const auto& s : ext) skeleton.valuation[p].insert(copy_prefix + s);

    // unravelling with duplicated subtrees
    std::vector<TreeNode> frontier;
    long counter = 0;
    auto fresh = [&]() { return "n" + std::to_string(counter++); };
    root = fresh();
    add_tree_state(root, base.point);
    frontier.push_back({root, base.point, 0});
    while (!frontier.empty()) {
      TreeNode node = frontier.back();
      frontier.pop_back();
      for (const auto& [c, _] : base.model.relations) {
        for (const auto& t : base.model.successors(c, node.underlying)) {
          if (node.depth == depth) {
            // frontier arrows land in the grafted copy
            add_arrow(c, node.id, copy_prefix + t);
          } else {
            for (int i = 0; i < dup; ++i) {
              State kid = fresh();
              add_tree_state(kid, t);
              add_arrow(c, node.id, kid);
              frontier.push_back({kid, t, node.depth + 1});
            }
          }
        }
      }
    }

    const std::size_t k = prunable.size();
    exhaustive = k <= 20;
    if (exhaustive) {
      space = 1ULL << k;
      counter_mask = space;  // pre-decrement yields the full set first
    }
  }

  void add_tree_state(const State& id, const State& underlying) {
    skeleton.states.insert(id);
    for (const auto& [p, ext] : base.model.valuation)
      if (ext.count(underlying)) skeleton.valuation[p].insert(id);
  }

  void add_arrow(const Agent& c, const State& from, const State& to) {
    if (c == agent)
      prunable.emplace_back(from, to);
    else
      skeleton.relations[c].emplace(from, to);
  }

  std::optional<std::vector<bool>> next_mask() {
    const std::size_t k = prunable.size();
    if (exhaustive) {
      if (counter_mask == 0) return std::nullopt;
      --counter_mask;
      std::vector<bool> mask(k);
      for (std::size_t i = 0; i < k; ++i) mask[i] = (counter_mask >> i) & 1;
      return mask;
    }
    // sample distinct masks, full set first
    for (int attempts = 0; attempts < 4096; ++attempts) {
      std::vector<bool> mask(k, true);
      if (tried > 0)
        for (std::size_t i = 0; i < k; ++i) mask[i] = rng() & 1;
      std::string key(k, '0');
      for (std::size_t i = 0; i < k; ++i)
        if (mask[i]) key[i] = '1';
      if (seen_masks.insert(std::move(key)).second) return mask;
    }
    return std::nullopt;
  }

  std::optional<PointedModel> next() {
    for (;;) {
      if (yielded >= max_yield) {
        // would there be more?
        if (exhaustive && counter_mask == 0) return std::nullopt;
        throw BudgetExceeded("refinement enumeration cap of " + std::to_string(max_yield) +
                             " models exceeded");
      }
      auto mask = next_mask();
      if (!mask) return std::nullopt;
      ++tried;
      PointedModel cand;
      cand.point = root;
      cand.model = skeleton;
      auto& arrows = cand.model.relations[agent];
      for (std::size_t i = 0; i < mask->size(); ++i)
        if ((*mask)[i]) arrows.insert(prunable[i]);
      cand = reachable_part(cand);
      std::string key = pointed_model_to_json(cand).dump();
      if (!seen_models.insert(std::move(key)).second) continue;  // pruned an unreachable arrow
      ++yielded;
      return cand;
    }
  }
};

RefinementEnumerator::RefinementEnumerator(const PointedModel& base, Agent a, int depth, int dup,
                                           std::uint64_t max_yield)
    : impl_(std::make_unique<Impl>(base, std::move(a), depth, dup, max_yield)) {}

RefinementEnumerator::~RefinementEnumerator() = default;
RefinementEnumerator::RefinementEnumerator(RefinementEnumerator&&) noexcept = default;
RefinementEnumerator& RefinementEnumerator::operator=(RefinementEnumerator&&) noexcept = default;

std::optional<PointedModel> RefinementEnumerator::next() { return impl_->next(); }

}  // namespace rmlkit
