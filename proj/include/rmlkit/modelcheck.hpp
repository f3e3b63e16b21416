#pragma once

#include <cstdint>
#include <optional>

#include "rmlkit/model.hpp"

namespace rmlkit {

struct ReduceOptions;

// Truth at the point, by bottom-up labelling; each subformula's extension is
// computed once. The formula must be refinement-free; covers are evaluated
// natively.
bool evaluate(const PointedModel& pm, const Formula& f);

// Truth for the full language: compile refinement quantifiers away first.
bool evaluate_rml(const PointedModel& pm, const Formula& f);
bool evaluate_rml(const PointedModel& pm, const Formula& f, const ReduceOptions& opts);

// Bounded stream of a-refinements of a pointed model: unravel to `depth`
// (grafting the original model below the frontier so nothing is lost),
// duplicate each subtree up to `dup` times, then enumerate prunings of the
// a-arrows rooted in the unravelled part. Every yielded model is a genuine
// a-refinement; the stream is sound but not exhaustive. `max_yield` caps the
// number of models produced; if the pruning space is larger, the call after
// the cap throws BudgetExceeded.
class RefinementEnumerator {
 public:
  RefinementEnumerator(const PointedModel& base, Agent a, int depth, int dup,
                       std::uint64_t max_yield);
  ~RefinementEnumerator();
  RefinementEnumerator(RefinementEnumerator&&) noexcept;
  RefinementEnumerator& operator=(RefinementEnumerator&&) noexcept;

  std::optional<PointedModel> next();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rmlkit
