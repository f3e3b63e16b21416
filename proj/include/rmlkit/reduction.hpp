#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rmlkit/model.hpp"
#include "rmlkit/normal_forms.hpp"

namespace rmlkit {

// One rewrite during quantifier elimination; before and after are equivalent.
struct ReductionStep {
  std::string rule;  // RProp, RK, RKmulti, RKconj, OrSplit, PropFactor, DNF
  Formula before;
  Formula after;
};

struct ReductionTrace {
  std::vector<ReductionStep> steps;
};

nlohmann::json trace_to_json(const ReductionTrace& trace);

struct ReduceOptions {
  long max_nodes = 1'000'000;  // AST node budget for intermediate formulas
};

struct ReduceResult {
  Formula formula;
  ReductionTrace trace;
};

// Compile one existential refinement quantifier with a refinement-free body
// into plain modal logic, through the disjunctive form of the body.
Formula eliminate_innermost(const Formula& some_ref, ReductionTrace* trace = nullptr,
                            const ReduceOptions& opts = {});

// Eliminate every refinement quantifier, innermost first; universal
// quantifiers go through the existential dual. Total: the result is
// refinement-free and equivalent to the input.
ReduceResult reduce(const Formula& f, const ReduceOptions& opts = {});

// If the pointed model satisfies E_a psi, build a pointed model that is an
// a-refinement of it and satisfies psi; otherwise nothing. psi must be
// refinement-free.
std::optional<PointedModel> synthesize_witness(const PointedModel& ms, const Agent& a,
                                               const Formula& psi, const ReduceOptions& opts = {});

}  // namespace rmlkit
