#pragma once

#include <set>
#include <string>

#include "rmlkit/formula.hpp"

namespace rmlkit {

// Parse formula text. Bare `E` / `A` (and `exists` / `forall`) quantify over
// every agent mentioned in the formula plus `extra_agents`, expanded into a
// name-ordered quantifier sequence.
Formula parse(const std::string& text, const std::set<Agent>& extra_agents = {});

}  // namespace rmlkit
