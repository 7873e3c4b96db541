#pragma once

#include <string>

#include "mtlloop/formula.hpp"
#include "mtlloop/predicate.hpp"

namespace mtlloop {

/// Parse the concrete MTL syntax. Atom names are resolved against `pmap`
/// (unknown names are rejected). Precedence: prefix operators bind tightest,
/// then infix U/S (right associative), then &, then |.
FormulaPtr parse_formula(const std::string& text, const PredicateMap& pmap);

}  // namespace mtlloop
