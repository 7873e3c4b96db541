#pragma once

#include "mtlloop/formula.hpp"
#include "mtlloop/predicate.hpp"
#include "mtlloop/trace.hpp"

namespace mtlloop {

/// Boolean MTL semantics at sample k. Finite-trace convention: temporal
/// windows quantify over the available samples only; an empty existential
/// window is false, an empty universal window is true.
bool eval_boolean(const Formula& phi, const TimedTrace& trace, std::size_t k,
                  const PredicateMap& pmap, const Metric& metric);

/// Robust MTL semantics at sample k, memoized over (subformula, sample).
/// max over an empty window is -inf, min over an empty window is +inf.
double eval_robust(const Formula& phi, const TimedTrace& trace, std::size_t k,
                   const PredicateMap& pmap, const Metric& metric);

/// Naive direct-definition evaluator (no memoization, derived operators
/// expanded through Until/Since). Test oracle; agrees with eval_robust
/// exactly because both take the same arithmetic path.
double eval_robust_oracle(const Formula& phi, const TimedTrace& trace, std::size_t k,
                          const PredicateMap& pmap, const Metric& metric);

/// Necessary history length of a past-time formula (atoms and Boolean
/// connectives allowed). Rejects future operators and unbounded windows.
Rat necessary_length(const Formula& psi);

/// Future-direction dual of necessary_length: how much trace beyond t(k)
/// a formula can inspect. Rejects past operators and unbounded windows.
Rat required_horizon(const Formula& phi);

}  // namespace mtlloop
