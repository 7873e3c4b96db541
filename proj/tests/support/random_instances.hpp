#pragma once

#include "mtlloop/formula.hpp"
#include "mtlloop/predicate.hpp"
#include "mtlloop/rng.hpp"
#include "mtlloop/trace.hpp"

// Generators for the randomized suites: predicate maps with a compatible
// metric, formulas of bounded depth, and traces on exact rational timestamps.
namespace testgen {

struct RandomContext {
  mtlloop::PredicateMap pmap;
  mtlloop::Metric metric;
  std::vector<std::string> atoms;
};

/// Random diagonal-metric predicate map (halfspaces and boxes).
RandomContext random_context(mtlloop::Rng& rng, int dim, int n_predicates);

/// Random formula of at most the given operator depth. Interval bounds are
/// small exact rationals; an unbounded upper bound appears occasionally when
/// `allow_unbounded` is set.
mtlloop::FormulaPtr random_formula(mtlloop::Rng& rng, const std::vector<std::string>& atoms, int max_depth,
                                   bool allow_unbounded = true);

/// Random trace: 1..max_len samples, exact rational timestamps with varied
/// steps, states uniform in [lo, hi].
mtlloop::TimedTrace random_trace(mtlloop::Rng& rng, int dim, std::size_t max_len, double lo, double hi);

/// The same trace with every state perturbed by a vector of metric norm at
/// most `radius`.
mtlloop::TimedTrace perturb_trace(mtlloop::Rng& rng, const mtlloop::TimedTrace& trace,
                                  const mtlloop::Metric& metric, double radius);

}  // namespace testgen
