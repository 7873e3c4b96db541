#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtlloop/formula.hpp"
#include "mtlloop/predicate.hpp"
#include "mtlloop/trace.hpp"

namespace mtlloop {

/// Sequential reach-avoid specification: a nested Eventually chain
/// F_{I1}(p1 & F_{I2}(p2 & ...)) plus Always-of-negation safety conjuncts.
struct SequentialSpec {
  struct Stage {
    std::string predicate;
    Interval interval;
  };
  std::vector<Stage> chain;   // n >= 1
  std::vector<Stage> safety;  // G_I !p conjuncts

  FormulaPtr to_formula() const;
};

/// Extract the sequential fragment from a formula; rejects anything else.
SequentialSpec parse_sequential(const FormulaPtr& phi);

/// Positive Boolean transition formula:
/// true | false | or | and | location | clock constraint | reset.
struct TransitionFormula {
  enum class Kind { True, False, Or, And, Location, ClockConstraint, Reset };
  Kind kind;
  std::string location;                           // Location
  std::string relation;                           // ClockConstraint: one of < <= > >=
  Rat bound;                                      // ClockConstraint
  std::vector<std::shared_ptr<TransitionFormula>> children;

  std::string to_string() const;

  static std::shared_ptr<TransitionFormula> constant(bool value);
  static std::shared_ptr<TransitionFormula> loc(std::string name);
  static std::shared_ptr<TransitionFormula> clock(std::string relation, Rat bound);
  static std::shared_ptr<TransitionFormula> reset(std::shared_ptr<TransitionFormula> child);
  static std::shared_ptr<TransitionFormula> disj(std::shared_ptr<TransitionFormula> a, std::shared_ptr<TransitionFormula> b);
  static std::shared_ptr<TransitionFormula> conj(std::shared_ptr<TransitionFormula> a, std::shared_ptr<TransitionFormula> b);
};

/// One-clock alternating timed automaton over the spec's atoms.
struct Ocata {
  std::vector<std::string> atoms;
  std::vector<std::string> locations;
  std::string initial;
  std::vector<std::string> accepting;
  struct Entry {
    std::string location;
    std::string atom;
    bool atom_value;
    std::shared_ptr<TransitionFormula> formula;
  };
  std::vector<Entry> transitions;

  std::string dump() const;
};

/// Progress locations l_0..l_n plus a safety monitor location.
Ocata build_ocata(const SequentialSpec& spec);

struct LocationState {
  std::size_t location = 0;  // progress index, 0..n
  Rat clock;                 // time since entering the location
  Rat entry_time;
};

struct TransitionEvent {
  std::size_t step;
  std::size_t to_location;
  double predicate_margin;
  double time_slack;  // +inf for unbounded deadlines
  double margin;      // min of the two
};

struct RunRecord {
  std::vector<LocationState> timeline;        // one per sample (earliest-firing run)
  std::vector<TransitionEvent> transitions;
  std::vector<double> step_margins;           // per-step |signed distance| to the pending region
  std::optional<std::size_t> deadline_violation_step;
  std::vector<std::size_t> safety_violation_steps;
  bool reached_final = false;  // over all nondeterministic firing choices
  bool accepted = false;       // reached_final and no safety violation
  double min_transition_margin = 0.0;
};

/// Deterministic run over q. The reported timeline fires each transition at
/// the earliest admissible sample; acceptance additionally explores late
/// firings so it coincides with the Boolean semantics of the formula.
RunRecord track_location(const SequentialSpec& spec, const TimedTrace& q,
                         const PredicateMap& pmap, const Metric& metric);

}  // namespace mtlloop
