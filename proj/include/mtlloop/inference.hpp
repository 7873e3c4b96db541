#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtlloop/demos.hpp"
#include "mtlloop/formula.hpp"
#include "mtlloop/scenario.hpp"

namespace mtlloop {

/// One past-time decision primitive: Once/Historically over a window of a
/// single environment feature compared against a threshold.
struct Primitive {
  enum class Op { Once, Historically };
  enum class Cmp { Ge, Le };

  int feature;
  Op op;
  Cmp cmp;
  Interval window;
  double threshold;

  /// Total order used for deterministic tie-breaking.
  bool operator<(const Primitive& o) const;
  bool operator==(const Primitive& o) const;

  /// Concrete-syntax text over the named feature predicate.
  std::string text(const std::string& atom) const;
};

struct PrimitiveGrid {
  std::vector<Interval> windows;
  std::vector<std::vector<double>> thresholds;  // per feature, ascending
  int max_depth;
};

/// Threshold candidates are midpoints of consecutive distinct observed
/// feature values; windows come from the scenario.
PrimitiveGrid build_grid(const ScenarioConfig& scenario, const DemonstrationSet& demos);

/// One training sample: a point on a demonstration's feature trajectory
/// together with the input the demonstrator chose there.
struct LocationSample {
  std::size_t demo;
  std::size_t step;        // plant step k
  std::size_t h_index;     // index into the demo's h trace (history offset applied)
  std::size_t label;       // index into U
};

/// Samples grouped by the automaton location active when they were taken.
struct LocationSamples {
  std::vector<std::vector<LocationSample>> by_location;  // size n+1
  std::vector<std::size_t> uncovered;                    // locations never visited
};

LocationSamples collect_location_samples(const DemonstrationSet& demos, const ScenarioConfig& scenario);

/// A leaf of the decision tree: path formula, chosen input, training margin.
struct Branch {
  std::vector<std::pair<Primitive, bool>> path;  // (primitive, negated)
  FormulaPtr formula;                            // over the classifier's feature predicates
  std::size_t input;                             // index into U
  double margin;                                 // min routed robustness; +inf for the bare `true` leaf
};

/// Nominal operating point recorded from one demonstration: the verifier
/// perturbs around these, so the classifier file carries them.
struct NominalRun {
  Eigen::VectorXd x0;
  TimedTrace h;
};

/// Per-location ordered branch lists with the certified radii. Branch
/// formulas are pairwise exclusive and jointly exhaustive by construction.
struct Classifier {
  explicit Classifier(int feature_dim) : feature_predicates(feature_dim) {}

  std::vector<std::vector<Branch>> locations;  // index = progress location
  std::vector<std::size_t> sample_counts;
  std::vector<std::size_t> uncovered;
  PredicateMap feature_predicates;  // atoms referenced by branch formulas
  std::vector<Primitive> primitives;
  std::vector<NominalRun> nominal;  // one per demonstration
  double epsilon;
  double delta_c = 0.0;
  double delta_e = 0.0;
  double margin = 0.0;   // min branch margin over all locations
  double rho_min = 0.0;  // min demonstration robustness
  std::string spec_text;
  std::string fingerprint;
  bool exclusivity_structural = true;  // false for foreign classifier files

  const std::vector<Branch>& branches_at(std::size_t location) const;

  /// Index of the unique branch whose formula holds on h at sample k.
  /// Asserts exactly one fires.
  std::size_t select_branch(std::size_t location, const TimedTrace& h, std::size_t k,
                            const Metric& feature_metric, double* robustness = nullptr) const;

  /// (number of branches whose formula holds, index of the first).
  std::pair<std::size_t, std::size_t> route_count(std::size_t location, const TimedTrace& h,
                                                  std::size_t k, const Metric& feature_metric) const;

  /// Name of the halfspace atom for a primitive's comparison, registering it
  /// on first use.
  std::string atom_for(const Primitive& p);
};

/// Grow the per-location decision tree over grid primitives. Splits maximize
/// Gini impurity reduction over input labels; leaves must be coverable by a
/// single input within epsilon.
std::vector<Branch> infer_location_classifier(const std::vector<LocationSample>& samples,
                                              const DemonstrationSet& demos,
                                              const PrimitiveGrid& grid, const ScenarioConfig& scenario,
                                              Classifier& classifier);

/// Full inference pipeline: location samples, per-location trees, radii.
Classifier infer_classifier(const DemonstrationSet& demos, const ScenarioConfig& scenario);

struct RadiiReport {
  double rho_min;
  double margin;
  double alpha;
  double delta_c;
  double delta_e;
  double delta_c_only;  // Pareto endpoint with delta_e = 0
  double delta_e_only;  // Pareto endpoint with delta_c = 0
};

/// Maximal (delta_c, delta_e) on the configured trade-off ray subject to
/// L_x*alpha*delta_c + L_h*delta_e <= rho_min and delta_e <= margin.
RadiiReport compute_radii(Classifier& classifier, const DemonstrationSet& demos, const ScenarioConfig& scenario);

struct ConditionReport {
  bool requirement = false;   // (1) spec still satisfied under perturbation
  bool soundness = false;     // (2) selected input within epsilon of recorded
  bool coverage = false;      // (3) some branch fires at every step
  bool exclusivity = false;   // (4) exactly one branch fires
  std::size_t samples = 0;
  std::string counterexample;  // first failure, if any

  bool all() const { return requirement && soundness && coverage && exclusivity; }
};

/// Sampled check of the four closed-loop conditions at `radius_factor` times
/// the certified radii (exclusivity is structural, asserted per sample).
ConditionReport check_conditions(const Classifier& classifier, const DemonstrationSet& demos,
                                 const ScenarioConfig& scenario, std::size_t n_perturb,
                                 std::uint64_t seed, double radius_factor = 0.99);

/// Classifier file round trip (structured text, stable key order).
std::string classifier_to_text(const Classifier& classifier);
void save_classifier(const std::string& path, const Classifier& classifier);
Classifier load_classifier(const std::string& path, const ScenarioConfig& scenario);

}  // namespace mtlloop
