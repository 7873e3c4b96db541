#include "mtlloop/inference.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

#include "mtlloop/rng.hpp"
#include "mtlloop/semantics.hpp"
#include "mtlloop/trace_io.hpp"

namespace mtlloop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool Primitive::operator<(const Primitive& o) const {
  if (feature != o.feature) return feature < o.feature;
  if (op != o.op) return op < o.op;
  if (window.lo != o.window.lo) return window.lo < o.window.lo;
  if (*window.hi != *o.window.hi) return *window.hi < *o.window.hi;
  if (cmp != o.cmp) return cmp < o.cmp;
  return threshold < o.threshold;
}

bool Primitive::operator==(const Primitive& o) const {
  return feature == o.feature && op == o.op && cmp == o.cmp && window == o.window && threshold == o.threshold;
}

std::string Primitive::text(const std::string& atom) const {
  return std::string(op == Op::Once ? "P" : "H") + window.to_string() + " " + atom;
}

PrimitiveGrid build_grid(const ScenarioConfig& scenario, const DemonstrationSet& demos) {
  PrimitiveGrid grid;
  grid.windows = scenario.grid_windows;
  grid.max_depth = scenario.grid_max_depth;
  int dim = scenario.feature_metric.dim();
  grid.thresholds.resize(dim);
  for (int f = 0; f < dim; ++f) {
    std::set<double> values;
    for (const auto& demo : demos.demos) {
      for (std::size_t k = 0; k < demo.h.size(); ++k) values.insert(demo.h.state(k)(f));
    }
    std::vector<double> sorted(values.begin(), values.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      grid.thresholds[f].push_back(sorted[i] + 0.5 * (sorted[i + 1] - sorted[i]));
    }
  }
  return grid;
}

LocationSamples collect_location_samples(const DemonstrationSet& demos, const ScenarioConfig& scenario) {
  LocationSamples out;
  out.by_location.resize(scenario.seq.chain.size() + 1);
  for (std::size_t i = 0; i < demos.demos.size(); ++i) {
    const Demonstration& demo = demos.demos[i];
    RunRecord run = track_location(scenario.seq, demo.q, scenario.predicates, scenario.q_metric);
    if (!run.accepted) {
      throw Error("demonstration " + std::to_string(i) + " run violates the spec despite positive robustness");
    }
    std::size_t zero = demo.h.first_nonnegative_index();
    for (std::size_t k = 0; k < demo.inputs.size(); ++k) {
      std::size_t loc = run.timeline[k].location;
      std::size_t label = scenario.sys.input_index(demo.inputs[k]);
      out.by_location[loc].push_back({i, k, k + zero, label});
    }
  }
  for (std::size_t loc = 0; loc < out.by_location.size(); ++loc) {
    if (out.by_location[loc].empty()) out.uncovered.push_back(loc);
  }
  return out;
}

namespace {

// Robustness of a primitive on one sample, arithmetic-identical to
// eval_robust on the equivalent formula: the window extremum feeds the same
// halfspace signed-distance expression.
class PrimitiveEvaluator {
public:
  PrimitiveEvaluator(const DemonstrationSet& demos, const ScenarioConfig& scenario,
                     const std::vector<LocationSample>& samples, const std::vector<Interval>& windows)
      : scenario_(scenario) {
    int dim = scenario.feature_metric.dim();
    dual_ge_.resize(dim);
    dual_le_.resize(dim);
    for (int f = 0; f < dim; ++f) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      e(f) = 1.0;
      dual_ge_[f] = scenario.feature_metric.dual_norm(e);
      dual_le_[f] = scenario.feature_metric.dual_norm(-e);
    }
    // Per (sample, window, feature): min and max of the feature over the
    // past window.
    extrema_.resize(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const Demonstration& demo = demos.demos[samples[s].demo];
      const TimedTrace& h = demo.h;
      std::size_t k = samples[s].h_index;
      extrema_[s].resize(windows.size());
      for (std::size_t w = 0; w < windows.size(); ++w) {
        Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, kInf);
        Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, -kInf);
        bool any = false;
        for (std::size_t j = 0; j < h.size(); ++j) {
          if (!windows[w].contains(h.time(k) - h.time(j))) continue;
          any = true;
          lo = lo.cwiseMin(h.state(j));
          hi = hi.cwiseMax(h.state(j));
        }
        extrema_[s][w] = {lo, hi, any};
      }
    }
  }

  double robustness(std::size_t sample, std::size_t window_index, const Primitive& p) const {
    const auto& [lo, hi, any] = extrema_[sample][window_index];
    if (!any) return p.op == Primitive::Op::Once ? -kInf : kInf;
    if (p.cmp == Primitive::Cmp::Ge) {
      double ext = p.op == Primitive::Op::Once ? hi(p.feature) : lo(p.feature);
      return (ext - p.threshold) / dual_ge_[p.feature];
    }
    double ext = p.op == Primitive::Op::Once ? lo(p.feature) : hi(p.feature);
    return (p.threshold - ext) / dual_le_[p.feature];
  }

private:
  const ScenarioConfig& scenario_;
  std::vector<double> dual_ge_;
  std::vector<double> dual_le_;
  std::vector<std::vector<std::tuple<Eigen::VectorXd, Eigen::VectorXd, bool>>> extrema_;
};

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t c : counts) {
    double p = static_cast<double>(c) / static_cast<double>(total);
    sum += p * p;
  }
  return 1.0 - sum;
}

struct TreeBuilder {
  const std::vector<LocationSample>& samples;
  const DemonstrationSet& demos;
  const PrimitiveGrid& grid;
  const ScenarioConfig& scenario;
  const PrimitiveEvaluator& eval;
  std::size_t n_classes;

  // epsilon-validity: some u in U covers every label in the node.
  std::optional<std::size_t> covering_input(const std::vector<std::size_t>& node) const {
    const auto& inputs = scenario.sys.inputs;
    for (std::size_t u = 0; u < inputs.size(); ++u) {
      double worst = 0.0;
      for (std::size_t s : node) {
        worst = std::max(worst, (inputs[samples[s].label] - inputs[u]).norm());
      }
      if (worst <= scenario.epsilon) return u;
    }
    return std::nullopt;
  }

  std::string describe_conflict(const std::vector<std::size_t>& node) const {
    std::ostringstream out;
    out << "conflicting samples:";
    std::size_t shown = 0;
    for (std::size_t a : node) {
      for (std::size_t b : node) {
        if (a >= b) continue;
        double d = (scenario.sys.inputs[samples[a].label] - scenario.sys.inputs[samples[b].label]).norm();
        if (d > scenario.epsilon && shown < 4) {
          out << " (demo " << samples[a].demo << " step " << samples[a].step << " vs demo "
              << samples[b].demo << " step " << samples[b].step << ", input distance " << format_double(d) << ")";
          ++shown;
        }
      }
    }
    return out.str();
  }

  void grow(const std::vector<std::size_t>& node, int depth,
            std::vector<std::pair<Primitive, bool>>& path, std::vector<Branch>& out,
            Classifier& classifier) {
    if (auto u = covering_input(node)) {
      Branch branch;
      branch.path = path;
      branch.input = *u;
      branch.margin = kInf;
      branch.formula = assemble(path, classifier);
      for (std::size_t s : node) {
        double rob = path_robustness(path, s);
        if (rob == 0.0) {
          throw Error("zero margin: branch formula evaluates to exactly 0 on demo " +
                      std::to_string(samples[s].demo) + " step " + std::to_string(samples[s].step));
        }
        branch.margin = std::min(branch.margin, rob);
      }
      out.push_back(std::move(branch));
      return;
    }
    if (depth >= grid.max_depth) {
      throw Error("inseparable leaf at max depth " + std::to_string(grid.max_depth) + "; " + describe_conflict(node));
    }

    std::vector<std::size_t> parent_counts(n_classes, 0);
    for (std::size_t s : node) ++parent_counts[samples[s].label];
    double parent_gini = gini(parent_counts, node.size());

    std::optional<Primitive> best;
    std::size_t best_window = 0;
    double best_reduction = 0.0;
    double best_min_abs = -1.0;

    for (int f = 0; f < scenario.feature_metric.dim(); ++f) {
      for (Primitive::Op op : {Primitive::Op::Once, Primitive::Op::Historically}) {
        for (std::size_t w = 0; w < grid.windows.size(); ++w) {
          for (Primitive::Cmp cmp : {Primitive::Cmp::Ge, Primitive::Cmp::Le}) {
            for (double threshold : grid.thresholds[f]) {
              Primitive p{f, op, cmp, grid.windows[w], threshold};
              std::vector<std::size_t> tcounts(n_classes, 0), fcounts(n_classes, 0);
              std::size_t tn = 0, fn = 0;
              double min_abs = kInf;
              for (std::size_t s : node) {
                double rob = eval.robustness(s, w, p);
                min_abs = std::min(min_abs, std::abs(rob));
                if (rob >= 0.0) {
                  ++tcounts[samples[s].label];
                  ++tn;
                } else {
                  ++fcounts[samples[s].label];
                  ++fn;
                }
              }
              if (tn == 0 || fn == 0) continue;
              double reduction = parent_gini -
                                 (static_cast<double>(tn) * gini(tcounts, tn) +
                                  static_cast<double>(fn) * gini(fcounts, fn)) /
                                     static_cast<double>(node.size());
              bool better = false;
              if (reduction > best_reduction) better = true;
              else if (best && reduction == best_reduction && min_abs > best_min_abs) better = true;
              // equal on both criteria: the loop order is the lexicographic
              // order, so the incumbent wins
              if (better) {
                best = p;
                best_window = w;
                best_reduction = reduction;
                best_min_abs = min_abs;
              }
            }
          }
        }
      }
    }

    if (!best) {
      throw Error("inseparable leaf: no primitive separates the samples; " + describe_conflict(node));
    }

    std::vector<std::size_t> tnode, fnode;
    for (std::size_t s : node) {
      (eval.robustness(s, best_window, *best) >= 0.0 ? tnode : fnode).push_back(s);
    }
    path.emplace_back(*best, false);
    grow(tnode, depth + 1, path, out, classifier);
    path.back().second = true;
    grow(fnode, depth + 1, path, out, classifier);
    path.pop_back();
  }

  double path_robustness(const std::vector<std::pair<Primitive, bool>>& path, std::size_t s) const {
    double rob = kInf;
    for (const auto& [p, negated] : path) {
      std::size_t w = window_index(p.window);
      double r = eval.robustness(s, w, p);
      rob = std::min(rob, negated ? -r : r);
    }
    return rob;
  }

  std::size_t window_index(const Interval& iv) const {
    for (std::size_t w = 0; w < grid.windows.size(); ++w) {
      if (grid.windows[w] == iv) return w;
    }
    throw Error("primitive window not in grid");
  }

  FormulaPtr assemble(const std::vector<std::pair<Primitive, bool>>& path, Classifier& classifier) const {
    FormulaPtr f = Formula::make_true();
    bool first = true;
    for (const auto& [p, negated] : path) {
      std::string atom = classifier.atom_for(p);
      FormulaPtr node = p.op == Primitive::Op::Once ? Formula::once(p.window, Formula::atom(atom))
                                                    : Formula::historically(p.window, Formula::atom(atom));
      if (negated) node = Formula::negation(node);
      f = first ? node : Formula::conjunction(f, node);
      first = false;
    }
    return f;
  }
};

}  // namespace

const std::vector<Branch>& Classifier::branches_at(std::size_t location) const {
  if (location >= locations.size() || locations[location].empty()) {
    throw Error("location " + std::to_string(location) + " not covered by classifier");
  }
  return locations[location];
}

std::string Classifier::atom_for(const Primitive& p) {
  for (std::size_t i = 0; i < primitives.size(); ++i) {
    if (primitives[i].feature == p.feature && primitives[i].cmp == p.cmp && primitives[i].threshold == p.threshold) {
      return "p" + std::to_string(i);
    }
  }
  // Register the underlying halfspace predicate over the feature space.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(feature_predicates.dim());
  double c;
  if (p.cmp == Primitive::Cmp::Ge) {
    w(p.feature) = 1.0;
    c = p.threshold;
  } else {
    w(p.feature) = -1.0;
    c = -p.threshold;
  }
  std::string name = "p" + std::to_string(primitives.size());
  feature_predicates.add(AtomicPredicate::halfspace(name, std::move(w), c));
  primitives.push_back(p);
  return name;
}

std::pair<std::size_t, std::size_t> Classifier::route_count(std::size_t location, const TimedTrace& h,
                                                            std::size_t k, const Metric& feature_metric) const {
  const auto& branches = branches_at(location);
  std::size_t count = 0;
  std::size_t index = 0;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    if (eval_boolean(*branches[b].formula, h, k, feature_predicates, feature_metric)) {
      if (count == 0) index = b;
      ++count;
    }
  }
  return {count, index};
}

std::size_t Classifier::select_branch(std::size_t location, const TimedTrace& h, std::size_t k,
                                      const Metric& feature_metric, double* robustness) const {
  auto [count, index] = route_count(location, h, k, feature_metric);
  if (count != 1) {
    throw Error("classifier corruption: " + std::to_string(count) + " branches hold at location " +
                std::to_string(location) + ", sample " + std::to_string(k));
  }
  if (robustness) {
    *robustness = eval_robust(*branches_at(location)[index].formula, h, k, feature_predicates, feature_metric);
  }
  return index;
}

std::vector<Branch> infer_location_classifier(const std::vector<LocationSample>& samples,
                                              const DemonstrationSet& demos,
                                              const PrimitiveGrid& grid, const ScenarioConfig& scenario,
                                              Classifier& classifier) {
  if (samples.empty()) throw Error("infer_location_classifier: empty sample set");
  PrimitiveEvaluator eval(demos, scenario, samples, grid.windows);
  TreeBuilder builder{samples, demos, grid, scenario, eval, scenario.sys.inputs.size()};
  std::vector<std::size_t> root(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) root[i] = i;
  std::vector<std::pair<Primitive, bool>> path;
  std::vector<Branch> out;
  builder.grow(root, 0, path, out, classifier);
  return out;
}

Classifier infer_classifier(const DemonstrationSet& demos, const ScenarioConfig& scenario) {
  if (demos.demos.empty()) throw Error("no demonstrations");
  Classifier classifier(scenario.feature_metric.dim());
  classifier.epsilon = scenario.epsilon;
  classifier.spec_text = scenario.spec_text;
  classifier.fingerprint = scenario.fingerprint;
  for (const auto& demo : demos.demos) {
    classifier.nominal.push_back(NominalRun{demo.agent.state(0), demo.h});
  }

  PrimitiveGrid grid = build_grid(scenario, demos);
  LocationSamples samples = collect_location_samples(demos, scenario);
  classifier.uncovered = samples.uncovered;
  classifier.locations.resize(samples.by_location.size());
  classifier.sample_counts.resize(samples.by_location.size(), 0);
  for (std::size_t loc = 0; loc < samples.by_location.size(); ++loc) {
    classifier.sample_counts[loc] = samples.by_location[loc].size();
    if (!samples.by_location[loc].empty()) {
      classifier.locations[loc] = infer_location_classifier(samples.by_location[loc], demos, grid, scenario, classifier);
    }
  }
  compute_radii(classifier, demos, scenario);
  return classifier;
}

RadiiReport compute_radii(Classifier& classifier, const DemonstrationSet& demos, const ScenarioConfig& scenario) {
  double rho_min = kInf;
  for (const auto& demo : demos.demos) rho_min = std::min(rho_min, demo.robustness);
  double margin = kInf;
  for (const auto& loc : classifier.locations) {
    for (const auto& b : loc) margin = std::min(margin, b.margin);
  }
  if (!(rho_min > 0.0)) throw Error("no positive radii: minimum demonstration robustness is " + format_double(rho_min));
  if (!(margin > 0.0)) throw Error("no positive radii: minimum branch margin is " + format_double(margin));

  double alpha = state_propagation_bound(scenario.sys, scenario.state_metric, scenario.horizon);
  double cx = scenario.lx * alpha;

  RadiiReport report;
  report.rho_min = rho_min;
  report.margin = margin;
  report.alpha = alpha;
  report.delta_c_only = cx > 0.0 ? rho_min / cx : kInf;
  report.delta_e_only = std::min(margin, scenario.lh > 0.0 ? rho_min / scenario.lh : kInf);
  if (scenario.tradeoff == "equal") {
    double d = std::min(margin, rho_min / (cx + scenario.lh));
    report.delta_c = d;
    report.delta_e = d;
  } else {
    double ratio = scenario.tradeoff_ratio;  // delta_c : delta_e
    double de = std::min(margin, rho_min / (cx * ratio + scenario.lh));
    report.delta_c = ratio * de;
    report.delta_e = de;
  }
  classifier.delta_c = report.delta_c;
  classifier.delta_e = report.delta_e;
  classifier.margin = margin;
  classifier.rho_min = rho_min;
  if (!(report.delta_c > 0.0 && report.delta_e > 0.0)) {
    throw Error("no positive radii: certified pair is (" + format_double(report.delta_c) + ", " +
                format_double(report.delta_e) + ")");
  }
  return report;
}

ConditionReport check_conditions(const Classifier& classifier, const DemonstrationSet& demos,
                                 const ScenarioConfig& scenario, std::size_t n_perturb,
                                 std::uint64_t seed, double radius_factor) {
  ConditionReport report;
  report.requirement = report.soundness = report.coverage = report.exclusivity = true;

  std::vector<RunRecord> nominal_runs;
  nominal_runs.reserve(demos.demos.size());
  for (const auto& demo : demos.demos) {
    nominal_runs.push_back(track_location(scenario.seq, demo.q, scenario.predicates, scenario.q_metric));
  }

  double rc = radius_factor * classifier.delta_c;
  double re = radius_factor * classifier.delta_e;
  Rng base(seed);
  for (std::size_t s = 0; s < n_perturb; ++s) {
    Rng rng = base.fork(s);
    std::size_t i = s % demos.demos.size();
    const Demonstration& demo = demos.demos[i];
    std::size_t zero = demo.h.first_nonnegative_index();

    Eigen::VectorXd x0 = demo.agent.state(0) + rng.in_metric_ball(scenario.state_metric, rc);
    TimedTrace agent = simulate_open_loop(scenario.sys, x0, demo.inputs, scenario.horizon, Rat(0), scenario.period);
    Eigen::MatrixXd hs = demo.h.states();
    for (Eigen::Index col = 0; col < hs.cols(); ++col) {
      hs.col(col) += rng.in_metric_ball(scenario.feature_metric, re);
    }
    TimedTrace h_pert(demo.h.times(), std::move(hs));
    TimedTrace q = build_q_trace(agent, h_pert, scenario.qhat);

    if (!eval_boolean(*scenario.spec, q, 0, scenario.predicates, scenario.q_metric)) {
      report.requirement = false;
      if (report.counterexample.empty()) {
        report.counterexample = "condition 1: demo " + std::to_string(i) + " sample " + std::to_string(s) +
                                " violates the spec under perturbation";
      }
    }
    for (std::size_t k = 0; k < demo.inputs.size(); ++k) {
      std::size_t loc = nominal_runs[i].timeline[k].location;
      auto [count, index] = classifier.route_count(loc, h_pert, k + zero, scenario.feature_metric);
      if (count == 0) {
        report.coverage = false;
        if (report.counterexample.empty()) {
          report.counterexample = "condition 3: no branch fires at demo " + std::to_string(i) + " step " +
                                  std::to_string(k) + " sample " + std::to_string(s);
        }
        continue;
      }
      if (count > 1) {
        report.exclusivity = false;
        if (report.counterexample.empty()) {
          report.counterexample = "condition 4: " + std::to_string(count) + " branches fire at demo " +
                                  std::to_string(i) + " step " + std::to_string(k);
        }
      }
      const Branch& branch = classifier.branches_at(loc)[index];
      double d = (demo.inputs[k] - scenario.sys.inputs[branch.input]).norm();
      if (d > classifier.epsilon) {
        report.soundness = false;
        if (report.counterexample.empty()) {
          report.counterexample = "condition 2: selected input " + format_double(d) +
                                  " away from the recorded input at demo " + std::to_string(i) + " step " +
                                  std::to_string(k) + " sample " + std::to_string(s);
        }
      }
    }
    ++report.samples;
  }
  return report;
}

}  // namespace mtlloop
