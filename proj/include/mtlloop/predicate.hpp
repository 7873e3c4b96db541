#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>

#include "mtlloop/errors.hpp"
#include "mtlloop/metric.hpp"

namespace mtlloop {

/// Atomic predicate over the signal space: either a closed halfspace
/// {s : w.s >= c} or a closed axis-aligned box (bounds may be +-inf).
struct AtomicPredicate {
  enum class Shape { Halfspace, Box };

  std::string name;
  Shape shape;

  // Halfspace
  Eigen::VectorXd w;
  double c = 0.0;

  // Box
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static AtomicPredicate halfspace(std::string name, Eigen::VectorXd w, double c);
  static AtomicPredicate box(std::string name, Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const { return static_cast<int>(shape == Shape::Halfspace ? w.size() : lower.size()); }

  /// Exact set membership (closed sets, boundary included).
  bool contains(const Eigen::VectorXd& point) const;
};

class PredicateMap {
public:
  explicit PredicateMap(int dim) : dim_(dim) {}

  void add(AtomicPredicate pred);
  bool has(const std::string& name) const { return entries_.count(name) > 0; }
  const AtomicPredicate& get(const std::string& name) const;
  int dim() const { return dim_; }
  const std::map<std::string, AtomicPredicate>& entries() const { return entries_; }

private:
  int dim_;
  std::map<std::string, AtomicPredicate> entries_;
};

/// Signed distance Dist_d(point, set): depth inside (positive), minus the
/// distance to the set outside (negative). Boxes require a diagonal metric.
double signed_distance(const Eigen::VectorXd& point, const AtomicPredicate& pred, const Metric& metric);

}  // namespace mtlloop
