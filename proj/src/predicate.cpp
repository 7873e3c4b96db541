#include "mtlloop/predicate.hpp"

#include <cmath>
#include <limits>

namespace mtlloop {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

AtomicPredicate AtomicPredicate::halfspace(std::string name, Eigen::VectorXd w, double c) {
  if (w.norm() == 0.0) throw Error("halfspace predicate '" + name + "' has zero weight vector");
  AtomicPredicate p;
  p.name = std::move(name);
  p.shape = Shape::Halfspace;
  p.w = std::move(w);
  p.c = c;
  return p;
}

AtomicPredicate AtomicPredicate::box(std::string name, Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) throw DimensionError("box predicate '" + name + "' with ragged bounds");
  for (int i = 0; i < lower.size(); ++i) {
    if (!(lower(i) <= upper(i))) throw Error("box predicate '" + name + "' has lower > upper on axis " + std::to_string(i));
  }
  AtomicPredicate p;
  p.name = std::move(name);
  p.shape = Shape::Box;
  p.lower = std::move(lower);
  p.upper = std::move(upper);
  return p;
}

bool AtomicPredicate::contains(const Eigen::VectorXd& point) const {
  if (point.size() != dim()) throw DimensionError("predicate '" + name + "' dimension mismatch");
  if (shape == Shape::Halfspace) return w.dot(point) >= c;
  for (int i = 0; i < point.size(); ++i) {
    if (point(i) < lower(i) || point(i) > upper(i)) return false;
  }
  return true;
}

void PredicateMap::add(AtomicPredicate pred) {
  if (pred.dim() != dim_) throw DimensionError("predicate '" + pred.name + "' dimension mismatch with map");
  if (entries_.count(pred.name)) throw Error("duplicate predicate name '" + pred.name + "'");
  entries_.emplace(pred.name, std::move(pred));
}

const AtomicPredicate& PredicateMap::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw Error("unknown atom name '" + name + "'");
  return it->second;
}

double signed_distance(const Eigen::VectorXd& point, const AtomicPredicate& pred, const Metric& metric) {
  if (point.size() != pred.dim() || metric.dim() != pred.dim()) {
    throw DimensionError("signed_distance dimension mismatch for '" + pred.name + "'");
  }
  if (pred.shape == AtomicPredicate::Shape::Halfspace) {
    // Exact in any SPD metric: (w.s - c) / ||w||_{M^-1}.
    return (pred.w.dot(point) - pred.c) / metric.dual_norm(pred.w);
  }
  if (!metric.diagonal()) throw Error("box predicate '" + pred.name + "' requires a diagonal metric");
  if (pred.contains(point)) {
    // Depth = distance to complement = smallest weighted face margin.
    double depth = kInf;
    for (int i = 0; i < point.size(); ++i) {
      double s = std::sqrt(metric.matrix()(i, i));
      if (std::isfinite(pred.lower(i))) depth = std::min(depth, s * (point(i) - pred.lower(i)));
      if (std::isfinite(pred.upper(i))) depth = std::min(depth, s * (pred.upper(i) - point(i)));
    }
    return depth;
  }
  // Outside: weighted distance to the clamped projection (exact for diagonal M).
  double sq = 0.0;
  for (int i = 0; i < point.size(); ++i) {
    double v = 0.0;
    if (point(i) < pred.lower(i)) v = pred.lower(i) - point(i);
    else if (point(i) > pred.upper(i)) v = point(i) - pred.upper(i);
    sq += metric.matrix()(i, i) * v * v;
  }
  return -std::sqrt(sq);
}

}  // namespace mtlloop
