#include "mtlloop/trace.hpp"

namespace mtlloop {

double trace_distance(const TimedTrace& a, const TimedTrace& b, const Metric& metric) {
  if (a.size() != b.size() || !a.same_timestamps(b)) throw Error("trace_distance: timestamp mismatch");
  if (a.dim() != b.dim()) throw DimensionError("trace_distance: dimension mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, metric.dist(a.state(k), b.state(k)));
  }
  return worst;
}

}  // namespace mtlloop
