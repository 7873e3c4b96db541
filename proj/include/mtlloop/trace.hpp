#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mtlloop/errors.hpp"
#include "mtlloop/metric.hpp"
#include "mtlloop/rational.hpp"

namespace mtlloop {

/// Finite timed state sequence: strictly increasing exact timestamps
/// (negative allowed for history padding) and one state column per sample.
class TimedTrace {
public:
  TimedTrace(std::vector<Rat> times, Eigen::MatrixXd states)
      : times_(std::move(times)), states_(std::move(states)) {
    if (times_.empty()) throw Error("empty trace");
    if (static_cast<Eigen::Index>(times_.size()) != states_.cols()) {
      throw Error("trace has " + std::to_string(times_.size()) + " timestamps but " +
                  std::to_string(states_.cols()) + " samples");
    }
    for (std::size_t k = 1; k < times_.size(); ++k) {
      if (!(times_[k - 1] < times_[k])) throw Error("non-increasing timestamp at sample " + std::to_string(k));
    }
  }

  int dim() const { return static_cast<int>(states_.rows()); }
  std::size_t size() const { return times_.size(); }
  const std::vector<Rat>& times() const { return times_; }
  const Rat& time(std::size_t k) const { return times_[k]; }
  Eigen::VectorXd state(std::size_t k) const { return states_.col(static_cast<Eigen::Index>(k)); }
  const Eigen::MatrixXd& states() const { return states_; }

  /// Samples [first, last], timestamps preserved.
  TimedTrace slice(std::size_t first, std::size_t last) const {
    if (first > last || last >= size()) throw Error("bad trace slice");
    std::vector<Rat> ts(times_.begin() + static_cast<std::ptrdiff_t>(first),
                        times_.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return TimedTrace(std::move(ts), states_.middleCols(static_cast<Eigen::Index>(first),
                                                        static_cast<Eigen::Index>(last - first + 1)));
  }

  /// Index of the first sample with time >= 0, i.e. the end of history padding.
  std::size_t first_nonnegative_index() const {
    for (std::size_t k = 0; k < times_.size(); ++k) {
      if (Rat(0) <= times_[k]) return k;
    }
    throw Error("trace has no sample at nonnegative time");
  }

  bool same_timestamps(const TimedTrace& other) const { return times_ == other.times_; }

private:
  std::vector<Rat> times_;
  Eigen::MatrixXd states_;
};

/// d_O(a, b) = max_k d(a(k), b(k)); requires equal lengths and timestamps.
double trace_distance(const TimedTrace& a, const TimedTrace& b, const Metric& metric);

}  // namespace mtlloop
