#pragma once

#include "mtlloop/metric.hpp"
#include "mtlloop/predicate.hpp"

namespace testgen {

/// Signed distance computed by projected gradient descent on the weighted
/// quadratic, independent of the library's closed forms. Positive depth
/// inside the set (distance to the nearest face complement), negative
/// distance outside.
double numeric_signed_distance(const Eigen::VectorXd& point, const mtlloop::AtomicPredicate& pred,
                               const mtlloop::Metric& metric);

}  // namespace testgen
