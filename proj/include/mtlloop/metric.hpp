#pragma once

#include <Eigen/Dense>

#include "mtlloop/errors.hpp"

namespace mtlloop {

/// Weighted metric d(a,b) = sqrt((a-b)^T M (a-b)) with M symmetric positive
/// definite. Definiteness is checked at construction via Cholesky.
class Metric {
public:
  explicit Metric(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw Error("metric matrix must be square");
    if (!m_.isApprox(m_.transpose(), 1e-12)) throw Error("metric matrix must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(m_);
    if (llt.info() != Eigen::Success) throw Error("metric matrix must be positive definite");
    minv_ = llt.solve(Eigen::MatrixXd::Identity(m_.rows(), m_.rows()));
    sqrt_ = llt.matrixL();
    diagonal_ = m_.isDiagonal(1e-12);
  }

  static Metric identity(int dim) { return Metric(Eigen::MatrixXd::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  bool diagonal() const { return diagonal_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  const Eigen::MatrixXd& inverse() const { return minv_; }
  const Eigen::MatrixXd& cholesky_factor() const { return sqrt_; }

  double norm(const Eigen::VectorXd& v) const {
    check_dim(v);
    return std::sqrt(v.dot(m_ * v));
  }

  double dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return norm(a - b); }

  /// sqrt(w^T M^{-1} w), the dual norm used by halfspace signed distances.
  double dual_norm(const Eigen::VectorXd& w) const {
    check_dim(w);
    return std::sqrt(w.dot(minv_ * w));
  }

private:
  void check_dim(const Eigen::VectorXd& v) const {
    if (v.size() != m_.rows()) throw DimensionError("metric dimension mismatch");
  }

  Eigen::MatrixXd m_;
  Eigen::MatrixXd minv_;
  Eigen::MatrixXd sqrt_;
  bool diagonal_;
};

}  // namespace mtlloop
