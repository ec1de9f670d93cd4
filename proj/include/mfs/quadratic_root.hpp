#pragma once

#include <cmath>

#include <Eigen/Dense>

namespace mfs::detail {

// w -> sqrt(w' Q w) for SPD Q, with its gradient and Hessian.
template <int N>
struct QuadraticRoot {
  using Vec = Eigen::Matrix<double, N, 1>;
  using Mat = Eigen::Matrix<double, N, N>;

  Mat Q;

  double value(const Vec& w) const { return std::sqrt(w.dot(Q * w)); }

  Vec grad(const Vec& w) const { return Q * w / value(w); }

  Mat hess(const Vec& w) const {
    const Vec qw = Q * w;
    const double s = std::sqrt(w.dot(qw));
    return Q / s - qw * qw.transpose() / (s * s * s);
  }
};

}  // namespace mfs::detail
