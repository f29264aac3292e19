#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>

namespace fw {

// All state vectors in this project are low-dimensional (d <= kMaxDim), so we
// use fixed-capacity dynamic Eigen types: value semantics, no heap traffic in
// the integrator loops.
inline constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

inline Vec vec1(double x) {
  Vec v(1);
  v(0) = x;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v(0) = x;
  v(1) = y;
  return v;
}

inline Vec vec_of(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Mat identity(int d) { return Mat::Identity(d, d); }

inline bool all_finite(const Vec& v) { return v.allFinite(); }

// Spectral (operator 2-) norm. Only used on probe grids, not in hot loops.
inline double operator_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(m));
  return svd.singularValues()(0);
}

}  // namespace fw
