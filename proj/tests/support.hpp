#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "escrate/geometry.hpp"
#include "escrate/sparse.hpp"

namespace escrate::testing {

inline const double kLog2 = std::log(2.0);
inline const double kLog3 = std::log(3.0);

// Two full branches with nonconstant slope:
//   f0(x) = (e^x - 1) / (e^0.4 - 1) on [0, 0.4],
//   f1(x) = u (1 + u) / 2 with u = (1 - x) / 0.4 on [0.6, 1].
inline MarkovIntervalMap toy_map() {
  const double k = std::exp(0.4) - 1.0;
  auto f0 = [k](double x) { return (std::exp(x) - 1.0) / k; };
  auto df0 = [k](double x) { return std::exp(x) / k; };
  auto f1 = [](double x) {
    const double u = (1.0 - x) / 0.4;
    return u * (1.0 + u) / 2.0;
  };
  auto df1 = [](double x) {
    const double u = (1.0 - x) / 0.4;
    return -(1.0 + 2.0 * u) / 0.8;
  };
  return MarkovIntervalMap({Branch::general({0.0, 0.4}, f0, df0), Branch::general({0.6, 1.0}, f1, df1)});
}

inline Eigen::MatrixXd dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto cols = a.row_cols(r);
    auto vals = a.row_values(r);
    for (std::size_t i = 0; i < cols.size(); ++i) d(static_cast<Eigen::Index>(r), cols[i]) += vals[i];
  }
  return d;
}

// Dominant eigenpair from a general dense eigensolve: the eigenvalue of
// largest real part and its eigenvector rescaled to be nonnegative.
struct DensePerron {
  double lambda = 0.0;
  std::vector<double> vector;
};

inline DensePerron dense_perron(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < m.rows(); ++i)
    if (solver.eigenvalues()[i].real() > solver.eigenvalues()[best].real()) best = i;
  Eigen::VectorXd v = solver.eigenvectors().col(best).real();
  if (v.sum() < 0) v = -v;
  DensePerron out;
  out.lambda = solver.eigenvalues()[best].real();
  out.vector.assign(v.data(), v.data() + v.size());
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace escrate::testing
