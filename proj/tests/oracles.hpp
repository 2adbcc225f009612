#pragma once

// Independent reference computations used only by the tests.

#include "qxform/fock.hpp"

#include <cmath>

namespace oracle {

using qxform::ComplexMatrix;
using qxform::cplx;

// exp(A) by scaling and squaring of a plain Taylor series, no Padé.
inline ComplexMatrix series_expm(const ComplexMatrix& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const ComplexMatrix s = a / std::pow(2.0, squarings);
  ComplexMatrix term = ComplexMatrix::Identity(a.rows(), a.cols());
  ComplexMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * s / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// Row-major vec: vec(rho)[i * n + j] = rho(i, j).
inline qxform::ComplexVector vec(const ComplexMatrix& m) {
  qxform::ComplexVector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline ComplexMatrix unvec(const qxform::ComplexVector& v, Eigen::Index n) {
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = v(i * n + j);
  return m;
}

// Liouvillian of d rho/dt = -i chi [n^2, rho] + 2 gamma a rho a^dag - gamma {n, rho}
// as a dense n^2 x n^2 matrix, built from left/right multiplication maps:
// vec(A X B) = (A kron B^T) vec(X) for row-major vec.
inline ComplexMatrix kerr_liouvillian(double chi, double gamma, std::size_t n) {
  const ComplexMatrix a = qxform::annihilation(n);
  const ComplexMatrix num = a.adjoint() * a;
  const ComplexMatrix n2 = num * num;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  const cplx i{0.0, 1.0};
  return -i * chi * (qxform::kron(n2, id) - qxform::kron(id, n2.transpose())) +
         2.0 * gamma * qxform::kron(a, a.adjoint().transpose()) -
         gamma * (qxform::kron(num, id) + qxform::kron(id, num.transpose()));
}

inline ComplexMatrix kerr_evolve(double chi, double gamma, const ComplexMatrix& rho0, double t) {
  const auto n = static_cast<std::size_t>(rho0.rows());
  return unvec(series_expm(kerr_liouvillian(chi, gamma, n) * t) * vec(rho0), rho0.rows());
}

}  // namespace oracle
