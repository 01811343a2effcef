#pragma once

#include <random>

#include "ghzqec/qstate.hpp"

namespace ghzqec::testing {

inline Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = cplx(n(rng), n(rng));
  Matrix rho = G * G.adjoint();
  return rho / rho.trace().real();
}

inline Matrix random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix G(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) G(i, j) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ();
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double min_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  return es.eigenvalues().minCoeff();
}

// Gram matrix of random unit vectors: a valid visibility matrix.
inline Matrix random_visibility(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = cplx(g(rng), g(rng));
  for (int j = 0; j < n; ++j) v.col(j).normalize();
  return v.adjoint() * v;
}

}  // namespace ghzqec::testing
