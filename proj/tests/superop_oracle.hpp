#pragma once

#include <string>

#include "ghzqec/superop.hpp"

namespace ghzqec::testing {

// Phi(sigma) = Tr_r[J (I (x) sigma^T)] for a Choi matrix on (data, reference).
inline Matrix apply_choi(const Matrix& J, const Matrix& sigma) {
  const int d = static_cast<int>(sigma.rows());
  Matrix out = Matrix::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      cplx acc = 0;
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) acc += J(a * d + i, b * d + j) * sigma(i, j);
      out(a, b) = acc;
    }
  return out;
}

// Pauli twirl of the measurement instrument: the input is dephased in the
// stabilizer eigenbasis, Paulis anticommuting with S relabel the outcome.
inline Matrix twirled_instrument(const std::vector<ConditionedMap>& maps, StabBasis b, int m, const Matrix& rho) {
  const Matrix S = stabilizer_string(b).matrix();
  const Matrix I = Matrix::Identity(16, 16);
  const Matrix Pp = 0.5 * (I + S), Pm = 0.5 * (I - S);
  const Matrix deph = Pp * rho * Pp + Pm * rho * Pm;
  const PauliString Ss = stabilizer_string(b);
  Matrix out = Matrix::Zero(16, 16);
  for (const auto& P : all_paulis(4)) {
    const int flip = P.commutes(Ss) ? 0 : 1;
    const Matrix Pm4 = P.matrix();
    const Matrix in = Pm4 * deph * Pm4.adjoint();
    for (const auto& cm : maps) {
      if (!cm.ghz_success || cm.outcome != (m ^ flip)) continue;
      out += Pm4.adjoint() * apply_choi(cm.choi, in) * Pm4;
    }
  }
  return out / 256.0;
}

inline Matrix failure_map(const std::vector<ConditionedMap>& maps, const Matrix& rho) {
  Matrix out = Matrix::Zero(16, 16);
  for (const auto& cm : maps)
    if (!cm.ghz_success) out += apply_choi(cm.choi, rho);
  return out;
}

}  // namespace ghzqec::testing
