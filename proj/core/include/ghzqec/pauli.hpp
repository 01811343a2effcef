#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ghzqec/qstate.hpp"

namespace ghzqec {

// Pauli string over {I,X,Y,Z}; site 0 is the leftmost character and the
// most significant tensor factor.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::string ops);
  static PauliString identity(int w) { return PauliString(std::string(w, 'I')); }
  // Base-4 index with I=0, X=1, Y=2, Z=3; site 0 most significant.
  static PauliString from_index(int w, int index);
  static PauliString from_bits(uint32_t x, uint32_t z, int w);  // site k <-> bit (w-1-k)

  const std::string& str() const { return ops_; }
  int size() const { return static_cast<int>(ops_.size()); }
  int weight() const;
  int index() const;
  uint32_t x_bits() const;
  uint32_t z_bits() const;
  char operator[](int i) const { return ops_[i]; }

  Matrix matrix() const;
  bool commutes(const PauliString& o) const;
  // this * o = phase * result, phase in {1,i,-1,-i}
  PauliString times(const PauliString& o, cplx* phase = nullptr) const;

  bool operator==(const PauliString&) const = default;
  bool operator<(const PauliString& o) const { return ops_ < o.ops_; }

 private:
  std::string ops_;
};

Matrix pauli_matrix(char c);
std::vector<PauliString> all_paulis(int w);

namespace gates {
Matrix H();
Matrix X();
Matrix Y();
Matrix Z();
Matrix I2();
Matrix CNOT();  // control first
Matrix CZ();
Matrix SWAP();
Matrix kron(const std::vector<Matrix>& ops);
}  // namespace gates

}  // namespace ghzqec
