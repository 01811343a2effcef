#include "ghzqec/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace ghzqec {

namespace {
constexpr char kOps[4] = {'I', 'X', 'Y', 'Z'};

int op_index(char c) {
  switch (c) {
    case 'I': return 0;
    case 'X': return 1;
    case 'Y': return 2;
    case 'Z': return 3;
  }
  throw std::invalid_argument(std::string("bad Pauli character ") + c);
}
}  // namespace

PauliString::PauliString(std::string ops) : ops_(std::move(ops)) {
  for (char c : ops_) op_index(c);
}

PauliString PauliString::from_index(int w, int index) {
  std::string s(w, 'I');
  for (int k = w - 1; k >= 0; --k) {
    s[k] = kOps[index & 3];
    index >>= 2;
  }
  return PauliString(s);
}

PauliString PauliString::from_bits(uint32_t x, uint32_t z, int w) {
  std::string s(w, 'I');
  for (int k = 0; k < w; ++k) {
    bool xb = (x >> (w - 1 - k)) & 1u, zb = (z >> (w - 1 - k)) & 1u;
    s[k] = xb ? (zb ? 'Y' : 'X') : (zb ? 'Z' : 'I');
  }
  return PauliString(s);
}

int PauliString::weight() const {
  return static_cast<int>(std::count_if(ops_.begin(), ops_.end(), [](char c) { return c != 'I'; }));
}

int PauliString::index() const {
  int idx = 0;
  for (char c : ops_) idx = idx * 4 + op_index(c);
  return idx;
}

uint32_t PauliString::x_bits() const {
  uint32_t b = 0;
  for (char c : ops_) b = (b << 1) | ((c == 'X' || c == 'Y') ? 1u : 0u);
  return b;
}

uint32_t PauliString::z_bits() const {
  uint32_t b = 0;
  for (char c : ops_) b = (b << 1) | ((c == 'Z' || c == 'Y') ? 1u : 0u);
  return b;
}

Matrix pauli_matrix(char c) {
  Matrix m = Matrix::Zero(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("bad Pauli character");
  }
  return m;
}

Matrix PauliString::matrix() const {
  Matrix m = Matrix::Identity(1, 1);
  for (char c : ops_) m = Eigen::kroneckerProduct(m, pauli_matrix(c)).eval();
  return m;
}

bool PauliString::commutes(const PauliString& o) const {
  if (o.size() != size()) throw std::invalid_argument("Pauli length mismatch");
  int anti = 0;
  for (int i = 0; i < size(); ++i)
    if (ops_[i] != 'I' && o.ops_[i] != 'I' && ops_[i] != o.ops_[i]) ++anti;
  return anti % 2 == 0;
}

PauliString PauliString::times(const PauliString& o, cplx* phase) const {
  if (o.size() != size()) throw std::invalid_argument("Pauli length mismatch");
  // single-site table: a*b = i^k c
  std::string s(size(), 'I');
  int ipow = 0;
  for (int i = 0; i < size(); ++i) {
    int a = op_index(ops_[i]), b = op_index(o.ops_[i]);
    if (a == 0) { s[i] = kOps[b]; continue; }
    if (b == 0 || a == b) { s[i] = a == b ? 'I' : kOps[a]; continue; }
    int c = 6 - a - b;
    s[i] = kOps[c];
    // XY=iZ, YZ=iX, ZX=iY
    bool cyclic = (a == 1 && b == 2) || (a == 2 && b == 3) || (a == 3 && b == 1);
    ipow += cyclic ? 1 : 3;
  }
  if (phase) {
    static const cplx table[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    *phase = table[ipow % 4];
  }
  return PauliString(s);
}

std::vector<PauliString> all_paulis(int w) {
  std::vector<PauliString> out;
  int n = 1 << (2 * w);
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(PauliString::from_index(w, i));
  return out;
}

namespace gates {

Matrix H() {
  Matrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}
Matrix X() { return pauli_matrix('X'); }
Matrix Y() { return pauli_matrix('Y'); }
Matrix Z() { return pauli_matrix('Z'); }
Matrix I2() { return pauli_matrix('I'); }

Matrix CNOT() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return m;
}

Matrix CZ() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1;
  return m;
}

Matrix SWAP() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  return m;
}

Matrix kron(const std::vector<Matrix>& ops) {
  Matrix m = Matrix::Identity(1, 1);
  for (const auto& o : ops) m = Eigen::kroneckerProduct(m, o).eval();
  return m;
}

}  // namespace gates

}  // namespace ghzqec
