#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace ghzqec {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// One tensor factor of a register. Photon modes use dim 2 (binary occupancy).
struct Site {
  std::string label;
  int dim = 2;
  bool operator==(const Site&) const = default;
};

// Unit-norm state vector; ordering follows kron convention, first site most significant.
class PureState {
 public:
  PureState() = default;
  explicit PureState(Vector amplitudes);
  static PureState basis(int dim, int index);

  const Vector& amplitudes() const { return amp_; }
  int dim() const { return static_cast<int>(amp_.size()); }

 private:
  Vector amp_;
};

PureState ghz_state(int n, int sign = +1);  // (|0..0> + sign |1..1>)/sqrt2
PureState w_state(int n);
PureState bell_state(bool psi, int sign);  // psi ? |01>+s|10> : |00>+s|11>

class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(std::vector<Site> sites, Matrix data, bool heralded = false);
  static DensityMatrix from_pure(std::vector<Site> sites, const PureState& psi);
  static DensityMatrix qubits(const std::vector<std::string>& labels, Matrix data);

  const Matrix& data() const { return data_; }
  const std::vector<Site>& sites() const { return sites_; }
  std::vector<std::string> labels() const;
  int dim() const { return static_cast<int>(data_.rows()); }
  bool heralded() const { return heralded_; }
  double trace() const { return data_.trace().real(); }
  int index_of(const std::string& label) const;  // throws on unknown label
  bool has(const std::string& label) const;

  DensityMatrix normalized() const;
  DensityMatrix as_heralded() const { return DensityMatrix(sites_, data_, true); }
  DensityMatrix scaled(double s) const;

  // Throws std::runtime_error with the violated property.
  void check(double herm_tol = 1e-10, double psd_tol = 1e-9) const;

 private:
  std::vector<Site> sites_;
  Matrix data_;
  bool heralded_ = false;
};

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep);
// Reorders the register so labels appear in `order` (must be a permutation).
DensityMatrix permute(const DensityMatrix& rho, const std::vector<std::string>& order);
DensityMatrix add(const DensityMatrix& a, const DensityMatrix& b);

double sqrt_fidelity(const DensityMatrix& rho, const PureState& target);
double sqrt_fidelity(const Matrix& rho, const Vector& target);

// Local ops: the first target is the most significant digit of the local index.
DensityMatrix apply_unitary(const DensityMatrix& rho, const Matrix& U,
                            const std::vector<std::string>& targets);
DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Matrix>& kraus,
                          const std::vector<std::string>& targets);
// rho -> A rho B^dagger on targets, no checks (used for POVM sandwiches).
DensityMatrix sandwich(const DensityMatrix& rho, const Matrix& A, const Matrix& B,
                       const std::vector<std::string>& targets);
// Tr_targets[(E on targets) rho]; result keeps the other sites.
DensityMatrix measure_out(const DensityMatrix& rho, const Matrix& effect,
                          const std::vector<std::string>& targets);

Vector apply_local(const Vector& psi, const std::vector<int>& dims, const Matrix& op,
                   const std::vector<int>& targets);

namespace detail {

// Full index = base[r] + offset[t] for rest index r and local index t.
struct LocalIndex {
  std::vector<int> base;
  std::vector<int> offset;
  LocalIndex(const std::vector<int>& dims, const std::vector<int>& targets);
};

void left_apply(Matrix& m, const LocalIndex& ix, const Matrix& op);
void right_apply_adjoint(Matrix& m, const LocalIndex& ix, const Matrix& op);

}  // namespace detail

}  // namespace ghzqec
