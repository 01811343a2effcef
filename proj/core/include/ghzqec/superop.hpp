#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ghzqec/noise.hpp"
#include "ghzqec/pauli.hpp"
#include "ghzqec/qstate.hpp"

namespace ghzqec {

enum class StabBasis { X, Z };
char basis_char(StabBasis b);
StabBasis basis_from_char(char c);

struct CycleConfig {
  GateNoise noise;
  TimingParams timing;
  double t_cut = 0.0;        // GHZ generation window, data qubits idle
  double ghz_success = 1.0;  // probability the GHZ arrives inside the window
  Regime fail_regime = Regime::linking;
  double circuit_time() const { return timing.t_2q + timing.t_pc + timing.t_meas; }
  double subround_time() const { return t_cut + circuit_time(); }
};

// Choi matrix on (data d0..d3, reference r0..r3), unnormalized maximally
// entangled input, weighted by the branch prior.
struct ConditionedMap {
  bool ghz_success = true;
  int outcome = 0;  // reported parity bit; unused on the failure branch
  Matrix choi;
};

std::vector<ConditionedMap> simulate_stabilizer_cycle(const DensityMatrix& ghz, StabBasis basis,
                                                      const CycleConfig& cfg);

// Applies one module's part of the cycle (wait, two-qubit gate, H, readout
// wait) to qubits (comm, data) of `rho`, without measuring.
DensityMatrix module_circuit(const DensityMatrix& rho, const std::string& comm, const std::string& data,
                             StabBasis basis, const CycleConfig& cfg);

std::vector<Matrix> kraus_from_choi(const Matrix& J, double clamp = 1e-12, double negative_tol = -1e-8);
// c_e = Tr(E^dag K) / 2^w, indexed by PauliString::index().
std::vector<cplx> pauli_coefficients(const Matrix& K, int w);
// q_e = sum_j |c_{j,e}|^2 (not renormalized).
std::vector<double> pauli_twirl(const std::vector<Matrix>& kraus, int w);

// Minimal-weight representative of {E, E*S}, ties broken lexicographically.
PauliString stabilizer_rep(const PauliString& e, const PauliString& stab);

struct TableRow {
  StabBasis basis = StabBasis::Z;
  PauliString pauli;
  bool ghz_success = true;
  bool meas_error = false;
  double probability = 0.0;
};

struct SuperoperatorTable {
  std::vector<TableRow> rows;
  std::map<std::string, std::string> meta;

  std::vector<TableRow> rows_for(StabBasis b) const;
  double total(StabBasis b) const;
  void validate(double tol = 1e-6) const;
};

SuperoperatorTable build_table(const DensityMatrix& ghz, const CycleConfig& cfg,
                               const std::vector<StabBasis>& bases = {StabBasis::X, StabBasis::Z});

// Effective noisy projector for reported parity m (0 => +1) reconstructed from
// the table rows; the failure rows act without a projector.
Matrix recombine_success(const SuperoperatorTable& t, StabBasis b, int m, const Matrix& rho);
Matrix recombine_failure(const SuperoperatorTable& t, StabBasis b, const Matrix& rho);

// Also writes the metadata sidecar <path>.json; import reads and checks it when present.
void export_table(const SuperoperatorTable& t, const std::string& path);
SuperoperatorTable import_table(const std::string& path);
std::string table_to_csv(const SuperoperatorTable& t);
SuperoperatorTable table_from_csv(const std::string& text);

PauliString stabilizer_string(StabBasis b);
// Per-qubit Pauli weights {I,X,Y,Z} of the decoherence channel over dt.
std::array<double, 4> decoherence_pauli_weights(double dt, double T);

}  // namespace ghzqec
