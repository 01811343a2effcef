#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ghzqec/noise.hpp"
#include "ghzqec/pauli.hpp"
#include "ghzqec/photonics.hpp"
#include "ghzqec/qstate.hpp"

namespace ghzqec {

struct ProtocolSettings {
  HardwareParams hw;
  GateNoise noise;
  TimingParams timing;
  long shots = 10000;        // memory protocols only
  long max_attempts = 0;     // 0 = unlimited
  uint64_t seed = 1;
};

struct AttemptSummary {
  double mean = 0.0;
  double stddev = 0.0;
  long min = 0;
  long max = 0;
  long samples = 0;
};

// Attempt structure of one generation try: round 1 succeeds with q1, the
// optional second round with q2 (conditional). Durations are in t_link units.
struct AttemptModel {
  double q1 = 1.0;
  double q2 = 1.0;
  bool two_rounds = false;
  double round_time = 1.0;   // time per emission round
  double between = 0.0;      // local gates between the rounds
  double success() const { return two_rounds ? q1 * q2 : q1; }
  double mean_time() const;
  double sample_time(std::mt19937_64& rng) const;
};

struct ProtocolResult {
  std::string protocol;
  double success_prob = 0.0;  // per attempt (exact) or per shot (memory rows)
  double fidelity = 0.0;
  DensityMatrix output_state;  // normalized, on labels c0..c{n-1}
  AttemptSummary attempts;
  double ghz_time = 0.0;       // mean generation time
  AttemptModel model;          // exact protocols
  std::vector<double> time_samples;  // memory protocols: per-success generation times
  bool per_shot = false;
};

// Per-module emitter-photon state with preparation dephasing, double-excitation
// dephasing and photon loss. Labels c0,p0,c1,p1,...
DensityMatrix emit_joint_state(const HardwareParams& hw, int n_modules, double alpha);
// Second emission round from an existing emitter state on c0..c{n-1}.
DensityMatrix emit_again(const DensityMatrix& emitters, const HardwareParams& hw, int n_modules);

struct HeraldResult {
  double prob = 0.0;
  DensityMatrix branch;  // unnormalized, photons traced
  bool possible() const { return prob >= 1e-15; }
  DensityMatrix conditional() const { return branch.normalized(); }
};
HeraldResult herald(const DensityMatrix& joint, const Matrix& effect, const std::vector<std::string>& photons);

// Best Pauli P maximizing <canon| P rho P |canon>.
PauliString best_pauli_frame(const Matrix& rho, const Vector& canon, double* overlap = nullptr);

ProtocolResult run_bell_sc(const ProtocolSettings& s);
ProtocolResult run_bell_dc(const ProtocolSettings& s);
ProtocolResult run_w(const ProtocolSettings& s);
ProtocolResult run_raw_ghz(const ProtocolSettings& s);
ProtocolResult run_dc_ghz(const ProtocolSettings& s);
ProtocolResult run_dc_w(const ProtocolSettings& s);

struct RusOutcome {
  long attempts = 0;
  bool timeout = false;
};
RusOutcome rus_sample(double q, std::mt19937_64& rng, long max_attempts = 0);

struct OracleValue {
  double success = 0.0;
  std::optional<double> fidelity;  // undefined when success is 0
};
OracleValue table_i_oracle(const std::string& protocol, double alpha, bool pnr);

// Canonical registry names.
const std::vector<std::string>& protocol_names();
bool is_memory_protocol(const std::string& name);
ProtocolResult run_protocol(const std::string& name, const ProtocolSettings& s);

// Memory distillation (distillation.cpp).
struct MeasurementPattern {
  std::set<std::string> accepted;        // bitstrings, communication qubit 0 first
  std::vector<std::string> corrections;  // per outcome 0..15, Pauli over the output qubits
};

enum class DistillKind { bell_sc_to_ghz, bell_dc_to_ghz, w_to_ghz, w_to_w, ghz_to_ghz };
DistillKind distill_kind(const std::string& name);

ProtocolResult distill_memory(DistillKind kind, const ProtocolSettings& s);
ProtocolResult distill_w_to_w(const ProtocolSettings& s);
ProtocolResult distill_ghz_to_ghz(const ProtocolSettings& s);

// Accepted outcomes from the bundled fixture.
std::set<std::string> w_to_ghz_patterns();
// Re-derives the W->GHZ accepted set from an ideal-hardware simulation.
std::set<std::string> derive_w_to_ghz_patterns(double alpha = 1e-4);
const MeasurementPattern& distill_pattern(DistillKind kind);

}  // namespace ghzqec
