#pragma once

#include <map>
#include <string>
#include <vector>

#include "ghzqec/qstate.hpp"

namespace ghzqec {

struct NoiseChannel {
  std::vector<Matrix> kraus;
  int arity = 1;

  bool trace_preserving(double tol = 1e-10) const;
  // Pauli transfer matrix R_ij = Tr(P_i E(P_j)) / 2^arity.
  Matrix ptm() const;
};

NoiseChannel identity_channel(int arity = 1);
NoiseChannel depolarizing(double p, int arity);
NoiseChannel gad(double t, double T1);  // infinite-temperature generalized amplitude damping
NoiseChannel phase_damping(double t, double T2);
NoiseChannel prep_dephasing(double f_prep);
NoiseChannel photon_loss(double eta);
NoiseChannel double_excitation_dephasing(double p_de);
NoiseChannel dephasing(double p);  // (1-p) rho + p Z rho Z
// first, then second
NoiseChannel compose(const NoiseChannel& first, const NoiseChannel& second);
NoiseChannel decoherence(double dt, double T);  // gad then phase damping

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& ch,
                            const std::vector<std::string>& targets);

struct HardwareParams {
  double alpha = 0.025;
  double alpha_base = 0.025;
  double alpha_distil = 0.025;
  double eta_ph = 1.0;
  double mu_I = 1.0;
  double f_prep = 1.0;
  double p_de = 0.0;
  bool pnr = true;

  void validate() const;
  // Copy with every generation alpha set to a.
  HardwareParams with_alpha(double a) const;
};

// Circuit-level noise: depolarizing on gates, classical flip on readout.
struct GateNoise {
  double p1 = 0.0;
  double p2 = 0.0;
  double p_meas = 0.0;
  static GateNoise uniform(double p) { return {p, p, p}; }
  bool zero() const { return p1 == 0 && p2 == 0 && p_meas == 0; }
};

enum class Regime { linking, idle };

struct TimingParams {
  double T_link = 1e6;
  double T_idle = 1e6;
  double t_link = 1.0;
  double t_meas = 1.0;
  double t_pc = 0.01;   // single-qubit gate on a communication qubit
  double t_pm = 100.0;  // single-qubit gate on a memory qubit
  double t_2q = 100.0;
  double t_swap = 300.0;

  void validate() const;
  double coherence(Regime r) const { return r == Regime::linking ? T_link : T_idle; }
  static TimingParams noiseless();  // infinite coherence times
};

// Registry of the ES-1..ES-18 hardware sets; pnr/alpha keep their defaults.
HardwareParams hardware_set(const std::string& name);
std::vector<std::string> hardware_set_names();

class QubitClock {
 public:
  void reset() { elapsed_.clear(); regime_.clear(); }
  void advance(const std::string& q, double dt, Regime r);
  double elapsed(const std::string& q) const;
  Regime regime(const std::string& q) const;

 private:
  std::map<std::string, double> elapsed_;
  std::map<std::string, Regime> regime_;
};

DensityMatrix advance_clock_and_decohere(const DensityMatrix& rho, const std::string& qubit, double dt,
                                         Regime regime, const TimingParams& timing,
                                         QubitClock* clock = nullptr);
DensityMatrix decohere_all(const DensityMatrix& rho, const std::vector<std::string>& qubits, double dt,
                           Regime regime, const TimingParams& timing, QubitClock* clock = nullptr);

}  // namespace ghzqec
