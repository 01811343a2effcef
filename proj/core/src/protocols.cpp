#include "ghzqec/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ghzqec {

namespace {

std::vector<std::string> comm_labels(int n) {
  std::vector<std::string> v;
  for (int k = 0; k < n; ++k) v.push_back("c" + std::to_string(k));
  return v;
}

std::vector<std::string> photon_labels(int n) {
  std::vector<std::string> v;
  for (int k = 0; k < n; ++k) v.push_back("p" + std::to_string(k));
  return v;
}

DensityMatrix prepared_emitters(const HardwareParams& hw, int n, double alpha) {
  Matrix one(2, 2);
  one << 1 - alpha, std::sqrt(alpha * (1 - alpha)), std::sqrt(alpha * (1 - alpha)), alpha;
  DensityMatrix e = DensityMatrix::qubits({"c0"}, one);
  if (hw.f_prep < 1.0) e = apply_channel(e, prep_dephasing(hw.f_prep), {"c0"});
  DensityMatrix out = e;
  for (int k = 1; k < n; ++k) {
    DensityMatrix ek = DensityMatrix::qubits({"c" + std::to_string(k)}, e.data());
    out = tensor(out, ek);
  }
  return out;
}

struct GroupDef {
  Matrix effect;
  Matrix ideal;
};

struct ExactSpec {
  std::string name;
  int n = 4;
  std::vector<GroupDef> round1;
  bool two_rounds = false;
  // Per-qubit gates applied between the rounds, given the ideal round-1 state.
  std::function<std::vector<Matrix>(const Matrix&)> between;
  std::vector<GroupDef> round2;
  Vector canon;
};

VisibilityMatrix visibility(const HardwareParams& hw, int ports) {
  return VisibilityMatrix::uniform(ports, intensity_to_amplitude_visibility(hw.mu_I));
}

std::vector<GroupDef> bell_groups(const HardwareParams& hw) {
  auto set = bell_povm_set(intensity_to_amplitude_visibility(hw.mu_I));
  auto ideal = bell_povm_set(1.0);
  std::vector<GroupDef> g(2);
  g[0].effect = set.e10().matrix;
  g[1].effect = set.e01().matrix;
  if (!hw.pnr) {
    g[0].effect += set.e20().matrix;
    g[1].effect += set.e02().matrix;
  }
  g[0].ideal = ideal.e10().matrix;
  g[1].ideal = ideal.e01().matrix;
  return g;
}

std::vector<GroupDef> w_groups(const HardwareParams& hw) {
  auto mu = visibility(hw, 4);
  auto one = VisibilityMatrix::uniform(4, 1.0);
  std::vector<GroupDef> g;
  for (int k = 0; k < 4; ++k)
    g.push_back({click_povm(w_count_family(k, mu), hw.pnr).matrix, w_povm(k, 1, one).matrix});
  return g;
}

std::vector<GroupDef> pair_groups(const HardwareParams& hw, bool bunching) {
  auto mu = visibility(hw, 4);
  auto one = VisibilityMatrix::uniform(4, 1.0);
  std::vector<GroupDef> g;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      g.push_back({click_povm(ghz_count_family(a, b, mu), hw.pnr).matrix, ghz_povm(a, b, 1, 1, one).matrix});
  if (bunching && hw.pnr)
    for (int k = 0; k < 4; ++k) g.push_back({bunching_povm(k, mu).matrix, bunching_povm(k, one).matrix});
  return g;
}

// Single-qubit gate layer on the communication qubits with depolarizing noise
// and decoherence for the gate duration.
DensityMatrix gate_layer(const DensityMatrix& rho, const std::vector<Matrix>& gates,
                         const std::vector<std::string>& qubits, const GateNoise& noise,
                         const TimingParams& timing, double duration) {
  DensityMatrix out = rho;
  for (size_t k = 0; k < qubits.size(); ++k) {
    out = apply_unitary(out, gates[k], {qubits[k]});
    if (noise.p1 > 0) out = apply_channel(out, depolarizing(noise.p1, 1), {qubits[k]});
  }
  return decohere_all(out, qubits, duration, Regime::linking, timing);
}

ProtocolResult run_exact(const ExactSpec& sp, const ProtocolSettings& s, double alpha) {
  const int n = sp.n;
  const auto C = comm_labels(n), P = photon_labels(n);
  const HardwareParams ideal_hw;
  const double t_link = s.timing.t_link;

  DensityMatrix rho0 = decohere_all(emit_joint_state(s.hw, n, alpha), C, t_link, Regime::linking, s.timing);
  DensityMatrix id0 = emit_joint_state(ideal_hw, n, 0.5);

  const int d = 1 << n;
  Matrix acc = Matrix::Zero(d, d);
  double succ = 0.0, q1 = 0.0;

  auto accumulate = [&](const DensityMatrix& branch, const DensityMatrix& target) {
    PauliString frame = best_pauli_frame(target.data(), sp.canon);
    Matrix F = frame.matrix();
    acc += F * permute(branch, C).data() * F.adjoint();
    succ += branch.trace();
  };

  for (const auto& g1 : sp.round1) {
    HeraldResult h1 = herald(rho0, g1.effect, P);
    HeraldResult i1 = herald(id0, g1.ideal, P);
    q1 += h1.prob;
    if (!i1.possible()) continue;
    DensityMatrix t1 = permute(i1.conditional(), C);
    if (!sp.two_rounds) {
      if (h1.prob > 0) accumulate(h1.branch, t1);
      continue;
    }
    auto gates = sp.between(t1.data());
    DensityMatrix r1 = gate_layer(permute(h1.branch, C), gates, C, s.noise, s.timing, s.timing.t_pc);
    DensityMatrix r2j = decohere_all(emit_again(r1, s.hw, n), C, t_link, Regime::linking, s.timing);
    DensityMatrix t1u = t1;
    for (int k = 0; k < n; ++k) t1u = apply_unitary(t1u, gates[k], {C[k]});
    DensityMatrix i2j = emit_again(t1u, ideal_hw, n);
    for (const auto& g2 : sp.round2) {
      HeraldResult i2 = herald(i2j, g2.ideal, P);
      if (i2.prob < 1e-12) continue;
      HeraldResult h2 = herald(r2j, g2.effect, P);
      if (h2.prob > 0) accumulate(h2.branch, permute(i2.conditional(), C));
    }
  }

  ProtocolResult res;
  res.protocol = sp.name;
  res.success_prob = succ;
  std::vector<Site> sites;
  for (const auto& c : C) sites.push_back({c, 2});
  if (succ > 0) {
    Matrix out = acc / succ;
    out = 0.5 * (out + out.adjoint()).eval();
    res.output_state = DensityMatrix(sites, out);
    res.fidelity = sqrt_fidelity(out, sp.canon);
  } else {
    res.output_state = DensityMatrix(sites, Matrix::Identity(d, d) / double(d));
  }
  res.model.two_rounds = sp.two_rounds;
  res.model.q1 = q1;
  res.model.q2 = sp.two_rounds ? (q1 > 0 ? succ / q1 : 0.0) : 1.0;
  res.model.round_time = t_link;
  res.model.between = sp.two_rounds ? s.timing.t_pc : 0.0;
  if (succ > 0) {
    res.attempts.mean = 1.0 / succ;
    res.attempts.stddev = std::sqrt(1.0 - succ) / succ;
    res.attempts.min = 1;
    res.ghz_time = res.model.mean_time();
  }
  return res;
}

Vector phi_plus_canon(int n) { return ghz_state(n, +1).amplitudes(); }

}  // namespace

double AttemptModel::mean_time() const {
  const double q = success();
  if (!(q > 0)) return std::numeric_limits<double>::infinity();
  if (!two_rounds) return round_time / q;
  return (round_time + q1 * (between + round_time)) / q;
}

double AttemptModel::sample_time(std::mt19937_64& rng) const {
  const double q = success();
  if (!(q > 0)) throw std::runtime_error("protocol never succeeds");
  if (q >= 1.0) return two_rounds ? 2 * round_time + between : round_time;
  long N = std::geometric_distribution<long>(q)(rng) + 1;
  if (!two_rounds) return N * round_time;
  // failed attempts that still passed round one
  double pf = q1 * (1 - q2) / (1 - q);
  long K = N > 1 ? std::binomial_distribution<long>(N - 1, std::clamp(pf, 0.0, 1.0))(rng) : 0;
  return N * round_time + double(K + 1) * (between + round_time);
}

DensityMatrix emit_again(const DensityMatrix& emitters, const HardwareParams& hw, int n) {
  const auto C = comm_labels(n), P = photon_labels(n);
  DensityMatrix rho = permute(emitters, C);
  std::vector<Site> ph;
  for (const auto& p : P) ph.push_back({p, 2});
  Matrix vac = Matrix::Zero(1 << n, 1 << n);
  vac(0, 0) = 1;
  rho = tensor(rho, DensityMatrix(ph, vac));
  const Matrix cnot = gates::CNOT();
  for (int k = 0; k < n; ++k) {
    rho = sandwich(rho, cnot, cnot, {C[k], P[k]});
    if (hw.p_de > 0) rho = apply_channel(rho, double_excitation_dephasing(hw.p_de), {C[k]});
    if (hw.eta_ph < 1) rho = apply_channel(rho, photon_loss(hw.eta_ph), {P[k]});
  }
  std::vector<std::string> order;
  for (int k = 0; k < n; ++k) {
    order.push_back(C[k]);
    order.push_back(P[k]);
  }
  DensityMatrix out = permute(rho, order);
  return emitters.heralded() ? out.as_heralded() : DensityMatrix(out.sites(), out.data());
}

DensityMatrix emit_joint_state(const HardwareParams& hw, int n, double alpha) {
  if (n != 2 && n != 4) throw std::invalid_argument("emit_joint_state supports 2 or 4 modules");
  if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("alpha outside [0,1]");
  return emit_again(prepared_emitters(hw, n, alpha), hw, n);
}

HeraldResult herald(const DensityMatrix& joint, const Matrix& effect, const std::vector<std::string>& photons) {
  HeraldResult r;
  DensityMatrix b = measure_out(joint, effect, photons);
  r.branch = DensityMatrix(b.sites(), 0.5 * (b.data() + b.data().adjoint()), true);
  r.prob = std::max(0.0, r.branch.trace());
  return r;
}

PauliString best_pauli_frame(const Matrix& rho, const Vector& canon, double* overlap) {
  const int n = static_cast<int>(std::lround(std::log2(double(canon.size()))));
  double best = -1;
  PauliString arg = PauliString::identity(n);
  for (uint32_t x = 0; x < (1u << n); ++x) {
    for (uint32_t z = 0; z < (1u << n); ++z) {
      PauliString p = PauliString::from_bits(x, z, n);
      Vector v = p.matrix().adjoint() * canon;  // <canon|P rho P^dag|canon>
      double f = (v.adjoint() * rho * v)(0, 0).real();
      if (f > best + 1e-12) {
        best = f;
        arg = p;
      }
    }
  }
  if (overlap) *overlap = best;
  return arg;
}

ProtocolResult run_bell_sc(const ProtocolSettings& s) {
  ExactSpec sp;
  sp.name = "bell_sc";
  sp.n = 2;
  sp.round1 = bell_groups(s.hw);
  sp.canon = phi_plus_canon(2);
  return run_exact(sp, s, s.hw.alpha);
}

ProtocolResult run_bell_dc(const ProtocolSettings& s) {
  ExactSpec sp;
  sp.name = "bell_dc";
  sp.n = 2;
  sp.round1 = bell_groups(s.hw);
  sp.two_rounds = true;
  sp.between = [](const Matrix&) { return std::vector<Matrix>(2, gates::X()); };
  sp.round2 = bell_groups(s.hw);
  sp.canon = phi_plus_canon(2);
  return run_exact(sp, s, s.hw.alpha);
}

ProtocolResult run_w(const ProtocolSettings& s) {
  ExactSpec sp;
  sp.name = "w";
  sp.round1 = w_groups(s.hw);
  sp.canon = w_state(4).amplitudes();
  return run_exact(sp, s, s.hw.alpha);
}

ProtocolResult run_raw_ghz(const ProtocolSettings& s) {
  ExactSpec sp;
  sp.name = "raw_ghz";
  sp.round1 = pair_groups(s.hw, false);
  sp.canon = phi_plus_canon(4);
  return run_exact(sp, s, s.hw.alpha);
}

ProtocolResult run_dc_ghz(const ProtocolSettings& s) {
  ExactSpec sp;
  sp.name = "dc_ghz";
  sp.round1 = pair_groups(s.hw, false);
  sp.two_rounds = true;
  sp.between = [](const Matrix&) { return std::vector<Matrix>(4, gates::X()); };
  sp.round2 = pair_groups(s.hw, true);
  sp.canon = phi_plus_canon(4);
  return run_exact(sp, s, s.hw.alpha);
}

ProtocolResult run_dc_w(const ProtocolSettings& s) {
  ExactSpec sp;
  sp.name = "dc_w";
  sp.round1 = w_groups(s.hw);
  sp.two_rounds = true;
  sp.between = [](const Matrix& t1) {
    // sign fix to W4, then Z on qubits 1 and 3, then H everywhere
    PauliString fix = best_pauli_frame(t1, w_state(4).amplitudes());
    if (fix.x_bits() != 0) throw std::logic_error("W herald needs a non-diagonal frame");
    uint32_t z = fix.z_bits() ^ 0b0101u;
    std::vector<Matrix> g;
    for (int k = 0; k < 4; ++k) {
      Matrix u = gates::H();
      if ((z >> (3 - k)) & 1u) u = u * gates::Z();
      g.push_back(u);
    }
    return g;
  };
  sp.round2 = pair_groups(s.hw, true);
  sp.canon = phi_plus_canon(4);
  return run_exact(sp, s, s.hw.alpha);
}

RusOutcome rus_sample(double q, std::mt19937_64& rng, long max_attempts) {
  if (max_attempts < 0) throw std::invalid_argument("max_attempts must be >= 0");
  RusOutcome r;
  if (q >= 1.0) {
    r.attempts = 1;
    return r;
  }
  if (!(q > 0)) {
    if (max_attempts == 0) throw std::invalid_argument("zero success probability without attempt limit");
    r.attempts = max_attempts;
    r.timeout = true;
    return r;
  }
  r.attempts = std::geometric_distribution<long>(q)(rng) + 1;
  if (max_attempts > 0 && r.attempts > max_attempts) {
    r.attempts = max_attempts;
    r.timeout = true;
  }
  return r;
}

OracleValue table_i_oracle(const std::string& protocol, double a, bool pnr) {
  if (!(a >= 0 && a <= 1)) throw std::invalid_argument("alpha outside [0,1]");
  const double b = 1 - a;
  OracleValue v;
  auto fid = [&](double f) { if (v.success > 0) v.fidelity = f; };
  if (protocol == "bell_sc") {
    v.success = pnr ? 2 * a * b : a * (2 - a);
    if (v.success > 0) fid(pnr ? 1.0 : std::sqrt(2 * b / (2 - a)));
  } else if (protocol == "bell_dc") {
    v.success = 2 * a * b;
    fid(1.0);
  } else if (protocol == "w") {
    double poly = 32 - 72 * a + 60 * a * a - 17 * a * a * a;
    v.success = pnr ? 4 * a * b * b * b : a * poly / 8;
    if (v.success > 0) fid(pnr ? 1.0 : 4 * std::sqrt(2 * b * b * b / poly));
  } else if (protocol == "raw_ghz") {
    double poly = 5 * a * a - 12 * a + 8;
    v.success = pnr ? 3 * a * a * b * b : 3 * a * a * poly / 8;
    if (v.success > 0) fid(pnr ? 1.0 : 2 * std::sqrt(2.0) * b / std::sqrt(poly));
  } else if (protocol == "dc_ghz") {
    v.success = 3 * a * a * b * b;
    fid(1.0);
  } else if (protocol == "dc_w") {
    double q = 1152 - 2288 * a + 1552 * a * a - 377 * a * a * a;
    v.success = pnr ? 2 * a * b * b * b : a * q / 1024;
    if (v.success > 0)
      fid(pnr ? 1.0 : 8 * std::sqrt((16 - 48 * a + 54 * a * a - 22 * a * a * a) / q));
  } else if (is_memory_protocol(protocol)) {
    throw std::invalid_argument("no closed form for memory distillation protocol " + protocol);
  } else {
    throw std::invalid_argument("unknown protocol " + protocol);
  }
  return v;
}

const std::vector<std::string>& protocol_names() {
  static const std::vector<std::string> names = {
      "bell_sc", "bell_dc", "w", "raw_ghz", "dc_ghz", "dc_w",
      "distil_bell_sc", "distil_bell_dc", "distil_w_ghz", "distil_w_w", "distil_ghz_ghz"};
  return names;
}

bool is_memory_protocol(const std::string& name) { return name.rfind("distil_", 0) == 0; }

DistillKind distill_kind(const std::string& name) {
  if (name == "distil_bell_sc") return DistillKind::bell_sc_to_ghz;
  if (name == "distil_bell_dc") return DistillKind::bell_dc_to_ghz;
  if (name == "distil_w_ghz") return DistillKind::w_to_ghz;
  if (name == "distil_w_w") return DistillKind::w_to_w;
  if (name == "distil_ghz_ghz") return DistillKind::ghz_to_ghz;
  throw std::invalid_argument("unknown distillation protocol " + name);
}

ProtocolResult run_protocol(const std::string& name, const ProtocolSettings& s) {
  s.hw.validate();
  s.timing.validate();
  if (name == "bell_sc") return run_bell_sc(s);
  if (name == "bell_dc") return run_bell_dc(s);
  if (name == "w") return run_w(s);
  if (name == "raw_ghz") return run_raw_ghz(s);
  if (name == "dc_ghz") return run_dc_ghz(s);
  if (name == "dc_w") return run_dc_w(s);
  if (name == "distil_w_w") return distill_w_to_w(s);
  if (name == "distil_ghz_ghz") return distill_ghz_to_ghz(s);
  if (is_memory_protocol(name)) return distill_memory(distill_kind(name), s);
  throw std::invalid_argument("unknown protocol " + name);
}

}  // namespace ghzqec
