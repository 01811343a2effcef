#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "json.hpp"

#include "ghzqec/bundled_data.hpp"
#include "ghzqec/protocols.hpp"
#include "ghzqec/seeding.hpp"

namespace ghzqec {

namespace {

const std::vector<std::string> kC = {"c0", "c1", "c2", "c3"};
const std::vector<std::string> kM = {"m0", "m1", "m2", "m3"};

std::string bits4(int b) {
  std::string s(4, '0');
  for (int k = 0; k < 4; ++k)
    if ((b >> (3 - k)) & 1) s[k] = '1';
  return s;
}

Matrix zero_state(int n) {
  Matrix m = Matrix::Zero(1 << n, 1 << n);
  m(0, 0) = 1;
  return m;
}

DensityMatrix on_labels(const std::vector<std::string>& labels, const Matrix& m) {
  return DensityMatrix::qubits(labels, m);
}

struct Circuit {
  DistillKind kind;
  bool two_bell = false;
  bool hadamard_frame = false;  // base stored as H^4 |base>
  bool comm_controls = false;
  bool measure_x = false;
  bool rotate_output = false;   // distilled state is H^4 |GHZ>
  std::vector<Matrix> base_rot;  // on communication qubits before the swap
  std::vector<Matrix> res_rot;   // on the resource before the CNOTs
  std::set<std::string> accepted;
};

Circuit circuit_for(DistillKind kind) {
  Circuit c;
  c.kind = kind;
  const Matrix H = gates::H(), Z = gates::Z();
  switch (kind) {
    case DistillKind::bell_sc_to_ghz:
    case DistillKind::bell_dc_to_ghz:
      c.two_bell = true;
      c.hadamard_frame = true;
      c.comm_controls = true;
      c.measure_x = true;
      c.accepted = {"0000", "1100", "0011", "1111"};
      break;
    case DistillKind::w_to_ghz:
      c.res_rot = std::vector<Matrix>(4, H);
      c.accepted = w_to_ghz_patterns();
      break;
    case DistillKind::w_to_w:
      c.base_rot = {H * Z, H, H, H};
      c.rotate_output = true;
      c.res_rot = {H, H * Z, H, H};
      // outcomes that land in the even set after the X1 X2 frame of the rotated pair
      for (const char* s : {"0011", "0101", "0110", "1001", "1010", "1100"})
        c.accepted.insert(bits4(std::stoi(s, nullptr, 2) ^ 0b1100));
      break;
    case DistillKind::ghz_to_ghz:
      c.accepted = {"0000", "1111"};
      break;
  }
  return c;
}

// Ideal versions of the heralded inputs (after their Pauli frame).
Matrix canonical_base(DistillKind k) {
  const Vector v = (k == DistillKind::w_to_w) ? w_state(4).amplitudes() : ghz_state(4).amplitudes();
  return v * v.adjoint();
}

Matrix canonical_resource(DistillKind k) {
  Vector v;
  switch (k) {
    case DistillKind::bell_sc_to_ghz:
    case DistillKind::bell_dc_to_ghz: {
      Vector b = bell_state(false, +1).amplitudes();
      v = Eigen::kroneckerProduct(b, b).eval();
      break;
    }
    case DistillKind::w_to_ghz:
    case DistillKind::w_to_w: v = w_state(4).amplitudes(); break;
    case DistillKind::ghz_to_ghz: v = ghz_state(4).amplitudes(); break;
  }
  return v * v.adjoint();
}

DensityMatrix layer_1q(DensityMatrix rho, const std::vector<Matrix>& g, const std::vector<std::string>& q,
                       double p1) {
  for (size_t k = 0; k < q.size(); ++k) {
    rho = apply_unitary(rho, g[k], {q[k]});
    if (p1 > 0) rho = apply_channel(rho, depolarizing(p1, 1), {q[k]});
  }
  return rho;
}

DensityMatrix layer_2q(DensityMatrix rho, const Matrix& U, const std::vector<std::string>& a,
                       const std::vector<std::string>& b, double p2) {
  for (size_t k = 0; k < a.size(); ++k) {
    rho = apply_unitary(rho, U, {a[k], b[k]});
    if (p2 > 0) rho = apply_channel(rho, depolarizing(p2, 2), {a[k], b[k]});
  }
  return rho;
}

std::vector<std::string> all_qubits(const DensityMatrix& rho) { return rho.labels(); }

// Moves a 4-qubit state between communication and memory registers with a
// noisy SWAP; `from` holds the state, `to` starts in |0000>.
DensityMatrix swap_register(const DensityMatrix& state, const std::vector<std::string>& from,
                            const std::vector<std::string>& to, const ProtocolSettings& s) {
  DensityMatrix rho = tensor(state, on_labels(to, zero_state(4)));
  rho = layer_2q(rho, gates::SWAP(), from, to, s.noise.p2);
  rho = decohere_all(rho, all_qubits(rho), s.timing.t_swap, Regime::idle, s.timing);
  DensityMatrix out = partial_trace(rho, to);
  return state.heralded() ? out : DensityMatrix(out.sites(), out.data() / out.trace());
}

DensityMatrix h_frame(const DensityMatrix& rho, const std::vector<std::string>& q) {
  DensityMatrix out = rho;
  for (const auto& l : q) out = sandwich(out, gates::H(), gates::H(), {l});
  return out;
}

struct Stored {
  DensityMatrix memory;  // base on m0..m3 after swap (and frame)
};

Stored store_base(const Circuit& c, const Matrix& base, const ProtocolSettings& s) {
  DensityMatrix b = on_labels(kC, base);
  if (!c.base_rot.empty()) {
    b = layer_1q(b, c.base_rot, kC, s.noise.p1);
    b = decohere_all(b, kC, s.timing.t_pc, Regime::linking, s.timing);
  }
  DensityMatrix m = swap_register(b, kC, kM, s);
  if (c.hadamard_frame) m = h_frame(m, kM);
  return {m};
}

// Per reported outcome, the unnormalized memory state (frame undone).
std::vector<DensityMatrix> outcome_branches(const Circuit& c, const Stored& st, const Matrix& resource,
                                            double wait, const ProtocolSettings& s) {
  DensityMatrix mem = decohere_all(st.memory, kM, wait, Regime::linking, s.timing);
  DensityMatrix res = on_labels(kC, resource);
  double t_res = 0;
  if (!c.res_rot.empty()) {
    res = layer_1q(res, c.res_rot, kC, s.noise.p1);
    res = decohere_all(res, kC, s.timing.t_pc, Regime::linking, s.timing);
    t_res = s.timing.t_pc;
  }
  mem = decohere_all(mem, kM, t_res, Regime::linking, s.timing);
  DensityMatrix rho = tensor(mem, res);
  rho = c.comm_controls ? layer_2q(rho, gates::CNOT(), kC, kM, s.noise.p2)
                        : layer_2q(rho, gates::CNOT(), kM, kC, s.noise.p2);
  rho = decohere_all(rho, all_qubits(rho), s.timing.t_2q, Regime::idle, s.timing);
  if (c.measure_x) {
    rho = layer_1q(rho, std::vector<Matrix>(4, gates::H()), kC, s.noise.p1);
    rho = decohere_all(rho, all_qubits(rho), s.timing.t_pc, Regime::idle, s.timing);
  }
  rho = decohere_all(rho, kM, s.timing.t_meas, Regime::idle, s.timing);

  std::vector<DensityMatrix> truth;
  for (int b = 0; b < 16; ++b) {
    Matrix proj = Matrix::Zero(16, 16);
    proj(b, b) = 1;
    truth.push_back(measure_out(rho, proj, kC));
  }
  const double pm = s.noise.p_meas;
  std::vector<DensityMatrix> reported;
  for (int r = 0; r < 16; ++r) {
    Matrix acc = Matrix::Zero(16, 16);
    for (int b = 0; b < 16; ++b) {
      int flips = __builtin_popcount(r ^ b);
      double w = std::pow(pm, flips) * std::pow(1 - pm, 4 - flips);
      if (w > 0) acc += w * truth[b].data();
    }
    DensityMatrix d(truth[0].sites(), acc, true);
    if (c.hadamard_frame || c.rotate_output) d = h_frame(d, kM);
    reported.push_back(d);
  }
  return reported;
}

struct PatternTable {
  Circuit circuit;
  MeasurementPattern pattern;
};

PatternTable build_pattern(DistillKind kind) {
  PatternTable t{circuit_for(kind), {}};
  ProtocolSettings ideal;
  ideal.timing = TimingParams::noiseless();
  Stored st = store_base(t.circuit, canonical_base(kind), ideal);
  auto br = outcome_branches(t.circuit, st, canonical_resource(kind), 0.0, ideal);
  const Vector canon = ghz_state(4).amplitudes();
  t.pattern.accepted = t.circuit.accepted;
  for (int r = 0; r < 16; ++r) {
    double p = br[r].trace();
    t.pattern.corrections.push_back(
        p > 1e-12 ? best_pauli_frame(br[r].data() / p, canon).str() : std::string("IIII"));
  }
  return t;
}

const PatternTable& pattern_table(DistillKind kind) {
  static std::mutex m;
  static std::map<DistillKind, PatternTable> cache;
  std::lock_guard lk(m);
  auto it = cache.find(kind);
  if (it == cache.end()) it = cache.emplace(kind, build_pattern(kind)).first;
  return it->second;
}

struct ShotValue {
  double p_distil = 0;
  double fidelity = 0;
  Matrix state;
};

ShotValue evaluate(const PatternTable& pt, const Stored& st, const Matrix& resource, double wait,
                   const ProtocolSettings& s) {
  auto br = outcome_branches(pt.circuit, st, resource, wait, s);
  Matrix acc = Matrix::Zero(16, 16);
  for (int r = 0; r < 16; ++r) {
    if (!pt.pattern.accepted.count(bits4(r))) continue;
    Matrix P = PauliString(pt.pattern.corrections[r]).matrix();
    acc += P * br[r].data() * P.adjoint();
  }
  ShotValue v;
  v.p_distil = acc.trace().real();
  if (v.p_distil <= 0) {
    v.state = Matrix::Identity(16, 16) / 16.0;
    return v;
  }
  DensityMatrix back = swap_register(on_labels(kM, acc / v.p_distil), kM, kC, s);
  v.state = back.data();
  v.fidelity = sqrt_fidelity(v.state, ghz_state(4).amplitudes());
  return v;
}

ProtocolSettings with_alpha(const ProtocolSettings& s, double a) {
  ProtocolSettings o = s;
  o.hw.alpha = a;
  return o;
}

ProtocolResult run_memory(DistillKind kind, const ProtocolSettings& s, const std::string& name) {
  const PatternTable& pt = pattern_table(kind);
  const Circuit& c = pt.circuit;

  ProtocolResult base, res;
  switch (kind) {
    case DistillKind::bell_sc_to_ghz:
    case DistillKind::bell_dc_to_ghz:
    case DistillKind::w_to_ghz:
    case DistillKind::ghz_to_ghz: base = run_raw_ghz(with_alpha(s, s.hw.alpha_base)); break;
    case DistillKind::w_to_w: base = run_w(with_alpha(s, s.hw.alpha_base)); break;
  }
  ProtocolSettings rs = with_alpha(s, s.hw.alpha_distil);
  Matrix resource;
  switch (kind) {
    case DistillKind::bell_sc_to_ghz:
    case DistillKind::bell_dc_to_ghz: {
      res = kind == DistillKind::bell_sc_to_ghz ? run_bell_sc(rs) : run_bell_dc(rs);
      resource = Eigen::kroneckerProduct(res.output_state.data(), res.output_state.data()).eval();
      break;
    }
    case DistillKind::w_to_ghz:
    case DistillKind::w_to_w: res = run_w(rs); resource = res.output_state.data(); break;
    case DistillKind::ghz_to_ghz: res = run_raw_ghz(rs); resource = res.output_state.data(); break;
  }

  Stored st = store_base(c, base.output_state.data(), s);
  const double t_circuit = (c.base_rot.empty() ? 0 : s.timing.t_pc) + 2 * s.timing.t_swap +
                           (c.res_rot.empty() ? 0 : s.timing.t_pc) + s.timing.t_2q +
                           (c.measure_x ? s.timing.t_pc : 0) + s.timing.t_meas;

  std::map<long, ShotValue> memo;
  auto value_for = [&](long wait_attempts) -> const ShotValue& {
    auto it = memo.find(wait_attempts);
    if (it == memo.end())
      it = memo.emplace(wait_attempts,
                        evaluate(pt, st, resource, wait_attempts * s.timing.t_link, s)).first;
    return it->second;
  };

  if (s.shots < 1) throw std::invalid_argument("shots must be >= 1");
  double rate = 0, fsum = 0, n_sum = 0, n_sq = 0;
  long n_min = std::numeric_limits<long>::max(), n_max = 0;
  Matrix out = Matrix::Zero(16, 16);
  double wsum = 0, pending = 0;
  ProtocolResult r;
  r.protocol = name;
  r.per_shot = true;
  for (long i = 0; i < s.shots; ++i) {
    auto rng = make_rng(s.seed, static_cast<uint64_t>(i));
    RusOutcome nb = rus_sample(base.success_prob, rng, s.max_attempts);
    RusOutcome n1 = rus_sample(res.success_prob, rng, s.max_attempts);
    long n_res = n1.attempts;
    bool timeout = nb.timeout || n1.timeout;
    if (c.two_bell) {
      RusOutcome n2 = rus_sample(res.success_prob, rng, s.max_attempts);
      n_res = std::max(n_res, n2.attempts);
      timeout = timeout || n2.timeout;
    }
    const long total = nb.attempts + n_res;
    n_sum += total;
    n_sq += double(total) * total;
    n_min = std::min(n_min, total);
    n_max = std::max(n_max, total);
    pending += total * s.timing.t_link + t_circuit;
    if (timeout) continue;
    const ShotValue& v = value_for(n_res);
    rate += v.p_distil / double(total);
    fsum += v.fidelity;
    out += v.p_distil * v.state;
    wsum += v.p_distil;
    if (std::uniform_real_distribution<double>(0, 1)(rng) < v.p_distil) {
      r.time_samples.push_back(pending);
      pending = 0;
    }
  }
  const double N = double(s.shots);
  r.success_prob = rate / N;
  r.fidelity = fsum / N;
  r.output_state = DensityMatrix::qubits(kC, wsum > 0 ? Matrix(out / wsum) : Matrix(Matrix::Identity(16, 16) / 16.0));
  r.attempts.mean = n_sum / N;
  r.attempts.stddev = std::sqrt(std::max(0.0, n_sq / N - r.attempts.mean * r.attempts.mean));
  r.attempts.min = n_min;
  r.attempts.max = n_max;
  r.attempts.samples = s.shots;
  double tsum = 0;
  for (double t : r.time_samples) tsum += t;
  r.ghz_time = r.time_samples.empty() ? std::numeric_limits<double>::infinity()
                                      : tsum / double(r.time_samples.size());
  return r;
}

}  // namespace

std::set<std::string> w_to_ghz_patterns() {
  static const std::set<std::string> pats = [] {
    auto j = nlohmann::json::parse(bundled::w_to_ghz_patterns_json());
    std::set<std::string> out;
    for (const auto& p : j.at("patterns")) out.insert(p.get<std::string>());
    return out;
  }();
  return pats;
}

std::set<std::string> derive_w_to_ghz_patterns(double alpha) {
  ProtocolSettings s;
  s.hw = HardwareParams{}.with_alpha(alpha);
  s.hw.pnr = true;
  s.timing = TimingParams::noiseless();
  Circuit c = circuit_for(DistillKind::ghz_to_ghz);
  c.kind = DistillKind::w_to_ghz;
  c.res_rot = std::vector<Matrix>(4, gates::H());
  Stored st = store_base(c, run_raw_ghz(s).output_state.data(), s);
  auto br = outcome_branches(c, st, run_w(s).output_state.data(), 0.0, s);
  const Vector canon = ghz_state(4).amplitudes();
  std::set<std::string> out;
  for (int r = 0; r < 16; ++r) {
    double p = br[r].trace();
    if (p < 1e-9) continue;
    double ov = 0;
    best_pauli_frame(br[r].data() / p, canon, &ov);
    if (1.0 - std::sqrt(std::max(0.0, ov)) < 1e-3) out.insert(bits4(r));
  }
  return out;
}

const MeasurementPattern& distill_pattern(DistillKind kind) { return pattern_table(kind).pattern; }

ProtocolResult distill_memory(DistillKind kind, const ProtocolSettings& s) {
  static const char* names[] = {"distil_bell_sc", "distil_bell_dc", "distil_w_ghz", "distil_w_w",
                                "distil_ghz_ghz"};
  return run_memory(kind, s, names[static_cast<int>(kind)]);
}

ProtocolResult distill_w_to_w(const ProtocolSettings& s) { return run_memory(DistillKind::w_to_w, s, "distil_w_w"); }

ProtocolResult distill_ghz_to_ghz(const ProtocolSettings& s) {
  return run_memory(DistillKind::ghz_to_ghz, s, "distil_ghz_ghz");
}

}  // namespace ghzqec
