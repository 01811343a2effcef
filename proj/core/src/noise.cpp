#include "ghzqec/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "ghzqec/bundled_data.hpp"
#include "ghzqec/pauli.hpp"

namespace ghzqec {

namespace {

void require_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " outside [0,1]");
}

Matrix m2(cplx a, cplx b, cplx c, cplx d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double decay(double t, double T) {
  if (t < 0) throw std::invalid_argument("negative duration");
  if (!(T > 0)) throw std::invalid_argument("coherence time must be positive");
  if (std::isinf(T)) return 0.0;
  return -std::expm1(-t / T);
}

}  // namespace

bool NoiseChannel::trace_preserving(double tol) const {
  if (kraus.empty()) return false;
  Matrix s = Matrix::Zero(kraus[0].cols(), kraus[0].cols());
  for (const auto& K : kraus) s += K.adjoint() * K;
  return (s - Matrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff() <= tol;
}

Matrix NoiseChannel::ptm() const {
  auto ps = all_paulis(arity);
  const int n = static_cast<int>(ps.size());
  const double dim = std::pow(2.0, arity);
  std::vector<Matrix> P;
  for (const auto& p : ps) P.push_back(p.matrix());
  Matrix R(n, n);
  for (int j = 0; j < n; ++j) {
    Matrix out = Matrix::Zero(P[j].rows(), P[j].cols());
    for (const auto& K : kraus) out += K * P[j] * K.adjoint();
    for (int i = 0; i < n; ++i) R(i, j) = (P[i] * out).trace() / dim;
  }
  return R;
}

NoiseChannel identity_channel(int arity) {
  return {{Matrix::Identity(1 << arity, 1 << arity)}, arity};
}

NoiseChannel depolarizing(double p, int arity) {
  require_prob(p, "depolarizing p");
  if (arity != 1 && arity != 2) throw std::invalid_argument("depolarizing arity must be 1 or 2");
  auto ps = all_paulis(arity);
  const double rest = p / double(ps.size() - 1);
  NoiseChannel ch{{}, arity};
  ch.kraus.push_back(std::sqrt(1.0 - p) * ps[0].matrix());
  if (p > 0)
    for (size_t i = 1; i < ps.size(); ++i) ch.kraus.push_back(std::sqrt(rest) * ps[i].matrix());
  return ch;
}

NoiseChannel gad(double t, double T1) {
  const double g = decay(t, T1);
  const double s = 1.0 / std::sqrt(2.0);
  NoiseChannel ch{{}, 1};
  ch.kraus.push_back(s * m2(1, 0, 0, std::sqrt(1 - g)));
  ch.kraus.push_back(s * m2(0, std::sqrt(g), 0, 0));
  ch.kraus.push_back(s * m2(std::sqrt(1 - g), 0, 0, 1));
  ch.kraus.push_back(s * m2(0, 0, std::sqrt(g), 0));
  return ch;
}

NoiseChannel phase_damping(double t, double T2) {
  const double g = decay(t, T2);
  return {{m2(1, 0, 0, std::sqrt(1 - g)), m2(0, 0, 0, std::sqrt(g))}, 1};
}

NoiseChannel dephasing(double p) {
  require_prob(p, "dephasing p");
  return {{std::sqrt(1 - p) * gates::I2(), std::sqrt(p) * gates::Z()}, 1};
}

NoiseChannel prep_dephasing(double f_prep) {
  if (!(f_prep >= 0.5 && f_prep <= 1.0)) throw std::invalid_argument("f_prep outside [0.5,1]");
  return dephasing(1.0 - f_prep);
}

NoiseChannel photon_loss(double eta) {
  require_prob(eta, "eta");
  return {{m2(1, 0, 0, std::sqrt(eta)), m2(0, std::sqrt(1 - eta), 0, 0)}, 1};
}

NoiseChannel double_excitation_dephasing(double p_de) { return dephasing(p_de); }

NoiseChannel compose(const NoiseChannel& first, const NoiseChannel& second) {
  if (first.arity != second.arity) throw std::invalid_argument("compose: arity mismatch");
  NoiseChannel ch{{}, first.arity};
  for (const auto& B : second.kraus)
    for (const auto& A : first.kraus) ch.kraus.push_back(B * A);
  return ch;
}

NoiseChannel decoherence(double dt, double T) { return compose(gad(dt, T), phase_damping(dt, T)); }

DensityMatrix apply_channel(const DensityMatrix& rho, const NoiseChannel& ch,
                            const std::vector<std::string>& targets) {
  if (static_cast<int>(targets.size()) != ch.arity) throw std::invalid_argument("channel arity mismatch");
  if (ch.kraus.size() == 1 && (ch.kraus[0] - Matrix::Identity(ch.kraus[0].rows(), ch.kraus[0].cols()))
                                      .cwiseAbs().maxCoeff() == 0.0)
    return rho;
  return apply_kraus(rho, ch.kraus, targets);
}

void HardwareParams::validate() const {
  for (double v : {alpha, alpha_base, alpha_distil, eta_ph, mu_I, f_prep, p_de}) require_prob(v, "hardware parameter");
}

HardwareParams HardwareParams::with_alpha(double a) const {
  HardwareParams h = *this;
  h.alpha = h.alpha_base = h.alpha_distil = a;
  return h;
}

void TimingParams::validate() const {
  for (double v : {T_link, T_idle, t_link, t_meas, t_pc, t_pm, t_2q, t_swap})
    if (!(v >= 0)) throw std::invalid_argument("timing parameters must be non-negative");
  if (!(T_link > 0 && T_idle > 0)) throw std::invalid_argument("coherence times must be positive");
}

TimingParams TimingParams::noiseless() {
  TimingParams t;
  t.T_link = t.T_idle = std::numeric_limits<double>::infinity();
  return t;
}

HardwareParams hardware_set(const std::string& name) {
  static const nlohmann::json table = nlohmann::json::parse(bundled::hardware_sets_json());
  const auto& sets = table.at("sets");
  if (!sets.contains(name)) throw std::invalid_argument("unknown hardware set: " + name);
  const auto& row = sets.at(name);
  HardwareParams h;
  h.f_prep = row.at(0).get<double>();
  h.p_de = row.at(1).get<double>();
  h.mu_I = row.at(2).get<double>();
  h.eta_ph = row.at(3).get<double>();
  return h;
}

std::vector<std::string> hardware_set_names() {
  std::vector<std::string> out;
  for (int i = 1; i <= 18; ++i) out.push_back("ES-" + std::to_string(i));
  return out;
}

void QubitClock::advance(const std::string& q, double dt, Regime r) {
  if (dt < 0) throw std::invalid_argument("clock cannot go backwards");
  elapsed_[q] += dt;
  regime_[q] = r;
}

double QubitClock::elapsed(const std::string& q) const {
  auto it = elapsed_.find(q);
  return it == elapsed_.end() ? 0.0 : it->second;
}

Regime QubitClock::regime(const std::string& q) const {
  auto it = regime_.find(q);
  return it == regime_.end() ? Regime::idle : it->second;
}

DensityMatrix advance_clock_and_decohere(const DensityMatrix& rho, const std::string& qubit, double dt,
                                         Regime regime, const TimingParams& timing, QubitClock* clock) {
  rho.index_of(qubit);
  if (clock) clock->advance(qubit, dt, regime);
  const double T = timing.coherence(regime);
  if (dt == 0 || std::isinf(T)) return rho;
  return apply_kraus(rho, decoherence(dt, T).kraus, {qubit});
}

DensityMatrix decohere_all(const DensityMatrix& rho, const std::vector<std::string>& qubits, double dt,
                           Regime regime, const TimingParams& timing, QubitClock* clock) {
  DensityMatrix out = rho;
  for (const auto& q : qubits) out = advance_clock_and_decohere(out, q, dt, regime, timing, clock);
  return out;
}

}  // namespace ghzqec
