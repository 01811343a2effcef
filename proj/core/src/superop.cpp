#include "ghzqec/superop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include "json.hpp"

namespace ghzqec {

namespace {

constexpr int kW = 4;

// Orders a kron of (d_k r_k) blocks as (d0..d3 r0..r3).
Matrix interleaved_to_data_first(const Matrix& J) {
  std::vector<Site> s;
  for (int k = 0; k < kW; ++k) {
    s.push_back({"d" + std::to_string(k), 2});
    s.push_back({"r" + std::to_string(k), 2});
  }
  std::vector<std::string> order;
  for (int k = 0; k < kW; ++k) order.push_back("d" + std::to_string(k));
  for (int k = 0; k < kW; ++k) order.push_back("r" + std::to_string(k));
  return permute(DensityMatrix(s, J, true), order).data();
}

// Per-module conditioned Choi blocks J^{o}(a,b) on (d, r): comm starts as |a><b|.
struct ModuleBlocks {
  Matrix blk[2][2][2];  // [o][a][b]
};

ModuleBlocks module_blocks(StabBasis basis, const CycleConfig& cfg) {
  ModuleBlocks mb;
  Matrix phi = Matrix::Zero(4, 4);  // unnormalized |Phi><Phi| on (d, r)
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 1;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Matrix cab = Matrix::Zero(2, 2);
      cab(a, b) = 1;
      DensityMatrix rho(std::vector<Site>{{"c", 2}, {"d", 2}, {"r", 2}},
                        Eigen::kroneckerProduct(cab, phi).eval(), true);
      rho = module_circuit(rho, "c", "d", basis, cfg);
      Matrix truth[2];
      for (int o = 0; o < 2; ++o) {
        Matrix proj = Matrix::Zero(2, 2);
        proj(o, o) = 1;
        truth[o] = measure_out(rho, proj, {"c"}).data();
      }
      const double pm = cfg.noise.p_meas;
      mb.blk[0][a][b] = (1 - pm) * truth[0] + pm * truth[1];
      mb.blk[1][a][b] = (1 - pm) * truth[1] + pm * truth[0];
    }
  }
  return mb;
}

// Sum over GHZ entries g_ab of the kron of module blocks, parity-signed.
Matrix assemble(const Matrix& ghz, const Matrix blocks[2][2]) {
  const int D = 1 << (2 * kW);
  Matrix J = Matrix::Zero(D, D);
  for (int a = 0; a < (1 << kW); ++a) {
    for (int b = 0; b < (1 << kW); ++b) {
      cplx g = ghz(a, b);
      if (std::abs(g) < 1e-15) continue;
      Matrix k = Matrix::Identity(1, 1);
      for (int q = 0; q < kW; ++q) {
        int aq = (a >> (kW - 1 - q)) & 1, bq = (b >> (kW - 1 - q)) & 1;
        k = Eigen::kroneckerProduct(k, blocks[aq][bq]).eval();
      }
      J += g * k;
    }
  }
  return J;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::runtime_error("bad boolean field: " + s);
}

}  // namespace

char basis_char(StabBasis b) { return b == StabBasis::X ? 'X' : 'Z'; }

StabBasis basis_from_char(char c) {
  if (c == 'X') return StabBasis::X;
  if (c == 'Z') return StabBasis::Z;
  throw std::invalid_argument(std::string("bad stabilizer basis ") + c);
}

PauliString stabilizer_string(StabBasis b) { return PauliString(std::string(kW, basis_char(b))); }

DensityMatrix module_circuit(const DensityMatrix& rho_in, const std::string& comm, const std::string& data,
                             StabBasis basis, const CycleConfig& cfg) {
  const auto& t = cfg.timing;
  DensityMatrix rho = advance_clock_and_decohere(rho_in, data, cfg.t_cut, Regime::linking, t);
  const Matrix U = basis == StabBasis::X ? gates::CNOT() : gates::CZ();
  rho = sandwich(rho, U, U, {comm, data});
  if (cfg.noise.p2 > 0) rho = apply_kraus(rho, depolarizing(cfg.noise.p2, 2).kraus, {comm, data});
  rho = decohere_all(rho, {comm, data}, t.t_2q, Regime::idle, t);
  rho = sandwich(rho, gates::H(), gates::H(), {comm});
  if (cfg.noise.p1 > 0) rho = apply_kraus(rho, depolarizing(cfg.noise.p1, 1).kraus, {comm});
  rho = decohere_all(rho, {comm, data}, t.t_pc, Regime::idle, t);
  rho = advance_clock_and_decohere(rho, data, t.t_meas, Regime::idle, t);
  return rho;
}

std::vector<ConditionedMap> simulate_stabilizer_cycle(const DensityMatrix& ghz, StabBasis basis,
                                                      const CycleConfig& cfg) {
  if (ghz.sites().size() != kW || ghz.dim() != 16) throw std::invalid_argument("stabilizer cycle needs a 4-qubit GHZ state");
  ModuleBlocks mb = module_blocks(basis, cfg);
  Matrix plus[2][2], minus[2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      plus[a][b] = mb.blk[0][a][b] + mb.blk[1][a][b];
      minus[a][b] = mb.blk[0][a][b] - mb.blk[1][a][b];
    }
  Matrix sp = assemble(ghz.data(), plus), sm = assemble(ghz.data(), minus);
  std::vector<ConditionedMap> out;
  for (int m = 0; m < 2; ++m) {
    Matrix J = 0.5 * (m == 0 ? Matrix(sp + sm) : Matrix(sp - sm));
    J = interleaved_to_data_first(J);
    out.push_back({true, m, cfg.ghz_success * J});
  }
  // failure: data qubits only decohere over the window and the skipped circuit
  const double dt = cfg.subround_time();
  const double T = cfg.timing.coherence(cfg.fail_regime);
  Matrix phi = Matrix::Zero(4, 4);
  phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 1;
  Matrix blk = phi;
  if (!std::isinf(T) && dt > 0) {
    DensityMatrix one(std::vector<Site>{{"d", 2}, {"r", 2}}, phi, true);
    blk = apply_kraus(one, decoherence(dt, T).kraus, {"d"}).data();
  }
  Matrix J = Matrix::Identity(1, 1);
  for (int k = 0; k < kW; ++k) J = Eigen::kroneckerProduct(J, blk).eval();
  out.push_back({false, 0, (1 - cfg.ghz_success) * interleaved_to_data_first(J)});
  return out;
}

std::vector<Matrix> kraus_from_choi(const Matrix& J, double clamp, double negative_tol) {
  const int D = static_cast<int>(J.rows());
  const int d = static_cast<int>(std::lround(std::sqrt(double(D))));
  if (d * d != D) throw std::invalid_argument("Choi dimension is not a square");
  if ((J - J.adjoint()).cwiseAbs().maxCoeff() > 1e-9) throw std::invalid_argument("Choi matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (J + J.adjoint()));
  const auto& lam = es.eigenvalues();
  if (lam.minCoeff() < negative_tol) throw std::runtime_error("Choi matrix has a negative eigenvalue: invalid map");
  std::vector<Matrix> out;
  for (int i = 0; i < D; ++i) {
    if (lam(i) <= clamp) continue;
    Vector v = es.eigenvectors().col(i) * std::sqrt(lam(i));
    Matrix K(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) K(r, c) = v(r * d + c);
    out.push_back(K);
  }
  return out;
}

std::vector<cplx> pauli_coefficients(const Matrix& K, int w) {
  const int d = 1 << w;
  if (K.rows() != d || K.cols() != d) throw std::invalid_argument("Kraus size does not match weight");
  const int n = 1 << (2 * w);
  std::vector<cplx> c(n);
  // E = phase * X^x Z^z: E[i ^ x, i] = phase_i; only d entries contribute.
  for (int idx = 0; idx < n; ++idx) {
    PauliString p = PauliString::from_index(w, idx);
    uint32_t x = p.x_bits(), z = p.z_bits();
    int ny = 0;
    for (int k = 0; k < w; ++k) ny += (p[k] == 'Y');
    // Y = i X Z
    static const cplx ipow[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
    cplx ph = ipow[ny % 4];
    cplx acc = 0;
    for (int i = 0; i < d; ++i) {
      double s = (__builtin_popcount(static_cast<uint32_t>(i) & z) & 1) ? -1.0 : 1.0;
      acc += std::conj(ph * s) * K(i ^ static_cast<int>(x), i);
    }
    c[idx] = acc / double(d);
  }
  return c;
}

std::vector<double> pauli_twirl(const std::vector<Matrix>& kraus, int w) {
  std::vector<double> q(1u << (2 * w), 0.0);
  for (const auto& K : kraus) {
    auto c = pauli_coefficients(K, w);
    for (size_t i = 0; i < q.size(); ++i) q[i] += std::norm(c[i]);
  }
  return q;
}

PauliString stabilizer_rep(const PauliString& e, const PauliString& stab) {
  PauliString other = e.times(stab);
  if (other.weight() != e.weight()) return other.weight() < e.weight() ? other : e;
  return std::min(e, other);
}

std::array<double, 4> decoherence_pauli_weights(double dt, double T) {
  if (std::isinf(T) || dt == 0) return {1, 0, 0, 0};
  auto q = pauli_twirl(decoherence(dt, T).kraus, 1);
  return {q[0], q[1], q[2], q[3]};
}

std::vector<TableRow> SuperoperatorTable::rows_for(StabBasis b) const {
  std::vector<TableRow> out;
  for (const auto& r : rows)
    if (r.basis == b) out.push_back(r);
  return out;
}

double SuperoperatorTable::total(StabBasis b) const {
  double s = 0;
  for (const auto& r : rows)
    if (r.basis == b) s += r.probability;
  return s;
}

void SuperoperatorTable::validate(double tol) const {
  bool seen[2] = {false, false};
  for (const auto& r : rows) {
    if (r.pauli.size() != kW) throw std::runtime_error("table row Pauli must have weight-4 support");
    if (r.probability < 0) throw std::runtime_error("negative table probability");
    seen[r.basis == StabBasis::X ? 0 : 1] = true;
  }
  for (StabBasis b : {StabBasis::X, StabBasis::Z}) {
    if (!seen[b == StabBasis::X ? 0 : 1]) continue;
    double t = total(b);
    if (std::abs(t - 1.0) > tol) {
      std::ostringstream os;
      os << "table probabilities for basis " << basis_char(b) << " sum to " << t;
      throw std::runtime_error(os.str());
    }
  }
}

SuperoperatorTable build_table(const DensityMatrix& ghz, const CycleConfig& cfg, const std::vector<StabBasis>& bases) {
  SuperoperatorTable table;
  for (StabBasis basis : bases) {
    auto maps = simulate_stabilizer_cycle(ghz, basis, cfg);
    const PauliString S = stabilizer_string(basis);
    // q[m][rep][s]: weight of E Pi_s under reported parity m
    std::map<PauliString, std::array<std::array<double, 2>, 2>> q;
    for (int i = 0; i < 256; ++i) {
      PauliString e = PauliString::from_index(kW, i);
      if (stabilizer_rep(e, S) == e) q[e] = {};
    }
    for (const auto& cm : maps) {
      if (!cm.ghz_success) continue;
      for (const Matrix& K : kraus_from_choi(cm.choi)) {
        auto c = pauli_coefficients(K, kW);
        for (auto& [e, w] : q) {
          cplx omega;
          PauliString p = e.times(S, &omega);
          cplx ce = c[e.index()], cp = c[p.index()];
          w[cm.outcome][0] += std::norm(ce + std::conj(omega) * cp);  // s = +1
          w[cm.outcome][1] += std::norm(ce - std::conj(omega) * cp);  // s = -1
        }
      }
    }
    // Weights above already carry ghz_success. Outcome bit m <-> eigenvalue (-1)^m.
    for (const auto& [e, w] : q) {
      double truthful = 0.5 * (w[0][0] + w[1][1]);
      double lie = 0.5 * (w[0][1] + w[1][0]);
      table.rows.push_back({basis, e, true, false, std::max(0.0, truthful)});
      table.rows.push_back({basis, e, true, true, std::max(0.0, lie)});
    }
    const double dt = cfg.subround_time();
    auto pw = decoherence_pauli_weights(dt, cfg.timing.coherence(cfg.fail_regime));
    for (int i = 0; i < 256; ++i) {
      PauliString e = PauliString::from_index(kW, i);
      double p = 1 - cfg.ghz_success;
      for (int k = 0; k < kW; ++k) p *= pw[std::string("IXYZ").find(e[k])];
      table.rows.push_back({basis, e, false, false, p});
    }
  }
  // renormalize away the clamp residue
  for (StabBasis b : bases) {
    double t = table.total(b);
    std::ostringstream os;
    os << std::setprecision(17) << t;
    table.meta[std::string("raw_total_") + basis_char(b)] = os.str();
    for (auto& r : table.rows)
      if (r.basis == b) r.probability /= t;
  }
  return table;
}

Matrix recombine_success(const SuperoperatorTable& t, StabBasis b, int m, const Matrix& rho) {
  const Matrix S = stabilizer_string(b).matrix();
  const Matrix I = Matrix::Identity(16, 16);
  const double sign = m == 0 ? 1.0 : -1.0;
  const Matrix Pm = 0.5 * (I + sign * S), Pn = 0.5 * (I - sign * S);
  const Matrix a = Pm * rho * Pm, c = Pn * rho * Pn;
  Matrix out = Matrix::Zero(16, 16);
  for (const auto& r : t.rows) {
    if (r.basis != b || !r.ghz_success || r.probability == 0) continue;
    Matrix E = r.pauli.matrix();
    out += r.probability * E * (r.meas_error ? c : a) * E.adjoint();
  }
  return out;
}

Matrix recombine_failure(const SuperoperatorTable& t, StabBasis b, const Matrix& rho) {
  Matrix out = Matrix::Zero(16, 16);
  for (const auto& r : t.rows) {
    if (r.basis != b || r.ghz_success || r.probability == 0) continue;
    Matrix E = r.pauli.matrix();
    out += r.probability * E * rho * E.adjoint();
  }
  return out;
}

std::string table_to_csv(const SuperoperatorTable& t) {
  std::ostringstream os;
  os << "basis,pauli,ghz_success,meas_error,probability\n";
  os << std::setprecision(17);
  for (const auto& r : t.rows)
    os << basis_char(r.basis) << ',' << r.pauli.str() << ',' << bool_str(r.ghz_success) << ','
       << bool_str(r.meas_error) << ',' << r.probability << '\n';
  return os.str();
}

SuperoperatorTable table_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty table file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "basis,pauli,ghz_success,meas_error,probability") throw std::runtime_error("unexpected table header: " + line);
  SuperoperatorTable t;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 5 || f[0].size() != 1) throw std::runtime_error("malformed table row at line " + std::to_string(lineno));
    TableRow r;
    try {
      r.basis = basis_from_char(f[0][0]);
      r.pauli = PauliString(f[1]);
      r.ghz_success = parse_bool(f[2]);
      r.meas_error = parse_bool(f[3]);
      size_t used = 0;
      r.probability = std::stod(f[4], &used);
      if (used != f[4].size()) throw std::runtime_error("trailing characters");
    } catch (const std::exception& e) {
      throw std::runtime_error("malformed table row at line " + std::to_string(lineno) + ": " + e.what());
    }
    t.rows.push_back(r);
  }
  t.validate();
  return t;
}

void export_table(const SuperoperatorTable& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << table_to_csv(t);
  // metadata sidecar
  nlohmann::json meta = nlohmann::json::object();
  meta["schema"] = "ghzqec.table_meta/1";
  for (const auto& [k, v] : t.meta) meta[k] = v;
  std::ofstream side(path + ".json");
  if (!side) throw std::runtime_error("cannot write " + path + ".json");
  side << meta.dump(2) << '\n';
}

SuperoperatorTable import_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  SuperoperatorTable t = table_from_csv(ss.str());
  std::ifstream side(path + ".json");
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side);
    if (meta.value("schema", "") != "ghzqec.table_meta/1")
      throw std::runtime_error("unsupported table metadata schema in " + path + ".json");
    for (const auto& [k, v] : meta.items())
      if (k != "schema") t.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  return t;
}

}  // namespace ghzqec
