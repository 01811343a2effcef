#include "ghzqec/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ghzqec {

namespace {

std::string cache_key(const Matrix& net, const std::vector<int>& counts, const Matrix& mu) {
  std::ostringstream os;
  os << std::hexfloat << net.rows() << 'x' << net.cols() << ';';
  for (Eigen::Index i = 0; i < net.size(); ++i) os << net(i).real() << ',' << net(i).imag() << ';';
  for (int c : counts) os << c << ':';
  for (Eigen::Index i = 0; i < mu.size(); ++i) os << mu(i).real() << ',' << mu(i).imag() << ';';
  return os.str();
}

struct PovmCache {
  std::shared_mutex m;
  std::unordered_map<std::string, Matrix> store;
};

PovmCache& cache() {
  static PovmCache c;
  return c;
}

// Ports occupied in input basis index `s` (port 0 is the MSB), ascending.
std::vector<int> occupied(int s, int ports) {
  std::vector<int> out;
  for (int j = 0; j < ports; ++j)
    if ((s >> (ports - 1 - j)) & 1) out.push_back(j);
  return out;
}

Matrix compute_pattern(const Matrix& V, const std::vector<int>& counts, const Matrix& mu) {
  const int ports = static_cast<int>(V.rows());
  const int dim = 1 << ports;
  std::vector<int> outs;
  double norm = 1.0;
  for (size_t k = 0; k < counts.size(); ++k) {
    for (int c = 0; c < counts[k]; ++c) outs.push_back(static_cast<int>(k));
    norm *= std::tgamma(counts[k] + 1.0);
  }
  const int N = static_cast<int>(outs.size());
  Matrix E = Matrix::Zero(dim, dim);

  std::vector<int> inputs;
  for (int s = 0; s < dim; ++s)
    if (__builtin_popcount(s) == N) inputs.push_back(s);

  std::vector<int> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  for (int s : inputs) {
    auto J = occupied(s, ports);
    for (int t : inputs) {
      auto Jp = occupied(t, ports);
      cplx acc = 0.0;
      for (const auto& sg : perms) {
        for (const auto& sp : perms) {
          cplx term = 1.0;
          for (int k = 0; k < N; ++k) {
            int a = J[sg[k]], b = Jp[sp[k]];
            term *= V(a, outs[k]) * std::conj(V(b, outs[k])) * mu(a, b);
          }
          acc += term;
        }
      }
      E(s, t) = acc / norm;
    }
  }
  return E;
}

}  // namespace

VisibilityMatrix VisibilityMatrix::uniform(int ports, cplx m) {
  VisibilityMatrix v;
  v.mu = Matrix::Constant(ports, ports, m);
  for (int j = 0; j < ports; ++j) {
    v.mu(j, j) = 1.0;
    for (int k = j + 1; k < ports; ++k) v.mu(k, j) = std::conj(m);
  }
  return v;
}

void VisibilityMatrix::validate() const {
  if (mu.rows() != mu.cols()) throw std::invalid_argument("visibility matrix not square");
  for (int j = 0; j < mu.rows(); ++j) {
    if (std::abs(mu(j, j) - 1.0) > 1e-12) throw std::invalid_argument("visibility diagonal must be 1");
    for (int k = 0; k < mu.cols(); ++k) {
      if (std::abs(mu(k, j) - std::conj(mu(j, k))) > 1e-12)
        throw std::invalid_argument("visibility matrix not Hermitian");
      if (std::abs(mu(j, k)) > 1 + 1e-12) throw std::invalid_argument("|mu| > 1");
    }
  }
}

Matrix beamsplitter_4x4() {
  Matrix V(4, 4);
  V << 1, 1, 1, 1,
       1, -1, 1, -1,
       1, 1, -1, -1,
       1, -1, -1, 1;
  return V * 0.5;
}

Matrix bell_beamsplitter() {
  Matrix V(2, 2);
  V << 1, 1, 1, -1;
  return V / std::sqrt(2.0);
}

Matrix bell_pairs_network() {
  Matrix V = Matrix::Zero(4, 4);
  V.block(0, 0, 2, 2) = bell_beamsplitter();
  V.block(2, 2, 2, 2) = bell_beamsplitter();
  return V;
}

double intensity_to_amplitude_visibility(double mu_I) {
  if (!(mu_I >= 0.0 && mu_I <= 1.0)) throw std::invalid_argument("mu_I outside [0,1]");
  return std::sqrt(mu_I);
}

PovmElement pattern_povm(const Matrix& network, const std::vector<int>& counts,
                         const VisibilityMatrix& mu) {
  if (static_cast<int>(counts.size()) != network.cols())
    throw std::invalid_argument("pattern length must match detector count");
  if (mu.ports() != network.rows()) throw std::invalid_argument("visibility size mismatch");
  int N = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("negative photon count");
    N += c;
  }
  if (N > network.rows()) throw std::invalid_argument("more photons than input ports");

  auto key = cache_key(network, counts, mu.mu);
  auto& c = cache();
  {
    std::shared_lock lk(c.m);
    auto it = c.store.find(key);
    if (it != c.store.end()) return {it->second, counts};
  }
  Matrix E = compute_pattern(network, counts, mu.mu);
  {
    std::unique_lock lk(c.m);
    c.store.emplace(key, E);
  }
  return {E, counts};
}

size_t povm_cache_size() {
  auto& c = cache();
  std::shared_lock lk(c.m);
  return c.store.size();
}

PovmElement w_povm(int k, int n, const VisibilityMatrix& mu) {
  if (n < 1 || n > 4) throw std::invalid_argument("W pattern photon number must be 1..4");
  if (k < 0 || k > 3) throw std::invalid_argument("detector index out of range");
  std::vector<int> counts(4, 0);
  counts[k] = n;
  return pattern_povm(beamsplitter_4x4(), counts, mu);
}

PovmElement ghz_povm(int det_a, int det_b, int n_a, int n_b, const VisibilityMatrix& mu) {
  static const std::array<std::pair<int, int>, 6> ok = {
      {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}}};
  if (std::find(ok.begin(), ok.end(), std::make_pair(n_a, n_b)) == ok.end())
    throw std::invalid_argument("unsupported GHZ count pattern");
  if (det_a == det_b || det_a < 0 || det_b < 0 || det_a > 3 || det_b > 3)
    throw std::invalid_argument("GHZ pattern needs two distinct detectors");
  std::vector<int> counts(4, 0);
  counts[det_a] = n_a;
  counts[det_b] = n_b;
  return pattern_povm(beamsplitter_4x4(), counts, mu);
}

PovmElement bunching_povm(int k, const VisibilityMatrix& mu) {
  std::vector<int> counts(4, 0);
  counts[k] = 2;
  return pattern_povm(beamsplitter_4x4(), counts, mu);
}

BellPovmSet bell_povm_set(cplx m) {
  if (std::abs(m) > 1 + 1e-12) throw std::invalid_argument("|mu| > 1");
  auto vis = VisibilityMatrix::uniform(2, m);
  Matrix V = bell_beamsplitter();
  BellPovmSet s;
  const std::array<std::vector<int>, 6> pats = {
      {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}}};
  for (int i = 0; i < 6; ++i) s.elements[i] = pattern_povm(V, pats[i], vis);
  return s;
}

std::vector<PovmElement> w_count_family(int k, const VisibilityMatrix& mu) {
  std::vector<PovmElement> f;
  for (int n = 1; n <= 4; ++n) f.push_back(w_povm(k, n, mu));
  return f;
}

std::vector<PovmElement> ghz_count_family(int det_a, int det_b, const VisibilityMatrix& mu) {
  std::vector<PovmElement> f;
  for (auto [a, b] : std::array<std::pair<int, int>, 6>{{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 1}}})
    f.push_back(ghz_povm(det_a, det_b, a, b, mu));
  return f;
}

PovmElement click_povm(const std::vector<PovmElement>& family, bool pnr) {
  if (family.empty()) throw std::invalid_argument("empty POVM family");
  if (pnr) return family.front();
  PovmElement out{Matrix::Zero(family[0].matrix.rows(), family[0].matrix.cols()), family[0].pattern};
  for (const auto& e : family) out.matrix += e.matrix;
  return out;
}

}  // namespace ghzqec
