#include <functional>
#include <map>

#include "doctest.h"
#include "test_util.hpp"

#include "ghzqec/photonics.hpp"

using namespace ghzqec;
using namespace ghzqec::testing;

namespace {

// Independent Fock-space oracle: photon from port j lives in temporal mode
// v_j with <v_a|v_b> = mu(a,b) (Cholesky of the Gram matrix); detectors count
// photons over all temporal modes.
using Occ = std::vector<int>;  // (detector k, temporal mode m) -> k * M + m
using FockState = std::map<Occ, cplx>;

FockState output_state(const Matrix& V, const Matrix& L, int s, int ports) {
  const int K = static_cast<int>(V.cols()), M = ports;
  FockState st{{Occ(K * M, 0), 1.0}};
  for (int j = 0; j < ports; ++j) {
    if (!((s >> (ports - 1 - j)) & 1)) continue;
    FockState next;
    for (const auto& [occ, amp] : st)
      for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m) {
          cplx c = V(j, k) * std::conj(L(j, m));
          if (std::abs(c) < 1e-15) continue;
          Occ o = occ;
          int idx = k * M + m;
          double f = std::sqrt(double(o[idx] + 1));
          o[idx] += 1;
          next[o] += amp * c * f;
        }
    st = std::move(next);
  }
  return st;
}

Matrix oracle_povm(const Matrix& V, const std::vector<int>& counts, const Matrix& mu) {
  const int ports = static_cast<int>(V.rows()), K = static_cast<int>(V.cols());
  Eigen::LLT<Matrix> llt(mu);
  Matrix L = llt.matrixL();
  const int dim = 1 << ports;
  std::vector<FockState> out;
  for (int s = 0; s < dim; ++s) out.push_back(output_state(V, L, s, ports));
  auto matches = [&](const Occ& o) {
    for (int k = 0; k < K; ++k) {
      int n = 0;
      for (int m = 0; m < ports; ++m) n += o[k * ports + m];
      if (n != counts[k]) return false;
    }
    return true;
  };
  Matrix E = Matrix::Zero(dim, dim);
  for (int s = 0; s < dim; ++s)
    for (int t = 0; t < dim; ++t) {
      cplx acc = 0;
      for (const auto& [o, a] : out[s]) {
        if (!matches(o)) continue;
        auto it = out[t].find(o);
        if (it != out[t].end()) acc += std::conj(a) * it->second;
      }
      E(s, t) = acc;
    }
  return E;
}

std::vector<std::vector<int>> all_patterns(int dets, int max_total) {
  std::vector<std::vector<int>> out;
  std::vector<int> c(dets, 0);
  std::function<void(int, int)> rec = [&](int k, int left) {
    if (k == dets) {
      out.push_back(c);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      c[k] = n;
      rec(k + 1, left - n);
    }
    c[k] = 0;
  };
  rec(0, max_total);
  return out;
}

}  // namespace

TEST_CASE("general POVM formula matches the Fock oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    VisibilityMatrix mu{random_visibility(4, rng)};
    for (const auto& pat : std::vector<std::vector<int>>{{1, 0, 0, 0}, {2, 0, 0, 0}, {1, 1, 0, 0}, {0, 2, 1, 0},
                                                         {2, 2, 0, 0}, {1, 1, 1, 1}, {0, 0, 0, 4}, {3, 1, 0, 0}}) {
      Matrix E = pattern_povm(beamsplitter_4x4(), pat, mu).matrix;
      CHECK(max_abs(E - oracle_povm(beamsplitter_4x4(), pat, mu.mu)) < 1e-12);
    }
  }
  Matrix m2 = VisibilityMatrix::uniform(2, cplx(0.6, 0.3)).mu;
  for (const auto& pat : std::vector<std::vector<int>>{{1, 0}, {1, 1}, {0, 2}})
    CHECK(max_abs(pattern_povm(bell_beamsplitter(), pat, {m2}).matrix - oracle_povm(bell_beamsplitter(), pat, m2)) <
          1e-12);
}

TEST_CASE("Bell POVM set is complete and PSD") {
  for (double m : {0.0, 0.5, 0.95, 1.0}) {
    auto set = bell_povm_set(m);
    Matrix sum = Matrix::Zero(4, 4);
    for (const auto& e : set.elements) {
      sum += e.matrix;
      CHECK(min_eig(e.matrix) > -1e-12);
    }
    CHECK(max_abs(sum - Matrix::Identity(4, 4)) < 1e-12);
  }
}

TEST_CASE("Bell elements at unit visibility") {
  auto set = bell_povm_set(1.0);
  // one click on detector 0 projects the single-photon sector onto |01>+|10>
  Matrix e = set.e10().matrix;
  CHECK(e(1, 1).real() == doctest::Approx(0.5));
  CHECK(e(1, 2).real() == doctest::Approx(0.5));
  CHECK(std::abs(set.e11().matrix(3, 3)) < 1e-12);  // HOM: no coincidence
}

TEST_CASE("single-photon W POVM is complete on the one-photon sector") {
  std::mt19937_64 rng(17);
  Matrix P1 = Matrix::Zero(16, 16);
  for (int i : {1, 2, 4, 8}) P1(i, i) = 1;
  for (int trial = 0; trial < 100; ++trial) {
    VisibilityMatrix mu{random_visibility(4, rng)};
    Matrix sum = Matrix::Zero(16, 16);
    for (int k = 0; k < 4; ++k) {
      Matrix e = w_povm(k, 1, mu).matrix;
      CHECK(min_eig(e) > -1e-12);
      sum += e;
    }
    CHECK(max_abs(sum - P1) < 1e-12);
  }
}

TEST_CASE("all count patterns resolve the identity") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    VisibilityMatrix mu{random_visibility(4, rng)};
    Matrix sum = Matrix::Zero(16, 16);
    for (const auto& pat : all_patterns(4, 4)) {
      Matrix e = pattern_povm(beamsplitter_4x4(), pat, mu).matrix;
      CHECK(min_eig(e) > -1e-10);
      sum += e;
    }
    CHECK(max_abs(sum - Matrix::Identity(16, 16)) < 1e-12);
  }
}

TEST_CASE("click POVM sums the count family") {
  auto mu = VisibilityMatrix::uniform(4, 0.9);
  auto fam = ghz_count_family(0, 2, mu);
  CHECK(fam.size() == 6u);
  Matrix s = Matrix::Zero(16, 16);
  for (const auto& e : fam) s += e.matrix;
  CHECK(max_abs(click_povm(fam, false).matrix - s) < 1e-14);
  CHECK(max_abs(click_povm(fam, true).matrix - fam[0].matrix) < 1e-14);
}

TEST_CASE("POVM argument checks") {
  auto mu = VisibilityMatrix::uniform(4, 1.0);
  CHECK_THROWS(w_povm(4, 1, mu));
  CHECK_THROWS(ghz_povm(1, 1, 1, 1, mu));
  CHECK_THROWS(ghz_povm(0, 1, 4, 0, mu));
  CHECK_THROWS(bell_povm_set(1.5));
  CHECK_THROWS(pattern_povm(beamsplitter_4x4(), {1, 1, 1, 1, 1}, mu));
  CHECK(intensity_to_amplitude_visibility(0.81) == doctest::Approx(0.9));
  VisibilityMatrix bad{Matrix::Identity(3, 3) * 2.0};
  CHECK_THROWS(bad.validate());
}
