#include "doctest.h"
#include "test_util.hpp"

#include "ghzqec/pauli.hpp"
#include "ghzqec/qstate.hpp"

using namespace ghzqec;
using namespace ghzqec::testing;

TEST_CASE("first site is the most significant factor") {
  auto rho = DensityMatrix::from_pure({{"a", 2}, {"b", 2}}, PureState::basis(4, 2));  // |10>
  auto a = partial_trace(rho, {"a"});
  auto b = partial_trace(rho, {"b"});
  CHECK(a.data()(1, 1).real() == doctest::Approx(1.0));
  CHECK(b.data()(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("named states") {
  CHECK(ghz_state(4).amplitudes()(0).real() == doctest::Approx(M_SQRT1_2));
  CHECK(ghz_state(4, -1).amplitudes()(15).real() == doctest::Approx(-M_SQRT1_2));
  auto w = w_state(4).amplitudes();
  for (int i : {1, 2, 4, 8}) CHECK(w(i).real() == doctest::Approx(0.5));
  auto psi = bell_state(true, -1).amplitudes();
  CHECK(psi(1).real() == doctest::Approx(M_SQRT1_2));
  CHECK(psi(2).real() == doctest::Approx(-M_SQRT1_2));
}

TEST_CASE("partial trace and tensor agree") {
  std::mt19937_64 rng(3);
  auto a = DensityMatrix::qubits({"a"}, random_density(2, rng));
  auto bc = DensityMatrix::qubits({"b", "c"}, random_density(4, rng));
  auto all = tensor(a, bc);
  CHECK(max_abs(partial_trace(all, {"a"}).data() - a.data()) < 1e-12);
  CHECK(max_abs(partial_trace(all, {"b", "c"}).data() - bc.data()) < 1e-12);
  // kept sites stay in register order
  auto cb = partial_trace(all, {"c", "b"});
  CHECK(cb.labels() == std::vector<std::string>{"b", "c"});
  CHECK(max_abs(cb.data() - bc.data()) < 1e-12);
}

TEST_CASE("permute matches SWAP") {
  std::mt19937_64 rng(5);
  auto rho = DensityMatrix::qubits({"a", "b"}, random_density(4, rng));
  Matrix S = gates::SWAP();
  auto p = permute(rho, {"b", "a"});
  CHECK(max_abs(p.data() - S * rho.data() * S) < 1e-12);
  CHECK(p.labels() == std::vector<std::string>{"b", "a"});
}

TEST_CASE("local unitary on a subset equals the full kron") {
  std::mt19937_64 rng(7);
  auto rho = DensityMatrix::qubits({"a", "b", "c"}, random_density(8, rng));
  Matrix U = random_unitary(4, rng);
  auto out = apply_unitary(rho, U, {"a", "c"});
  // reorder to (a c b), apply U (x) I, reorder back
  auto r = permute(rho, {"a", "c", "b"});
  Matrix full = gates::kron({U, gates::I2()});
  auto ref = permute(DensityMatrix::qubits({"a", "c", "b"}, full * r.data() * full.adjoint()), {"a", "b", "c"});
  CHECK(max_abs(out.data() - ref.data()) < 1e-12);
}

TEST_CASE("measure_out is the trace against the effect") {
  std::mt19937_64 rng(9);
  auto rho = DensityMatrix::qubits({"a", "b"}, random_density(4, rng));
  Matrix E = Matrix::Zero(2, 2);
  E(1, 1) = 1;
  auto rest = measure_out(rho, E, {"b"});
  CHECK(rest.labels() == std::vector<std::string>{"a"});
  CHECK(rest.trace() == doctest::Approx((rho.data()(1, 1) + rho.data()(3, 3)).real()));
}

TEST_CASE("sqrt fidelity") {
  auto g = ghz_state(3);
  auto rho = DensityMatrix::from_pure({{"a", 2}, {"b", 2}, {"c", 2}}, g);
  CHECK(sqrt_fidelity(rho, g) == doctest::Approx(1.0));
  Matrix mixed = Matrix::Identity(8, 8) / 8.0;
  CHECK(sqrt_fidelity(mixed, g.amplitudes()) == doctest::Approx(std::sqrt(1.0 / 8)));
}

TEST_CASE("check rejects invalid states") {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix::qubits({"a"}, m).check(), std::runtime_error);
  CHECK_THROWS(DensityMatrix::qubits({"a"}, Matrix::Identity(2, 2) / 2).index_of("zz"));
}

TEST_CASE("Pauli algebra") {
  PauliString xz("XZ"), zx("ZX"), yy("YY");
  CHECK_FALSE(PauliString("XI").commutes(PauliString("ZI")));
  CHECK(xz.commutes(zx));
  cplx ph;
  CHECK(xz.times(zx, &ph) == yy);
  CHECK(max_abs(xz.matrix() * zx.matrix() - ph * yy.matrix()) < 1e-12);
  CHECK(PauliString::from_index(2, PauliString("YZ").index()) == PauliString("YZ"));
  CHECK(PauliString::from_bits(PauliString("XYZI").x_bits(), PauliString("XYZI").z_bits(), 4) == PauliString("XYZI"));
  CHECK(PauliString("XYZI").weight() == 3);
  CHECK(all_paulis(2).size() == 16u);
  CHECK(max_abs(gates::CNOT() * gates::CNOT() - Matrix::Identity(4, 4)) < 1e-12);
}
