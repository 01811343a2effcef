#include "doctest.h"
#include "test_util.hpp"

#include "ghzqec/noise.hpp"
#include "ghzqec/pauli.hpp"

using namespace ghzqec;
using namespace ghzqec::testing;

namespace {

Matrix run_channel(const NoiseChannel& ch, const Matrix& rho) {
  Matrix out = Matrix::Zero(rho.rows(), rho.cols());
  for (const auto& K : ch.kraus) out += K * rho * K.adjoint();
  return out;
}

double offdiag(const Matrix& R) {
  double m = 0;
  for (int i = 0; i < R.rows(); ++i)
    for (int j = 0; j < R.cols(); ++j)
      if (i != j) m = std::max(m, std::abs(R(i, j)));
  return m;
}

}  // namespace

TEST_CASE("every channel is trace preserving") {
  std::vector<NoiseChannel> chans = {
      identity_channel(1), identity_channel(2), depolarizing(0.1, 1), depolarizing(0.3, 2),
      gad(5, 10), gad(0, 10), phase_damping(3, 7), prep_dephasing(0.97), photon_loss(0.45),
      double_excitation_dephasing(0.06), dephasing(0.2), decoherence(1e3, 1e4), decoherence(2, 1e6),
      compose(gad(1, 2), depolarizing(0.05, 1))};
  for (const auto& c : chans) CHECK(c.trace_preserving(1e-10));
}

TEST_CASE("GAD at infinite time drives any state to I/2") {
  std::mt19937_64 rng(1);
  auto ch = gad(1e6, 1.0);
  for (int i = 0; i < 5; ++i) {
    Matrix out = run_channel(ch, random_density(2, rng));
    CHECK(max_abs(out - Matrix::Identity(2, 2) / 2.0) < 1e-12);
  }
  CHECK(max_abs(run_channel(gad(3, 1), Matrix::Identity(2, 2) / 2.0) - Matrix::Identity(2, 2) / 2.0) < 1e-14);
}

TEST_CASE("GAD then PD has a diagonal Pauli transfer matrix") {
  for (double t : {0.0, 1.0, 100.0, 1e4}) {
    Matrix R = decoherence(t, 1e3).ptm();
    CHECK(offdiag(R) < 1e-12);
    CHECK(R(0, 0).real() == doctest::Approx(1.0));
  }
}

TEST_CASE("decoherence ptm entries follow the decay laws") {
  const double t = 200, T = 1000;
  Matrix R = decoherence(t, T).ptm();
  const double g = 1 - std::exp(-t / T);
  CHECK(R(3, 3).real() == doctest::Approx(1 - g));
  CHECK(R(1, 1).real() == doctest::Approx(std::sqrt(1 - g) * std::sqrt(1 - g)));
}

TEST_CASE("depolarizing matches its closed form") {
  std::mt19937_64 rng(2);
  Matrix rho = random_density(2, rng);
  const double p = 0.3;
  Matrix out = run_channel(depolarizing(p, 1), rho);
  // (1-p) rho + p/3 (X rho X + Y rho Y + Z rho Z) = (1 - 4p/3) rho + 2p/3 I
  CHECK(max_abs(out - ((1 - 4 * p / 3) * rho + (2 * p / 3) * Matrix::Identity(2, 2))) < 1e-12);
  CHECK(depolarizing(0.0, 2).kraus.size() == 1u);
}

TEST_CASE("photon loss damps the occupied mode") {
  Matrix one = Matrix::Zero(2, 2);
  one(1, 1) = 1;
  Matrix out = run_channel(photon_loss(0.4), one);
  CHECK(out(1, 1).real() == doctest::Approx(0.4));
  CHECK(out(0, 0).real() == doctest::Approx(0.6));
}

TEST_CASE("invalid parameters throw") {
  CHECK_THROWS(depolarizing(1.5, 1));
  CHECK_THROWS(gad(-1, 1));
  CHECK_THROWS(prep_dephasing(0.2));
  CHECK_THROWS(compose(identity_channel(1), identity_channel(2)));
  CHECK_THROWS(hardware_set("ES-99"));
}

TEST_CASE("hardware sets and timing") {
  auto es2 = hardware_set("ES-2");
  CHECK(es2.mu_I == doctest::Approx(0.95));
  CHECK(es2.eta_ph == doctest::Approx(0.4474));
  CHECK(hardware_set_names().size() == 18u);
  auto h = es2.with_alpha(0.3);
  CHECK(h.alpha_base == 0.3);
  CHECK(std::isinf(TimingParams::noiseless().T_link));
}

TEST_CASE("clock accumulates and decoheres per regime") {
  TimingParams t;
  t.T_link = 10;
  t.T_idle = 1e9;
  QubitClock clk;
  Matrix plus = Matrix::Constant(2, 2, 0.5);
  auto rho = DensityMatrix::qubits({"q"}, plus);
  auto a = advance_clock_and_decohere(rho, "q", 5, Regime::linking, t, &clk);
  auto b = advance_clock_and_decohere(rho, "q", 5, Regime::idle, t, &clk);
  CHECK(clk.elapsed("q") == doctest::Approx(10));
  CHECK(std::abs(a.data()(0, 1)) < std::abs(b.data()(0, 1)));
}
