#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "ghzqec/superop.hpp"
#include "ghzqec/union_find.hpp"

namespace ghzqec {

// Distance-d toric code on a periodic d x d lattice, 2 d^2 data qubits.
// Horizontal edge h(x,y) = y d + x, vertical v(x,y) = d^2 + y d + x.
// X stabilizer at vertex (x,y): h(x,y), h(x-1,y), v(x,y), v(x,y-1).
// Z stabilizer at plaquette (x,y): h(x,y), h(x,y+1), v(x,y), v(x+1,y).
struct ToricLattice {
  int d = 0;
  std::vector<std::array<int, 4>> x_stabs, z_stabs;  // indexed y d + x
  std::vector<int> x_round, z_round;                  // sub-round 0 or 1, by (x+y) parity
  std::vector<std::array<int, 2>> qubit_x_stabs, qubit_z_stabs;

  int n_qubits() const { return 2 * d * d; }
  int n_stabs() const { return d * d; }
  int h(int x, int y) const;
  int v(int x, int y) const;
};

ToricLattice make_lattice(int d);

struct PauliFrame {
  std::vector<uint8_t> x, z;
  explicit PauliFrame(int n = 0) : x(n, 0), z(n, 0) {}
};

// Residual logical checks on a syndrome-free frame.
bool has_logical_z(const ToricLattice& L, const PauliFrame& f);
bool has_logical_x(const ToricLattice& L, const PauliFrame& f);
// Stabilizer parities of the frame: X stabilizers see z flips and vice versa.
std::vector<uint8_t> syndrome(const ToricLattice& L, const PauliFrame& f, StabBasis b);

struct QecConfig {
  int d = 4;
  int cycles = 0;               // 0 => d
  bool subround_edges = true;  // diagonal edges for errors landing between the two sub-rounds
};

struct ShotResult {
  bool logical_x = false;  // residual X-type logical
  bool logical_z = false;
  bool failed() const { return logical_x || logical_z; }
  int ghz_failures = 0;
};

// Pre-sampled event distribution for one stabilizer basis.
struct EventSampler {
  std::vector<double> cdf;
  std::vector<uint8_t> xmask, zmask;  // bit k <-> position k of the stabilizer
  std::vector<uint8_t> success, lie;
  explicit EventSampler(const std::vector<TableRow>& rows = {});
  int draw(std::mt19937_64& rng) const;
};

class ToricSimulator {
 public:
  ToricSimulator(const SuperoperatorTable& table, const QecConfig& cfg);
  ToricSimulator(const ToricSimulator&) = delete;
  ToricSimulator& operator=(const ToricSimulator&) = delete;

  ShotResult run_shot(std::mt19937_64& rng);
  const ToricLattice& lattice() const { return lat_; }
  int cycles() const { return cycles_; }
  // Static edge probabilities used for the weights.
  double space_probability(StabBasis b, int qubit) const;
  double time_probability(StabBasis b) const { return b == StabBasis::X ? lie_x_ : lie_z_; }
  const DecodingGraph& graph(StabBasis b) const { return b == StabBasis::X ? gx_ : gz_; }
  static double kappa();
  static int weight_of(double p);

 private:
  struct Layered {
    std::vector<std::vector<uint8_t>> outcomes;  // [layer][stab], layer 0 = initial zeros
    std::vector<std::vector<uint8_t>> stale;     // [layer][stab]
  };
  void build_graph(StabBasis b, DecodingGraph& g, std::vector<int>& time_edge_of);
  bool decode_and_check(StabBasis b, const Layered& rec, PauliFrame& frame);

  ToricLattice lat_;
  QecConfig cfg_;
  int cycles_ = 0;
  EventSampler sx_, sz_;
  // per-position marginals of each basis' events: flip of X / Z component
  std::array<double, 4> px_x_{}, pz_x_{}, px_z_{}, pz_z_{};
  double lie_x_ = 0, lie_z_ = 0;
  DecodingGraph gx_, gz_;
  std::vector<int> tx_, tz_;  // [layer * n_stabs + s] -> time edge id
  std::vector<int> wx_, wz_;
  UnionFindDecoder dx_{gx_}, dz_{gz_};
};

// Monte Carlo over independent shots; seeds derived from (seed, shot).
struct LogicalRate {
  long shots = 0;
  long failures = 0;
  double rate() const { return shots ? double(failures) / shots : 0.0; }
  double std_error() const;
};

LogicalRate logical_error_rate(const SuperoperatorTable& table, const QecConfig& cfg, long shots, uint64_t seed,
                               int threads = 1);

}  // namespace ghzqec
