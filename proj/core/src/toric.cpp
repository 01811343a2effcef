#include "ghzqec/toric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ghzqec/seeding.hpp"

namespace ghzqec {

namespace {

int wrap(int a, int d) { return ((a % d) + d) % d; }

double combine_flips(const std::vector<double>& ps) {
  double prod = 1;
  for (double p : ps) prod *= 1 - 2 * p;
  return 0.5 * (1 - prod);
}

}  // namespace

int ToricLattice::h(int x, int y) const { return wrap(y, d) * d + wrap(x, d); }
int ToricLattice::v(int x, int y) const { return d * d + wrap(y, d) * d + wrap(x, d); }

ToricLattice make_lattice(int d) {
  if (d < 2 || d % 2) throw std::invalid_argument("toric distance must be even and >= 2");
  ToricLattice L;
  L.d = d;
  const int n = 2 * d * d;
  L.qubit_x_stabs.assign(n, {-1, -1});
  L.qubit_z_stabs.assign(n, {-1, -1});
  auto attach = [](std::array<int, 2>& slot, int s) {
    if (slot[0] < 0) slot[0] = s;
    else slot[1] = s;
  };
  for (int y = 0; y < d; ++y) {
    for (int x = 0; x < d; ++x) {
      int s = y * d + x;
      L.x_stabs.push_back({L.h(x, y), L.h(x - 1, y), L.v(x, y), L.v(x, y - 1)});
      L.z_stabs.push_back({L.h(x, y), L.h(x, y + 1), L.v(x, y), L.v(x + 1, y)});
      L.x_round.push_back((x + y) % 2);
      L.z_round.push_back((x + y) % 2);
      for (int q : L.x_stabs.back()) attach(L.qubit_x_stabs[q], s);
      for (int q : L.z_stabs.back()) attach(L.qubit_z_stabs[q], s);
    }
  }
  return L;
}

bool has_logical_z(const ToricLattice& L, const PauliFrame& f) {
  int a = 0, b = 0;
  for (int y = 0; y < L.d; ++y) a ^= f.z[L.h(0, y)];
  for (int x = 0; x < L.d; ++x) b ^= f.z[L.v(x, 0)];
  return a || b;
}

bool has_logical_x(const ToricLattice& L, const PauliFrame& f) {
  int a = 0, b = 0;
  for (int x = 0; x < L.d; ++x) a ^= f.x[L.h(x, 0)];
  for (int y = 0; y < L.d; ++y) b ^= f.x[L.v(0, y)];
  return a || b;
}

std::vector<uint8_t> syndrome(const ToricLattice& L, const PauliFrame& f, StabBasis b) {
  const auto& stabs = b == StabBasis::X ? L.x_stabs : L.z_stabs;
  const auto& bits = b == StabBasis::X ? f.z : f.x;
  std::vector<uint8_t> s(stabs.size(), 0);
  for (size_t i = 0; i < stabs.size(); ++i)
    for (int q : stabs[i]) s[i] ^= bits[q];
  return s;
}

EventSampler::EventSampler(const std::vector<TableRow>& rows) {
  double acc = 0;
  for (const auto& r : rows) {
    if (r.probability <= 0) continue;
    acc += r.probability;
    cdf.push_back(acc);
    uint8_t xm = 0, zm = 0;
    for (int k = 0; k < 4; ++k) {
      char c = r.pauli[k];
      if (c == 'X' || c == 'Y') xm |= 1 << k;
      if (c == 'Z' || c == 'Y') zm |= 1 << k;
    }
    xmask.push_back(xm);
    zmask.push_back(zm);
    success.push_back(r.ghz_success);
    lie.push_back(r.meas_error);
  }
  if (!rows.empty() && cdf.empty()) throw std::invalid_argument("event table has no positive rows");
  for (double& c : cdf) c /= acc;
}

int EventSampler::draw(std::mt19937_64& rng) const {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<int>(it - cdf.begin());
}

double ToricSimulator::kappa() { return 8.0 / std::log(2.0); }

int ToricSimulator::weight_of(double p) {
  p = std::clamp(p, 1e-15, 0.5);
  return std::max(8, static_cast<int>(std::lround(kappa() * -std::log(p))));
}

ToricSimulator::ToricSimulator(const SuperoperatorTable& table, const QecConfig& cfg)
    : lat_(make_lattice(cfg.d)), cfg_(cfg), cycles_(cfg.cycles > 0 ? cfg.cycles : cfg.d) {
  sx_ = EventSampler(table.rows_for(StabBasis::X));
  sz_ = EventSampler(table.rows_for(StabBasis::Z));
  if (sx_.cdf.empty() || sz_.cdf.empty()) throw std::invalid_argument("table needs both X and Z rows");
  auto marg = [](const std::vector<TableRow>& rows, std::array<double, 4>& px, std::array<double, 4>& pz,
                 double& lie) {
    double tot = 0, succ = 0, l = 0;
    px.fill(0);
    pz.fill(0);
    for (const auto& r : rows) {
      tot += r.probability;
      for (int k = 0; k < 4; ++k) {
        char c = r.pauli[k];
        if (c == 'X' || c == 'Y') px[k] += r.probability;
        if (c == 'Z' || c == 'Y') pz[k] += r.probability;
      }
      if (r.ghz_success) {
        succ += r.probability;
        if (r.meas_error) l += r.probability;
      }
    }
    for (int k = 0; k < 4; ++k) {
      px[k] /= tot;
      pz[k] /= tot;
    }
    lie = succ > 0 ? l / succ : 0.5;
  };
  marg(table.rows_for(StabBasis::X), px_x_, pz_x_, lie_x_);
  marg(table.rows_for(StabBasis::Z), px_z_, pz_z_, lie_z_);
  build_graph(StabBasis::X, gx_, tx_);
  build_graph(StabBasis::Z, gz_, tz_);
  for (int e = 0; e < gx_.n_edges(); ++e) wx_.push_back(gx_.edge(e).weight);
  for (int e = 0; e < gz_.n_edges(); ++e) wz_.push_back(gz_.edge(e).weight);
}

namespace {

int position_in(const std::array<int, 4>& stab, int q) {
  for (int k = 0; k < 4; ++k)
    if (stab[k] == q) return k;
  throw std::logic_error("qubit not in stabilizer");
}

}  // namespace

// Flip probability per cycle of the component of `qubit` that basis b detects,
// split into the part landing as a space edge and the part that lands between
// the two sub-rounds of b (returned via `diag`).
static double qubit_flip(const ToricLattice& L, StabBasis b, int q, const std::array<double, 4>& own,
                         const std::array<double, 4>& other, bool split, double* diag) {
  const auto& mine = b == StabBasis::X ? L.qubit_x_stabs[q] : L.qubit_z_stabs[q];
  const auto& theirs = b == StabBasis::X ? L.qubit_z_stabs[q] : L.qubit_x_stabs[q];
  const auto& mine_s = b == StabBasis::X ? L.x_stabs : L.z_stabs;
  const auto& theirs_s = b == StabBasis::X ? L.z_stabs : L.x_stabs;
  const auto& rounds = b == StabBasis::X ? L.x_round : L.z_round;
  std::vector<double> space, between;
  for (int s : mine) {
    double p = own[position_in(mine_s[s], q)];
    if (split && rounds[s] == 0) between.push_back(p);
    else space.push_back(p);
  }
  for (int s : theirs) space.push_back(other[position_in(theirs_s[s], q)]);
  if (diag) *diag = combine_flips(between);
  return combine_flips(space);
}

double ToricSimulator::space_probability(StabBasis b, int qubit) const {
  // X stabilizers detect z flips
  const auto& own = b == StabBasis::X ? pz_x_ : px_z_;
  const auto& other = b == StabBasis::X ? pz_z_ : px_x_;
  double diag = 0;
  return qubit_flip(lat_, b, qubit, own, other, cfg_.subround_edges, &diag);
}

void ToricSimulator::build_graph(StabBasis b, DecodingGraph& g, std::vector<int>& time_edge_of) {
  const int S = lat_.n_stabs(), layers = cycles_ + 1;
  g = DecodingGraph(S * layers);
  time_edge_of.assign(S * layers, -1);
  const auto& own = b == StabBasis::X ? pz_x_ : px_z_;
  const auto& other = b == StabBasis::X ? pz_z_ : px_x_;
  const auto& qs = b == StabBasis::X ? lat_.qubit_x_stabs : lat_.qubit_z_stabs;
  const auto& rounds = b == StabBasis::X ? lat_.x_round : lat_.z_round;
  const int wt = weight_of(time_probability(b));
  for (int l = 0; l < layers; ++l) {
    for (int q = 0; q < lat_.n_qubits(); ++q) {
      double diag = 0;
      double p = qubit_flip(lat_, b, q, own, other, cfg_.subround_edges, &diag);
      g.add_edge(l * S + qs[q][0], l * S + qs[q][1], weight_of(p), q);
      if (cfg_.subround_edges && l + 1 < layers) {
        int first = rounds[qs[q][0]] == 0 ? qs[q][0] : qs[q][1];
        int second = first == qs[q][0] ? qs[q][1] : qs[q][0];
        g.add_edge(l * S + second, (l + 1) * S + first, weight_of(diag), q);
      }
    }
    if (l + 1 < layers)
      for (int s = 0; s < S; ++s) time_edge_of[l * S + s] = g.add_edge(l * S + s, (l + 1) * S + s, wt, -1);
  }
}

bool ToricSimulator::decode_and_check(StabBasis b, const Layered& rec, PauliFrame& frame) {
  const int S = lat_.n_stabs(), layers = cycles_ + 1;
  const DecodingGraph& g = graph(b);
  std::vector<int> w = b == StabBasis::X ? wx_ : wz_;
  const auto& tmap = b == StabBasis::X ? tx_ : tz_;
  std::vector<uint8_t> defects(S * layers, 0);
  for (int l = 0; l < layers; ++l) {
    for (int s = 0; s < S; ++s) {
      defects[l * S + s] = rec.outcomes[l + 1][s] ^ rec.outcomes[l][s];
      // a stale readout carries no fresh information
      if (l < cycles_ && rec.stale[l + 1][s]) w[tmap[l * S + s]] = weight_of(0.5);
    }
  }
  UnionFindDecoder& dec = b == StabBasis::X ? dx_ : dz_;
  auto& bits = b == StabBasis::X ? frame.z : frame.x;
  for (int e : dec.decode(defects, w)) {
    int q = g.edge(e).qubit;
    if (q >= 0) bits[q] ^= 1;
  }
  for (uint8_t s : syndrome(lat_, frame, b))
    if (s) throw std::logic_error("decoder left a nonzero syndrome");
  return b == StabBasis::X ? has_logical_z(lat_, frame) : has_logical_x(lat_, frame);
}

ShotResult ToricSimulator::run_shot(std::mt19937_64& rng) {
  const int S = lat_.n_stabs();
  PauliFrame f(lat_.n_qubits());
  Layered rx, rz;
  for (Layered* r : {&rx, &rz}) {
    r->outcomes.assign(cycles_ + 2, std::vector<uint8_t>(S, 0));
    r->stale.assign(cycles_ + 2, std::vector<uint8_t>(S, 0));
  }
  ShotResult res;
  auto event = [&](const EventSampler& smp, const std::array<int, 4>& stab, const std::vector<uint8_t>& detect,
                   uint8_t prev, uint8_t& out, uint8_t& stale) {
    int i = smp.draw(rng);
    if (smp.success[i]) {
      uint8_t par = 0;
      for (int q : stab) par ^= detect[q];
      out = par ^ smp.lie[i];
      stale = 0;
    } else {
      out = prev;
      stale = 1;
      ++res.ghz_failures;
    }
    for (int k = 0; k < 4; ++k) {
      if (smp.xmask[i] >> k & 1) f.x[stab[k]] ^= 1;
      if (smp.zmask[i] >> k & 1) f.z[stab[k]] ^= 1;
    }
  };
  for (int c = 1; c <= cycles_; ++c) {
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < S; ++s)
        if (lat_.x_round[s] == r) event(sx_, lat_.x_stabs[s], f.z, rx.outcomes[c - 1][s], rx.outcomes[c][s], rx.stale[c][s]);
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < S; ++s)
        if (lat_.z_round[s] == r) event(sz_, lat_.z_stabs[s], f.x, rz.outcomes[c - 1][s], rz.outcomes[c][s], rz.stale[c][s]);
  }
  rx.outcomes[cycles_ + 1] = syndrome(lat_, f, StabBasis::X);
  rz.outcomes[cycles_ + 1] = syndrome(lat_, f, StabBasis::Z);
  res.logical_z = decode_and_check(StabBasis::X, rx, f);
  res.logical_x = decode_and_check(StabBasis::Z, rz, f);
  return res;
}

double LogicalRate::std_error() const {
  if (shots == 0) return 0;
  double p = rate();
  return std::sqrt(std::max(p * (1 - p), 0.25 / shots) / shots);
}

LogicalRate logical_error_rate(const SuperoperatorTable& table, const QecConfig& cfg, long shots, uint64_t seed,
                               int threads) {
  threads = std::max(1, threads);
  std::vector<long> fails(threads, 0);
  auto work = [&](int tid) {
    ToricSimulator sim(table, cfg);
    for (long i = tid; i < shots; i += threads) {
      auto rng = make_rng(seed, static_cast<uint64_t>(i));
      if (sim.run_shot(rng).failed()) ++fails[tid];
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& t : pool) t.join();
  }
  LogicalRate r;
  r.shots = shots;
  for (long f : fails) r.failures += f;
  return r;
}

}  // namespace ghzqec
