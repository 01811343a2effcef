#include <benchmark/benchmark.h>

#include "ghzqec/protocols.hpp"
#include "ghzqec/seeding.hpp"
#include "ghzqec/superop.hpp"
#include "ghzqec/toric.hpp"

using namespace ghzqec;

namespace {

ProtocolSettings es2(double p) {
  ProtocolSettings s;
  s.hw = hardware_set("ES-2").with_alpha(0.5);
  s.timing.T_link = s.timing.T_idle = 1e6;
  s.noise = GateNoise::uniform(p);
  return s;
}

const SuperoperatorTable& cached_table() {
  static const SuperoperatorTable t = [] {
    CycleConfig c;
    c.noise = GateNoise::uniform(1e-3);
    c.timing.T_link = c.timing.T_idle = 1e6;
    c.t_cut = 600;
    c.ghz_success = 0.99;
    return build_table(run_protocol("dc_ghz", es2(1e-3)).output_state, c);
  }();
  return t;
}

void BM_DcGhzExact(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_protocol("dc_ghz", es2(1e-3)).fidelity);
}
BENCHMARK(BM_DcGhzExact)->Unit(benchmark::kMillisecond);

void BM_BuildTable(benchmark::State& state) {
  DensityMatrix ghz = run_protocol("dc_ghz", es2(1e-3)).output_state;
  CycleConfig c;
  c.noise = GateNoise::uniform(1e-3);
  c.t_cut = 600;
  c.ghz_success = 0.99;
  for (auto _ : state) benchmark::DoNotOptimize(build_table(ghz, c).rows.size());
}
BENCHMARK(BM_BuildTable)->Unit(benchmark::kMillisecond);

// One full shot: d cycles of sampled stabilizer events, then decoding of both bases.
void BM_ToricShot(benchmark::State& state) {
  QecConfig q;
  q.d = static_cast<int>(state.range(0));
  ToricSimulator sim(cached_table(), q);
  auto rng = make_rng(1, 0);
  long failures = 0;
  for (auto _ : state) failures += sim.run_shot(rng).failed();
  state.counters["p_L"] = benchmark::Counter(double(failures) / state.iterations());
}
BENCHMARK(BM_ToricShot)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMicrosecond);

// Decoder alone on the space-time graph with random even defect sets.
void BM_UnionFindDecode(benchmark::State& state) {
  QecConfig q;
  q.d = static_cast<int>(state.range(0));
  ToricSimulator sim(cached_table(), q);
  const DecodingGraph& g = sim.graph(StabBasis::Z);
  UnionFindDecoder dec(g);
  auto rng = make_rng(2, 0);
  std::uniform_int_distribution<int> node(0, g.n_nodes() - 1);
  const int n_defects = static_cast<int>(state.range(1));
  std::vector<uint8_t> defects(g.n_nodes(), 0);
  for (auto _ : state) {
    state.PauseTiming();
    std::fill(defects.begin(), defects.end(), 0);
    for (int k = 0; k < n_defects; ++k) defects[node(rng)] ^= 1;
    int odd = 0;
    for (auto v : defects) odd += v;
    if (odd % 2) defects[node(rng)] ^= 1;
    state.ResumeTiming();
    benchmark::DoNotOptimize(dec.decode(defects).size());
  }
}
BENCHMARK(BM_UnionFindDecode)->Args({8, 10})->Args({8, 40})->Args({12, 40})->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
