#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "ghzqec/runner.hpp"
#include "ghzqec/seeding.hpp"

using namespace ghzqec;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "ghzqec_test_runner";
  fs::create_directories(d / "presets");
  return d;
}

void put(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("defaults validate") {
  RunConfig c = parse_config("{}");
  CHECK(c.protocol == "dc_ghz");
  CHECK(c.es_set == "ES-2");
  CHECK(c.hw.pnr);
  CHECK(c.d_values == std::vector<int>{4, 6, 8});
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS(parse_config(R"({"shotz": 10})"));
  CHECK_THROWS(parse_config(R"({"hardware": {"set": "ES-2", "muI": 0.9}})"));
  CHECK_THROWS(parse_config(R"({"timing": {"T_lnk": 10}})"));
  CHECK_THROWS(parse_config(R"({"schema": "ghzqec.config/2"})"));
  CHECK_THROWS(parse_config(R"({"protocol": "teleport"})"));
  CHECK_THROWS(parse_config(R"({"d": [5]})"));
  CHECK_THROWS(parse_config(R"({"alpha": 0})"));
  CHECK_THROWS(parse_config(R"({"cutoff": 1.5})"));
  CHECK_THROWS(parse_config(R"({"hardware": {"set": "ES-42"}})"));
  CHECK_THROWS(parse_config(R"({"fail_regime": "sleep"})"));
  CHECK_NOTHROW(parse_config(R"({"schema": "ghzqec.config/1"})"));
}

TEST_CASE("ranges") {
  RunConfig c = parse_config(R"({"p": {"linspace": [0.001, 0.003, 5]}, "T": {"logspace": [1e3, 1e6, 4]},
                                 "alpha": [0.1, 0.25]})");
  REQUIRE(c.p_values.size() == 5);
  CHECK(c.p_values[2] == doctest::Approx(0.002));
  CHECK(c.p_values.back() == doctest::Approx(0.003));
  REQUIRE(c.T_values.size() == 4);
  CHECK(c.T_values[1] == doctest::Approx(1e4));
  CHECK(c.T_values[3] == doctest::Approx(1e6));
  CHECK(c.alpha_values == std::vector<double>{0.1, 0.25});
  CHECK(parse_config(R"({"p": 0.002})").p_values == std::vector<double>{0.002});
  CHECK_THROWS(parse_config(R"({"p": {"linspace": [0.001, 0.003, 0]}})"));
  CHECK_THROWS(parse_config(R"({"p": "0.002"})"));
}

TEST_CASE("includes merge in order, later keys win") {
  fs::path d = scratch_dir();
  put(d / "presets" / "es5.json", R"({"hardware": {"set": "ES-5"}, "pnr": false, "timing": {"T": 1000}})");
  put(d / "presets" / "shots.json", R"({"shots": 500, "seed": 9})");
  put(d / "run.json", R"({"include": ["presets/es5.json", "presets/shots.json"], "seed": 3, "timing": {"t_meas": 0.01}})");
  RunConfig c = load_config((d / "run.json").string());
  CHECK(c.es_set == "ES-5");
  CHECK(!c.hw.pnr);
  CHECK(c.shots == 500);
  CHECK(c.seed == 3);
  CHECK(c.timing.T_link == 1000);
  CHECK(c.timing.T_idle == 1000);
  CHECK(c.timing.t_meas == doctest::Approx(0.01));
  HardwareParams es5 = hardware_set("ES-5");
  CHECK(c.hw.mu_I == es5.mu_I);

  put(d / "loop.json", R"({"include": "loop.json"})");
  CHECK_THROWS(load_config((d / "loop.json").string()));
  put(d / "missing.json", R"({"include": "nope.json"})");
  CHECK_THROWS(load_config((d / "missing.json").string()));
}

TEST_CASE("config dump parses back to the same config") {
  RunConfig c = parse_config(R"({"protocol": "w", "hardware": {"set": "ES-3"}, "p": [0.001, 0.002],
                                 "alpha_pairs": [[0.1, 0.2]], "cutoff": {"scan": [0.95, 0.99], "budget": 4},
                                 "fail_regime": "idle", "cycles": 3})");
  std::string once = config_to_json(c);
  CHECK(config_to_json(parse_config(once)) == once);
  RunConfig inf = parse_config(R"({"timing": {"T": "inf"}})");
  CHECK(std::isinf(inf.timing.T_link));
  CHECK(config_to_json(parse_config(config_to_json(inf))) == config_to_json(inf));
}

TEST_CASE("seed derivation") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 100000; ++i) seen.insert(derive_seed(42, i));
  CHECK(seen.size() == 100000);
  CHECK(derive_seed(42, 7) == derive_seed(42, 7));
  CHECK(derive_seed(42, 7) != derive_seed(43, 7));
  CHECK(derive_seed(1, 2, 3) == derive_seed(derive_seed(1, 2), 3));
  auto a = make_rng(5, 1), b = make_rng(5, 1);
  CHECK(a() == b());
}

TEST_CASE("cut-off percentile") {
  std::vector<double> t{5, 1, 4, 2, 3, 10, 9, 8, 7, 6};
  CHECK(cutoff_to_time(t, 1.0) == 10);
  CHECK(cutoff_to_time(t, 0.5) == 5);
  CHECK(cutoff_to_time(t, 0.95) == 10);
  CHECK(cutoff_to_time(t, 0.9) == 9);
  CHECK(cutoff_to_time(t, 0.01) == 1);
  CHECK_THROWS(cutoff_to_time({}, 0.5));
  CHECK_THROWS(cutoff_to_time(t, 0.0));
}

TEST_CASE("generation times are reproducible and follow the attempt model") {
  ProtocolSettings s;
  s.hw = hardware_set("ES-2").with_alpha(0.25);
  ProtocolResult r = run_protocol("bell_sc", s);
  auto a = generation_times(r, 20000, 11);
  auto b = generation_times(r, 20000, 11);
  CHECK(a == b);
  CHECK(a != generation_times(r, 20000, 12));
  double m = 0;
  for (double x : a) m += x;
  m /= a.size();
  CHECK(m == doctest::Approx(r.model.mean_time()).epsilon(0.03));
}

TEST_CASE("QEC rows round trip and reject other schemas") {
  QecRow r;
  r.protocol = "dc_ghz";
  r.es_set = "ES-2";
  r.alpha = 0.5;
  r.T = 1e6;
  r.p = 0.0012;
  r.d = 6;
  r.cutoff_x = 0.99;
  r.n_shots = 20000;
  r.failures = 123;
  r.p_L = 123.0 / 20000;
  r.sigma = std::sqrt(r.p_L * (1 - r.p_L) / 20000);
  r.seed = 987654321987654321ull;
  std::string csv = qec_rows_csv({r, r});
  auto back = parse_qec_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].p == r.p);
  CHECK(back[0].d == 6);
  CHECK(back[0].failures == 123);
  CHECK(back[0].seed == r.seed);
  CHECK(qec_rows_csv(back) == csv);

  auto pts = to_data_points(back);
  CHECK(pts[0].r == doctest::Approx(1 - r.p_L));

  std::string bad = csv;
  bad.replace(bad.find("ghzqec.qec_row/1"), 16, "ghzqec.qec_row/2");
  CHECK_THROWS(parse_qec_csv(bad));
  CHECK_THROWS(parse_qec_csv("p,d,p_L\n0.001,4,0.1\n"));
  CHECK_THROWS(parse_qec_csv(csv + "ghzqec.qec_row/1,short\n"));
}

TEST_CASE("protocol sweep rows") {
  RunConfig c = parse_config(R"({"protocol": "bell_sc", "alpha": [0.1, 0.5], "p": [0.0, 0.001], "protocol_shots": 200})");
  auto rows = run_protocol_sweep(c);
  CHECK(rows.size() == 4);
  std::set<uint64_t> seeds;
  for (const auto& r : rows) seeds.insert(r.seed);
  CHECK(seeds.size() == 4);
  CHECK(rows[0].alpha == 0.1);
  CHECK(rows[0].success_prob > 0);
  std::string csv = protocol_rows_csv(rows);
  CHECK(csv.rfind("schema,version,protocol", 0) == 0);
  CHECK(csv == protocol_rows_csv(run_protocol_sweep(c)));
}

TEST_CASE("stabilizer setup carries provenance metadata") {
  RunConfig c = parse_config(R"({"protocol": "dc_ghz", "protocol_shots": 2000, "seed": 4, "timing": {"T": 1e6}})");
  StabilizerSetup a = prepare_stabilizer(c, 0.001, 0.99, 17);
  StabilizerSetup b = prepare_stabilizer(c, 0.001, 0.99, 17);
  CHECK(a.t_cut == b.t_cut);
  CHECK(a.ghz_success >= 0.99);
  CHECK_NOTHROW(a.table.validate());
  for (const char* k : {"protocol", "es_set", "pnr", "p", "cutoff_x", "t_cut", "ghz_success", "ghz_fidelity", "alpha",
                        "seed", "params_hash", "version"})
    CHECK_MESSAGE(a.table.meta.count(k), k);
  CHECK(a.table.meta.at("params_hash").size() == 16);
  CHECK(a.table.meta.at("params_hash") == b.table.meta.at("params_hash"));
  RunConfig c2 = c;
  c2.shots = 7;
  CHECK(prepare_stabilizer(c2, 0.001, 0.99, 17).table.meta.at("params_hash") != a.table.meta.at("params_hash"));

  RunConfig bell = parse_config(R"({"protocol": "bell_sc", "protocol_shots": 100})");
  CHECK_THROWS(prepare_stabilizer(bell, 0.001, 0.99, 1));
}
