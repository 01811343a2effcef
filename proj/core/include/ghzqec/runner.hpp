#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ghzqec/noise.hpp"
#include "ghzqec/protocols.hpp"
#include "ghzqec/superop.hpp"
#include "ghzqec/threshold.hpp"
#include "ghzqec/toric.hpp"

namespace ghzqec {

const char* version();

struct CutoffScanSpec {
  double lo = 0.95;
  double hi = 0.995;
  int budget = 5;
};

struct RunConfig {
  std::string protocol = "dc_ghz";
  std::string es_set = "ES-2";  // empty => hardware given explicitly
  HardwareParams hw = hardware_set("ES-2");
  TimingParams timing;
  std::vector<double> p_values{0.001};
  std::vector<double> alpha_values{0.5};
  std::vector<std::pair<double, double>> alpha_pairs;  // (base, distil), memory protocols
  std::vector<double> T_values;                        // sets T_link = T_idle
  std::vector<std::string> es_sets;                    // ES sweep; overrides es_set per point
  std::vector<int> d_values{4, 6, 8};
  long shots = 20000;           // QEC shots per (p, d)
  long protocol_shots = 10000;  // generation-time samples / memory-protocol shots
  double cutoff = 0.99;
  std::optional<CutoffScanSpec> cutoff_scan;
  uint64_t seed = 1;
  std::string out = "out";
  int threads = 1;
  int cycles = 0;  // 0 => d
  bool subround_edges = true;
  Regime fail_regime = Regime::linking;

  void validate() const;
};

// JSON text with optional "include": [paths] merged first (relative to base_dir),
// later keys override earlier ones.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

// Empirical x-percentile (nearest rank) of generation times.
double cutoff_to_time(std::vector<double> samples, double x);

// Generation times of one protocol run: sampled from the attempt model for
// exact protocols, taken from the shots for memory protocols.
std::vector<double> generation_times(const ProtocolResult& r, long n, uint64_t seed);

struct ProtocolRow {
  std::string protocol, es_set;
  bool pnr = true;
  double alpha = 0, alpha_base = 0, alpha_distil = 0, T = 0, p = 0;
  double success_prob = 0, fidelity = 0, mean_time = 0;
  double mc_time_mean = 0, mc_time_std = 0;
  uint64_t seed = 0;
};

std::vector<ProtocolRow> run_protocol_sweep(const RunConfig& cfg);
std::string protocol_rows_csv(const std::vector<ProtocolRow>& rows);

struct QecRow {
  std::string protocol, es_set;
  bool pnr = true;
  double alpha = 0, T = 0, p = 0;
  int d = 0;
  double cutoff_x = 0, t_cut = 0, ghz_success = 0;
  double ghz_fidelity = 0, ghz_psucc = 0;
  long n_shots = 0, failures = 0;
  double p_L = 0, sigma = 0;
  uint64_t seed = 0;
};

std::string qec_rows_csv(const std::vector<QecRow>& rows);
// Rejects rows whose schema column is missing or of another version.
std::vector<QecRow> parse_qec_csv(const std::string& text);
std::vector<DataPoint> to_data_points(const std::vector<QecRow>& rows);

// Cycle setup for one physical error rate: GHZ generation, cut-off, table.
struct StabilizerSetup {
  ProtocolResult ghz;
  double t_cut = 0, ghz_success = 0;
  SuperoperatorTable table;
};
StabilizerSetup prepare_stabilizer(const RunConfig& cfg, double p, double x, uint64_t seed);

std::vector<QecRow> run_qec_grid(const RunConfig& cfg, double x);

struct PipelineReport {
  double x = 0;
  std::vector<QecRow> rows;
  std::optional<FitResult> fit;
  std::string note;
  std::optional<CutoffScan> scan;
};

// Logical-rate grid then fit at cfg.cutoff, or a cut-off scan when cfg.cutoff_scan is set.
PipelineReport run_threshold_pipeline(const RunConfig& cfg);
std::string fit_report_json(const FitResult& f, const std::vector<DataPoint>& pts);
std::string pipeline_report_json(const PipelineReport& r);

}  // namespace ghzqec
