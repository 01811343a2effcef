#include "ghzqec/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ghzqec/seeding.hpp"
#include "json.hpp"

#ifndef GHZQEC_VERSION
#define GHZQEC_VERSION "0.0.0"
#endif

namespace ghzqec {

using json = nlohmann::json;

namespace {

constexpr const char* kConfigSchema = "ghzqec.config/1";
constexpr const char* kProtocolRowSchema = "ghzqec.protocol_row/1";
constexpr const char* kQecRowSchema = "ghzqec.qec_row/1";

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json resolve_includes(json j, const std::filesystem::path& base, int depth) {
  if (depth > 16) throw std::runtime_error("config include depth exceeded");
  if (!j.is_object()) throw std::runtime_error("config must be a JSON object");
  json merged = json::object();
  if (j.contains("include")) {
    json inc = j["include"];
    if (inc.is_string()) inc = json::array({inc});
    for (const auto& p : inc) {
      std::filesystem::path path = base / p.get<std::string>();
      json sub = json::parse(read_file(path.string()));
      merged.merge_patch(resolve_includes(sub, path.parent_path(), depth + 1));
    }
    j.erase("include");
  }
  merged.merge_patch(j);
  return merged;
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) out.push_back(x.get<double>());
    return out;
  }
  if (v.is_object()) {
    if (v.contains("linspace")) {
      auto a = v["linspace"];
      double lo = a.at(0), hi = a.at(1);
      int n = a.at(2);
      if (n < 1) throw std::runtime_error(key + ": linspace needs n >= 1");
      std::vector<double> out;
      for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
      return out;
    }
    if (v.contains("logspace")) {
      auto a = v["logspace"];
      double lo = a.at(0), hi = a.at(1);
      int n = a.at(2);
      if (n < 1) throw std::runtime_error(key + ": logspace needs n >= 1");
      std::vector<double> out;
      for (int i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1)));
      return out;
    }
  }
  throw std::runtime_error(key + ": expected a number, a list or {linspace|logspace: [lo, hi, n]}");
}

void apply_hardware(RunConfig& c, const json& h) {
  static const std::set<std::string> keys{"set", "f_prep", "p_de", "mu_I", "eta_ph"};
  for (auto it = h.begin(); it != h.end(); ++it)
    if (!keys.count(it.key())) throw std::runtime_error("unknown hardware key " + it.key());
  if (h.contains("set")) {
    c.es_set = h["set"].get<std::string>();
    bool pnr = c.hw.pnr;
    c.hw = hardware_set(c.es_set);
    c.hw.pnr = pnr;
  }
  bool custom = false;
  if (h.contains("f_prep")) c.hw.f_prep = h["f_prep"], custom = true;
  if (h.contains("p_de")) c.hw.p_de = h["p_de"], custom = true;
  if (h.contains("mu_I")) c.hw.mu_I = h["mu_I"], custom = true;
  if (h.contains("eta_ph")) c.hw.eta_ph = h["eta_ph"], custom = true;
  if (custom && !h.contains("set")) c.es_set.clear();
}

void apply_timing(TimingParams& t, const json& j) {
  std::map<std::string, double*> f{{"T_link", &t.T_link}, {"T_idle", &t.T_idle}, {"t_link", &t.t_link},
                                   {"t_meas", &t.t_meas}, {"t_pc", &t.t_pc},     {"t_pm", &t.t_pm},
                                   {"t_2q", &t.t_2q},     {"t_swap", &t.t_swap}};
  for (auto it = j.begin(); it != j.end(); ++it) {
    // "inf" for no decoherence; null would be dropped by the include merge
    double v = it.value() == "inf" ? INFINITY : it.value().get<double>();
    if (it.key() == "T") {
      t.T_link = t.T_idle = v;
      continue;
    }
    auto k = f.find(it.key());
    if (k == f.end()) throw std::runtime_error("unknown timing key " + it.key());
    *k->second = v;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

ProtocolSettings settings_for(const RunConfig& cfg, const std::string& es, double alpha, std::optional<std::pair<double, double>> pair,
                              double T, double p, uint64_t seed) {
  ProtocolSettings s;
  s.hw = cfg.hw;
  if (!es.empty()) {
    s.hw = hardware_set(es);
    s.hw.pnr = cfg.hw.pnr;
  }
  s.hw = s.hw.with_alpha(alpha);
  if (pair) {
    s.hw.alpha_base = pair->first;
    s.hw.alpha_distil = pair->second;
  }
  s.timing = cfg.timing;
  if (T > 0) s.timing.T_link = s.timing.T_idle = T;
  s.noise = GateNoise::uniform(p);
  s.shots = cfg.protocol_shots;
  s.seed = seed;
  return s;
}

}  // namespace

const char* version() { return GHZQEC_VERSION; }

void RunConfig::validate() const {
  const auto& names = protocol_names();
  if (std::find(names.begin(), names.end(), protocol) == names.end())
    throw std::runtime_error("unregistered protocol " + protocol);
  hw.validate();
  timing.validate();
  if (!es_set.empty()) hardware_set(es_set);
  for (const auto& e : es_sets) hardware_set(e);
  for (double p : p_values)
    if (!(p >= 0 && p < 1)) throw std::runtime_error("p must lie in [0, 1)");
  for (double a : alpha_values)
    if (!(a > 0 && a <= 1)) throw std::runtime_error("alpha must lie in (0, 1]");
  for (int d : d_values)
    if (d < 4 || d % 2) throw std::runtime_error("distances must be even and >= 4");
  if (shots < 1 || protocol_shots < 1) throw std::runtime_error("shot counts must be positive");
  if (!(cutoff > 0 && cutoff <= 1)) throw std::runtime_error("cut-off percentile must lie in (0, 1]");
  if (cutoff_scan && !(cutoff_scan->lo > 0 && cutoff_scan->hi <= 1 && cutoff_scan->lo <= cutoff_scan->hi))
    throw std::runtime_error("cut-off scan range must lie in (0, 1]");
  if (threads < 1) throw std::runtime_error("threads must be >= 1");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json j = resolve_includes(json::parse(text), base_dir, 0);
  static const std::set<std::string> keys{"schema", "protocol", "hardware", "pnr", "timing", "p", "alpha",
                                          "alpha_pairs", "T", "es_sets", "d", "shots", "protocol_shots",
                                          "cutoff", "seed", "out", "threads", "cycles", "subround_edges",
                                          "fail_regime"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!keys.count(it.key())) throw std::runtime_error("unknown config key " + it.key());
  if (j.contains("schema") && j["schema"] != kConfigSchema)
    throw std::runtime_error("unsupported config schema " + j["schema"].dump());
  RunConfig c;
  if (j.contains("pnr")) c.hw.pnr = j["pnr"];
  if (j.contains("hardware")) apply_hardware(c, j["hardware"]);
  if (j.contains("protocol")) c.protocol = j["protocol"];
  if (j.contains("timing")) apply_timing(c.timing, j["timing"]);
  if (j.contains("p")) c.p_values = number_list(j["p"], "p");
  if (j.contains("alpha")) c.alpha_values = number_list(j["alpha"], "alpha");
  if (j.contains("alpha_pairs"))
    for (const auto& pr : j["alpha_pairs"]) c.alpha_pairs.push_back({pr.at(0), pr.at(1)});
  if (j.contains("T")) c.T_values = number_list(j["T"], "T");
  if (j.contains("es_sets")) {
    if (j["es_sets"] == "all") c.es_sets = hardware_set_names();
    else c.es_sets = j["es_sets"].get<std::vector<std::string>>();
  }
  if (j.contains("d")) c.d_values = j["d"].get<std::vector<int>>();
  if (j.contains("shots")) c.shots = j["shots"];
  if (j.contains("protocol_shots")) c.protocol_shots = j["protocol_shots"];
  if (j.contains("cutoff")) {
    const auto& v = j["cutoff"];
    if (v.is_number()) {
      c.cutoff = v;
    } else {
      CutoffScanSpec s;
      s.lo = v.at("scan").at(0);
      s.hi = v.at("scan").at(1);
      if (v.contains("budget")) s.budget = v["budget"];
      c.cutoff_scan = s;
    }
  }
  if (j.contains("seed")) c.seed = j["seed"];
  if (j.contains("out")) c.out = j["out"];
  if (j.contains("threads")) c.threads = j["threads"];
  if (j.contains("cycles")) c.cycles = j["cycles"];
  if (j.contains("subround_edges")) c.subround_edges = j["subround_edges"];
  if (j.contains("fail_regime")) {
    std::string r = j["fail_regime"];
    if (r == "linking") c.fail_regime = Regime::linking;
    else if (r == "idle") c.fail_regime = Regime::idle;
    else throw std::runtime_error("fail_regime must be linking or idle");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::filesystem::path p(path);
  return parse_config(read_file(path), p.has_parent_path() ? p.parent_path().string() : ".");
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  j["protocol"] = c.protocol;
  j["pnr"] = c.hw.pnr;
  if (!c.es_set.empty()) j["hardware"]["set"] = c.es_set;
  j["hardware"]["f_prep"] = c.hw.f_prep;
  j["hardware"]["p_de"] = c.hw.p_de;
  j["hardware"]["mu_I"] = c.hw.mu_I;
  j["hardware"]["eta_ph"] = c.hw.eta_ph;
  auto num = [](double v) { return std::isinf(v) ? json("inf") : json(v); };
  j["timing"] = {{"T_link", num(c.timing.T_link)}, {"T_idle", num(c.timing.T_idle)}, {"t_link", c.timing.t_link},
                 {"t_meas", c.timing.t_meas},      {"t_pc", c.timing.t_pc},           {"t_pm", c.timing.t_pm},
                 {"t_2q", c.timing.t_2q},          {"t_swap", c.timing.t_swap}};
  j["p"] = c.p_values;
  j["alpha"] = c.alpha_values;
  if (!c.alpha_pairs.empty()) {
    j["alpha_pairs"] = json::array();
    for (auto [b, d] : c.alpha_pairs) j["alpha_pairs"].push_back({b, d});
  }
  if (!c.T_values.empty()) j["T"] = c.T_values;
  if (!c.es_sets.empty()) j["es_sets"] = c.es_sets;
  j["d"] = c.d_values;
  j["shots"] = c.shots;
  j["protocol_shots"] = c.protocol_shots;
  if (c.cutoff_scan) j["cutoff"] = {{"scan", {c.cutoff_scan->lo, c.cutoff_scan->hi}}, {"budget", c.cutoff_scan->budget}};
  else j["cutoff"] = c.cutoff;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["threads"] = c.threads;
  j["cycles"] = c.cycles;
  j["subround_edges"] = c.subround_edges;
  j["fail_regime"] = c.fail_regime == Regime::linking ? "linking" : "idle";
  return j.dump(2);
}

double cutoff_to_time(std::vector<double> samples, double x) {
  if (samples.empty()) throw std::invalid_argument("empty generation-time distribution");
  if (!(x > 0 && x <= 1)) throw std::invalid_argument("cut-off percentile must lie in (0, 1]");
  std::sort(samples.begin(), samples.end());
  long n = static_cast<long>(samples.size());
  long k = static_cast<long>(std::ceil(x * n - 1e-9)) - 1;
  return samples[std::clamp(k, 0L, n - 1)];
}

std::vector<double> generation_times(const ProtocolResult& r, long n, uint64_t seed) {
  if (r.per_shot) {
    if (r.time_samples.empty()) throw std::runtime_error(r.protocol + ": no successful shots, no generation times");
    return r.time_samples;
  }
  if (r.model.success() <= 0) throw std::runtime_error(r.protocol + ": zero success probability, no generation times");
  std::vector<double> out;
  out.reserve(n);
  auto rng = make_rng(seed, 0);
  for (long i = 0; i < n; ++i) out.push_back(r.model.sample_time(rng));
  return out;
}

std::vector<ProtocolRow> run_protocol_sweep(const RunConfig& cfg) {
  std::vector<std::string> es = cfg.es_sets.empty() ? std::vector<std::string>{cfg.es_set} : cfg.es_sets;
  std::vector<double> Ts = cfg.T_values.empty() ? std::vector<double>{0.0} : cfg.T_values;
  std::vector<std::optional<std::pair<double, double>>> pairs;
  if (cfg.alpha_pairs.empty()) pairs.push_back(std::nullopt);
  for (const auto& pr : cfg.alpha_pairs) pairs.push_back(pr);
  std::vector<ProtocolRow> rows;
  uint64_t idx = 0;
  for (const auto& e : es)
    for (double T : Ts)
      for (const auto& pr : pairs)
        for (double a : (pr ? std::vector<double>{pr->first} : cfg.alpha_values))
          for (double p : cfg.p_values) {
            uint64_t seed = derive_seed(cfg.seed, idx++);
            ProtocolSettings s = settings_for(cfg, e, a, pr, T, p, seed);
            ProtocolResult r = run_protocol(cfg.protocol, s);
            ProtocolRow row;
            row.protocol = cfg.protocol;
            row.es_set = e;
            row.pnr = s.hw.pnr;
            row.alpha = s.hw.alpha;
            row.alpha_base = s.hw.alpha_base;
            row.alpha_distil = s.hw.alpha_distil;
            row.T = s.timing.T_link;
            row.p = p;
            row.success_prob = r.success_prob;
            row.fidelity = r.fidelity;
            row.mean_time = r.ghz_time;
            row.seed = seed;
            if (r.success_prob > 0) {
              auto t = generation_times(r, cfg.protocol_shots, derive_seed(seed, 1));
              double m = 0, v = 0;
              for (double x : t) m += x;
              m /= t.size();
              for (double x : t) v += (x - m) * (x - m);
              row.mc_time_mean = m;
              row.mc_time_std = t.size() > 1 ? std::sqrt(v / (t.size() - 1)) : 0;
            }
            rows.push_back(row);
          }
  return rows;
}

std::string protocol_rows_csv(const std::vector<ProtocolRow>& rows) {
  std::ostringstream os;
  os << "schema,version,protocol,es_set,pnr,alpha,alpha_base,alpha_distil,T,p,success_prob,fidelity,mean_time,"
        "mc_time_mean,mc_time_std,seed\n";
  for (const auto& r : rows)
    os << kProtocolRowSchema << ',' << version() << ',' << r.protocol << ',' << r.es_set << ',' << (r.pnr ? 1 : 0)
       << ',' << fmt(r.alpha) << ',' << fmt(r.alpha_base) << ',' << fmt(r.alpha_distil) << ',' << fmt(r.T) << ','
       << fmt(r.p) << ',' << fmt(r.success_prob) << ',' << fmt(r.fidelity) << ',' << fmt(r.mean_time) << ','
       << fmt(r.mc_time_mean) << ',' << fmt(r.mc_time_std) << ',' << r.seed << '\n';
  return os.str();
}

namespace {
const char* kQecHeader =
    "schema,version,protocol,es_set,pnr,alpha,T,p,d,cutoff_x,t_cut,ghz_success,ghz_fidelity,ghz_psucc,n_shots,"
    "failures,p_L,sigma,seed";
}

std::string qec_rows_csv(const std::vector<QecRow>& rows) {
  std::ostringstream os;
  os << kQecHeader << '\n';
  for (const auto& r : rows)
    os << kQecRowSchema << ',' << version() << ',' << r.protocol << ',' << r.es_set << ',' << (r.pnr ? 1 : 0) << ','
       << fmt(r.alpha) << ',' << fmt(r.T) << ',' << fmt(r.p) << ',' << r.d << ',' << fmt(r.cutoff_x) << ','
       << fmt(r.t_cut) << ',' << fmt(r.ghz_success) << ',' << fmt(r.ghz_fidelity) << ',' << fmt(r.ghz_psucc) << ','
       << r.n_shots << ',' << r.failures << ',' << fmt(r.p_L) << ',' << fmt(r.sigma) << ',' << r.seed << '\n';
  return os.str();
}

std::vector<QecRow> parse_qec_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kQecHeader) throw std::runtime_error("not a QEC row file (header mismatch)");
  std::vector<QecRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 19) throw std::runtime_error("malformed QEC row at line " + std::to_string(lineno));
    if (f[0] != kQecRowSchema) throw std::runtime_error("unsupported QEC row schema " + f[0]);
    QecRow r;
    r.protocol = f[2];
    r.es_set = f[3];
    r.pnr = f[4] == "1";
    r.alpha = std::stod(f[5]);
    r.T = std::stod(f[6]);
    r.p = std::stod(f[7]);
    r.d = std::stoi(f[8]);
    r.cutoff_x = std::stod(f[9]);
    r.t_cut = std::stod(f[10]);
    r.ghz_success = std::stod(f[11]);
    r.ghz_fidelity = std::stod(f[12]);
    r.ghz_psucc = std::stod(f[13]);
    r.n_shots = std::stol(f[14]);
    r.failures = std::stol(f[15]);
    r.p_L = std::stod(f[16]);
    r.sigma = std::stod(f[17]);
    r.seed = std::stoull(f[18]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<DataPoint> to_data_points(const std::vector<QecRow>& rows) {
  std::vector<DataPoint> pts;
  for (const auto& r : rows) pts.push_back(DataPoint::from_counts(r.p, r.d, r.n_shots - r.failures, r.n_shots));
  return pts;
}

namespace {

struct Generated {
  ProtocolResult ghz;
  std::vector<double> times;
  uint64_t seed = 0;
};

// FNV-1a over the canonical config dump.
std::string params_hash(const RunConfig& cfg) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : config_to_json(cfg)) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

Generated generate(const RunConfig& cfg, double p, uint64_t seed) {
  double T = cfg.T_values.empty() ? 0.0 : cfg.T_values.front();
  std::optional<std::pair<double, double>> pr;
  if (!cfg.alpha_pairs.empty()) pr = cfg.alpha_pairs.front();
  ProtocolSettings s = settings_for(cfg, cfg.es_set, cfg.alpha_values.front(), pr, T, p, seed);
  Generated g{run_protocol(cfg.protocol, s), {}, seed};
  if (g.ghz.output_state.sites().size() != 4) throw std::runtime_error(cfg.protocol + " does not produce a 4-qubit state");
  g.times = generation_times(g.ghz, cfg.protocol_shots, derive_seed(seed, 1));
  return g;
}

StabilizerSetup tabulate(const RunConfig& cfg, const Generated& g, double p, double x) {
  StabilizerSetup st;
  st.ghz = g.ghz;
  st.t_cut = cutoff_to_time(g.times, x);
  long within = std::count_if(g.times.begin(), g.times.end(), [&](double t) { return t <= st.t_cut; });
  st.ghz_success = double(within) / g.times.size();
  CycleConfig cc;
  cc.noise = GateNoise::uniform(p);
  cc.timing = cfg.timing;
  if (!cfg.T_values.empty()) cc.timing.T_link = cc.timing.T_idle = cfg.T_values.front();
  cc.t_cut = st.t_cut;
  cc.ghz_success = st.ghz_success;
  cc.fail_regime = cfg.fail_regime;
  st.table = build_table(g.ghz.output_state, cc);
  st.table.meta["protocol"] = cfg.protocol;
  st.table.meta["es_set"] = cfg.es_set;
  st.table.meta["pnr"] = cfg.hw.pnr ? "true" : "false";
  st.table.meta["p"] = fmt(p);
  st.table.meta["cutoff_x"] = fmt(x);
  st.table.meta["t_cut"] = fmt(st.t_cut);
  st.table.meta["ghz_success"] = fmt(st.ghz_success);
  st.table.meta["ghz_fidelity"] = fmt(g.ghz.fidelity);
  st.table.meta["alpha"] = fmt(cfg.alpha_values.front());
  st.table.meta["seed"] = std::to_string(g.seed);
  st.table.meta["params_hash"] = params_hash(cfg);
  st.table.meta["version"] = version();
  return st;
}

std::vector<QecRow> grid(const RunConfig& cfg, double x, std::map<double, Generated>& cache) {
  std::vector<QecRow> rows;
  for (size_t i = 0; i < cfg.p_values.size(); ++i) {
    double p = cfg.p_values[i];
    auto it = cache.find(p);
    if (it == cache.end()) it = cache.emplace(p, generate(cfg, p, derive_seed(cfg.seed, i, 0))).first;
    StabilizerSetup st = tabulate(cfg, it->second, p, x);
    for (int d : cfg.d_values) {
      QecConfig qc;
      qc.d = d;
      qc.cycles = cfg.cycles;
      qc.subround_edges = cfg.subround_edges;
      uint64_t seed = derive_seed(cfg.seed, i, static_cast<uint64_t>(d));
      LogicalRate lr = logical_error_rate(st.table, qc, cfg.shots, seed, cfg.threads);
      QecRow r;
      r.protocol = cfg.protocol;
      r.es_set = cfg.es_set;
      r.pnr = cfg.hw.pnr;
      r.alpha = cfg.alpha_values.front();
      r.T = cfg.T_values.empty() ? cfg.timing.T_link : cfg.T_values.front();
      r.p = p;
      r.d = d;
      r.cutoff_x = x;
      r.t_cut = st.t_cut;
      r.ghz_success = st.ghz_success;
      r.ghz_fidelity = st.ghz.fidelity;
      r.ghz_psucc = st.ghz.success_prob;
      r.n_shots = lr.shots;
      r.failures = lr.failures;
      r.p_L = lr.rate();
      r.sigma = std::sqrt(r.p_L * (1 - r.p_L) / r.n_shots);
      r.seed = seed;
      rows.push_back(r);
    }
  }
  return rows;
}

PipelineReport fit_rows(double x, std::vector<QecRow> rows) {
  PipelineReport rep;
  rep.x = x;
  rep.rows = std::move(rows);
  bool all_bad = std::all_of(rep.rows.begin(), rep.rows.end(), [](const QecRow& r) { return r.p_L > 0.80; });
  if (all_bad) {
    rep.note = "rejected: p_L > 0.80 at every tested p";
    return rep;
  }
  try {
    rep.fit = fit_threshold(to_data_points(rep.rows));
  } catch (const std::exception& e) {
    rep.note = std::string("fit failed: ") + e.what();
  }
  return rep;
}

}  // namespace

StabilizerSetup prepare_stabilizer(const RunConfig& cfg, double p, double x, uint64_t seed) {
  return tabulate(cfg, generate(cfg, p, seed), p, x);
}

std::vector<QecRow> run_qec_grid(const RunConfig& cfg, double x) {
  std::map<double, Generated> cache;
  return grid(cfg, x, cache);
}

PipelineReport run_threshold_pipeline(const RunConfig& cfg) {
  cfg.validate();
  std::map<double, Generated> cache;
  if (!cfg.cutoff_scan) return fit_rows(cfg.cutoff, grid(cfg, cfg.cutoff, cache));
  std::map<double, PipelineReport> reports;
  auto eval = [&](double x) {
    PipelineReport rep = fit_rows(x, grid(cfg, x, cache));
    CutoffEval e;
    e.x = x;
    e.fit = rep.fit;
    e.note = rep.note;
    reports[x] = std::move(rep);
    return e;
  };
  CutoffScan scan = optimize_cutoff(eval, cfg.cutoff_scan->lo, cfg.cutoff_scan->hi, cfg.cutoff_scan->budget);
  PipelineReport out;
  if (scan.best_x) {
    out = reports[*scan.best_x];
  } else {
    out.note = "no threshold: no cut-off percentile produced a fit";
    out.x = cfg.cutoff_scan->hi;
  }
  out.scan = scan;
  return out;
}

namespace {

json fit_json(const FitResult& f) {
  static const char* names[7] = {"a", "b", "c", "e", "p_th", "kappa", "zeta"};
  json j;
  for (int k = 0; k < 7; ++k) j["beta"][names[k]] = f.beta[k];
  j["covariance"] = json::array();
  for (int r = 0; r < 7; ++r) {
    json row = json::array();
    for (int c = 0; c < 7; ++c) row.push_back(f.covariance(r, c));
    j["covariance"].push_back(row);
  }
  j["chi2_nu"] = f.chi2_nu;
  j["t_factor"] = f.t_factor;
  j["p_th"] = f.p_th();
  j["p_th_err"] = f.p_th_err();
  j["ci95"] = {f.ci_lo, f.ci_hi};
  j["iterations"] = f.iterations;
  j["q_log"] = f.q_log;
  return j;
}

}  // namespace

std::string fit_report_json(const FitResult& f, const std::vector<DataPoint>& pts) {
  json j = fit_json(f);
  j["schema"] = "ghzqec.fit_report/1";
  j["version"] = version();
  j["points"] = json::array();
  for (const auto& pt : pts) j["points"].push_back({{"p", pt.p}, {"d", pt.d}, {"r", pt.r}, {"sigma", pt.sigma}, {"n", pt.n}});
  return j.dump(2);
}

std::string pipeline_report_json(const PipelineReport& r) {
  json j;
  j["schema"] = "ghzqec.pipeline_report/1";
  j["version"] = version();
  j["cutoff_x"] = r.x;
  if (r.fit) j["fit"] = fit_json(*r.fit);
  if (!r.note.empty()) j["note"] = r.note;
  if (r.scan) {
    j["scan"] = json::array();
    for (const auto& e : r.scan->evals) {
      json s{{"x", e.x}};
      if (e.fit) s["p_th"] = e.fit->p_th(), s["ci95"] = {e.fit->ci_lo, e.fit->ci_hi};
      if (!e.note.empty()) s["note"] = e.note;
      j["scan"].push_back(s);
    }
    if (r.scan->best_x) j["best_x"] = *r.scan->best_x;
  }
  return j.dump(2);
}

}  // namespace ghzqec
