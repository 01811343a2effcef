#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ghzqec/runner.hpp"
#include "ghzqec/seeding.hpp"

namespace fs = std::filesystem;
using namespace ghzqec;

namespace {

struct Common {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<long> shots;
  std::optional<bool> pnr;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  app->add_option("--shots", c.shots, "Monte Carlo shots per point")->check(CLI::PositiveNumber);
  auto* f = app->add_flag_function(
      "--pnr,!--no-pnr", [&c](int64_t n) { c.pnr = n > 0; }, "photon-number-resolving detectors");
  (void)f;
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out = *c.out;
  if (c.threads) cfg.threads = *c.threads;
  if (c.shots) cfg.shots = *c.shots;
  if (c.pnr) cfg.hw.pnr = *c.pnr;
  cfg.validate();
  return cfg;
}

void write(const RunConfig& cfg, const std::string& name, const std::string& text) {
  if (cfg.out == "-") {
    std::cout << text;
    return;
  }
  fs::create_directories(cfg.out);
  fs::path p = fs::path(cfg.out) / name;
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  std::cerr << "wrote " << p.string() << "\n";
}

std::string read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GHZ-based distributed toric code simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Common c_prot, c_table, c_qec, c_pipe;
  auto* prot = app.add_subcommand("protocols", "sweep entanglement protocols, write protocols.csv");
  add_common(prot, c_prot);

  auto* table = app.add_subcommand("table", "export the superoperator table for one p");
  add_common(table, c_table);
  double table_p = -1, table_x = -1;
  table->add_option("--p", table_p, "physical error rate (default: first p of the config)");
  table->add_option("--cutoff", table_x, "cut-off percentile (default: config)");

  auto* qec = app.add_subcommand("qec", "logical error rates over the p x d grid, write qec.csv");
  add_common(qec, c_qec);
  std::string qec_table;
  std::vector<int> qec_d;
  qec->add_option("--table", qec_table, "run on an exported table CSV instead of building one")->check(CLI::ExistingFile);
  qec->add_option("--d", qec_d, "distances (with --table)");

  auto* fit = app.add_subcommand("fit", "fit the threshold to a qec.csv, write fit_report.json");
  std::string fit_in, fit_out = "-";
  fit->add_option("input", fit_in, "qec.csv")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "report path, - for stdout");

  auto* pipe = app.add_subcommand("pipeline", "protocol -> tables -> QEC grid -> fit (optionally cut-off scan)");
  add_common(pipe, c_pipe);

  auto* oracle = app.add_subcommand("oracle", "closed-form success rate and fidelity of the optical protocols");
  std::vector<double> o_alpha{0.025, 0.1, 0.25, 0.5};
  std::string o_protocol;
  bool o_simulate = false;
  oracle->add_option("--alpha", o_alpha, "bright-state parameters");
  oracle->add_option("--protocol", o_protocol, "single protocol (default: all six)");
  oracle->add_flag("--simulate", o_simulate, "also run the ideal-hardware exact simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*prot) {
      RunConfig cfg = resolve(c_prot);
      cfg.protocol_shots = c_prot.shots.value_or(cfg.protocol_shots);
      write(cfg, "protocols.csv", protocol_rows_csv(run_protocol_sweep(cfg)));
    } else if (*table) {
      RunConfig cfg = resolve(c_table);
      double p = table_p >= 0 ? table_p : cfg.p_values.front();
      double x = table_x > 0 ? table_x : cfg.cutoff;
      StabilizerSetup st = prepare_stabilizer(cfg, p, x, cfg.seed);
      fs::create_directories(cfg.out);
      std::ostringstream name;
      name << "table_p" << p << ".csv";
      fs::path path = fs::path(cfg.out) / name.str();
      export_table(st.table, path.string());
      std::cerr << "wrote " << path.string() << " (t_cut " << st.t_cut << ", GHZ F " << st.ghz.fidelity << ")\n";
    } else if (*qec) {
      RunConfig cfg = resolve(c_qec);
      if (!qec_table.empty()) {
        SuperoperatorTable t = import_table(qec_table);
        std::vector<QecRow> rows;
        for (int d : qec_d.empty() ? cfg.d_values : qec_d) {
          QecConfig qc;
          qc.d = d;
          qc.cycles = cfg.cycles;
          qc.subround_edges = cfg.subround_edges;
          uint64_t seed = derive_seed(cfg.seed, static_cast<uint64_t>(d));
          LogicalRate lr = logical_error_rate(t, qc, cfg.shots, seed, cfg.threads);
          QecRow r;
          r.protocol = "table:" + fs::path(qec_table).filename().string();
          r.d = d;
          r.n_shots = lr.shots;
          r.failures = lr.failures;
          r.p_L = lr.rate();
          r.sigma = lr.std_error();
          r.seed = seed;
          rows.push_back(r);
        }
        write(cfg, "qec.csv", qec_rows_csv(rows));
      } else {
        write(cfg, "qec.csv", qec_rows_csv(run_qec_grid(cfg, cfg.cutoff)));
      }
    } else if (*fit) {
      auto pts = to_data_points(parse_qec_csv(read(fit_in)));
      FitResult f = fit_threshold(pts);
      std::string rep = fit_report_json(f, pts);
      if (fit_out == "-") std::cout << rep << "\n";
      else std::ofstream(fit_out) << rep << "\n";
      std::cerr << std::setprecision(6) << "p_th = " << f.p_th() << " +- " << f.p_th_err() << "  95% CI [" << f.ci_lo
                << ", " << f.ci_hi << "]  chi2_nu = " << f.chi2_nu << "\n";
    } else if (*pipe) {
      RunConfig cfg = resolve(c_pipe);
      PipelineReport r = run_threshold_pipeline(cfg);
      write(cfg, "qec.csv", qec_rows_csv(r.rows));
      write(cfg, "pipeline_report.json", pipeline_report_json(r) + "\n");
      write(cfg, "config.json", config_to_json(cfg) + "\n");
      if (r.fit) std::cerr << "p_th = " << r.fit->p_th() << " at x = " << r.x << "\n";
      else std::cerr << r.note << "\n";
    } else if (*oracle) {
      std::vector<std::string> names{"bell_sc", "bell_dc", "w", "raw_ghz", "dc_ghz", "dc_w"};
      if (!o_protocol.empty()) names = {o_protocol};
      std::cout << "protocol,pnr,alpha,success,fidelity" << (o_simulate ? ",sim_success,sim_fidelity" : "") << "\n";
      std::cout << std::setprecision(12);
      for (const auto& n : names)
        for (bool pnr : {true, false})
          for (double a : o_alpha) {
            OracleValue v = table_i_oracle(n, a, pnr);
            std::cout << n << ',' << pnr << ',' << a << ',' << v.success << ',';
            if (v.fidelity) std::cout << *v.fidelity;
            if (o_simulate) {
              ProtocolSettings s;
              s.hw.pnr = pnr;
              s.hw = s.hw.with_alpha(a);
              s.timing = TimingParams::noiseless();
              ProtocolResult r = run_protocol(n, s);
              std::cout << ',' << r.success_prob << ',' << r.fidelity;
            }
            std::cout << "\n";
          }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
