#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dcqo/experiments.hpp"
#include "dcqo/factoring.hpp"

using nlohmann::json;
namespace ex = dcqo::experiments;
namespace fs = std::filesystem;

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string csv_text(const ex::Table& t) {
  std::string s;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
    s += "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return s;
}

json trace_json(const dcqo::Trace& tr) {
  json costs = json::array();
  for (const auto& st : tr.steps) costs.push_back(st.cost);
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"seed", tr.seed},
          {"converged", tr.converged},
          {"iterations", tr.steps.size() - 1},
          {"cost", costs},
          {"theta_initial", vec(tr.steps.front().theta)},
          {"theta_final", vec(tr.final().theta)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Digitized counterdiabatic optimization toolkit"};
  app.require_subcommand(1);
  std::string out;

  // factor
  auto* factor = app.add_subcommand("factor", "Preprocess a factoring instance into an Ising Hamiltonian");
  std::uint64_t fn = 0;
  int fnp = 0, fnq = 0;
  factor->add_option("--n", fn, "Number to factor")->required();
  factor->add_option("--np", fnp, "Bits of the first factor")->required();
  factor->add_option("--nq", fnq, "Bits of the second factor")->required();
  factor->add_option("-o,--out", out, "Output JSON file (default stdout)");

  // pspin
  auto* pspin = app.add_subcommand("pspin", "Generate a random p-spin instance");
  int pn = 9, pp = 2;
  std::uint64_t pseed = 1;
  std::string pnorm = "unit_variance";
  pspin->add_option("--n", pn, "Spins")->capture_default_str();
  pspin->add_option("--p", pp, "Maximum interaction order")->capture_default_str();
  pspin->add_option("--seed", pseed, "RNG seed")->capture_default_str();
  pspin->add_option("--normalization", pnorm, "unit_variance or size_scaled")
      ->check(CLI::IsMember({"unit_variance", "size_scaled"}))
      ->capture_default_str();
  pspin->add_option("-o,--out", out, "Output JSON file (default stdout)");

  // Shared problem/ansatz options.
  std::string ham = "H9q", kind = "y_yzu";
  double hx = 1.0, dt = 0.1;

  auto* solve = app.add_subcommand("solve-cd", "Action-minimizing CD coefficients at one lambda");
  double lam = 0.5;
  solve->add_option("--hamiltonian", ham, "Builtin name, N/np/nq, or JSON file")->capture_default_str();
  solve->add_option("--kind", kind, "Ansatz kind")->capture_default_str();
  solve->add_option("--hx", hx, "Transverse field")->capture_default_str();
  solve->add_option("--lambda", lam, "Schedule point in [0, 1]")->capture_default_str();
  solve->add_option("-o,--out", out, "Output JSON file (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "Accuracy over an h_x grid and layer counts");
  std::string scheme = "cd_only", grid = "0.2:3.0:0.05", layers = "1";
  sweep->add_option("--hamiltonian", ham)->capture_default_str();
  sweep->add_option("--scheme", scheme, "h_only, cd_only or full")->capture_default_str();
  sweep->add_option("--kind", kind)->capture_default_str();
  sweep->add_option("--hx-grid", grid, "lo:hi:step")->capture_default_str();
  sweep->add_option("--layers", layers, "Comma list or a..b")->capture_default_str();
  sweep->add_option("--dt", dt)->capture_default_str();
  sweep->add_option("-o,--out", out, "Output CSV file (default stdout)");

  auto* optimize = app.add_subcommand("optimize", "ADAM refinement of the single-layer circuit");
  std::string init = "warm", out_dir = "optimize_out", report_dir = "report_out";
  int seeds = 30;
  std::uint64_t master_seed = 2022;
  std::optional<double> opt_hx;
  dcqo::OptimizerConfig ocfg;
  optimize->add_option("--hamiltonian", ham)->capture_default_str();
  optimize->add_option("--kind", kind)->capture_default_str();
  optimize->add_option("--init", init, "warm or random")->check(CLI::IsMember({"warm", "random"}))->capture_default_str();
  optimize->add_option("--seeds", seeds, "Random-init runs")->capture_default_str();
  optimize->add_option("--master-seed", master_seed)->capture_default_str();
  optimize->add_option("--hx", opt_hx, "Transverse field (default: tuned on --hx-grid)");
  optimize->add_option("--hx-grid", grid)->capture_default_str();
  optimize->add_option("--dt", dt)->capture_default_str();
  optimize->add_option("--max-iters", ocfg.max_iters)->capture_default_str();
  optimize->add_option("--step-size", ocfg.step_size)->capture_default_str();
  optimize->add_option("--out-dir", out_dir, "Directory for traces.json and per-trace CSVs")->capture_default_str();

  auto* transpile = app.add_subcommand("transpile", "Compile the single-layer circuit to native gates on a grid");
  std::string shape = "2x5";
  int ancilla = -1;
  transpile->add_option("--hamiltonian", ham)->capture_default_str();
  transpile->add_option("--kind", kind)->capture_default_str();
  transpile->add_option("--grid", shape, "RxC")->capture_default_str();
  transpile->add_option("--ancilla", ancilla, "Expected ancilla count (checked against the grid)");
  transpile->add_option("--hx", hx)->capture_default_str();
  transpile->add_option("--dt", dt)->capture_default_str();
  transpile->add_option("-o,--out", out, "Output JSON file (default stdout)");

  auto* topo = app.add_subcommand("topology-report", "All-pairs routing cost across grid shapes");
  std::string qubits = "4..16";
  topo->add_option("--qubits", qubits, "Comma list or a..b")->capture_default_str();
  topo->add_option("-o,--out", out, "Output CSV file (default stdout)");

  auto* run = app.add_subcommand("run", "Run a named experiment from a config file");
  std::string config;
  run->add_option("--config", config, "Experiment config JSON")->required()->check(CLI::ExistingFile);

  auto* report = app.add_subcommand("report", "Aggregate run directories into summary tables");
  std::vector<std::string> run_dirs;
  report->add_option("runs", run_dirs, "Run directories");
  report->add_option("--out-dir", report_dir, "Directory for aggregated CSVs")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*factor) {
      auto cs = dcqo::factoring::simplify(dcqo::factoring::generate_clauses(fn, fnp, fnq));
      write_text(out, dcqo::factoring::to_json(cs, dcqo::factoring::to_hamiltonian(cs)).dump(2) + "\n");
    } else if (*pspin) {
      auto norm = pnorm == "size_scaled" ? dcqo::Normalization::size_scaled : dcqo::Normalization::unit_variance;
      const auto h = dcqo::random_pspin(pn, pp, pseed, norm);
      const auto g = dcqo::brute_force_ground(h);
      json configs = json::array();
      for (auto c : g.configs) configs.push_back(dcqo::bitstring(c, h.n()));
      write_text(out, json{{"hamiltonian", h}, {"seed", pseed}, {"e_min", g.e_min}, {"ground_configs", configs}}
                          .dump(2) + "\n");
    } else if (*solve) {
      const auto h = ex::load_hamiltonian(ham);
      const auto sol = dcqo::solve_cd(h, hx, lam, dcqo::AnsatzSpec::parse(kind));
      json terms = json::array();
      for (int k = 0; k < sol.ansatz.n_params; ++k)
        terms.push_back({{"label", sol.ansatz.slot_labels[k]}, {"theta", sol.theta[k]}});
      write_text(out, json{{"kind", sol.ansatz.spec.name()}, {"h_x", hx}, {"lambda", lam}, {"action", sol.action},
                           {"parameters", terms}}
                          .dump(2) + "\n");
    } else if (*sweep) {
      const auto rows = ex::sweep(ex::load_hamiltonian(ham), dcqo::parse_scheme(scheme), dcqo::AnsatzSpec::parse(kind),
                                  ex::parse_range(grid), ex::parse_int_list(layers), dt);
      ex::Table t{{"h_x", "p", "accuracy"}, {}};
      for (const auto& r : rows) t.rows.push_back({ex::fmt17(r.h_x), std::to_string(r.p), ex::fmt17(r.accuracy)});
      write_text(out, csv_text(t));
    } else if (*optimize) {
      const auto h = ex::load_hamiltonian(ham);
      const auto k = dcqo::AnsatzSpec::parse(kind);
      const double x = opt_hx ? *opt_hx : ex::tune_hx(h, k, ex::parse_range(grid), dt).h_x;
      const auto runs = ex::optimize_runs(h, dcqo::Schedule::with_layers(1, x, dt), k, init, seeds, master_seed, ocfg);
      fs::create_directories(out_dir);
      json traces = json::array();
      for (std::size_t i = 0; i < runs.size(); ++i) {
        auto j = trace_json(runs[i].trace);
        j["init"] = runs[i].init;
        j["initial_accuracy"] = runs[i].initial_accuracy;
        j["final_accuracy"] = runs[i].final_accuracy;
        traces.push_back(j);
        ex::Table t{{"iteration", "cost"}, {}};
        const auto& st = runs[i].trace.steps;
        for (std::size_t it = 0; it < st.size(); ++it) t.rows.push_back({std::to_string(it), ex::fmt17(st[it].cost)});
        ex::write_csv(fs::path(out_dir) / ("trace_" + init + "_" + std::to_string(i) + ".csv"), t);
      }
      const json doc = {{"hamiltonian", ham}, {"kind", k.name()}, {"h_x", x}, {"init", init}, {"traces", traces}};
      std::ofstream(fs::path(out_dir) / "traces.json") << doc.dump(2) << "\n";
      int solved = 0;
      for (const auto& r : runs) solved += r.final_accuracy >= ex::kSolvedAccuracy;
      std::printf("h_x %s, %d/%zu runs reached accuracy >= %.2f; traces in %s\n", ex::fmt17(x).c_str(), solved,
                  runs.size(), ex::kSolvedAccuracy, out_dir.c_str());
    } else if (*transpile) {
      const auto h = ex::load_hamiltonian(ham);
      const auto g = dcqo::Grid::parse(shape, h.n());
      if (ancilla >= 0 && g.slots() - h.n() != ancilla)
        throw std::invalid_argument("grid " + shape + " leaves " + std::to_string(g.slots() - h.n()) +
                                    " ancilla slots, expected " + std::to_string(ancilla));
      const auto s = dcqo::Schedule::with_layers(1, hx, dt);
      const auto sol = dcqo::solve_cd(h, hx, dcqo::lambda_of_t(s.tau / 2, s.tau), dcqo::AnsatzSpec::parse(kind));
      const auto cc = dcqo::compile_single_layer(sol.ansatz, sol.theta, dcqo::single_layer_dlambda(s), g);
      write_text(out, dcqo::to_json(cc).dump(2) + "\n");
    } else if (*topo) {
      ex::Table t{{"q", "rows", "cols", "duration_ns", "cz_layers", "single_q_layers", "swap_gates"}, {}};
      for (int q : ex::parse_int_list(qubits))
        for (const auto& r : dcqo::topology_report(q, dcqo::default_shapes(q)))
          t.rows.push_back({std::to_string(q), std::to_string(r.rows), std::to_string(r.cols),
                            ex::fmt17(r.stats.total_duration_ns), std::to_string(r.stats.cz_layer_count),
                            std::to_string(r.stats.single_q_layer_count), std::to_string(r.stats.swap_gate_count)});
      write_text(out, csv_text(t));
    } else if (*run) {
      std::ifstream in(config);
      const auto cfg = ex::parse_config(json::parse(in));
      const auto res = ex::run(cfg);
      for (const auto& [a, ok] : res.checks) {
        const auto it = res.metrics.find(a.metric);
        std::printf("%s %s = %s", ok ? "PASS" : "FAIL", a.metric.c_str(),
                    it == res.metrics.end() ? "missing" : ex::fmt17(it->second).c_str());
        if (a.min) std::printf(" (min %s)", ex::fmt17(*a.min).c_str());
        if (a.max) std::printf(" (max %s)", ex::fmt17(*a.max).c_str());
        std::printf("\n");
      }
      std::printf("manifest: %s\n", (cfg.output_dir / "manifest.json").string().c_str());
      return res.all_passed() ? 0 : 1;
    } else if (*report) {
      std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
      const auto rep = ex::report(dirs);
      fs::create_directories(report_dir);
      for (const auto& [name, t] : rep.tables) ex::write_csv(fs::path(report_dir) / (name + ".csv"), t);
      for (const auto& m : rep.missing) std::fprintf(stderr, "missing: %s\n", m.c_str());
      return rep.missing.empty() ? 0 : 1;
    }
  } catch (const ex::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
