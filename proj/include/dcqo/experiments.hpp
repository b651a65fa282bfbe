#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcqo/counterdiabatic.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/simulator.hpp"
#include "dcqo/transpiler.hpp"
#include "dcqo/variational.hpp"

namespace dcqo::experiments {

// "lo:hi:step", inclusive; values are lo + k * step rounded to 1e-12.
std::vector<double> parse_range(const std::string& s);
// "1,2,3,4,9" or "4..16".
std::vector<int> parse_int_list(const std::string& s);
std::string fmt17(double x);
std::uint64_t child_seed(std::uint64_t master, std::uint64_t index);
std::uint64_t fnv1a(const std::string& s);

struct FactorProblem {
  std::uint64_t n = 0;
  int n_p = 0;
  int n_q = 0;
};

// Builtin name ("H9q"), factoring triple ("1261/4/7"), or a path to a
// Hamiltonian JSON file.
IsingHamiltonian load_hamiltonian(const std::string& ref);

struct SweepRow {
  std::string scheme;
  int p = 1;
  double h_x = 0;
  double accuracy = 0;
};

std::vector<SweepRow> sweep(const IsingHamiltonian& hf, Scheme scheme, AnsatzSpec kind,
                            const std::vector<double>& hx_grid, const std::vector<int>& layers, double dt);

struct Best {
  double h_x = 0;
  double accuracy = -1;
};
// Highest accuracy for one (scheme, p); ties keep the smaller h_x.
Best best_of(const std::vector<SweepRow>& rows, const std::string& scheme, int p);

// Single-layer (p = 1, cd_only) accuracy maximized over the grid.
Best tune_hx(const IsingHamiltonian& hf, AnsatzSpec kind, const std::vector<double>& hx_grid, double dt);

struct OptimizeRun {
  std::string init;  // "warm" or "random"
  std::uint64_t seed = 0;
  Trace trace;
  double initial_accuracy = 0;
  double final_accuracy = 0;
};

inline constexpr double kSolvedAccuracy = 0.99;

std::vector<OptimizeRun> optimize_runs(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind,
                                       const std::string& init, int seeds, std::uint64_t master_seed,
                                       const OptimizerConfig& cfg);

struct QaoaRun {
  int p = 1;
  Trace trace;
  double final_accuracy = 0;
};

// Linear-ramp initialization with tau = (p + 1) dt, then ADAM over (beta, gamma).
std::vector<QaoaRun> qaoa_runs(const IsingHamiltonian& hf, double h_x, const std::vector<int>& layers, double dt,
                               const OptimizerConfig& cfg);

struct InstanceResult {
  int instance = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> accuracy;  // by ansatz kind
  std::map<std::string, double> h_x;
  bool solved_by_any = false;
  bool solved_by_all = false;
};

struct PSpinStudy {
  int n = 9;
  int p = 2;
  int instances = 30;
  std::uint64_t master_seed = 1;
  Normalization normalization = Normalization::unit_variance;
  std::vector<AnsatzSpec> kinds;
  std::optional<double> h_x;  // absent: tuned per instance and kind
  std::vector<double> hx_grid;
  double dt = 0.1;
  OptimizerConfig optimizer;
};

std::vector<InstanceResult> pspin_study(const PSpinStudy& study);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems);
  std::vector<std::string> problems;
};

struct Assertion {
  std::string metric;
  std::optional<double> min;
  std::optional<double> max;
};

struct ExperimentConfig {
  std::string experiment;  // fig1_sweep | fig2_convergence | fig3_instances | headline_factoring | transpile_report
  nlohmann::json raw;      // normalized config, hashed into the manifest

  std::vector<std::string> builtins;
  std::vector<FactorProblem> factors;
  PSpinStudy pspin;
  std::vector<int> pspin_orders;

  std::vector<Scheme> schemes;
  std::vector<AnsatzSpec> kinds;
  std::vector<double> hx_grid;
  std::optional<double> h_x;  // absent: tuned on hx_grid by single-layer accuracy
  double qaoa_h_x = 1.0;
  std::vector<int> layers;
  double dt = 0.1;
  OptimizerConfig optimizer;
  int seeds = 30;
  std::uint64_t master_seed = 2022;
  std::vector<int> qaoa_layers;
  std::vector<std::string> grids;
  std::vector<int> topology_qubits;
  std::filesystem::path output_dir = "out";
  std::vector<Assertion> assertions;
};

// Throws ConfigError listing every offending field.
ExperimentConfig parse_config(const nlohmann::json& j);

struct RunResult {
  nlohmann::json manifest;
  std::map<std::string, double> metrics;
  std::vector<std::pair<Assertion, bool>> checks;
  bool all_passed() const;
};

// Writes CSV/JSON artifacts and manifest.json into cfg.output_dir.
RunResult run(const ExperimentConfig& cfg);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::map<std::string, Table> tables;
  std::vector<std::string> missing;
};

// Aggregates run directories (each holding a manifest.json).
Report report(const std::vector<std::filesystem::path>& run_dirs);
void write_csv(const std::filesystem::path& path, const Table& t);

}  // namespace dcqo::experiments
