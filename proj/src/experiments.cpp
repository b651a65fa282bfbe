#include "dcqo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Core>
#include <oneapi/tbb/parallel_for.h>
#include <oneapi/tbb/version.h>

#include "dcqo/factoring.hpp"

namespace dcqo::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

int parse_int(const std::string& s) {
  std::size_t pos = 0;
  const int v = std::stoi(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

template <class F>
void parallel_indexed(std::size_t n, F&& f) {
  tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) { f(i); });
}

}  // namespace

std::vector<double> parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw std::invalid_argument("range must be lo:hi:step, got " + s);
  const double lo = parse_double(parts[0]), hi = parse_double(parts[1]), step = parse_double(parts[2]);
  if (!(step > 0) || hi < lo) throw std::invalid_argument("range needs step > 0 and hi >= lo: " + s);
  std::vector<double> out;
  const long count = std::lround(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= count; ++k) out.push_back(std::round((lo + k * step) * 1e12) / 1e12);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const int lo = parse_int(s.substr(0, dots)), hi = parse_int(s.substr(dots + 2));
    if (hi < lo) throw std::invalid_argument("empty integer range: " + s);
    for (int v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  for (const auto& part : split(s, ',')) out.push_back(parse_int(part));
  if (out.empty()) throw std::invalid_argument("empty integer list");
  return out;
}

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over the (master, index) pair.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

IsingHamiltonian load_hamiltonian(const std::string& ref) {
  if (ref == "H5q" || ref == "H9q" || ref == "H12q") return builtin(ref);
  if (const auto parts = split(ref, '/'); parts.size() == 3 && !fs::exists(ref)) {
    auto cs = factoring::simplify(factoring::generate_clauses(std::stoull(parts[0]), parse_int(parts[1]),
                                                              parse_int(parts[2])));
    return factoring::to_hamiltonian(cs).hamiltonian;
  }
  std::ifstream in(ref);
  if (!in) throw std::invalid_argument("unknown Hamiltonian (not a builtin, N/np/nq or readable file): " + ref);
  const json j = json::parse(in);
  // Accept either a bare Hamiltonian or the factoring output wrapping one.
  return (j.contains("hamiltonian") ? j.at("hamiltonian") : j).get<IsingHamiltonian>();
}

std::vector<SweepRow> sweep(const IsingHamiltonian& hf, Scheme scheme, AnsatzSpec kind,
                            const std::vector<double>& hx_grid, const std::vector<int>& layers, double dt) {
  std::vector<SweepRow> rows(hx_grid.size() * layers.size());
  const auto ground = brute_force_ground(hf);
  parallel_indexed(rows.size(), [&](std::size_t k) {
    const int p = layers[k / hx_grid.size()];
    const double hx = hx_grid[k % hx_grid.size()];
    EvolutionConfig cfg{scheme, Schedule::with_layers(p, hx, dt), kind, std::nullopt};
    rows[k] = {scheme_name(scheme), p, hx, accuracy(evolve_dcqo(hf, cfg), ground)};
  });
  return rows;
}

Best best_of(const std::vector<SweepRow>& rows, const std::string& scheme, int p) {
  Best b;
  for (const auto& r : rows) {
    if (r.scheme != scheme || r.p != p) continue;
    if (r.accuracy > b.accuracy || (r.accuracy == b.accuracy && r.h_x < b.h_x)) b = {r.h_x, r.accuracy};
  }
  return b;
}

Best tune_hx(const IsingHamiltonian& hf, AnsatzSpec kind, const std::vector<double>& hx_grid, double dt) {
  if (hx_grid.empty()) throw std::invalid_argument("tune_hx: empty grid");
  return best_of(sweep(hf, Scheme::cd_only, kind, hx_grid, {1}, dt), "cd_only", 1);
}

std::vector<OptimizeRun> optimize_runs(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind,
                                       const std::string& init, int seeds, std::uint64_t master_seed,
                                       const OptimizerConfig& cfg) {
  if (init != "warm" && init != "random") throw std::invalid_argument("init must be warm or random: " + init);
  if (init == "random" && seeds < 1) throw std::invalid_argument("random init needs seeds >= 1");
  const auto ground = brute_force_ground(hf);
  const SingleLayerCost cost(hf, s, kind);
  const std::size_t count = init == "warm" ? 1 : static_cast<std::size_t>(seeds);
  std::vector<OptimizeRun> runs(count);
  parallel_indexed(count, [&](std::size_t i) {
    OptimizeRun r;
    r.init = init;
    Eigen::VectorXd theta0;
    if (init == "warm") {
      theta0 = warm_start(hf, s, kind);
    } else {
      r.seed = child_seed(master_seed, i);
      theta0 = random_init(cost.ansatz(), s, r.seed);
    }
    r.trace = adam_optimize(cost, theta0, cfg);
    r.trace.seed = r.seed;
    r.initial_accuracy = accuracy(cost.state(theta0), ground);
    r.final_accuracy = accuracy(cost.state(r.trace.final().theta), ground);
    runs[i] = std::move(r);
  });
  return runs;
}

std::vector<QaoaRun> qaoa_runs(const IsingHamiltonian& hf, double h_x, const std::vector<int>& layers, double dt,
                               const OptimizerConfig& cfg) {
  const auto ground = brute_force_ground(hf);
  std::vector<QaoaRun> runs(layers.size());
  parallel_indexed(layers.size(), [&](std::size_t i) {
    const int p = layers[i];
    const QaoaCost cost(hf, h_x, p);
    QaoaRun r;
    r.p = p;
    r.trace = adam_optimize(cost, pack(qaoa_linear_init(p, (p + 1) * dt)), cfg);
    r.final_accuracy = accuracy(cost.state(r.trace.final().theta), ground);
    runs[i] = std::move(r);
  });
  return runs;
}

std::vector<InstanceResult> pspin_study(const PSpinStudy& study) {
  if (study.kinds.empty()) throw std::invalid_argument("pspin_study: no ansatz kinds");
  if (study.instances < 1) throw std::invalid_argument("pspin_study: need at least one instance");
  const std::size_t nk = study.kinds.size();
  std::vector<IsingHamiltonian> hams(study.instances);
  std::vector<GroundStates> grounds(study.instances);
  parallel_indexed(hams.size(), [&](std::size_t i) {
    hams[i] = random_pspin(study.n, study.p, child_seed(study.master_seed, i), study.normalization);
    grounds[i] = brute_force_ground(hams[i]);
  });

  std::vector<std::pair<double, double>> cells(hams.size() * nk);  // (h_x, accuracy)
  parallel_indexed(cells.size(), [&](std::size_t k) {
    const auto& h = hams[k / nk];
    const auto kind = study.kinds[k % nk];
    const double hx = study.h_x ? *study.h_x : tune_hx(h, kind, study.hx_grid, study.dt).h_x;
    const auto s = Schedule::with_layers(1, hx, study.dt);
    const SingleLayerCost cost(h, s, kind);
    const auto trace = adam_optimize(cost, warm_start(h, s, kind), study.optimizer);
    cells[k] = {hx, accuracy(cost.state(trace.final().theta), grounds[k / nk])};
  });

  std::vector<InstanceResult> out(hams.size());
  for (std::size_t i = 0; i < hams.size(); ++i) {
    auto& r = out[i];
    r.instance = static_cast<int>(i);
    r.seed = child_seed(study.master_seed, i);
    r.solved_by_all = true;
    for (std::size_t k = 0; k < nk; ++k) {
      const auto name = study.kinds[k].name();
      const auto [hx, acc] = cells[i * nk + k];
      r.h_x[name] = hx;
      r.accuracy[name] = acc;
      const bool solved = acc >= kSolvedAccuracy;
      r.solved_by_any = r.solved_by_any || solved;
      r.solved_by_all = r.solved_by_all && solved;
    }
  }
  return out;
}

// ---------------------------------------------------------------- config

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

const std::set<std::string> kExperiments = {"fig1_sweep", "fig2_convergence", "fig3_instances",
                                             "headline_factoring", "transpile_report"};

class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void fail(const std::string& path, const std::string& msg) { problems_.push_back(path + ": " + msg); }

  const json* object(const json& parent, const std::string& key, const std::string& path,
                     const std::set<std::string>& allowed) {
    if (!parent.contains(key)) return nullptr;
    const json& o = parent.at(key);
    const std::string p = path.empty() ? key : path + "." + key;
    if (!o.is_object()) {
      fail(p, "expected an object");
      return nullptr;
    }
    for (const auto& [k, v] : o.items())
      if (!allowed.count(k)) fail(p + "." + k, "unknown field");
    return &o;
  }

  template <class T>
  void number(const json* o, const std::string& key, const std::string& path, T& out) {
    if (!o || !o->contains(key)) return;
    const json& v = o->at(key);
    if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) return fail(path + "." + key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned() || v.get<long long>() >= 0) {
          out = v.get<T>();
          return;
        }
        return fail(path + "." + key, "expected a non-negative integer");
      }
      out = v.get<T>();
    } else {
      if (!v.is_number()) return fail(path + "." + key, "expected a number");
      out = v.get<T>();
    }
  }

  void ints(const json* o, const std::string& key, const std::string& path, std::vector<int>& out) {
    if (!o || !o->contains(key)) return;
    const json& v = o->at(key);
    try {
      if (v.is_string()) {
        out = parse_int_list(v.get<std::string>());
      } else if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& e) {
                   return e.is_number_integer();
                 })) {
        out = v.get<std::vector<int>>();
      } else {
        fail(path + "." + key, "expected a non-empty integer array or \"a..b\" / \"a,b,c\" string");
      }
    } catch (const std::exception& e) {
      fail(path + "." + key, e.what());
    }
  }

  void strings(const json* o, const std::string& key, const std::string& path, std::vector<std::string>& out) {
    if (!o || !o->contains(key)) return;
    const json& v = o->at(key);
    if (v.is_string()) {
      out = {v.get<std::string>()};
    } else if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_string(); })) {
      out = v.get<std::vector<std::string>>();
    } else {
      fail(path + "." + key, "expected a string or array of strings");
    }
  }

 private:
  std::vector<std::string>& problems_;
};

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& p)
    : std::runtime_error("invalid config:\n  " + join(p, "\n  ")), problems(p) {}

ExperimentConfig parse_config(const json& j) {
  std::vector<std::string> problems;
  Reader r(problems);
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError({"<root>: expected an object"});
  c.raw = j;

  const std::set<std::string> top = {"experiment", "problem", "schedule", "ansatz",
                                     "optimizer", "transpile", "output", "assertions"};
  for (const auto& [k, v] : j.items())
    if (!top.count(k)) r.fail(k, "unknown field");

  if (!j.contains("experiment") || !j.at("experiment").is_string()) {
    r.fail("experiment", "required string");
  } else {
    c.experiment = j.at("experiment").get<std::string>();
    if (!kExperiments.count(c.experiment)) r.fail("experiment", "unknown experiment id '" + c.experiment + "'");
  }

  // problem
  const json* prob = r.object(j, "problem", "", {"builtin", "factor", "pspin"});
  r.strings(prob, "builtin", "problem", c.builtins);
  for (const auto& b : c.builtins)
    if (b != "H5q" && b != "H9q" && b != "H12q") r.fail("problem.builtin", "unknown builtin '" + b + "'");
  if (prob && prob->contains("factor")) {
    const json& f = prob->at("factor");
    const json arr = f.is_array() ? f : json::array({f});
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "problem.factor[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) {
        r.fail(p, "expected an object {n, np, nq}");
        continue;
      }
      for (const auto& [k, v] : arr[i].items())
        if (k != "n" && k != "np" && k != "nq") r.fail(p + "." + k, "unknown field");
      FactorProblem fp;
      r.number(&arr[i], "n", p, fp.n);
      r.number(&arr[i], "np", p, fp.n_p);
      r.number(&arr[i], "nq", p, fp.n_q);
      if (fp.n < 4 || fp.n_p < 2 || fp.n_q < 2) r.fail(p, "needs n >= 4, np >= 2, nq >= 2");
      c.factors.push_back(fp);
    }
  }
  const json* ps =
      prob ? r.object(*prob, "pspin", "problem", {"n", "orders", "instances", "master_seed", "normalization"}) : nullptr;
  if (ps) {
    r.number(ps, "n", "problem.pspin", c.pspin.n);
    r.ints(ps, "orders", "problem.pspin", c.pspin_orders);
    r.number(ps, "instances", "problem.pspin", c.pspin.instances);
    r.number(ps, "master_seed", "problem.pspin", c.pspin.master_seed);
    if (ps->contains("normalization")) {
      const auto& v = ps->at("normalization");
      if (v == "unit_variance") c.pspin.normalization = Normalization::unit_variance;
      else if (v == "size_scaled") c.pspin.normalization = Normalization::size_scaled;
      else r.fail("problem.pspin.normalization", "expected unit_variance or size_scaled");
    }
    if (c.pspin_orders.empty()) c.pspin_orders = {2, 3, 4};
    if (c.pspin.n < 1 || c.pspin.n > StateVector::kMaxQubits) r.fail("problem.pspin.n", "out of range");
    if (c.pspin.instances < 1) r.fail("problem.pspin.instances", "must be positive");
    for (int p : c.pspin_orders)
      if (p < 1 || p > IsingHamiltonian::kMaxOrder || p > c.pspin.n)
        r.fail("problem.pspin.orders", "order " + std::to_string(p) + " out of range");
  }

  // schedule
  const json* sch = r.object(j, "schedule", "", {"dt", "h_x", "hx_grid", "layers", "qaoa_h_x"});
  r.number(sch, "dt", "schedule", c.dt);
  if (!(c.dt > 0)) r.fail("schedule.dt", "must be positive");
  if (sch && sch->contains("h_x")) {
    double hx = 0;
    r.number(sch, "h_x", "schedule", hx);
    c.h_x = hx;
  }
  r.number(sch, "qaoa_h_x", "schedule", c.qaoa_h_x);
  c.hx_grid = parse_range("0.2:3.0:0.05");
  if (sch && sch->contains("hx_grid")) {
    const json& g = sch->at("hx_grid");
    try {
      if (g.is_string()) c.hx_grid = parse_range(g.get<std::string>());
      else if (g.is_array() && !g.empty() && std::all_of(g.begin(), g.end(), [](const json& e) { return e.is_number(); }))
        c.hx_grid = g.get<std::vector<double>>();
      else r.fail("schedule.hx_grid", "expected \"lo:hi:step\" or a non-empty number array");
    } catch (const std::exception& e) {
      r.fail("schedule.hx_grid", e.what());
    }
  }
  c.layers = {1};
  r.ints(sch, "layers", "schedule", c.layers);
  for (int p : c.layers)
    if (p < 1) r.fail("schedule.layers", "layer counts must be >= 1");

  // ansatz
  const json* ans = r.object(j, "ansatz", "", {"kinds", "schemes"});
  std::vector<std::string> kinds, schemes;
  r.strings(ans, "kinds", "ansatz", kinds);
  r.strings(ans, "schemes", "ansatz", schemes);
  if (kinds.empty()) {
    kinds = c.experiment == "fig3_instances" ? std::vector<std::string>{"y_yzzy_sym", "y_yz_zy", "y_yz"}
                                             : std::vector<std::string>{"y_yzu"};
  }
  for (const auto& k : kinds) {
    try {
      c.kinds.push_back(AnsatzSpec::parse(k));
    } catch (const std::exception&) {
      r.fail("ansatz.kinds", "unknown ansatz kind '" + k + "'");
    }
  }
  if (schemes.empty()) schemes = {"cd_only"};
  for (const auto& s : schemes) {
    try {
      c.schemes.push_back(parse_scheme(s));
    } catch (const std::exception&) {
      r.fail("ansatz.schemes", "unknown scheme '" + s + "'");
    }
  }

  // optimizer
  const json* opt = r.object(j, "optimizer", "",
                             {"step_size", "beta1", "beta2", "epsilon", "max_iters", "tolerance", "window", "fd_eps",
                              "seeds", "master_seed", "qaoa_layers"});
  auto& o = c.optimizer;
  r.number(opt, "step_size", "optimizer", o.step_size);
  r.number(opt, "beta1", "optimizer", o.beta1);
  r.number(opt, "beta2", "optimizer", o.beta2);
  r.number(opt, "epsilon", "optimizer", o.epsilon);
  r.number(opt, "max_iters", "optimizer", o.max_iters);
  r.number(opt, "tolerance", "optimizer", o.tolerance);
  r.number(opt, "window", "optimizer", o.window);
  r.number(opt, "fd_eps", "optimizer", o.fd_eps);
  r.number(opt, "seeds", "optimizer", c.seeds);
  r.number(opt, "master_seed", "optimizer", c.master_seed);
  r.ints(opt, "qaoa_layers", "optimizer", c.qaoa_layers);
  try {
    o.validate();
  } catch (const std::exception& e) {
    r.fail("optimizer", e.what());
  }
  if (c.seeds < 0) r.fail("optimizer.seeds", "must be non-negative");

  // transpile
  const json* tr = r.object(j, "transpile", "", {"grids", "topology_qubits"});
  r.strings(tr, "grids", "transpile", c.grids);
  r.ints(tr, "topology_qubits", "transpile", c.topology_qubits);
  for (const auto& g : c.grids) {
    const auto parts = split(g, 'x');
    if (parts.size() != 2) r.fail("transpile.grids", "expected RxC, got '" + g + "'");
  }

  // output
  if (const json* out = r.object(j, "output", "", {"dir"})) {
    if (out->contains("dir") && out->at("dir").is_string()) c.output_dir = out->at("dir").get<std::string>();
    else r.fail("output.dir", "required string");
  }

  if (j.contains("assertions")) {
    const json& a = j.at("assertions");
    if (!a.is_array()) r.fail("assertions", "expected an array");
    else
      for (std::size_t i = 0; i < a.size(); ++i) {
        const std::string p = "assertions[" + std::to_string(i) + "]";
        if (!a[i].is_object() || !a[i].contains("metric") || !a[i].at("metric").is_string()) {
          r.fail(p, "expected {metric, min?, max?}");
          continue;
        }
        for (const auto& [k, v] : a[i].items())
          if (k != "metric" && k != "min" && k != "max") r.fail(p + "." + k, "unknown field");
        Assertion as;
        as.metric = a[i].at("metric").get<std::string>();
        for (const char* key : {"min", "max"}) {
          if (!a[i].contains(key)) continue;
          if (!a[i].at(key).is_number()) r.fail(p + "." + key, "expected a number");
          else (std::string(key) == "min" ? as.min : as.max) = a[i].at(key).get<double>();
        }
        if (!as.min && !as.max) r.fail(p, "needs min or max");
        c.assertions.push_back(as);
      }
  }

  // Per-experiment requirements.
  const bool has_problem = !c.builtins.empty() || !c.factors.empty();
  if ((c.experiment == "fig1_sweep" || c.experiment == "fig2_convergence") && !has_problem)
    r.fail("problem", c.experiment + " needs problem.builtin or problem.factor");
  if (c.experiment == "fig3_instances" && !(prob && prob->contains("pspin")))
    r.fail("problem.pspin", "fig3_instances needs a pspin block");
  if (c.experiment == "headline_factoring" && c.factors.empty())
    r.fail("problem.factor", "headline_factoring needs at least one factoring problem");
  if (c.experiment == "transpile_report" && !has_problem && c.topology_qubits.empty())
    r.fail("problem", "transpile_report needs a problem or transpile.topology_qubits");
  if (c.experiment == "transpile_report")
    for (const auto& k : c.kinds)
      if (!k.two_local()) r.fail("ansatz.kinds", "transpile_report needs two-local kinds");

  if (!problems.empty()) throw ConfigError(problems);

  c.pspin.kinds = c.kinds;
  c.pspin.h_x = c.h_x;
  c.pspin.hx_grid = c.hx_grid;
  c.pspin.dt = c.dt;
  c.pspin.optimizer = c.optimizer;
  return c;
}

// ---------------------------------------------------------------- run

void write_csv(const fs::path& path, const Table& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << join(t.header, ",") << "\n";
  for (const auto& row : t.rows) out << join(row, ",") << "\n";
}

namespace {

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  Table t;
  std::string line;
  if (std::getline(in, line)) t.header = split(line, ',');
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line, ','));
  return t;
}

struct Problem {
  std::string name;
  IsingHamiltonian h;
};

std::vector<Problem> problems_of(const ExperimentConfig& c) {
  std::vector<Problem> out;
  for (const auto& b : c.builtins) out.push_back({b, builtin(b)});
  for (const auto& f : c.factors) {
    auto cs = factoring::simplify(factoring::generate_clauses(f.n, f.n_p, f.n_q));
    out.push_back({std::to_string(f.n), factoring::to_hamiltonian(cs).hamiltonian});
  }
  return out;
}

std::string str(int v) { return std::to_string(v); }
std::string str(std::uint64_t v) { return std::to_string(v); }

class Runner {
 public:
  explicit Runner(const ExperimentConfig& c) : c_(c) { fs::create_directories(c.output_dir); }

  void emit(const std::string& file, const Table& t) {
    write_csv(c_.output_dir / file, t);
    artifacts_.push_back(file);
  }
  void emit_json(const std::string& file, const json& j) {
    std::ofstream(c_.output_dir / file) << j.dump(2) << "\n";
    artifacts_.push_back(file);
  }
  void metric(const std::string& name, double v) { metrics_[name] = v; }
  void seed(std::uint64_t s) { seeds_.push_back(s); }

  void fig1_sweep();
  void fig2_convergence();
  void fig3_instances();
  void headline_factoring();
  void transpile_report();

  RunResult finish();

 private:
  double hx_for(const IsingHamiltonian& h, AnsatzSpec kind) const {
    return c_.h_x ? *c_.h_x : tune_hx(h, kind, c_.hx_grid, c_.dt).h_x;
  }

  const ExperimentConfig& c_;
  std::vector<std::string> artifacts_;
  std::map<std::string, double> metrics_;
  std::vector<std::uint64_t> seeds_;
};

void Runner::fig1_sweep() {
  Table t{{"hamiltonian", "kind", "scheme", "p", "h_x", "accuracy"}, {}};
  for (const auto& prob : problems_of(c_))
    for (const auto& kind : c_.kinds)
      for (const auto scheme : c_.schemes) {
        const auto rows = sweep(prob.h, scheme, kind, c_.hx_grid, c_.layers, c_.dt);
        for (const auto& row : rows)
          t.rows.push_back({prob.name, kind.name(), row.scheme, str(row.p), fmt17(row.h_x), fmt17(row.accuracy)});
        for (int p : c_.layers) {
          const auto b = best_of(rows, scheme_name(scheme), p);
          const auto key = prob.name + "." + kind.name() + "." + scheme_name(scheme) + ".p" + str(p);
          metric(key + ".best_accuracy", b.accuracy);
          metric(key + ".best_h_x", b.h_x);
        }
      }
  emit("sweep.csv", t);
}

void Runner::fig2_convergence() {
  Table traces{{"hamiltonian", "kind", "init", "seed", "iteration", "cost"}, {}};
  Table runs{{"hamiltonian", "kind", "h_x", "init", "seed", "iterations", "converged", "initial_cost", "final_cost",
              "initial_accuracy", "final_accuracy"},
             {}};
  for (int i = 0; i < c_.seeds; ++i) seed(child_seed(c_.master_seed, i));
  for (const auto& prob : problems_of(c_)) {
    for (const auto& kind : c_.kinds) {
      const double hx = hx_for(prob.h, kind);
      const auto s = Schedule::with_layers(1, hx, c_.dt);
      auto all = optimize_runs(prob.h, s, kind, "warm", 1, c_.master_seed, c_.optimizer);
      const auto random = c_.seeds > 0
                              ? optimize_runs(prob.h, s, kind, "random", c_.seeds, c_.master_seed, c_.optimizer)
                              : std::vector<OptimizeRun>{};
      all.insert(all.end(), random.begin(), random.end());
      for (const auto& r : all) {
        const auto& st = r.trace.steps;
        for (std::size_t it = 0; it < st.size(); ++it)
          traces.rows.push_back({prob.name, kind.name(), r.init, str(r.seed), str(static_cast<int>(it)), fmt17(st[it].cost)});
        runs.rows.push_back({prob.name, kind.name(), fmt17(hx), r.init, str(r.seed),
                             str(static_cast<int>(st.size()) - 1), r.trace.converged ? "1" : "0",
                             fmt17(st.front().cost), fmt17(st.back().cost), fmt17(r.initial_accuracy),
                             fmt17(r.final_accuracy)});
      }
      const auto key = prob.name + "." + kind.name();
      const auto& warm = all.front();
      metric(key + ".h_x", hx);
      metric(key + ".warm.initial_cost", warm.trace.steps.front().cost);
      metric(key + ".warm.final_cost", warm.trace.final().cost);
      metric(key + ".warm.initial_accuracy", warm.initial_accuracy);
      metric(key + ".warm.final_accuracy", warm.final_accuracy);
      metric(key + ".warm.iterations", static_cast<double>(warm.trace.steps.size() - 1));
      if (!random.empty()) {
        double init_cost = 0;
        int solved = 0;
        for (const auto& r : random) {
          init_cost += r.trace.steps.front().cost;
          solved += r.final_accuracy >= kSolvedAccuracy;
        }
        metric(key + ".random.mean_initial_cost", init_cost / random.size());
        metric(key + ".random.solved", solved);
        metric(key + ".random.success_fraction", static_cast<double>(solved) / random.size());
      }
    }
    if (!c_.qaoa_layers.empty()) {
      Table q{{"hamiltonian", "p", "iterations", "initial_cost", "final_cost", "final_accuracy"}, {}};
      const auto qr = qaoa_runs(prob.h, c_.qaoa_h_x, c_.qaoa_layers, c_.dt, c_.optimizer);
      double min_cost = INFINITY;
      for (const auto& r : qr) {
        const auto& st = r.trace.steps;
        q.rows.push_back({prob.name, str(r.p), str(static_cast<int>(st.size()) - 1), fmt17(st.front().cost),
                          fmt17(st.back().cost), fmt17(r.final_accuracy)});
        for (std::size_t it = 0; it < st.size(); ++it)
          traces.rows.push_back({prob.name, "qaoa_p" + str(r.p), "linear", "0", str(static_cast<int>(it)),
                                 fmt17(st[it].cost)});
        metric(prob.name + ".qaoa.p" + str(r.p) + ".final_cost", st.back().cost);
        min_cost = std::min(min_cost, st.back().cost);
      }
      metric(prob.name + ".qaoa.min_final_cost", min_cost);
      emit("qaoa_" + prob.name + ".csv", q);
    }
  }
  emit("traces.csv", traces);
  emit("runs.csv", runs);
}

void Runner::fig3_instances() {
  Table inst{{"p", "instance", "seed", "kind", "h_x", "accuracy", "solved"}, {}};
  Table summary{{"p", "kind", "solved", "instances", "success_fraction"}, {}};
  for (int i = 0; i < c_.pspin.instances; ++i) seed(child_seed(c_.pspin.master_seed, i));
  for (int p : c_.pspin_orders) {
    PSpinStudy study = c_.pspin;
    study.p = p;
    const auto results = pspin_study(study);
    std::map<std::string, int> solved;
    int any = 0, all = 0;
    for (const auto& r : results) {
      for (const auto& [kind, acc] : r.accuracy) {
        const bool ok = acc >= kSolvedAccuracy;
        solved[kind] += ok;
        inst.rows.push_back({str(p), str(r.instance), str(r.seed), kind, fmt17(r.h_x.at(kind)), fmt17(acc),
                             ok ? "1" : "0"});
      }
      any += r.solved_by_any;
      all += r.solved_by_all;
    }
    const double n = static_cast<double>(results.size());
    for (const auto& k : c_.kinds) {
      const int s = solved[k.name()];
      summary.rows.push_back({str(p), k.name(), str(s), str(static_cast<int>(n)), fmt17(s / n)});
      metric("p" + str(p) + "." + k.name() + ".solved", s);
    }
    summary.rows.push_back({str(p), "any", str(any), str(static_cast<int>(n)), fmt17(any / n)});
    summary.rows.push_back({str(p), "all", str(all), str(static_cast<int>(n)), fmt17(all / n)});
    metric("p" + str(p) + ".solved_by_any", any);
    metric("p" + str(p) + ".solved_by_all", all);
  }
  emit("instances.csv", inst);
  emit("fig3_summary.csv", summary);
}

void Runner::headline_factoring() {
  Table t{{"n", "np", "nq", "free_variables", "clauses", "ground_energy", "ground_states", "decoded_p", "decoded_q",
           "decode_ok"},
          {}};
  Table acc{{"n", "kind", "h_x", "accuracy"}, {}};
  for (const auto& f : c_.factors) {
    const auto cs = factoring::simplify(factoring::generate_clauses(f.n, f.n_p, f.n_q));
    const auto compiled = factoring::to_hamiltonian(cs);
    const auto g = brute_force_ground(compiled.hamiltonian);
    bool ok = !g.configs.empty();
    factoring::Factors first{0, 0};
    for (std::size_t i = 0; i < g.configs.size(); ++i) {
      const auto fac = factoring::decode(g.configs[i], cs, compiled.var_order);
      if (i == 0) first = fac;
      ok = ok && fac.p * fac.q == f.n;
    }
    std::size_t live = 0;
    for (const auto& cl : cs.clauses) live += !cl.trivially_true();
    const std::string name = str(f.n);
    t.rows.push_back({name, str(f.n_p), str(f.n_q), str(compiled.hamiltonian.n()), str(static_cast<int>(live)),
                      fmt17(g.e_min), str(static_cast<int>(g.configs.size())), str(first.p), str(first.q),
                      ok ? "1" : "0"});
    metric(name + ".free_variables", compiled.hamiltonian.n());
    metric(name + ".clauses", static_cast<double>(live));
    metric(name + ".ground_energy", g.e_min);
    metric(name + ".decode_ok", ok);
    emit_json("factoring_" + name + ".json", factoring::to_json(cs, compiled));
    for (const auto& kind : c_.kinds) {
      const auto b = tune_hx(compiled.hamiltonian, kind, c_.hx_grid, c_.dt);
      acc.rows.push_back({name, kind.name(), fmt17(b.h_x), fmt17(b.accuracy)});
      metric(name + "." + kind.name() + ".single_layer_accuracy", b.accuracy);
      metric(name + "." + kind.name() + ".single_layer_h_x", b.h_x);
    }
  }
  emit("headline.csv", t);
  if (!c_.kinds.empty()) emit("single_layer.csv", acc);
}

void Runner::transpile_report() {
  const std::vector<std::string> stat_cols = {"swap_gates", "swap_layers", "yz_layers", "yz_swap_layers",
                                              "single_q_layers", "cz_layers", "cz_gates", "duration_ns"};
  auto stat_row = [](const CircuitStats& s) {
    return std::vector<std::string>{str(s.swap_gate_count),      str(s.swap_layer_count), str(s.yz_layer_count),
                                    str(s.yz_swap_layer_count),  str(s.single_q_layer_count),
                                    str(s.cz_layer_count),       str(s.cz_gate_count), fmt17(s.total_duration_ns)};
  };
  Table t{{"hamiltonian", "kind", "grid", "q"}, {}};
  t.header.insert(t.header.end(), stat_cols.begin(), stat_cols.end());
  for (const auto& prob : problems_of(c_)) {
    const int q = prob.h.n();
    std::vector<std::string> grids = c_.grids;
    if (grids.empty())
      for (const auto& [rows, cols] : default_shapes(q)) grids.push_back(str(rows) + "x" + str(cols));
    for (const auto& kind : c_.kinds) {
      const double hx = c_.h_x.value_or(1.0);
      const auto s = Schedule::with_layers(1, hx, c_.dt);
      const auto sol = solve_cd(prob.h, hx, lambda_of_t(s.tau / 2, s.tau), kind);
      double best = INFINITY;
      for (const auto& gname : grids) {
        const auto cc = compile_single_layer(sol.ansatz, sol.theta, single_layer_dlambda(s), Grid::parse(gname, q));
        auto row = std::vector<std::string>{prob.name, kind.name(), gname, str(q)};
        const auto st = stat_row(cc.stats);
        row.insert(row.end(), st.begin(), st.end());
        t.rows.push_back(row);
        metric(prob.name + "." + kind.name() + "." + gname + ".duration_ns", cc.stats.total_duration_ns);
        best = std::min(best, cc.stats.total_duration_ns);
      }
      metric(prob.name + "." + kind.name() + ".best_duration_ns", best);
    }
  }
  if (!t.rows.empty()) emit("transpile.csv", t);

  if (!c_.topology_qubits.empty()) {
    Table topo{{"q", "rows", "cols"}, {}};
    topo.header.insert(topo.header.end(), stat_cols.begin(), stat_cols.end());
    std::vector<std::vector<TopologyRow>> per_q(c_.topology_qubits.size());
    parallel_indexed(per_q.size(), [&](std::size_t i) {
      const int q = c_.topology_qubits[i];
      per_q[i] = topology_report(q, default_shapes(q));
    });
    for (const auto& rows : per_q)
      for (const auto& r : rows) {
        auto row = std::vector<std::string>{str(r.q), str(r.rows), str(r.cols)};
        const auto st = stat_row(r.stats);
        row.insert(row.end(), st.begin(), st.end());
        topo.rows.push_back(row);
        metric("topology.q" + str(r.q) + "." + str(r.rows) + "x" + str(r.cols) + ".duration_ns",
               r.stats.total_duration_ns);
      }
    emit("topology.csv", topo);
  }
}

json versions() {
  return {{"dcqo", kVersion},
          {"compiler", __VERSION__},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"tbb", TBB_VERSION_STRING},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

RunResult Runner::finish() {
  RunResult res;
  res.metrics = metrics_;
  json checks = json::array();
  for (const auto& a : c_.assertions) {
    const auto it = metrics_.find(a.metric);
    bool ok = it != metrics_.end();
    if (ok && a.min) ok = it->second >= *a.min;
    if (ok && a.max) ok = it->second <= *a.max;
    res.checks.emplace_back(a, ok);
    json cj = {{"metric", a.metric}, {"passed", ok}};
    if (a.min) cj["min"] = *a.min;
    if (a.max) cj["max"] = *a.max;
    cj["value"] = it != metrics_.end() ? json(it->second) : json(nullptr);
    checks.push_back(cj);
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(c_.raw.dump())));
  res.manifest = {{"experiment", c_.experiment},
                  {"config", c_.raw},
                  {"config_hash", hash},
                  {"seeds", {{"master_seed", c_.experiment == "fig3_instances" ? c_.pspin.master_seed : c_.master_seed},
                             {"child_seeds", seeds_}}},
                  {"versions", versions()},
                  {"artifacts", artifacts_},
                  {"metrics", metrics_},
                  {"assertions", checks},
                  {"passed", res.all_passed()}};
  std::ofstream(c_.output_dir / "manifest.json") << res.manifest.dump(2) << "\n";
  return res;
}

}  // namespace

bool RunResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

RunResult run(const ExperimentConfig& cfg) {
  Runner r(cfg);
  if (cfg.experiment == "fig1_sweep") r.fig1_sweep();
  else if (cfg.experiment == "fig2_convergence") r.fig2_convergence();
  else if (cfg.experiment == "fig3_instances") r.fig3_instances();
  else if (cfg.experiment == "headline_factoring") r.headline_factoring();
  else if (cfg.experiment == "transpile_report") r.transpile_report();
  else throw ConfigError({"experiment: unknown experiment id '" + cfg.experiment + "'"});
  return r.finish();
}

Report report(const std::vector<fs::path>& run_dirs) {
  Report rep;
  rep.tables["metrics"] = {{"run", "experiment", "metric", "value"}, {}};
  for (const auto& dir : run_dirs) {
    const auto mpath = dir / "manifest.json";
    std::ifstream in(mpath);
    if (!in) {
      rep.missing.push_back(dir.string());
      continue;
    }
    const json m = json::parse(in);
    const std::string run = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    const std::string exp = m.value("experiment", "");
    for (const auto& [k, v] : m.at("metrics").items())
      rep.tables["metrics"].rows.push_back({run, exp, k, fmt17(v.get<double>())});
    for (const auto& a : m.at("artifacts")) {
      const std::string file = a.get<std::string>();
      if (fs::path(file).extension() != ".csv") continue;
      if (!fs::exists(dir / file)) {
        rep.missing.push_back((dir / file).string());
        continue;
      }
      const Table t = read_csv(dir / file);
      const std::string name = fs::path(file).stem().string();
      auto& agg = rep.tables[name];
      if (agg.header.empty()) {
        agg.header = {"run"};
        agg.header.insert(agg.header.end(), t.header.begin(), t.header.end());
      }
      for (const auto& row : t.rows) {
        std::vector<std::string> r = {run};
        r.insert(r.end(), row.begin(), row.end());
        agg.rows.push_back(std::move(r));
      }
    }
  }
  return rep;
}

}  // namespace dcqo::experiments
