#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "dcqo/transpiler.hpp"

namespace dcqo {
namespace {

using Mat = Eigen::MatrixXcd;

Mat pauli_exp(const std::string& label, double theta) {
  return (std::complex<double>(0, -theta) * to_dense(PauliString::from_label(label))).exp();
}

Mat swap01() {
  Mat s = Mat::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1;
  s(1, 2) = s(2, 1) = 1;
  return s;
}

// |<a, b>| / (|a||b|) per column pair equal to one, with a shared phase.
bool equal_up_to_phase(const Mat& a, const Mat& b, double tol = 1e-10) {
  Eigen::Index r, c;
  a.cwiseAbs().maxCoeff(&r, &c);
  const std::complex<double> phase = b(r, c) / a(r, c);
  return std::abs(std::abs(phase) - 1) < tol && (a * phase - b).norm() < tol;
}

int cz_count(const std::vector<NativeGate>& seq) {
  int n = 0;
  for (const auto& g : seq) n += g.kind == NativeKind::cz;
  return n;
}

IsingHamiltonian random_two_local(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  IsingHamiltonian h(n);
  for (int i = 0; i < n; ++i) {
    h.add_term({i}, g(rng));
    for (int j = i + 1; j < n; ++j) h.add_term({i, j}, g(rng));
  }
  return h;
}

double overlap(const StateVector& a, const StateVector& b) {
  std::complex<double> s = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return std::abs(s);
}

TEST(Native, SingleQubitGates) {
  const double q = std::numbers::pi / 4;
  EXPECT_TRUE(equal_up_to_phase(native_unitary({{NativeKind::x2p, 0}}, 1), pauli_exp("X", q)));
  EXPECT_TRUE(equal_up_to_phase(native_unitary({{NativeKind::x2m, 0}}, 1), pauli_exp("X", -q)));
  EXPECT_TRUE(equal_up_to_phase(native_unitary({{NativeKind::y2p, 0}}, 1), pauli_exp("Y", q)));
  EXPECT_TRUE(equal_up_to_phase(native_unitary({{NativeKind::y2m, 0}}, 1), pauli_exp("Y", -q)));
  EXPECT_TRUE(native_unitary({{NativeKind::rz, 0, -1, 0.8}}, 1).isApprox(pauli_exp("Z", 0.4), 1e-14));
  Mat cz = Mat::Identity(4, 4);
  cz(3, 3) = -1;
  EXPECT_TRUE(native_unitary({{NativeKind::cz, 0, 1}}, 2).isApprox(cz, 1e-14));
}

TEST(Decompose, RyGate) {
  const auto seq = decompose({GateKind::ry, 0, -1, 0.37});
  EXPECT_EQ(cz_count(seq), 0);
  EXPECT_TRUE(equal_up_to_phase(native_unitary(seq, 1), pauli_exp("Y", 0.37)));
}

TEST(Decompose, YzGate) {
  const double ta = 0.31, tb = -0.52;
  const auto seq = decompose({GateKind::yz, 0, 1, ta, tb});
  EXPECT_EQ(cz_count(seq), 2);
  const Mat target = (std::complex<double>(0, -1) * (ta * to_dense(PauliString::from_label("YZ")) +
                                                     tb * to_dense(PauliString::from_label("ZY"))))
                         .exp();
  EXPECT_TRUE(equal_up_to_phase(native_unitary(seq, 2), target));
  // Reversed operands.
  EXPECT_TRUE(equal_up_to_phase(native_unitary(decompose({GateKind::yz, 1, 0, ta, 0}), 2), pauli_exp("ZY", ta)));
}

TEST(Decompose, SwapUsesThreeCz) {
  const auto seq = decompose({GateKind::swap, 0, 1});
  EXPECT_EQ(cz_count(seq), 3);
  EXPECT_TRUE(equal_up_to_phase(native_unitary(seq, 2), swap01()));
}

TEST(Decompose, YzSwapSavesTwoCz) {
  const double t = 0.44;
  const auto seq = decompose({GateKind::yz_swap, 0, 1, t});
  EXPECT_EQ(cz_count(seq), cz_count(decompose({GateKind::yz, 0, 1, t})) + 3 - 2);
  EXPECT_TRUE(equal_up_to_phase(native_unitary(seq, 2), swap01() * pauli_exp("YZ", t)));
  EXPECT_TRUE(equal_up_to_phase(native_unitary(decompose({GateKind::yz_swap, 1, 0, t}), 2), swap01() * pauli_exp("ZY", t)));
}

TEST(Decompose, MoveActsAsSwapOnEmptyTarget) {
  const auto seq = decompose({GateKind::move, 0, 1});
  EXPECT_EQ(cz_count(seq), 2);
  const Mat u = native_unitary(seq, 2), s = swap01();
  // Columns with qubit 1 in |0>: basis indices 0 and 1.
  Mat lhs(4, 2), rhs(4, 2);
  lhs << u.col(0), u.col(1);
  rhs << s.col(0), s.col(1);
  EXPECT_TRUE(equal_up_to_phase(lhs, rhs));
}

TEST(Grid, ParseAndValidate) {
  const auto g = Grid::parse("2x5", 9);
  EXPECT_EQ(g.slots(), 10);
  EXPECT_EQ(g.name(), "2x5");
  EXPECT_TRUE(g.adjacent(0, 5));
  EXPECT_FALSE(g.adjacent(4, 5));
  EXPECT_EQ(g.edges().size(), 13u);
  EXPECT_THROW(Grid::parse("2x4", 9), std::invalid_argument);
  EXPECT_THROW(Grid::parse("25", 9), std::invalid_argument);
  Grid bad = Grid::make(2, 3, 5);
  bad.placement[1] = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(SwapSchedule, CoversAllPairs) {
  for (auto [r, c, q] : std::vector<std::tuple<int, int, int>>{{2, 3, 5}, {2, 3, 6}, {2, 5, 9}, {2, 6, 12}, {3, 3, 9},
                                                               {3, 4, 12}, {4, 4, 16}, {1, 6, 6}}) {
    const auto g = Grid::make(r, c, q);
    const auto s = swap_schedule(g);
    EXPECT_TRUE(covers_all_pairs(g, s)) << g.name() << " q=" << q;
    // Shortest prefix: dropping the last layer loses coverage.
    if (!s.empty()) {
      auto shorter = s;
      shorter.pop_back();
      EXPECT_FALSE(covers_all_pairs(g, shorter)) << g.name();
    }
  }
}

TEST(SwapSchedule, TrivialGridNeedsNoSwaps) {
  const auto g = Grid::make(1, 2, 2);
  EXPECT_TRUE(swap_schedule(g).empty());
  EXPECT_TRUE(covers_all_pairs(g, {}));
  EXPECT_FALSE(covers_all_pairs(Grid::make(1, 3, 3), {}));
  EXPECT_FALSE(covers_all_pairs(Grid::make(2, 3, 6), {{{0, 4}}}));
}

TEST(Compile, StatsIdentity) {
  const auto h5 = builtin("H5q");
  const auto a = build_ansatz(h5, AnsatzSpec::parse("y_yzu"));
  const auto c = compile_single_layer(a, Eigen::VectorXd::Ones(a.n_params), 0.5, Grid::make(2, 3, 5));
  int single = 0, cz_layers = 0, cz_gates = 0;
  for (const auto& layer : c.layers) {
    std::set<int> touched;
    for (const auto& g : layer.gates) {
      EXPECT_TRUE(touched.insert(g.q0).second);
      if (g.kind == NativeKind::cz) {
        EXPECT_EQ(layer.kind, GateLayer::Kind::cz);
        EXPECT_TRUE(c.grid.adjacent(g.q0, g.q1));
        EXPECT_TRUE(touched.insert(g.q1).second);
      } else {
        EXPECT_EQ(layer.kind, GateLayer::Kind::single_q);
      }
    }
    if (layer.kind == GateLayer::Kind::cz) ++cz_layers, cz_gates += static_cast<int>(layer.gates.size());
    else ++single;
  }
  EXPECT_EQ(c.stats.single_q_layer_count, single);
  EXPECT_EQ(c.stats.cz_layer_count, cz_layers);
  EXPECT_EQ(c.stats.cz_gate_count, cz_gates);
  EXPECT_DOUBLE_EQ(c.stats.total_duration_ns, kSingleQubitNs * single + kCzNs * cz_layers);
  const auto j = to_json(c);
  EXPECT_EQ(j.at("stats").at("cz_layer_count"), cz_layers);
}

TEST(Compile, RejectsMismatch) {
  const auto a = build_ansatz(builtin("H5q"), AnsatzSpec::parse("y_yzu"));
  EXPECT_THROW(compile_single_layer(a, Eigen::VectorXd::Ones(a.n_params), 0.5, Grid::make(2, 3, 6)),
               std::invalid_argument);
  EXPECT_THROW(compile_single_layer(a, Eigen::VectorXd::Ones(1), 0.5, Grid::make(2, 3, 5)), std::invalid_argument);
}

TEST(CompileProperty, NativeCircuitMatchesReorderedLayer) {
  struct Case {
    IsingHamiltonian h;
    const char* kind;
    int rows, cols;
  };
  std::vector<Case> cases = {{builtin("H5q"), "y_yzu", 2, 3},        {builtin("H5q"), "y_yz_zy", 2, 3},
                             {random_two_local(6, 1), "y_yz", 2, 3},  {random_two_local(7, 2), "y_yzzy_sym", 2, 4},
                             {random_two_local(8, 3), "y_yz_zy", 2, 4}, {random_two_local(8, 4), "y_yzu_zyu", 3, 3},
                             {random_two_local(4, 5), "y", 2, 2}};
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (const auto& cs : cases) {
    const auto a = build_ansatz(cs.h, AnsatzSpec::parse(cs.kind));
    Eigen::VectorXd theta(a.n_params);
    for (auto& v : theta) v = g(rng);
    const auto c = compile_single_layer(a, theta, 0.6, Grid::make(cs.rows, cs.cols, cs.h.n()));
    const auto native = simulate_native(c);
    const auto reference = single_layer(reorder_terms(a, c.term_order), theta, 0.6);
    EXPECT_NEAR(overlap(native, reference), 1, 1e-10) << cs.kind << " on " << c.grid.name();
  }
}

TEST(Compile, ReorderRejectsUnknownTerms) {
  const auto a = build_ansatz(builtin("H5q"), AnsatzSpec::parse("y"));
  std::vector<PauliString> order;
  for (const auto& t : a.terms) order.push_back(t.string);
  EXPECT_EQ(reorder_terms(a, order).terms.size(), a.terms.size());
  order.back() = PauliString::single(5, 0, 'X');
  EXPECT_THROW(reorder_terms(a, order), std::invalid_argument);
}

TEST(Topology, DefaultShapes) {
  const auto s = default_shapes(9);
  EXPECT_NE(std::find(s.begin(), s.end(), std::pair{2, 5}), s.end());
  EXPECT_NE(std::find(s.begin(), s.end(), std::pair{3, 3}), s.end());
  EXPECT_NE(std::find(s.begin(), s.end(), std::pair{5, 2}), s.end());
}

TEST(Topology, TwoRowGridFastestForEvenQ) {
  for (int q : {6, 8, 10, 12}) {
    const auto rows = topology_report(q, default_shapes(q));
    ASSERT_FALSE(rows.empty());
    const auto& best = rows.front();
    EXPECT_TRUE((best.rows == 2 && best.cols == q / 2) || (best.cols == 2 && best.rows == q / 2))
        << "q=" << q << " best " << best.rows << "x" << best.cols;
    for (std::size_t k = 1; k < rows.size(); ++k)
      EXPECT_LE(rows[k - 1].stats.total_duration_ns, rows[k].stats.total_duration_ns);
  }
}

}  // namespace
}  // namespace dcqo
