#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "dcqo/counterdiabatic.hpp"

namespace dcqo {
namespace {

using std::numbers::pi;
using Mat = Eigen::MatrixXcd;

const std::vector<const char*> kTwoLocalKinds = {"y", "y_yzu", "y_yzu_zyu", "y_yz", "y_yz_zy", "y_yzzy_sym"};

IsingHamiltonian random_local(int n, int max_order, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::bernoulli_distribution keep(0.6);
  IsingHamiltonian h(n);
  for (int i = 0; i < n; ++i) h.add_term({i}, g(rng));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (keep(rng)) h.add_term({i, j}, g(rng));
      for (int k = j + 1; k < n && max_order >= 3; ++k) {
        if (keep(rng) && keep(rng)) h.add_term({i, j, k}, g(rng));
        for (int l = k + 1; l < n && max_order >= 4; ++l)
          if (keep(rng) && keep(rng) && keep(rng)) h.add_term({i, j, k, l}, g(rng));
      }
    }
  return h;
}

IsingHamiltonian single_spin(double j) {
  IsingHamiltonian h(1);
  h.add_term({0}, j);
  return h;
}

// Exact gauge potential from the spectral decomposition,
// A = i sum_{m != n} |m><m| dH |n><n| / (E_n - E_m).
Mat exact_gauge(const Mat& h, const Mat& dh) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const Mat& v = eig.eigenvectors();
  const Mat d = v.adjoint() * dh * v;
  Mat a = Mat::Zero(h.rows(), h.cols());
  for (int m = 0; m < h.rows(); ++m)
    for (int n = 0; n < h.rows(); ++n)
      if (m != n) a(m, n) = cplx(0, 1) * d(m, n) / (eig.eigenvalues()[n] - eig.eigenvalues()[m]);
  return v * a * v.adjoint();
}

double direct_action(const PauliSum& h, const PauliSum& dh, const CDAnsatz& a, const Eigen::VectorXd& theta) {
  const PauliSum g = dh + cplx(0, 1) * commutator(a.operator_for(theta), h);
  return trace_inner(g, g).real();
}

double coupling(const IsingHamiltonian& h, Sites s) {
  std::sort(s.begin(), s.end());
  for (std::size_t k = 1; k < s.size(); ++k)
    if (s[k] == s[k - 1]) return 0;
  return h.coefficient(s);
}

TEST(Schedule, LambdaValues) {
  const double tau = 0.7;
  EXPECT_NEAR(lambda_of_t(tau / 2, tau), 0.5, 1e-15);
  EXPECT_EQ(lambda_of_t(0, tau), 0);
  EXPECT_NEAR(lambda_of_t(tau, tau), 1, 1e-15);
  EXPECT_NEAR(lambda_dot(0, tau), 0, 1e-15);
  EXPECT_NEAR(lambda_dot(tau, tau), 0, 1e-12);
  EXPECT_NEAR(lambda_dot(tau / 2, tau), pi * pi / (4 * tau), 1e-12);
  for (double t : {0.1, 0.25, 0.4, 0.6}) {
    const double h = 1e-6;
    const double fd = (lambda_of_t(t + h, tau) - lambda_of_t(t - h, tau)) / (2 * h);
    EXPECT_NEAR(lambda_dot(t, tau), fd, 1e-7);
  }
  EXPECT_THROW(lambda_of_t(-0.1, tau), std::invalid_argument);
  EXPECT_THROW(lambda_of_t(tau + 0.1, tau), std::invalid_argument);
}

TEST(Schedule, LayerConvention) {
  const auto s = Schedule::with_layers(1, 1.5);
  EXPECT_EQ(s.n_steps, 2);
  EXPECT_NEAR(s.tau, 0.2, 1e-15);
  EXPECT_NEAR(s.t(1), 0.1, 1e-15);
  Schedule bad;
  bad.n_steps = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = Schedule{};
  bad.h_x = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Hamiltonian, Interpolation) {
  const auto h5 = builtin("H5q");
  const auto h0 = interpolated_hamiltonian(h5, 1.3, 0);
  EXPECT_EQ(h0.size(), 5u);
  EXPECT_EQ(h0.coefficient(PauliString::single(5, 2, 'X')), cplx(-1.3));
  const auto h1 = interpolated_hamiltonian(h5, 1.3, 1);
  EXPECT_TRUE(to_dense(h1).isApprox(to_dense(to_pauli_sum(h5)), 1e-14));
  // One spin at lambda = 1/2 against the hand-built 2x2 matrix.
  Mat expect(2, 2);
  expect << 0.5 * 0.8, 0.5 * -1.3, 0.5 * -1.3, -0.5 * 0.8;
  EXPECT_TRUE(to_dense(interpolated_hamiltonian(single_spin(0.8), 1.3, 0.5)).isApprox(expect, 1e-14));
  EXPECT_TRUE(to_dense(lambda_derivative(h5, 1.3))
                  .isApprox(to_dense(interpolated_hamiltonian(h5, 1.3, 1)) - to_dense(interpolated_hamiltonian(h5, 1.3, 0)),
                            1e-12));
}

TEST(Ansatz, TermCounts) {
  const auto h9 = builtin("H9q");
  const auto y = build_ansatz(h9, AnsatzSpec::parse("y"));
  EXPECT_EQ(y.n_params, 9);
  EXPECT_EQ(y.terms.size(), 9u);
  const auto yu = build_ansatz(h9, AnsatzSpec::parse("y_yzu"));
  EXPECT_EQ(yu.n_params, 10);
  std::size_t pairs = 0;
  for (const auto& [s, j] : h9.terms()) pairs += s.size() == 2 && j != 0;
  EXPECT_EQ(yu.terms.size(), 9 + pairs);
  const auto yz = build_ansatz(h9, AnsatzSpec::parse("y_yz"));
  EXPECT_EQ(yz.n_params, static_cast<int>(9 + pairs));
  const auto yzzy = build_ansatz(h9, AnsatzSpec::parse("y_yz_zy"));
  EXPECT_EQ(yzzy.n_params, static_cast<int>(9 + 2 * pairs));
  EXPECT_EQ(yzzy.terms.size(), 9 + 2 * pairs);
  const auto sym = build_ansatz(h9, AnsatzSpec::parse("y_yzzy_sym"));
  EXPECT_EQ(sym.n_params, static_cast<int>(9 + pairs));
  EXPECT_EQ(sym.terms.size(), 9 + 2 * pairs);
  const auto both_u = build_ansatz(h9, AnsatzSpec::parse("y_yzu_zyu"));
  EXPECT_EQ(both_u.n_params, 11);
  EXPECT_THROW(AnsatzSpec::parse("y_xx"), std::invalid_argument);
  EXPECT_THROW(AnsatzSpec::parse("nc4"), std::invalid_argument);
}

TEST(Ansatz, ZeroCouplingsOmitted) {
  IsingHamiltonian h(3);
  h.add_term({0}, 1.0);
  h.add_term({2}, 0.5);
  h.add_term({0, 1}, 0.7);
  const auto a = build_ansatz(h, AnsatzSpec::parse("y_yz"));
  EXPECT_EQ(a.n_params, 3);
  for (const auto& t : a.terms) EXPECT_NE(t.scale, 0);
}

TEST(Ansatz, CanonicalOrder) {
  const auto a = build_ansatz(builtin("H9q"), AnsatzSpec::parse("y_yz_zy"));
  for (std::size_t k = 1; k < a.terms.size(); ++k)
    EXPECT_TRUE(canonical_term_less(a.terms[k - 1].string, a.terms[k].string));
}

TEST(Ansatz, NcFirstOrderSingleSpin) {
  const double h = 1.3, j = 0.7, lam = 0.4;
  const auto a = build_ansatz(single_spin(j), AnsatzSpec::parse("nc1"), h, lam);
  ASSERT_EQ(a.terms.size(), 1u);
  EXPECT_EQ(a.terms[0].string.label(), "Y");
  EXPECT_NEAR(std::abs(a.terms[0].scale), 2 * h * j, 1e-12);
  // The operator equals i [H, dH] built from dense matrices.
  const Mat hd = to_dense(interpolated_hamiltonian(single_spin(j), h, lam));
  const Mat dd = to_dense(lambda_derivative(single_spin(j), h));
  Eigen::VectorXd one(1);
  one << 1.0;
  EXPECT_TRUE(to_dense(a.operator_for(one)).isApprox(cplx(0, 1) * (hd * dd - dd * hd), 1e-12));
}

TEST(Action, ZeroThetaIsDerivativeNorm) {
  const auto h5 = builtin("H5q");
  const double hx = 1.2, lam = 0.3;
  const auto dh = lambda_derivative(h5, hx);
  const auto q = action_quadratic(interpolated_hamiltonian(h5, hx, lam), dh, build_ansatz(h5, AnsatzSpec::parse("y_yz")));
  double sum = 0;
  for (const auto& [p, c] : dh.terms()) sum += std::norm(c);
  EXPECT_NEAR(q.c, 32 * sum, 1e-9);
  EXPECT_NEAR(q.value(Eigen::VectorXd::Zero(q.b.size())), q.c, 0);
}

TEST(Action, QuadraticMatchesDirectTrace) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  const auto h5 = builtin("H5q");
  for (const char* kind : kTwoLocalKinds) {
    const auto a = build_ansatz(h5, AnsatzSpec::parse(kind));
    const auto h = interpolated_hamiltonian(h5, 0.9, 0.6);
    const auto dh = lambda_derivative(h5, 0.9);
    const auto q = action_quadratic(h, dh, a);
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd theta(a.n_params);
      for (auto& v : theta) v = g(rng);
      const double direct = direct_action(h, dh, a, theta);
      EXPECT_NEAR(q.value(theta), direct, 1e-9 * (1 + std::abs(direct))) << kind;
    }
  }
}

TEST(Action, MatrixIsPositiveSemidefinite) {
  const auto h5 = builtin("H5q");
  for (const char* kind : kTwoLocalKinds)
    for (double lam = 0.1; lam < 0.95; lam += 0.1) {
      const auto q = action_quadratic(interpolated_hamiltonian(h5, 1.0, lam), lambda_derivative(h5, 1.0),
                                      build_ansatz(h5, AnsatzSpec::parse(kind)));
      EXPECT_TRUE(q.m.isApprox(q.m.transpose(), 1e-12));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.m);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-9) << kind << " lambda " << lam;
    }
}

TEST(SolveCd, SingleSpinParabolaVertex) {
  const double h = 1.1, j = 0.6, lam = 0.35;
  const auto hs = interpolated_hamiltonian(single_spin(j), h, lam);
  const auto dh = lambda_derivative(single_spin(j), h);
  const auto sol = solve_cd(single_spin(j), h, lam, AnsatzSpec::parse("y"));
  // Grid scan of the dense action Tr[G^2] around the solution.
  const Mat hd = to_dense(hs), dd = to_dense(dh), y = to_dense(PauliString::from_label("Y"));
  double best = INFINITY, arg = 0;
  for (double th = -5; th <= 5; th += 1e-4) {
    const Mat a = th * j * y;
    const Mat gm = dd + cplx(0, 1) * (a * hd - hd * a);
    const double s = (gm * gm).trace().real();
    if (s < best) best = s, arg = th;
  }
  EXPECT_NEAR(sol.theta[0], arg, 1e-4);
  EXPECT_NEAR(sol.action, best, 1e-6);
}

TEST(SolveCd, ExactGaugeSingleSpin) {
  for (double j : {0.6, -1.4})
    for (double h : {0.5, 1.7})
      for (int k = 1; k <= 19; ++k) {
        const double lam = 0.05 * k;
        const Mat hd = to_dense(interpolated_hamiltonian(single_spin(j), h, lam));
        const Mat dd = to_dense(lambda_derivative(single_spin(j), h));
        const Mat exact = exact_gauge(hd, dd);
        const double exact_y = (exact * to_dense(PauliString::from_label("Y"))).trace().real() / 2;
        const auto sol = solve_cd(single_spin(j), h, lam, AnsatzSpec::parse("y"));
        EXPECT_NEAR(sol.theta[0] * sol.ansatz.terms[0].scale, exact_y, 1e-9) << "lambda " << lam;
        // G commutes with H for the exact potential.
        const Mat a = to_dense(sol.ansatz.operator_for(sol.theta));
        const Mat gm = dd + cplx(0, 1) * (a * hd - hd * a);
        EXPECT_LT((hd * gm - gm * hd).norm(), 1e-9);
      }
}

TEST(SolveCdProperty, MinimizerAgainstPerturbations) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 6; n += 2) {
    const auto hf = random_local(n, 3, 50 + n);
    for (const char* kind : kTwoLocalKinds) {
      const auto sol = solve_cd(hf, 0.8, 0.45, AnsatzSpec::parse(kind));
      const auto q = action_quadratic(interpolated_hamiltonian(hf, 0.8, 0.45), lambda_derivative(hf, 0.8), sol.ansatz);
      EXPECT_LE(sol.action, q.c + 1e-9);
      for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd d(sol.theta.size());
        for (auto& v : d) v = 0.1 * g(rng);
        EXPECT_LE(sol.action, q.value(sol.theta + d) + 1e-9);
      }
    }
  }
}

TEST(SolveCd, LambdaZeroFinite) {
  const auto sol = solve_cd(builtin("H5q"), 1.0, 0.0, AnsatzSpec::parse("y_yz"));
  EXPECT_TRUE(sol.theta.allFinite());
  const auto q = action_quadratic(interpolated_hamiltonian(builtin("H5q"), 1.0, 0.0),
                                  lambda_derivative(builtin("H5q"), 1.0), sol.ansatz);
  EXPECT_LE(sol.action, q.c);
}

TEST(SolveCd, PeaksShiftRightWithField) {
  const auto h9 = builtin("H9q");
  const auto spec = AnsatzSpec::parse("y_yz_zy");
  const std::vector<double> fields = {0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<std::vector<double>> peak(fields.size());
  for (std::size_t f = 0; f < fields.size(); ++f) {
    std::vector<double> best;
    for (int k = 1; k <= 99; ++k) {
      const double lam = 0.01 * k;
      const auto sol = solve_cd(h9, fields[f], lam, spec);
      if (best.empty()) {
        best.assign(sol.theta.size(), -1);
        peak[f].assign(sol.theta.size(), 0);
      }
      for (int s = 0; s < sol.theta.size(); ++s)
        if (std::abs(sol.theta[s]) > best[s]) best[s] = std::abs(sol.theta[s]), peak[f][s] = lam;
    }
  }
  for (std::size_t s = 0; s < peak[0].size(); ++s)
    for (std::size_t f = 1; f < fields.size(); ++f) EXPECT_GE(peak[f][s], peak[f - 1][s]) << "slot " << s;
}

TEST(ClosedForm, SingleSpinReduction) {
  const double j = 0.9, h = 1.4;
  for (double lam : {0.2, 0.5, 0.8}) {
    const double expect = -0.25 * j * j / ((1 - lam) * (1 - lam) * h * h * j * j + lam * lam * j * j * j * j);
    EXPECT_NEAR(nc_alpha_closed_form(single_spin(j), h, lam), expect, 1e-12);
  }
}

TEST(ClosedForm, TwoLocalPrintedSimplification) {
  // alpha = -(1/4) (sum J_i^2 + 2 sum_{i<j} J_ij^2) / R with
  // R = (1-l)^2 h^2 (sum J_i^2 + 8 sum_{i<j} J_ij^2)
  //   + l^2 (sum J_i^4 + 2 sum_{i<j} J_ij^4 + 6 sum_{i,j} J_i^2 J_ij^2 + 6 sum_i sum_{j<k} J_ij^2 J_ik^2).
  const auto hf = random_local(6, 2, 17);
  const int n = hf.n();
  double c1 = 0, c2 = 0, j4 = 0, jij4 = 0, mixed = 0, fan = 0;
  for (int i = 0; i < n; ++i) {
    const double ji = coupling(hf, {i});
    c1 += ji * ji;
    j4 += std::pow(ji, 4);
    for (int k = 0; k < n; ++k) {
      if (k == i) continue;
      const double jik = coupling(hf, {i, k});
      mixed += ji * ji * jik * jik;
      if (i < k) c2 += jik * jik, jij4 += std::pow(jik, 4);
      for (int l = k + 1; l < n; ++l)
        if (l != i) fan += jik * jik * std::pow(coupling(hf, {i, l}), 2);
    }
  }
  for (double lam : {0.25, 0.5, 0.75}) {
    const double h = 1.1;
    const double r = std::pow((1 - lam) * h, 2) * (c1 + 8 * c2) + lam * lam * (j4 + 2 * jij4 + 6 * mixed + 6 * fan);
    const double printed = -0.25 * (c1 + 2 * c2) / r;
    EXPECT_NEAR(nc_alpha_closed_form(hf, h, lam), printed, 1e-12);
    EXPECT_NEAR(solve_cd(hf, h, lam, AnsatzSpec::parse("nc1")).theta[0], printed, 1e-9);
  }
}

TEST(ClosedForm, MatchesNcFirstOrderSolve) {
  for (double lam : {0.3, 0.5, 0.8})
    EXPECT_NEAR(nc_alpha_closed_form(builtin("H5q"), 1.0, lam),
                solve_cd(builtin("H5q"), 1.0, lam, AnsatzSpec::parse("nc1")).theta[0], 1e-8);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto hf = random_local(3 + seed % 4, 4, 200 + seed);
    const double hx = 0.5 + 0.2 * seed, lam = 0.1 + 0.08 * seed;
    EXPECT_NEAR(nc_alpha_closed_form(hf, hx, lam), solve_cd(hf, hx, lam, AnsatzSpec::parse("nc1")).theta[0], 1e-8)
        << "seed " << seed;
  }
}

TEST(ClosedForm, ConstantsNonNegative) {
  const auto k = nc_first_order_constants(builtin("H9q"));
  for (const auto& [m, c] : k.c) EXPECT_GE(c, 0);
  for (const auto& [m, d] : k.d) EXPECT_GE(d, 0);
  EXPECT_THROW(nc_alpha_closed_form(IsingHamiltonian(3), 1.0, 0.5), std::domain_error);
}

// Coefficient of Y_0 in i[H, [H, [H, dH]]]. Sums run over ordered tuples of
// distinct dummy sites, J symmetric under index permutation.
double second_order_y0(const IsingHamiltonian& hf, double h, double lam) {
  const int n = hf.n();
  std::vector<int> o;
  for (int k = 1; k < n; ++k) o.push_back(k);
  double s = std::pow(coupling(hf, {0}), 3);
  const double j0 = coupling(hf, {0});
  for (int a : o) {
    s += 3 * j0 * std::pow(coupling(hf, {0, a}), 2);
    for (int b : o) {
      if (b == a) continue;
      s += 1.5 * j0 * std::pow(coupling(hf, {0, a, b}), 2);
      s += 3 * coupling(hf, {0, a}) * coupling(hf, {0, b}) * coupling(hf, {0, a, b});
      for (int c : o)
        if (c != a && c != b) s += coupling(hf, {0, a, b}) * coupling(hf, {0, a, c}) * coupling(hf, {0, b, c});
    }
  }
  return -(8 * lam * lam * h * s + 8 * (1 - lam) * (1 - lam) * h * h * h * j0);
}

TEST(NestedCommutator, SecondOrderY0Coefficient) {
  const auto h5 = builtin("H5q");
  for (double lam : {0.3, 0.5, 0.7}) {
    const double h = 1.0;
    const auto nc = cplx(0, 1) * nested_commutator(interpolated_hamiltonian(h5, h, lam), lambda_derivative(h5, h), 2);
    const double got = nc.coefficient(PauliString::single(5, 0, 'Y')).real();
    // Dense oracle.
    const Mat hd = to_dense(interpolated_hamiltonian(h5, h, lam)), dd = to_dense(lambda_derivative(h5, h));
    Mat acc = dd;
    for (int k = 0; k < 3; ++k) acc = hd * acc - acc * hd;
    const double dense = (cplx(0, 1) * acc * to_dense(PauliString::single(5, 0, 'Y'))).trace().real() / 32;
    EXPECT_NEAR(got, dense, 1e-9 * std::abs(dense));
    EXPECT_NEAR(got, second_order_y0(h5, h, lam), 1e-9 * std::abs(got));
  }
  // Two-local instance: the printed form 8 l^2 h (J_i^3 + 3 J_i J_ij^2) + 8 (1-l)^2 h^3 J_i holds as written.
  const auto two = random_local(5, 2, 33);
  const double lam = 0.4, h = 1.3;
  const auto nc = cplx(0, 1) * nested_commutator(interpolated_hamiltonian(two, h, lam), lambda_derivative(two, h), 2);
  double sum = std::pow(coupling(two, {0}), 3);
  for (int a = 1; a < 5; ++a) sum += 3 * coupling(two, {0}) * std::pow(coupling(two, {0, a}), 2);
  const double printed = 8 * lam * lam * h * sum + 8 * std::pow(1 - lam, 2) * h * h * h * coupling(two, {0});
  EXPECT_NEAR(std::abs(nc.coefficient(PauliString::single(5, 0, 'Y')).real()), std::abs(printed),
              1e-9 * std::abs(printed));
}

}  // namespace
}  // namespace dcqo
