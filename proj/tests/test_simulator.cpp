#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "dcqo/simulator.hpp"

namespace dcqo {
namespace {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
const cplx I(0, 1);

Vec as_vec(const StateVector& psi) {
  Vec v(psi.dim());
  for (std::size_t b = 0; b < psi.dim(); ++b) v[b] = psi[b];
  return v;
}

IsingHamiltonian random_ising(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  IsingHamiltonian h(n);
  for (int i = 0; i < n; ++i) {
    h.add_term({i}, g(rng));
    for (int j = i + 1; j < n; ++j) h.add_term({i, j}, g(rng));
  }
  if (n >= 3) h.add_term({0, 1, 2}, g(rng));
  return h;
}

Mat transverse_dense(int n, double h_x) { return to_dense(transverse_field(n, h_x)); }

TEST(StateVector, Construction) {
  StateVector psi(3);
  EXPECT_EQ(psi.dim(), 8u);
  EXPECT_EQ(psi[0], cplx(1));
  EXPECT_THROW(StateVector(0), std::invalid_argument);
  EXPECT_THROW(StateVector(StateVector::kMaxQubits + 1), std::invalid_argument);
}

TEST(StateVector, MinusAndPlusStates) {
  const int n = 4;
  const Mat x = transverse_dense(n, -1.0);  // sum X
  const Vec m = as_vec(init_minus(n)), p = as_vec(init_plus(n));
  EXPECT_NEAR(m.norm(), 1, 1e-14);
  EXPECT_TRUE((x * m).isApprox(-n * m, 1e-13));
  EXPECT_TRUE((x * p).isApprox(n * p, 1e-13));
}

TEST(Rotation, MatchesDenseExponential) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> mask(0, 15);
  std::normal_distribution<double> g;
  for (int t = 0; t < 60; ++t) {
    const PauliString p(4, mask(rng), mask(rng));
    const double theta = g(rng);
    StateVector psi(4);
    for (auto& a : psi.amplitudes()) a = cplx(g(rng), g(rng));
    const Vec before = as_vec(psi);
    apply_pauli_rotation(psi, p, theta);
    const Mat u = (cplx(0, -theta) * to_dense(p)).exp();
    EXPECT_TRUE(as_vec(psi).isApprox(u * before, 1e-12)) << p.label();
  }
}

TEST(Rotation, DiagonalPhaseAndNorm) {
  const auto h = random_ising(5, 2);
  StateVector psi = init_minus(5);
  apply_diagonal_phase(psi, diagonal(h), 0.37);
  const Mat u = (cplx(0, -0.37) * to_dense(to_pauli_sum(h))).exp();
  EXPECT_TRUE(as_vec(psi).isApprox(u * as_vec(init_minus(5)), 1e-12));
  EXPECT_NEAR(psi.norm(), 1, 1e-13);
  EXPECT_THROW(apply_diagonal_phase(psi, {1.0}, 0.1), std::invalid_argument);
}

TEST(Evolution, NormPreserved) {
  const auto h9 = builtin("H9q");
  EvolutionConfig cfg;
  cfg.scheme = Scheme::full;
  cfg.schedule = Schedule::with_layers(3, 1.2);
  cfg.kind = AnsatzSpec::parse("y_yz");
  EXPECT_NEAR(evolve_dcqo(h9, cfg).norm(), 1, 1e-12);
}

TEST(Evolution, SingleLayerEqualsCdOnlyOneLayer) {
  for (const char* kind : {"y", "y_yzu", "y_yz_zy"}) {
    const auto s = Schedule::with_layers(1, 1.45);
    EvolutionConfig cfg{Scheme::cd_only, s, AnsatzSpec::parse(kind), std::nullopt};
    const auto a = evolve_dcqo(builtin("H5q"), cfg);
    const auto b = single_layer(builtin("H5q"), s, AnsatzSpec::parse(kind));
    EXPECT_TRUE(as_vec(a).isApprox(as_vec(b), 1e-13)) << kind;
  }
}

TEST(Evolution, ZeroParametersReduceToHOnly) {
  const auto h5 = builtin("H5q");
  const auto spec = AnsatzSpec::parse("y_yz");
  EvolutionConfig full{Scheme::full, Schedule::with_layers(4, 1.0), spec,
                       Eigen::VectorXd::Zero(build_ansatz(h5, spec).n_params)};
  EvolutionConfig bare{Scheme::h_only, Schedule::with_layers(4, 1.0), spec, std::nullopt};
  EXPECT_TRUE(as_vec(evolve_dcqo(h5, full)).isApprox(as_vec(evolve_dcqo(h5, bare)), 1e-14));
}

TEST(Evolution, HOnlyMatchesDenseSteps) {
  const auto h = random_ising(3, 8);
  Schedule s;
  s.n_steps = 5;
  s.dt = 0.13;
  s.h_x = 0.9;
  const double tau = s.n_steps * s.dt;
  Vec psi = as_vec(init_minus(3));
  const Mat hi = transverse_dense(3, s.h_x), hf = to_dense(to_pauli_sum(h));
  for (int j = 0; j <= s.n_steps; ++j) {
    const double lam = lambda_of_t(j * s.dt, tau);
    psi = (cplx(0, -s.dt * lam) * hf).exp() * ((cplx(0, -s.dt * (1 - lam)) * hi).exp() * psi).eval();
  }
  EXPECT_TRUE(as_vec(evolve_dcqo(h, {Scheme::h_only, s, {}, std::nullopt})).isApprox(psi, 1e-12));
}

// Product-formula error against a fine midpoint reference over the same
// schedule; first order in dt.
TEST(Evolution, TrotterErrorShrinksWithStep) {
  const auto h = random_ising(3, 21);
  const double tau = 1.0, h_x = 1.0;
  const Mat hi = transverse_dense(3, h_x), hf = to_dense(to_pauli_sum(h));
  Vec ref = as_vec(init_minus(3));
  const int fine = 4000;
  for (int k = 0; k < fine; ++k) {
    const double lam = lambda_of_t((k + 0.5) * tau / fine, tau);
    ref = (cplx(0, -tau / fine) * ((1 - lam) * hi + lam * hf)).exp() * ref;
  }
  std::vector<double> err;
  for (int steps : {16, 32, 64, 128}) {
    Schedule s;
    s.n_steps = steps;
    s.dt = tau / steps;
    s.h_x = h_x;
    const Vec v = as_vec(evolve_dcqo(h, {Scheme::h_only, s, {}, std::nullopt}));
    err.push_back(1 - std::norm(ref.dot(v)));
  }
  for (std::size_t k = 1; k < err.size(); ++k) EXPECT_LT(err[k], err[k - 1] / 1.8) << "halving " << k;
}

TEST(Evolution, CdOnlyTracksSingleSpinToGround) {
  IsingHamiltonian h(1);
  h.add_term({0}, 0.8);
  Schedule s;
  s.n_steps = 400;
  s.dt = 0.01;
  s.h_x = 1.1;
  const auto psi = evolve_dcqo(h, {Scheme::cd_only, s, AnsatzSpec::parse("y"), std::nullopt});
  EXPECT_GT(accuracy(psi, h), 0.999);
}

TEST(Evolution, SingleSpinSingleLayerClosedForm) {
  // One Y rotation on |->: amplitude of |1> (sigma_z = -1) is cos of the angle offset.
  IsingHamiltonian h(1);
  h.add_term({0}, 0.8);
  const auto s = Schedule::with_layers(1, 1.1);
  const auto sol = solve_cd(h, 1.1, 0.5, AnsatzSpec::parse("y"));
  const double angle = kCdSign * single_layer_dlambda(s) * sol.theta[0] * 0.8;
  const Vec expect = (cplx(0, -angle) * to_dense(PauliString::from_label("Y"))).exp() * as_vec(init_minus(1));
  EXPECT_TRUE(as_vec(single_layer(h, s, AnsatzSpec::parse("y"))).isApprox(expect, 1e-13));
}

TEST(Qaoa, MatchesDenseProduct) {
  const auto h = random_ising(4, 3);
  const std::vector<double> beta = {0.3, -0.2, 0.5}, gamma = {0.1, 0.7, -0.4};
  Vec psi = as_vec(init_plus(4));
  const Mat hi = transverse_dense(4, 1.3), hf = to_dense(to_pauli_sum(h));
  for (std::size_t k = 0; k < beta.size(); ++k)
    psi = (cplx(0, -beta[k]) * hi).exp() * ((cplx(0, -gamma[k]) * hf).exp() * psi).eval();
  EXPECT_TRUE(as_vec(evolve_qaoa(h, 1.3, beta, gamma)).isApprox(psi, 1e-12));
  EXPECT_THROW(evolve_qaoa(h, 1.3, {0.1}, {}), std::invalid_argument);
}

TEST(Observables, ExpectationAndAccuracy) {
  const auto h5 = builtin("H5q");
  const auto psi = init_minus(5);
  EXPECT_NEAR(expectation(psi, h5), h5.constant(), 1e-12);
  const auto g = brute_force_ground(h5);
  EXPECT_NEAR(accuracy(psi, g), g.configs.size() / 32.0, 1e-14);
  StateVector basis(5);
  basis.amplitudes()[0] = 0;
  basis.amplitudes()[g.configs[0]] = 1;
  EXPECT_NEAR(accuracy(basis, h5), 1, 0);
  EXPECT_NEAR(expectation(basis, h5), g.e_min, 1e-12);
  const auto d = distribution(psi);
  double sum = 0;
  for (double p : d) sum += p;
  EXPECT_NEAR(sum, 1, 1e-13);
  EXPECT_EQ(bitstring(0b011, 4), "1100");
}

TEST(Scheme, Names) {
  for (Scheme s : {Scheme::h_only, Scheme::cd_only, Scheme::full}) EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_THROW(parse_scheme("cd"), std::invalid_argument);
}

}  // namespace
}  // namespace dcqo
