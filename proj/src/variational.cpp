#include "dcqo/variational.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace dcqo {

void OptimizerConfig::validate() const {
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1))
    throw std::invalid_argument("OptimizerConfig: beta1 and beta2 must lie in (0, 1)");
  if (step_size < 0 || epsilon <= 0 || fd_eps <= 0 || max_iters < 0 || window < 1)
    throw std::invalid_argument("OptimizerConfig: invalid value");
}

Eigen::VectorXd fd_gradient(const CostFunction& f, const Eigen::VectorXd& theta, double eps) {
  Eigen::VectorXd g(theta.size());
  Eigen::VectorXd x = theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    x[k] = theta[k] + eps;
    const double fp = f(x);
    x[k] = theta[k] - eps;
    const double fm = f(x);
    x[k] = theta[k];
    g[k] = (fp - fm) / (2 * eps);
  }
  return g;
}

Trace adam_optimize(const CostFunction& f, Eigen::VectorXd theta0, const OptimizerConfig& cfg) {
  cfg.validate();
  if (!theta0.allFinite()) throw std::invalid_argument("adam_optimize: non-finite initial parameters");
  Trace tr;
  Eigen::VectorXd theta = std::move(theta0);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(theta.size());
  double cost = f(theta);
  if (!std::isfinite(cost)) throw std::runtime_error("adam_optimize: non-finite cost at the initial point");
  tr.steps.push_back({theta, cost});
  double b1t = 1, b2t = 1;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::VectorXd g = fd_gradient(f, theta, cfg.fd_eps);
    if (!g.allFinite()) throw std::runtime_error("adam_optimize: non-finite gradient at iteration " + std::to_string(it));
    m = cfg.beta1 * m + (1 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1 - cfg.beta2) * g.cwiseAbs2();
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    const Eigen::VectorXd mhat = m / (1 - b1t);
    const Eigen::VectorXd vhat = v / (1 - b2t);
    theta.array() -= cfg.step_size * mhat.array() / (vhat.array().sqrt() + cfg.epsilon);
    cost = f(theta);
    if (!std::isfinite(cost)) throw std::runtime_error("adam_optimize: non-finite cost at iteration " + std::to_string(it));
    tr.steps.push_back({theta, cost});
    if (it >= cfg.window && std::abs(cost - tr.steps[it - cfg.window].cost) < cfg.tolerance) {
      tr.converged = true;
      break;
    }
  }
  return tr;
}

SingleLayerCost::SingleLayerCost(const IsingHamiltonian& hf, CDAnsatz ansatz, double dlambda)
    : ansatz_(std::move(ansatz)), dlambda_(dlambda), diag_(diagonal(hf)) {
  if (ansatz_.n != hf.n()) throw std::invalid_argument("SingleLayerCost: size mismatch");
}

SingleLayerCost::SingleLayerCost(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind)
    : SingleLayerCost(hf, build_ansatz(hf, kind, s.h_x, 0.5), single_layer_dlambda(s)) {}

StateVector SingleLayerCost::state(const Eigen::VectorXd& theta) const {
  return single_layer(ansatz_, theta, dlambda_);
}

double SingleLayerCost::operator()(const Eigen::VectorXd& theta) const { return expectation(state(theta), diag_); }

Eigen::VectorXd warm_start(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind) {
  const double tau = s.n_steps * s.dt;
  return solve_cd(hf, s.h_x, lambda_of_t(tau / 2, tau), kind).theta;
}

Eigen::VectorXd random_init(const CDAnsatz& ansatz, const Schedule& s, std::uint64_t seed) {
  const double tau = s.n_steps * s.dt;
  const double ldot = lambda_dot(tau / 2, tau);
  std::vector<double> sigma(ansatz.n_params, 2.0);
  for (const auto& t : ansatz.terms) {
    if (t.string.weight() == 1 && t.string.x == t.string.z)
      sigma[t.slot] = 2 * std::numbers::pi / (2 * s.dt * ldot * std::abs(t.scale));
  }
  std::mt19937_64 rng(seed);
  Eigen::VectorXd theta(ansatz.n_params);
  for (int k = 0; k < ansatz.n_params; ++k) theta[k] = std::normal_distribution<double>(1.0, sigma[k])(rng);
  return theta;
}

QaoaAngles qaoa_linear_init(int p, double tau) {
  if (p < 1) throw std::invalid_argument("qaoa_linear_init: p must be at least 1");
  if (!(tau > 0)) throw std::invalid_argument("qaoa_linear_init: tau must be positive");
  const double dt = tau / (p + 1);
  QaoaAngles a;
  for (int i = 1; i <= p; ++i) {
    const double lam = static_cast<double>(i) / (p + 1);
    a.beta.push_back((1 - lam) * dt);
    a.gamma.push_back(lam * dt);
  }
  return a;
}

Eigen::VectorXd pack(const QaoaAngles& a) {
  Eigen::VectorXd x(a.beta.size() + a.gamma.size());
  for (std::size_t i = 0; i < a.beta.size(); ++i) x[i] = a.beta[i];
  for (std::size_t i = 0; i < a.gamma.size(); ++i) x[a.beta.size() + i] = a.gamma[i];
  return x;
}

QaoaCost::QaoaCost(const IsingHamiltonian& h, double hx, int layers) : hf(h), h_x(hx), p(layers), diag(diagonal(h)) {}

StateVector QaoaCost::state(const Eigen::VectorXd& packed) const {
  if (packed.size() != 2 * p) throw std::invalid_argument("QaoaCost: expected 2p parameters");
  std::vector<double> beta(packed.data(), packed.data() + p);
  std::vector<double> gamma(packed.data() + p, packed.data() + 2 * p);
  return evolve_qaoa(hf, h_x, beta, gamma);
}

double QaoaCost::operator()(const Eigen::VectorXd& packed) const { return expectation(state(packed), diag); }

}  // namespace dcqo
