#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcqo/counterdiabatic.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/simulator.hpp"

namespace dcqo {

struct OptimizerConfig {
  double step_size = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-8;
  int max_iters = 3000;
  double tolerance = 1e-8;  // on |cost_k - cost_{k-window}|
  int window = 20;
  double fd_eps = 1e-4;

  void validate() const;
};

struct TraceStep {
  Eigen::VectorXd theta;
  double cost;
};

struct Trace {
  std::vector<TraceStep> steps;  // steps[0] is the initial point
  std::vector<double> final_distribution;
  bool converged = false;
  std::uint64_t seed = 0;

  const TraceStep& final() const { return steps.back(); }
};

using CostFunction = std::function<double(const Eigen::VectorXd&)>;

// Central difference, step eps per coordinate.
Eigen::VectorXd fd_gradient(const CostFunction& f, const Eigen::VectorXd& theta, double eps);

// Throws std::runtime_error on a non-finite cost or gradient.
Trace adam_optimize(const CostFunction& f, Eigen::VectorXd theta0, const OptimizerConfig& cfg);

// Final-state energy of the single-layer circuit as a function of the ansatz
// parameters.
class SingleLayerCost {
 public:
  SingleLayerCost(const IsingHamiltonian& hf, CDAnsatz ansatz, double dlambda);
  SingleLayerCost(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind);

  double operator()(const Eigen::VectorXd& theta) const;
  StateVector state(const Eigen::VectorXd& theta) const;
  const CDAnsatz& ansatz() const { return ansatz_; }
  double dlambda() const { return dlambda_; }

 private:
  CDAnsatz ansatz_;
  double dlambda_;
  std::vector<double> diag_;
};

Eigen::VectorXd warm_start(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind);

// Slots tied to a single-site Y term draw from N(1, 2 pi / (2 dt lambda_dot(tau/2) |J_i|));
// every other slot draws from N(1, 2).
Eigen::VectorXd random_init(const CDAnsatz& ansatz, const Schedule& s, std::uint64_t seed);

struct QaoaAngles {
  std::vector<double> beta;
  std::vector<double> gamma;
};

// Linear ramp lambda_i = i / (p + 1), i = 1..p: beta_i = (1 - lambda_i) dt,
// gamma_i = lambda_i dt with dt = tau / (p + 1).
QaoaAngles qaoa_linear_init(int p, double tau);

struct QaoaCost {
  QaoaCost(const IsingHamiltonian& hf, double h_x, int p);
  double operator()(const Eigen::VectorXd& packed) const;  // [beta..., gamma...]
  StateVector state(const Eigen::VectorXd& packed) const;

  IsingHamiltonian hf;
  double h_x;
  int p;
  std::vector<double> diag;
};

Eigen::VectorXd pack(const QaoaAngles& a);

}  // namespace dcqo
