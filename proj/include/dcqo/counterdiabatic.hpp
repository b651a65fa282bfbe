#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dcqo/ising.hpp"
#include "dcqo/pauli.hpp"

namespace dcqo {

double lambda_of_t(double t, double tau);
double lambda_dot(double t, double tau);

struct Schedule {
  double tau = 0.2;
  int n_steps = 2;
  double h_x = 1.0;
  double dt = 0.1;

  // tau = n_steps * dt; p = n_steps - 1 layers.
  static Schedule with_layers(int p, double h_x, double dt = 0.1);
  void validate() const;
  double t(int j) const { return j * dt; }
};

// Transverse field -h_x sum_i X_i.
PauliSum transverse_field(int n, double h_x);
// (1 - lambda) H_i + lambda H_f.
PauliSum interpolated_hamiltonian(const IsingHamiltonian& hf, double h_x, double lambda);
// d/dlambda of the above: H_f + h_x sum_i X_i.
PauliSum lambda_derivative(const IsingHamiltonian& hf, double h_x);

enum class AnsatzKind { y, y_yzu, y_yzu_zyu, y_yz, y_yz_zy, y_yzzy_sym, nc };

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::y_yzu;
  int nc_order = 0;

  static AnsatzSpec parse(std::string_view s);  // "y_yz", "nc2", ...
  std::string name() const;
  bool two_local() const { return kind != AnsatzKind::nc; }
};

struct CDTerm {
  PauliString string;
  double scale;  // coupling J (or NC expansion coefficient)
  int slot;
};

struct CDAnsatz {
  AnsatzSpec spec;
  int n = 0;
  std::vector<CDTerm> terms;  // in application order
  int n_params = 0;
  std::vector<std::string> slot_labels;

  // A(theta) = sum_k theta[slot_k] scale_k P_k.
  PauliSum operator_for(const Eigen::VectorXd& theta) const;
};

// Canonical application order: support size, then support sites, then kind
// (Y on the lower site first).
bool canonical_term_less(const PauliString& a, const PauliString& b);

// Two-local kinds ignore h_x and lambda; NC(l) expands
// i [H, [H, ..., dH]] at the given point.
CDAnsatz build_ansatz(const IsingHamiltonian& hf, AnsatzSpec spec, double h_x = 1.0, double lambda = 0.5);

struct ActionQuadratic {
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  double c = 0;

  double value(const Eigen::VectorXd& theta) const { return c + 2 * b.dot(theta) + theta.dot(m * theta); }
};

// S(theta) = Tr[G^2], G = dH + i [A(theta), H].
ActionQuadratic action_quadratic(const PauliSum& h, const PauliSum& dh, const CDAnsatz& ansatz);

struct CDSolution {
  CDAnsatz ansatz;
  Eigen::VectorXd theta;
  double action = 0;
};

CDSolution solve_cd(const IsingHamiltonian& hf, double h_x, double lambda, AnsatzSpec spec,
                    double rcond = 1e-10);

struct NCFirstOrderConstants {
  std::map<int, double> c;  // C_m, m = 1..4
  std::map<int, double> d;  // D_m keyed by total index count m
  std::vector<double> t_diag;  // T_{i,i}
};

NCFirstOrderConstants nc_first_order_constants(const IsingHamiltonian& hf);
// Minimizer of the action for A = alpha i [H, dH].
double nc_alpha_closed_form(const IsingHamiltonian& hf, double h_x, double lambda);

}  // namespace dcqo
