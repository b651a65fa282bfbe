#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dcqo/counterdiabatic.hpp"
#include "dcqo/ising.hpp"
#include "dcqo/pauli.hpp"

namespace dcqo {

class StateVector {
 public:
  static constexpr int kMaxQubits = 24;

  explicit StateVector(int n);  // |0...0>

  int n() const { return n_; }
  std::size_t dim() const { return amp_.size(); }
  std::vector<cplx>& amplitudes() { return amp_; }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  cplx operator[](std::size_t b) const { return amp_[b]; }
  double norm() const;

 private:
  int n_;
  std::vector<cplx> amp_;
};

StateVector init_minus(int n);
StateVector init_plus(int n);

// psi <- exp(-i theta P) psi.
void apply_pauli_rotation(StateVector& psi, const PauliString& p, double theta);
// psi <- exp(-i t D) psi for a diagonal D given by its entries.
void apply_diagonal_phase(StateVector& psi, const std::vector<double>& diag, double t);
// psi <- prod_i exp(-i theta X_i) psi.
void apply_x_rotations(StateVector& psi, double theta);

// The digitized CD factor applies exp(-i dlambda * kCdSign * A) with A from the
// action minimizer. With H_i = -h_x sum X and |->^n as the start state, the
// minus sign is the one that lowers the final energy in the exactly solvable
// single-spin case.
inline constexpr double kCdSign = -1.0;

void apply_cd_layer(StateVector& psi, const CDAnsatz& ansatz, const Eigen::VectorXd& theta, double dlambda);

enum class Scheme { h_only, cd_only, full };
Scheme parse_scheme(const std::string& s);
std::string scheme_name(Scheme s);

struct EvolutionConfig {
  Scheme scheme = Scheme::cd_only;
  Schedule schedule;
  AnsatzSpec kind;
  // When set, these parameters are used at every step instead of solving the
  // action at each lambda_j.
  std::optional<Eigen::VectorXd> theta;
};

StateVector evolve_dcqo(const IsingHamiltonian& hf, const EvolutionConfig& cfg);

// CD factor at t = tau/2 applied to |->^n with dlambda = lambda_dot(tau/2) dt.
double single_layer_dlambda(const Schedule& s);
StateVector single_layer(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind);
StateVector single_layer(const CDAnsatz& ansatz, const Eigen::VectorXd& theta, double dlambda);

// prod_i exp(-i beta_i H_i) exp(-i gamma_i H_f) |+>^n, H_i = -h_x sum X.
StateVector evolve_qaoa(const IsingHamiltonian& hf, double h_x, const std::vector<double>& beta,
                        const std::vector<double>& gamma);

std::vector<double> distribution(const StateVector& psi);
std::string bitstring(SpinConfig c, int n);  // qubit 0 first
double expectation(const StateVector& psi, const IsingHamiltonian& h);
double expectation(const StateVector& psi, const std::vector<double>& diag);
double accuracy(const StateVector& psi, const IsingHamiltonian& h);
double accuracy(const StateVector& psi, const GroundStates& g);

}  // namespace dcqo
