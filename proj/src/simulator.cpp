#include "dcqo/simulator.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dcqo {

StateVector::StateVector(int n) : n_(n) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("StateVector: qubit count out of range");
  amp_.assign(std::size_t{1} << n, cplx(0));
  amp_[0] = 1;
}

double StateVector::norm() const {
  double s = 0;
  for (const auto& a : amp_) s += std::norm(a);
  return std::sqrt(s);
}

StateVector init_minus(int n) {
  StateVector psi(n);
  const double mag = std::pow(2.0, -n / 2.0);
  auto& a = psi.amplitudes();
  for (std::size_t b = 0; b < a.size(); ++b) a[b] = (std::popcount(b) & 1) ? -mag : mag;
  return psi;
}

StateVector init_plus(int n) {
  StateVector psi(n);
  const double mag = std::pow(2.0, -n / 2.0);
  for (auto& a : psi.amplitudes()) a = mag;
  return psi;
}

void apply_pauli_rotation(StateVector& psi, const PauliString& p, double theta) {
  if (p.n != psi.n()) throw std::invalid_argument("apply_pauli_rotation: size mismatch");
  const double c = std::cos(theta), s = std::sin(theta);
  auto& a = psi.amplitudes();
  const cplx mis(0, -s);
  if (p.x == 0) {
    // Diagonal string: eigenvalue +-1 (Z-only, no Y).
    const cplx plus(c, -s), minus(c, s);
    for (std::size_t b = 0; b < a.size(); ++b) a[b] *= (std::popcount(b & p.z) & 1) ? minus : plus;
    return;
  }
  // (P psi)[b] = phase(b^x) psi[b^x], phase(b) = i^{ny} (-1)^{|b & z|}.
  const cplx w = mis * basis_phase(p, 0);
  const std::uint64_t top = std::uint64_t{1} << (std::bit_width(p.x) - 1);
  for (std::size_t b = 0; b < a.size(); ++b) {
    if (b & top) continue;
    const std::size_t f = b ^ p.x;
    const cplx u = a[b], v = a[f];
    const cplx wf = (std::popcount(f & p.z) & 1) ? -w : w;
    const cplx wb = (std::popcount(b & p.z) & 1) ? -w : w;
    a[b] = c * u + wf * v;
    a[f] = c * v + wb * u;
  }
}

void apply_diagonal_phase(StateVector& psi, const std::vector<double>& diag, double t) {
  if (diag.size() != psi.dim()) throw std::invalid_argument("apply_diagonal_phase: size mismatch");
  auto& a = psi.amplitudes();
  for (std::size_t b = 0; b < a.size(); ++b) a[b] *= std::polar(1.0, -t * diag[b]);
}

void apply_x_rotations(StateVector& psi, double theta) {
  if (theta == 0.0) return;
  for (int q = 0; q < psi.n(); ++q) apply_pauli_rotation(psi, PauliString::single(psi.n(), q, 'X'), theta);
}

void apply_cd_layer(StateVector& psi, const CDAnsatz& ansatz, const Eigen::VectorXd& theta, double dlambda) {
  if (ansatz.n != psi.n()) throw std::invalid_argument("apply_cd_layer: size mismatch");
  if (theta.size() != ansatz.n_params) throw std::invalid_argument("apply_cd_layer: parameter count mismatch");
  for (const auto& t : ansatz.terms) apply_pauli_rotation(psi, t.string, kCdSign * dlambda * theta[t.slot] * t.scale);
}

Scheme parse_scheme(const std::string& s) {
  if (s == "h_only") return Scheme::h_only;
  if (s == "cd_only") return Scheme::cd_only;
  if (s == "full") return Scheme::full;
  throw std::invalid_argument("unknown scheme: " + s);
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::h_only: return "h_only";
    case Scheme::cd_only: return "cd_only";
    case Scheme::full: return "full";
  }
  return "?";
}

StateVector evolve_dcqo(const IsingHamiltonian& hf, const EvolutionConfig& cfg) {
  const Schedule& s = cfg.schedule;
  s.validate();
  StateVector psi = init_minus(hf.n());
  const auto diag = diagonal(hf);
  const double tau = s.n_steps * s.dt;
  std::optional<CDAnsatz> fixed;
  if (cfg.theta) fixed = build_ansatz(hf, cfg.kind, s.h_x, 0.5);

  for (int j = 0; j <= s.n_steps; ++j) {
    const double t = j * s.dt;
    const double lam = lambda_of_t(t, tau);
    if (cfg.scheme != Scheme::cd_only) {
      // exp(-i dt (1 - lam) H_i) with H_i = -h_x sum X.
      apply_x_rotations(psi, -s.dt * (1 - lam) * s.h_x);
      apply_diagonal_phase(psi, diag, s.dt * lam);
    }
    if (cfg.scheme != Scheme::h_only) {
      const double dlam = lambda_dot(t, tau) * s.dt;
      if (dlam == 0.0) continue;
      if (fixed) {
        apply_cd_layer(psi, *fixed, *cfg.theta, dlam);
      } else {
        auto sol = solve_cd(hf, s.h_x, lam, cfg.kind);
        apply_cd_layer(psi, sol.ansatz, sol.theta, dlam);
      }
    }
  }
  return psi;
}

double single_layer_dlambda(const Schedule& s) {
  const double tau = s.n_steps * s.dt;
  return lambda_dot(tau / 2, tau) * s.dt;
}

StateVector single_layer(const IsingHamiltonian& hf, const Schedule& s, AnsatzSpec kind) {
  const double tau = s.n_steps * s.dt;
  auto sol = solve_cd(hf, s.h_x, lambda_of_t(tau / 2, tau), kind);
  return single_layer(sol.ansatz, sol.theta, single_layer_dlambda(s));
}

StateVector single_layer(const CDAnsatz& ansatz, const Eigen::VectorXd& theta, double dlambda) {
  StateVector psi = init_minus(ansatz.n);
  apply_cd_layer(psi, ansatz, theta, dlambda);
  return psi;
}

StateVector evolve_qaoa(const IsingHamiltonian& hf, double h_x, const std::vector<double>& beta,
                        const std::vector<double>& gamma) {
  if (beta.size() != gamma.size()) throw std::invalid_argument("evolve_qaoa: beta/gamma length mismatch");
  StateVector psi = init_plus(hf.n());
  const auto diag = diagonal(hf);
  for (std::size_t i = 0; i < beta.size(); ++i) {
    apply_diagonal_phase(psi, diag, gamma[i]);
    apply_x_rotations(psi, -beta[i] * h_x);
  }
  return psi;
}

std::vector<double> distribution(const StateVector& psi) {
  std::vector<double> p(psi.dim());
  for (std::size_t b = 0; b < p.size(); ++b) p[b] = std::norm(psi[b]);
  return p;
}

std::string bitstring(SpinConfig c, int n) {
  std::string s(n, '0');
  for (int i = 0; i < n; ++i)
    if ((c >> i) & 1ULL) s[i] = '1';
  return s;
}

double expectation(const StateVector& psi, const std::vector<double>& diag) {
  if (diag.size() != psi.dim()) throw std::invalid_argument("expectation: size mismatch");
  double e = 0;
  for (std::size_t b = 0; b < diag.size(); ++b) e += std::norm(psi[b]) * diag[b];
  return e;
}

double expectation(const StateVector& psi, const IsingHamiltonian& h) { return expectation(psi, diagonal(h)); }

double accuracy(const StateVector& psi, const GroundStates& g) {
  double a = 0;
  for (SpinConfig c : g.configs) a += std::norm(psi[c]);
  return a;
}

double accuracy(const StateVector& psi, const IsingHamiltonian& h) { return accuracy(psi, brute_force_ground(h)); }

}  // namespace dcqo
