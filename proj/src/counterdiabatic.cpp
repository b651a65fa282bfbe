#include "dcqo/counterdiabatic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dcqo {

namespace {

void check_time(double t, double tau) {
  if (!(tau > 0)) throw std::invalid_argument("schedule: tau must be positive");
  const double slack = 1e-12 * tau;
  if (t < -slack || t > tau + slack) throw std::invalid_argument("schedule: t outside [0, tau]");
}

}  // namespace

double lambda_of_t(double t, double tau) {
  check_time(t, tau);
  const double v = std::sin(std::numbers::pi * t / (2 * tau));
  const double u = std::sin(std::numbers::pi / 2 * v * v);
  return u * u;
}

double lambda_dot(double t, double tau) {
  check_time(t, tau);
  const double v = std::numbers::pi * t / (2 * tau);
  const double s = std::sin(v);
  const double u = std::numbers::pi / 2 * s * s;
  return std::numbers::pi * std::numbers::pi / (4 * tau) * std::sin(2 * u) * std::sin(2 * v);
}

Schedule Schedule::with_layers(int p, double h_x, double dt) {
  Schedule s{(p + 1) * dt, p + 1, h_x, dt};
  s.validate();
  return s;
}

void Schedule::validate() const {
  if (!(tau > 0)) throw std::invalid_argument("schedule: tau must be positive");
  if (n_steps < 2) throw std::invalid_argument("schedule: need at least two steps");
  if (!(h_x > 0)) throw std::invalid_argument("schedule: h_x must be positive");
  if (!(dt > 0)) throw std::invalid_argument("schedule: dt must be positive");
}

PauliSum transverse_field(int n, double h_x) {
  PauliSum s(n);
  for (int i = 0; i < n; ++i) s.add(PauliString::single(n, i, 'X'), -h_x);
  return s;
}

PauliSum interpolated_hamiltonian(const IsingHamiltonian& hf, double h_x, double lambda) {
  return (1.0 - lambda) * transverse_field(hf.n(), h_x) + lambda * to_pauli_sum(hf);
}

PauliSum lambda_derivative(const IsingHamiltonian& hf, double h_x) {
  return to_pauli_sum(hf) - transverse_field(hf.n(), h_x);
}

AnsatzSpec AnsatzSpec::parse(std::string_view s) {
  std::string t(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "y") return {AnsatzKind::y};
  if (t == "y_yzu") return {AnsatzKind::y_yzu};
  if (t == "y_yzu_zyu") return {AnsatzKind::y_yzu_zyu};
  if (t == "y_yz") return {AnsatzKind::y_yz};
  if (t == "y_yz_zy") return {AnsatzKind::y_yz_zy};
  if (t == "y_yzzy_sym") return {AnsatzKind::y_yzzy_sym};
  if (t.size() == 3 && t.starts_with("nc") && t[2] >= '1' && t[2] <= '3') return {AnsatzKind::nc, t[2] - '0'};
  throw std::invalid_argument("unsupported ansatz kind: " + std::string(s));
}

std::string AnsatzSpec::name() const {
  switch (kind) {
    case AnsatzKind::y: return "y";
    case AnsatzKind::y_yzu: return "y_yzu";
    case AnsatzKind::y_yzu_zyu: return "y_yzu_zyu";
    case AnsatzKind::y_yz: return "y_yz";
    case AnsatzKind::y_yz_zy: return "y_yz_zy";
    case AnsatzKind::y_yzzy_sym: return "y_yzzy_sym";
    case AnsatzKind::nc: return "nc" + std::to_string(nc_order);
  }
  return "?";
}

PauliSum CDAnsatz::operator_for(const Eigen::VectorXd& theta) const {
  PauliSum a(n);
  for (const auto& t : terms) a.add(t.string, theta[t.slot] * t.scale);
  return a;
}

bool canonical_term_less(const PauliString& a, const PauliString& b) {
  const int wa = a.weight(), wb = b.weight();
  if (wa != wb) return wa < wb;
  // Lexicographic on ascending site lists equals reversed-bit comparison of
  // the support masks.
  const std::uint64_t sa = a.support(), sb = b.support();
  if (sa != sb) {
    const std::uint64_t diff = sa ^ sb;
    return (sa & diff & -diff) != 0;
  }
  // Same support: Y (x bit) on the lowest site sorts first.
  for (int q = 0; q < a.n; ++q) {
    const char oa = a.op_at(q), ob = b.op_at(q);
    if (oa == ob) continue;
    auto rank = [](char c) { return c == 'Y' ? 0 : c == 'X' ? 1 : c == 'Z' ? 2 : 3; };
    return rank(oa) < rank(ob);
  }
  return false;
}

namespace {

void sort_terms(CDAnsatz& a) {
  std::stable_sort(a.terms.begin(), a.terms.end(),
                   [](const CDTerm& x, const CDTerm& y) { return canonical_term_less(x.string, y.string); });
}

CDAnsatz build_two_local(const IsingHamiltonian& hf, AnsatzSpec spec) {
  const int n = hf.n();
  CDAnsatz a{spec, n, {}, 0, {}};
  auto new_slot = [&](std::string label) {
    a.slot_labels.push_back(std::move(label));
    return a.n_params++;
  };
  for (int i = 0; i < n; ++i) {
    double j = hf.coefficient({i});
    if (j == 0.0) continue;
    a.terms.push_back({PauliString::single(n, i, 'Y'), j, new_slot("alpha_" + std::to_string(i))});
  }
  if (spec.kind == AnsatzKind::y) {
    sort_terms(a);
    return a;
  }
  int beta = -1, gamma = -1;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k < n; ++k) {
      double j = hf.coefficient({i, k});
      if (j == 0.0) continue;
      const std::uint64_t bi = 1ULL << i, bk = 1ULL << k;
      PauliString yz(n, bi, bi | bk), zy(n, bk, bi | bk);
      const std::string pair = std::to_string(i) + "_" + std::to_string(k);
      switch (spec.kind) {
        case AnsatzKind::y_yzu:
          if (beta < 0) beta = new_slot("beta");
          a.terms.push_back({yz, j, beta});
          break;
        case AnsatzKind::y_yzu_zyu:
          if (beta < 0) beta = new_slot("beta");
          if (gamma < 0) gamma = new_slot("gamma");
          a.terms.push_back({yz, j, beta});
          a.terms.push_back({zy, j, gamma});
          break;
        case AnsatzKind::y_yz:
          a.terms.push_back({yz, j, new_slot("beta_" + pair)});
          break;
        case AnsatzKind::y_yz_zy:
          a.terms.push_back({yz, j, new_slot("beta_" + pair)});
          a.terms.push_back({zy, j, new_slot("gamma_" + pair)});
          break;
        case AnsatzKind::y_yzzy_sym: {
          int s = new_slot("beta_" + pair);
          a.terms.push_back({yz, j, s});
          a.terms.push_back({zy, j, s});
          break;
        }
        default: throw std::invalid_argument("build_ansatz: unsupported kind");
      }
    }
  sort_terms(a);
  return a;
}

}  // namespace

CDAnsatz build_ansatz(const IsingHamiltonian& hf, AnsatzSpec spec, double h_x, double lambda) {
  if (spec.kind != AnsatzKind::nc) return build_two_local(hf, spec);
  if (spec.nc_order < 1 || spec.nc_order > 3) throw std::invalid_argument("build_ansatz: NC order must be 1..3");
  const PauliSum h = interpolated_hamiltonian(hf, h_x, lambda);
  const PauliSum dh = lambda_derivative(hf, h_x);
  CDAnsatz a{spec, hf.n(), {}, spec.nc_order, {}};
  for (int k = 1; k <= spec.nc_order; ++k) {
    a.slot_labels.push_back("alpha_" + std::to_string(k));
    const PauliSum o = nested_commutator(h, dh, k) * cplx(0, 1);
    for (const auto& [p, c] : o.terms()) a.terms.push_back({p, c.real(), k - 1});
  }
  sort_terms(a);
  return a;
}

ActionQuadratic action_quadratic(const PauliSum& h, const PauliSum& dh, const CDAnsatz& ansatz) {
  if (ansatz.terms.empty()) throw std::invalid_argument("action_quadratic: empty ansatz");
  const int m = ansatz.n_params;
  std::vector<PauliSum> o(m, PauliSum(h.n()));
  for (const auto& t : ansatz.terms) o[t.slot] += commutator(PauliSum(t.string, t.scale), h) * cplx(0, 1);

  ActionQuadratic q;
  q.m.resize(m, m);
  q.b.resize(m);
  q.c = trace_inner(dh, dh).real();
  for (int a = 0; a < m; ++a) {
    q.b[a] = trace_inner(dh, o[a]).real();
    for (int b = a; b < m; ++b) q.m(a, b) = q.m(b, a) = trace_inner(o[a], o[b]).real();
  }
  return q;
}

CDSolution solve_cd(const IsingHamiltonian& hf, double h_x, double lambda, AnsatzSpec spec, double rcond) {
  CDSolution sol{build_ansatz(hf, spec, h_x, lambda), {}, 0};
  if (sol.ansatz.terms.empty()) {
    sol.theta = Eigen::VectorXd::Zero(sol.ansatz.n_params);
    sol.action = trace_inner(lambda_derivative(hf, h_x), lambda_derivative(hf, h_x)).real();
    return sol;
  }
  const PauliSum h = interpolated_hamiltonian(hf, h_x, lambda);
  const PauliSum dh = lambda_derivative(hf, h_x);
  const ActionQuadratic q = action_quadratic(h, dh, sol.ansatz);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.m);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = rcond * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
  for (int k = 0; k < ev.size(); ++k)
    if (ev[k] > cutoff) inv[k] = 1.0 / ev[k];
  const Eigen::MatrixXd& u = eig.eigenvectors();
  sol.theta = -(u * inv.asDiagonal() * u.transpose() * q.b);
  sol.action = q.value(sol.theta);
  return sol;
}

NCFirstOrderConstants nc_first_order_constants(const IsingHamiltonian& hf) {
  const int n = hf.n();
  NCFirstOrderConstants k;
  k.t_diag.assign(n, 0.0);
  std::vector<std::pair<std::uint64_t, double>> terms;
  for (const auto& [sites, j] : hf.terms()) {
    if (sites.empty() || j == 0.0) continue;
    std::uint64_t mask = 0;
    for (int s : sites) mask |= 1ULL << s;
    terms.push_back({mask, j});
    k.c[static_cast<int>(sites.size())] += j * j;
    for (int s : sites) k.t_diag[s] += j * j;
  }
  for (double t : k.t_diag) k.d[1] += t * t;
  // Pair sums over distinct couplings sharing site i, keyed by the symmetric
  // difference of their supports.
  for (int i = 0; i < n; ++i) {
    std::map<std::uint64_t, double> s;
    for (std::size_t a = 0; a < terms.size(); ++a) {
      if (!((terms[a].first >> i) & 1ULL)) continue;
      for (std::size_t b = a + 1; b < terms.size(); ++b) {
        if (!((terms[b].first >> i) & 1ULL)) continue;
        s[terms[a].first ^ terms[b].first] += terms[a].second * terms[b].second;
      }
    }
    for (const auto& [w, v] : s) k.d[std::popcount(w) + 1] += v * v;
  }
  return k;
}

double nc_alpha_closed_form(const IsingHamiltonian& hf, double h_x, double lambda) {
  const auto k = nc_first_order_constants(hf);
  double num = 0, sq = 0, pairs = 0, d_high = 0;
  for (const auto& [m, c] : k.c) {
    num += m * c;
    sq += m * m * c;
    pairs += m * (m - 1) / 2.0 * c;
  }
  for (const auto& [m, d] : k.d)
    if (m >= 2) d_high += d;
  const double a = (1 - lambda) * h_x;
  const double den = a * a * sq + 4 * a * a * pairs + lambda * lambda * k.d.at(1) + 4 * lambda * lambda * d_high;
  if (std::abs(den) < 1e-14) throw std::domain_error("nc_alpha_closed_form: degenerate Hamiltonian");
  return -0.25 * num / den;
}

}  // namespace dcqo
