#include "dcqo/pauli.hpp"

#include <bit>
#include <stdexcept>

namespace dcqo {

namespace {

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

cplx i_pow(int k) { return kIPow[((k % 4) + 4) % 4]; }

std::uint64_t mask_for(int n) { return n >= 64 ? ~0ULL : ((1ULL << n) - 1); }

void check_same(int a, int b) {
  if (a != b) throw std::invalid_argument("pauli: qubit count mismatch");
}

}  // namespace

PauliString::PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask)
    : n(n_qubits), x(x_mask), z(z_mask) {
  if (n < 0 || n > 64) throw std::invalid_argument("pauli: qubit count out of range");
  if ((x | z) & ~mask_for(n)) throw std::invalid_argument("pauli: mask bit beyond n");
}

PauliString PauliString::single(int n, int qubit, char op) {
  if (qubit < 0 || qubit >= n) throw std::invalid_argument("pauli: qubit index out of range");
  std::uint64_t b = 1ULL << qubit;
  switch (op) {
    case 'I': return PauliString(n, 0, 0);
    case 'X': return PauliString(n, b, 0);
    case 'Y': return PauliString(n, b, b);
    case 'Z': return PauliString(n, 0, b);
  }
  throw std::invalid_argument("pauli: unknown operator");
}

PauliString PauliString::from_label(std::string_view label) {
  int n = static_cast<int>(label.size());
  std::uint64_t x = 0, z = 0;
  for (int i = 0; i < n; ++i) {
    std::uint64_t b = 1ULL << i;
    switch (label[i]) {
      case 'I': break;
      case 'X': x |= b; break;
      case 'Y': x |= b; z |= b; break;
      case 'Z': z |= b; break;
      default: throw std::invalid_argument("pauli: bad label character");
    }
  }
  return PauliString(n, x, z);
}

char PauliString::op_at(int q) const {
  bool xb = (x >> q) & 1ULL, zb = (z >> q) & 1ULL;
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

std::string PauliString::label() const {
  std::string s(n, 'I');
  for (int i = 0; i < n; ++i) s[i] = op_at(i);
  return s;
}

int PauliString::weight() const { return std::popcount(x | z); }

PauliProduct pauli_mul(const PauliString& a, const PauliString& b) {
  check_same(a.n, b.n);
  PauliString c(a.n, a.x ^ b.x, a.z ^ b.z);
  int k = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) +
          2 * std::popcount(a.z & b.x) - std::popcount(c.x & c.z);
  return {i_pow(k), c};
}

bool commutes(const PauliString& a, const PauliString& b) {
  check_same(a.n, b.n);
  return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

cplx basis_phase(const PauliString& p, std::uint64_t basis) {
  int k = std::popcount(p.x & p.z) + 2 * std::popcount(basis & p.z);
  return i_pow(k);
}

PauliSum::PauliSum(const PauliString& p, cplx c) : n_(p.n) { add(p, c); }

cplx PauliSum::coefficient(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? cplx(0) : it->second;
}

void PauliSum::add(const PauliString& p, cplx c) {
  check_same(n_, p.n);
  auto [it, inserted] = terms_.try_emplace(p, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < prune_tol_) terms_.erase(it);
}

void PauliSum::prune() {
  std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) < prune_tol_; });
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& [p, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  check_same(n_, o.n_);
  for (const auto& [p, c] : o.terms_) add(p, c);
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& o) {
  check_same(n_, o.n_);
  for (const auto& [p, c] : o.terms_) add(p, -c);
  return *this;
}

PauliSum& PauliSum::operator*=(cplx s) {
  for (auto& [p, c] : terms_) c *= s;
  prune();
  return *this;
}

PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

PauliSum operator*(const PauliSum& a, const PauliSum& b) {
  check_same(a.n(), b.n());
  std::map<PauliString, cplx> acc;
  for (const auto& [pa, ca] : a.terms())
    for (const auto& [pb, cb] : b.terms()) {
      auto [ph, pc] = pauli_mul(pa, pb);
      acc[pc] += ph * ca * cb;
    }
  PauliSum out(a.n(), a.prune_tolerance());
  for (const auto& [p, c] : acc) out.add(p, c);
  return out;
}

PauliSum commutator(const PauliSum& a, const PauliSum& b) {
  check_same(a.n(), b.n());
  std::map<PauliString, cplx> acc;
  for (const auto& [pa, ca] : a.terms())
    for (const auto& [pb, cb] : b.terms()) {
      if (commutes(pa, pb)) continue;
      // Anticommuting strings: AB - BA = 2AB.
      auto [ph, pc] = pauli_mul(pa, pb);
      acc[pc] += 2.0 * ph * ca * cb;
    }
  PauliSum out(a.n(), a.prune_tolerance());
  for (const auto& [p, c] : acc) out.add(p, c);
  return out;
}

cplx trace_inner(const PauliSum& a, const PauliSum& b) {
  check_same(a.n(), b.n());
  cplx s = 0;
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [p, c] : small.terms()) {
    cplx d = large.coefficient(p);
    if (d != cplx(0)) s += c * d;
  }
  return std::ldexp(1.0, a.n()) * s;
}

PauliSum nested_commutator(const PauliSum& h, const PauliSum& dh, int depth) {
  check_same(h.n(), dh.n());
  if (depth < 1) throw std::invalid_argument("nested_commutator: depth must be positive");
  PauliSum acc = dh;
  for (int k = 0; k < 2 * depth - 1; ++k) acc = commutator(h, acc);
  return acc;
}

Eigen::MatrixXcd to_dense(const PauliString& p) {
  if (p.n > 14) throw std::invalid_argument("to_dense: too many qubits");
  const std::size_t dim = std::size_t{1} << p.n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t b = 0; b < dim; ++b) m(b ^ p.x, b) = basis_phase(p, b);
  return m;
}

Eigen::MatrixXcd to_dense(const PauliSum& s) {
  if (s.n() > 14) throw std::invalid_argument("to_dense: too many qubits");
  const std::size_t dim = std::size_t{1} << s.n();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : s.terms())
    for (std::size_t b = 0; b < dim; ++b) m(b ^ p.x, b) += c * basis_phase(p, b);
  return m;
}

}  // namespace dcqo
