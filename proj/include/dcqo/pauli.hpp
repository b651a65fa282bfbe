#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace dcqo {

using cplx = std::complex<double>;

// Symplectic Pauli string. Qubit i carries X^{x_i} Z^{z_i}; a qubit with both
// bits set is read as Y, so the operator is i^{popcount(x&z)} X^x Z^z.
struct PauliString {
  int n = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  PauliString() = default;
  PauliString(int n_qubits, std::uint64_t x_mask, std::uint64_t z_mask);

  static PauliString identity(int n) { return PauliString(n, 0, 0); }
  static PauliString single(int n, int qubit, char op);
  // Label is written qubit 0 first, e.g. "XYIZ" has X on qubit 0.
  static PauliString from_label(std::string_view label);

  std::string label() const;
  char op_at(int qubit) const;
  int weight() const;
  std::uint64_t support() const { return x | z; }
  bool is_identity() const { return (x | z) == 0; }

  auto operator<=>(const PauliString&) const = default;
};

struct PauliProduct {
  cplx phase;
  PauliString string;
};

PauliProduct pauli_mul(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

// Action on a computational basis state: P|b> = phase |b ^ x>.
cplx basis_phase(const PauliString& p, std::uint64_t basis);

class PauliSum {
 public:
  static constexpr double kDefaultPrune = 1e-12;

  PauliSum() = default;
  explicit PauliSum(int n, double prune_tol = kDefaultPrune) : n_(n), prune_tol_(prune_tol) {}
  PauliSum(const PauliString& p, cplx c);

  int n() const { return n_; }
  double prune_tolerance() const { return prune_tol_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::map<PauliString, cplx>& terms() const { return terms_; }

  cplx coefficient(const PauliString& p) const;
  void add(const PauliString& p, cplx c);
  void prune();
  bool is_hermitian(double tol = 1e-12) const;

  PauliSum& operator+=(const PauliSum& o);
  PauliSum& operator-=(const PauliSum& o);
  PauliSum& operator*=(cplx s);

 private:
  int n_ = 0;
  double prune_tol_ = kDefaultPrune;
  std::map<PauliString, cplx> terms_;
};

PauliSum operator+(PauliSum a, const PauliSum& b);
PauliSum operator-(PauliSum a, const PauliSum& b);
PauliSum operator*(PauliSum a, cplx s);
PauliSum operator*(cplx s, PauliSum a);
PauliSum operator*(const PauliSum& a, const PauliSum& b);

PauliSum commutator(const PauliSum& a, const PauliSum& b);
cplx trace_inner(const PauliSum& a, const PauliSum& b);
// (2*depth - 1)-fold nested commutator [H, [H, ..., [H, dh]]].
PauliSum nested_commutator(const PauliSum& h, const PauliSum& dh, int depth);

// Dense matrices, basis index bit i = qubit i. Intended for small oracles.
Eigen::MatrixXcd to_dense(const PauliString& p);
Eigen::MatrixXcd to_dense(const PauliSum& s);

}  // namespace dcqo
