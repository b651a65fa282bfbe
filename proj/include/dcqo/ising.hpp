#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dcqo/pauli.hpp"

namespace dcqo {

// Basis index: bit i is qubit i, b_i = 0 means sigma_z = +1, so s_i = 1 - 2 b_i.
using SpinConfig = std::uint64_t;

inline int spin(SpinConfig c, int i) { return 1 - 2 * static_cast<int>((c >> i) & 1ULL); }

using Sites = std::vector<int>;

class IsingHamiltonian {
 public:
  static constexpr int kMaxOrder = 4;

  IsingHamiltonian() = default;
  explicit IsingHamiltonian(int n);

  int n() const { return n_; }
  const std::map<Sites, double>& terms() const { return terms_; }

  // Accumulates J onto the (sorted, deduplicated-checked) site tuple.
  void add_term(Sites sites, double j);
  double coefficient(Sites sites) const;
  int max_order() const;

  double constant() const { return coefficient({}); }

 private:
  int n_ = 0;
  std::map<Sites, double> terms_;
};

enum class Normalization { unit_variance, size_scaled };

IsingHamiltonian random_pspin(int n, int p, std::uint64_t seed,
                              Normalization norm = Normalization::unit_variance);

// "H5q", "H9q" or "H12q".
IsingHamiltonian builtin(std::string_view name);

double energy(const IsingHamiltonian& h, SpinConfig c);
// All 2^n diagonal energies, index = basis index.
std::vector<double> diagonal(const IsingHamiltonian& h);

struct GroundStates {
  double e_min;
  std::vector<SpinConfig> configs;
};

GroundStates brute_force_ground(const IsingHamiltonian& h, double tie_tol = 1e-9);

PauliSum to_pauli_sum(const IsingHamiltonian& h);

void to_json(nlohmann::json& j, const IsingHamiltonian& h);
void from_json(const nlohmann::json& j, IsingHamiltonian& h);

}  // namespace dcqo
