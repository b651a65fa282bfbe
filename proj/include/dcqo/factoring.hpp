#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dcqo/ising.hpp"

namespace dcqo::factoring {

enum class Family { p, q, z };

// p_i / q_i is the coefficient of 2^i in the factor; z_{i,j} carries from
// column i into column j.
struct Variable {
  Family family;
  int i = 0;
  int j = 0;

  std::string name() const;
  auto operator<=>(const Variable&) const = default;
};

// Sorted variable ids; the empty monomial is the constant term.
using Monomial = std::vector<int>;

struct Clause {
  std::map<Monomial, long long> terms;

  long long constant() const;
  bool trivially_true() const { return terms.empty(); }
  bool operator==(const Clause&) const = default;
};

// value = constant + sign * var, with var == -1 for a fixed bit.
struct Assignment {
  int constant = 0;
  int sign = 0;
  int var = -1;
  bool operator==(const Assignment&) const = default;
};

struct RuleEvent {
  std::string rule;
  std::size_t clause_index;
  Clause clause;
  std::vector<std::pair<int, Assignment>> substitutions;
};

struct ClauseSet {
  std::uint64_t n = 0;
  int n_p = 0;
  int n_q = 0;
  std::vector<Variable> variables;
  std::vector<Clause> clauses;
  std::map<int, Assignment> assignments;
  std::vector<RuleEvent> trace;

  int id_of(const Variable& v) const;
  std::vector<int> free_variables() const;
  std::string to_string(const Clause& c) const;
};

class FactoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ClauseSet generate_clauses(std::uint64_t n, int n_p, int n_q);
// Iterates weight and parity rules to a fixpoint. Throws FactoringError on
// contradiction.
ClauseSet simplify(ClauseSet cs);

struct Compiled {
  IsingHamiltonian hamiltonian;
  std::vector<int> var_order;  // qubit k <-> variable var_order[k]
};

Compiled to_hamiltonian(const ClauseSet& cs);

struct Factors {
  std::uint64_t p;
  std::uint64_t q;
};

// Qubit value x = 1 - b (x = (1 + sigma_z) / 2 with b = 0 <-> sigma_z = +1).
Factors decode(SpinConfig c, const ClauseSet& cs, const std::vector<int>& var_order);

// Rule helpers, exposed for property tests.
long long evaluate(const Clause& c, const std::vector<int>& values);
Clause substitute(const Clause& c, int var, const Assignment& a);

nlohmann::json to_json(const ClauseSet& cs, const Compiled& compiled);

}  // namespace dcqo::factoring
