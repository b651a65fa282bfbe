#include "dcqo/factoring.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>

namespace dcqo::factoring {

std::string Variable::name() const {
  switch (family) {
    case Family::p: return "p" + std::to_string(i);
    case Family::q: return "q" + std::to_string(i);
    case Family::z: return "z" + std::to_string(i) + "_" + std::to_string(j);
  }
  return "?";
}

long long Clause::constant() const {
  auto it = terms.find(Monomial{});
  return it == terms.end() ? 0 : it->second;
}

int ClauseSet::id_of(const Variable& v) const {
  auto it = std::find(variables.begin(), variables.end(), v);
  return it == variables.end() ? -1 : static_cast<int>(it - variables.begin());
}

std::vector<int> ClauseSet::free_variables() const {
  std::vector<int> out;
  for (int v = 0; v < static_cast<int>(variables.size()); ++v)
    if (!assignments.contains(v)) out.push_back(v);
  std::sort(out.begin(), out.end(), [&](int a, int b) { return variables[a] < variables[b]; });
  return out;
}

std::string ClauseSet::to_string(const Clause& c) const {
  std::ostringstream os;
  bool first = true;
  long long k = c.constant();
  for (const auto& [m, coef] : c.terms) {
    if (m.empty()) continue;
    long long a = first ? coef : std::llabs(coef);
    if (!first) os << (coef < 0 ? " - " : " + ");
    if (a == -1) os << "-";
    else if (a != 1) os << a << "*";
    for (std::size_t t = 0; t < m.size(); ++t) os << (t ? "*" : "") << variables[m[t]].name();
    first = false;
  }
  if (k != 0 || first) {
    if (first) os << k;
    else os << (k < 0 ? " - " : " + ") << std::llabs(k);
  }
  os << " = 0";
  return os.str();
}

namespace {

void canonicalize(Clause& c) {
  std::erase_if(c.terms, [](const auto& kv) { return kv.second == 0; });
}

void add_term(Clause& c, Monomial m, long long coef) {
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  c.terms[std::move(m)] += coef;
}

}  // namespace

long long evaluate(const Clause& c, const std::vector<int>& values) {
  long long s = 0;
  for (const auto& [m, coef] : c.terms) {
    long long prod = coef;
    for (int v : m) prod *= values.at(v);
    s += prod;
  }
  return s;
}

Clause substitute(const Clause& c, int var, const Assignment& a) {
  Clause out;
  for (const auto& [m, coef] : c.terms) {
    if (!std::binary_search(m.begin(), m.end(), var)) {
      add_term(out, m, coef);
      continue;
    }
    Monomial rest;
    for (int v : m)
      if (v != var) rest.push_back(v);
    if (a.constant != 0) add_term(out, rest, coef * a.constant);
    if (a.sign != 0) {
      Monomial with = rest;
      with.push_back(a.var);
      add_term(out, with, coef * a.sign);
    }
  }
  canonicalize(out);
  return out;
}

ClauseSet generate_clauses(std::uint64_t n, int n_p, int n_q) {
  if (n % 2 == 0) throw FactoringError("generate_clauses: N must be odd");
  if (n < 9) throw FactoringError("generate_clauses: N must be at least 9");
  if (n_p < 2 || n_q < 2) throw FactoringError("generate_clauses: bit lengths must be at least 2");
  const int len = std::bit_width(n);
  if (len < n_p + n_q - 1 || len > n_p + n_q)
    throw FactoringError("generate_clauses: bit lengths cannot produce N");

  ClauseSet cs;
  cs.n = n;
  cs.n_p = n_p;
  cs.n_q = n_q;
  for (int i = 1; i < n_p - 1; ++i) cs.variables.push_back({Family::p, i, 0});
  for (int i = 1; i < n_q - 1; ++i) cs.variables.push_back({Family::q, i, 0});

  // Returns -2 outside the register, -1 for a bit fixed to 1, else a var id.
  auto bit = [&](Family f, int i, int width) -> int {
    if (i < 0 || i >= width) return -2;
    if (i == 0 || i == width - 1) return -1;
    return cs.id_of({f, i, 0});
  };

  std::map<int, std::vector<int>> incoming;
  for (int col = 0; col < n_p + n_q; ++col) {
    Clause c;
    for (int a = 0; a <= col; ++a) {
      int pv = bit(Family::p, a, n_p), qv = bit(Family::q, col - a, n_q);
      if (pv == -2 || qv == -2) continue;
      Monomial m;
      if (pv >= 0) m.push_back(pv);
      if (qv >= 0) m.push_back(qv);
      add_term(c, m, 1);
    }
    for (int z : incoming[col]) add_term(c, {z}, 1);
    const long long target = static_cast<long long>((n >> col) & 1ULL);
    long long max_sum = -target;
    for (const auto& [m, coef] : c.terms) max_sum += coef;
    const int carries = max_sum > 0 ? std::bit_width(static_cast<std::uint64_t>(max_sum)) - 1 : 0;
    for (int k = 1; k <= carries; ++k) {
      if (col + k >= len) continue;
      cs.variables.push_back({Family::z, col, col + k});
      int id = static_cast<int>(cs.variables.size()) - 1;
      incoming[col + k].push_back(id);
      add_term(c, {id}, -(1LL << k));
    }
    add_term(c, {}, -target);
    canonicalize(c);
    cs.clauses.push_back(std::move(c));
  }
  return cs;
}

namespace {

using Subs = std::vector<std::pair<int, Assignment>>;

struct Firing {
  std::string rule;
  Subs subs;
};

constexpr Assignment kZero{0, 0, -1};
constexpr Assignment kOne{1, 0, -1};

struct Side {
  long long coef;
  Monomial m;
};

std::optional<Firing> apply_rules(const Clause& cl, const ClauseSet& cs, std::size_t idx) {
  const long long k = cl.constant();
  std::vector<Side> pos, neg;
  for (const auto& [m, coef] : cl.terms) {
    if (m.empty()) continue;
    if (coef > 0) pos.push_back({coef, m});
    else neg.push_back({-coef, m});
  }
  if (pos.empty() && neg.empty()) {
    if (k != 0) throw FactoringError("contradiction in clause " + std::to_string(idx) + ": " + cs.to_string(cl));
    return std::nullopt;
  }
  auto by_coef = [](const Side& a, const Side& b) { return a.coef < b.coef; };
  std::stable_sort(pos.begin(), pos.end(), by_coef);
  std::stable_sort(neg.begin(), neg.end(), by_coef);

  const long long c1 = std::max(k, 0LL), c2 = std::max(-k, 0LL);
  long long a_tot = c1, b_tot = c2;
  for (const auto& s : pos) a_tot += s.coef;
  for (const auto& s : neg) b_tot += s.coef;
  auto later = [&](int x, int y) { return cs.variables[x] < cs.variables[y] ? std::pair{x, y} : std::pair{y, x}; };

  Subs out;
  // 0 rule: a linear term heavier than everything the other side can reach.
  for (const auto& s : pos)
    if (s.coef > b_tot - c1 && s.m.size() == 1) out.push_back({s.m[0], kZero});
  for (const auto& s : neg)
    if (s.coef > a_tot - c2 && s.m.size() == 1) out.push_back({s.m[0], kZero});
  if (!out.empty()) return Firing{"zero", out};

  // 1 rule: the rest of a side cannot balance without this term.
  for (const auto& s : pos)
    if (a_tot - s.coef < c2)
      for (int v : s.m) out.push_back({v, kOne});
  for (const auto& s : neg)
    if (b_tot - s.coef < c1)
      for (int v : s.m) out.push_back({v, kOne});
  if (!out.empty()) return Firing{"one", out};

  // Compensate: exactly one of the two heaviest linear terms is set.
  auto compensate = [&](const std::vector<Side>& side, long long tot, long long other, long long own_c,
                        long long opp_c) -> std::optional<Firing> {
    if (side.size() < 2) return std::nullopt;
    const auto& top = side[side.size() - 1];
    const auto& next = side[side.size() - 2];
    if (top.m.size() != 1 || next.m.size() != 1) return std::nullopt;
    long long pair = top.coef + next.coef;
    if (pair > other - own_c && tot - pair < opp_c) {
      auto [x, y] = later(top.m[0], next.m[0]);
      return Firing{"compensate", {{y, Assignment{1, -1, x}}}};
    }
    return std::nullopt;
  };
  if (auto f = compensate(pos, a_tot, b_tot, c1, c2)) return f;
  if (auto f = compensate(neg, b_tot, a_tot, c2, c1)) return f;

  // Identical: one linear term balances every other linear term.
  if (a_tot == b_tot && k == 0) {
    for (const auto* side : {&pos, &neg}) {
      const auto& other = side == &pos ? neg : pos;
      if (side->size() == 1 && (*side)[0].m.size() == 1) {
        int f = (*side)[0].m[0];
        for (const auto& s : other)
          if (s.m.size() == 1) {
            auto [x, y] = later(f, s.m[0]);
            return Firing{"identical", {{y, Assignment{0, 1, x}}}};
          }
      }
    }
  }

  // Parity over odd-coefficient terms.
  std::vector<Monomial> odd;
  for (const auto& [m, coef] : cl.terms)
    if (!m.empty() && coef % 2 != 0) odd.push_back(m);
  const bool k_odd = k % 2 != 0;
  if (odd.size() == 1) {
    if (k_odd) {
      for (int v : odd[0]) out.push_back({v, kOne});
      return Firing{"parity1_odd", out};
    }
    if (odd[0].size() == 1) return Firing{"parity1_even", {{odd[0][0], kZero}}};
  }
  if (odd.size() == 2 && odd[0].size() == 1 && odd[1].size() == 1) {
    auto [x, y] = later(odd[0][0], odd[1][0]);
    if (k_odd) return Firing{"parity2_odd", {{y, Assignment{1, -1, x}}}};
    return Firing{"parity2_even", {{y, Assignment{0, 1, x}}}};
  }
  return std::nullopt;
}

Assignment compose(const Assignment& outer, int var, const Assignment& a) {
  if (outer.var != var) return outer;
  // outer = c + s * var, var = a.c + a.s * y
  return Assignment{outer.constant + outer.sign * a.constant, outer.sign * a.sign,
                    a.sign == 0 ? -1 : a.var};
}

}  // namespace

ClauseSet simplify(ClauseSet cs) {
  for (;;) {
    bool fired = false;
    for (std::size_t idx = 0; idx < cs.clauses.size(); ++idx) {
      auto f = apply_rules(cs.clauses[idx], cs, idx);
      if (!f) continue;
      RuleEvent ev{f->rule, idx, cs.clauses[idx], {}};
      for (const auto& [var, a] : f->subs) {
        if (cs.assignments.contains(var)) continue;
        ev.substitutions.push_back({var, a});
        for (auto& c : cs.clauses) c = substitute(c, var, a);
        for (auto& [v, prev] : cs.assignments) prev = compose(prev, var, a);
        cs.assignments[var] = a;
      }
      cs.trace.push_back(std::move(ev));
      fired = true;
      break;
    }
    for (std::size_t idx = 0; idx < cs.clauses.size(); ++idx) {
      const auto& c = cs.clauses[idx];
      if (c.terms.size() == 1 && c.constant() != 0)
        throw FactoringError("contradiction in clause " + std::to_string(idx) + ": " + cs.to_string(c));
    }
    std::erase_if(cs.clauses, [](const Clause& c) { return c.trivially_true(); });
    if (!fired) break;
  }
  return cs;
}

Compiled to_hamiltonian(const ClauseSet& cs) {
  Compiled out;
  out.var_order = cs.free_variables();
  const int n = static_cast<int>(out.var_order.size());
  if (n > 24) throw FactoringError("to_hamiltonian: more than 24 free variables");
  std::map<int, int> qubit;
  for (int k = 0; k < n; ++k) qubit[out.var_order[k]] = k;

  out.hamiltonian = IsingHamiltonian(n);
  std::map<std::uint64_t, double> acc;
  for (const auto& c : cs.clauses) {
    for (const auto& [m1, a] : c.terms)
      for (const auto& [m2, b] : c.terms) {
        std::uint64_t vars = 0;
        for (int v : m1) vars |= 1ULL << qubit.at(v);
        for (int v : m2) vars |= 1ULL << qubit.at(v);
        // prod_v (1 + Z_v) / 2 over the union of variables.
        const double w = static_cast<double>(a * b) / std::ldexp(1.0, std::popcount(vars));
        for (std::uint64_t sub = vars;; sub = (sub - 1) & vars) {
          acc[sub] += w;
          if (sub == 0) break;
        }
      }
  }
  for (const auto& [mask, j] : acc) {
    if (std::abs(j) < 1e-12) continue;
    Sites s;
    for (int q = 0; q < n; ++q)
      if ((mask >> q) & 1ULL) s.push_back(q);
    if (static_cast<int>(s.size()) > IsingHamiltonian::kMaxOrder)
      throw FactoringError("to_hamiltonian: interaction order above 4");
    out.hamiltonian.add_term(s, j);
  }
  return out;
}

Factors decode(SpinConfig c, const ClauseSet& cs, const std::vector<int>& var_order) {
  std::vector<int> value(cs.variables.size(), 0);
  for (std::size_t k = 0; k < var_order.size(); ++k) value[var_order[k]] = 1 - static_cast<int>((c >> k) & 1ULL);
  for (const auto& [v, a] : cs.assignments) value[v] = a.constant + (a.var >= 0 ? a.sign * value[a.var] : 0);

  auto assemble = [&](Family f, int width) {
    std::uint64_t x = 1ULL | (1ULL << (width - 1));
    for (int i = 1; i < width - 1; ++i)
      if (value[cs.id_of({f, i, 0})]) x |= 1ULL << i;
    return x;
  };
  return {assemble(Family::p, cs.n_p), assemble(Family::q, cs.n_q)};
}

nlohmann::json to_json(const ClauseSet& cs, const Compiled& compiled) {
  nlohmann::json j;
  j["N"] = cs.n;
  j["n_p"] = cs.n_p;
  j["n_q"] = cs.n_q;
  j["hamiltonian"] = compiled.hamiltonian;
  auto order = nlohmann::json::array();
  for (int v : compiled.var_order) order.push_back(cs.variables[v].name());
  j["var_order"] = order;
  nlohmann::json assigned = nlohmann::json::object();
  for (const auto& [v, a] : cs.assignments) {
    std::string expr = std::to_string(a.constant);
    if (a.var >= 0)
      expr = (a.constant ? std::to_string(a.constant) + (a.sign < 0 ? " - " : " + ") : (a.sign < 0 ? "-" : "")) +
             cs.variables[a.var].name();
    assigned[cs.variables[v].name()] = expr;
  }
  j["assignments"] = assigned;
  auto trace = nlohmann::json::array();
  for (const auto& ev : cs.trace) {
    nlohmann::json subs = nlohmann::json::object();
    for (const auto& [v, a] : ev.substitutions)
      subs[cs.variables[v].name()] = a.var >= 0 ? (a.constant ? "1 - " : "") + cs.variables[a.var].name()
                                                : std::to_string(a.constant);
    trace.push_back({{"rule", ev.rule}, {"clause", cs.to_string(ev.clause)}, {"set", subs}});
  }
  j["clause_trace"] = trace;
  auto remaining = nlohmann::json::array();
  for (const auto& c : cs.clauses) remaining.push_back(cs.to_string(c));
  j["clauses"] = remaining;
  return j;
}

}  // namespace dcqo::factoring
