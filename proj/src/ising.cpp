#include "dcqo/ising.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace dcqo {

IsingHamiltonian::IsingHamiltonian(int n) : n_(n) {
  if (n < 0 || n > 63) throw std::invalid_argument("ising: qubit count out of range");
}

void IsingHamiltonian::add_term(Sites sites, double j) {
  std::sort(sites.begin(), sites.end());
  if (std::adjacent_find(sites.begin(), sites.end()) != sites.end())
    throw std::invalid_argument("ising: repeated site in term");
  if (static_cast<int>(sites.size()) > kMaxOrder)
    throw std::invalid_argument("ising: interaction order above 4");
  for (int s : sites)
    if (s < 0 || s >= n_) throw std::invalid_argument("ising: site index out of range");
  terms_[std::move(sites)] += j;
}

double IsingHamiltonian::coefficient(Sites sites) const {
  std::sort(sites.begin(), sites.end());
  auto it = terms_.find(sites);
  return it == terms_.end() ? 0.0 : it->second;
}

int IsingHamiltonian::max_order() const {
  int m = 0;
  for (const auto& [s, j] : terms_)
    if (j != 0.0) m = std::max(m, static_cast<int>(s.size()));
  return m;
}

namespace {

void combinations(int n, int k, int start, Sites& cur, const auto& visit) {
  if (static_cast<int>(cur.size()) == k) {
    visit(cur);
    return;
  }
  for (int i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, i + 1, cur, visit);
    cur.pop_back();
  }
}

std::uint64_t site_mask(const Sites& s) {
  std::uint64_t m = 0;
  for (int i : s) m |= 1ULL << i;
  return m;
}

}  // namespace

IsingHamiltonian random_pspin(int n, int p, std::uint64_t seed, Normalization norm) {
  if (p < 1 || p > IsingHamiltonian::kMaxOrder) throw std::invalid_argument("random_pspin: p out of range");
  if (n < p) throw std::invalid_argument("random_pspin: need n >= p");
  IsingHamiltonian h(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 1; k <= p; ++k) {
    double scale = norm == Normalization::size_scaled ? std::pow(n, -(k - 1) / 2.0) : 1.0;
    Sites cur;
    combinations(n, k, 0, cur, [&](const Sites& s) { h.add_term(s, scale * gauss(rng)); });
  }
  return h;
}

double energy(const IsingHamiltonian& h, SpinConfig c) {
  if (h.n() < 64 && (c >> h.n()) != 0) throw std::invalid_argument("energy: config wider than n");
  double e = 0;
  for (const auto& [s, j] : h.terms()) {
    int parity = std::popcount(c & site_mask(s)) & 1;
    e += parity ? -j : j;
  }
  return e;
}

std::vector<double> diagonal(const IsingHamiltonian& h) {
  if (h.n() > 30) throw std::invalid_argument("diagonal: too many qubits");
  const std::size_t dim = std::size_t{1} << h.n();
  std::vector<double> d(dim, 0.0);
  for (const auto& [s, j] : h.terms()) {
    const std::uint64_t m = site_mask(s);
    for (std::size_t b = 0; b < dim; ++b) d[b] += (std::popcount(b & m) & 1) ? -j : j;
  }
  return d;
}

GroundStates brute_force_ground(const IsingHamiltonian& h, double tie_tol) {
  if (h.n() > 24) throw std::invalid_argument("brute_force_ground: n above 24");
  auto d = diagonal(h);
  double e_min = *std::min_element(d.begin(), d.end());
  GroundStates g{e_min, {}};
  for (std::size_t b = 0; b < d.size(); ++b)
    if (d[b] - e_min <= tie_tol) g.configs.push_back(b);
  return g;
}

PauliSum to_pauli_sum(const IsingHamiltonian& h) {
  PauliSum s(h.n());
  for (const auto& [sites, j] : h.terms()) s.add(PauliString(h.n(), 0, site_mask(sites)), j);
  return s;
}

void to_json(nlohmann::json& j, const IsingHamiltonian& h) {
  auto terms = nlohmann::json::array();
  for (const auto& [s, c] : h.terms()) terms.push_back({{"sites", s}, {"J", c}});
  j = {{"n", h.n()}, {"terms", terms}};
}

void from_json(const nlohmann::json& j, IsingHamiltonian& h) {
  h = IsingHamiltonian(j.at("n").get<int>());
  for (const auto& t : j.at("terms")) h.add_term(t.at("sites").get<Sites>(), t.at("J").get<double>());
}

}  // namespace dcqo
