#include "dcqo/ising.hpp"

#include <stdexcept>
#include <string>

namespace dcqo {

namespace {

// Reduced factoring instances: 1261 (5 spins), 767 (9 spins), 9983 (12 spins).
IsingHamiltonian make_h5q() {
  IsingHamiltonian h(5);
  h.add_term({}, 23.0 / 4);
  h.add_term({0}, -5.0 / 4);
  h.add_term({1}, -1.0 / 4);
  h.add_term({2}, -5.0 / 4);
  h.add_term({3}, 1.0 / 2);
  h.add_term({4}, 1.0);
  h.add_term({0, 1}, -1.0 / 4);
  h.add_term({0, 2}, 3.0 / 4);
  h.add_term({0, 3}, -3.0 / 4);
  h.add_term({0, 4}, -1.0);
  h.add_term({1, 2}, -1.0 / 4);
  h.add_term({1, 3}, 5.0 / 4);
  h.add_term({2, 3}, -1.0);
  h.add_term({3, 4}, -1.0);
  h.add_term({0, 1, 2}, 1.0 / 4);
  h.add_term({0, 2, 3}, -1.0 / 4);
  h.add_term({1, 2, 3}, 1.0 / 4);
  h.add_term({1, 2, 4}, -1.0 / 2);
  return h;
}

IsingHamiltonian make_h9q() {
  IsingHamiltonian h(9);
  h.add_term({}, 121.0 / 8);
  h.add_term({0}, 5.0 / 8);
  h.add_term({1}, 1.0 / 8);
  h.add_term({2}, -11.0 / 8);
  h.add_term({3}, -15.0 / 8);
  h.add_term({4}, -1.0 / 4);
  h.add_term({5}, -1.0);
  h.add_term({6}, 11.0 / 4);
  h.add_term({7}, 5.0);
  h.add_term({8}, -1.0 / 2);
  h.add_term({0, 1}, 1.0 / 8);
  h.add_term({0, 2}, -3.0 / 8);
  h.add_term({0, 3}, 5.0 / 8);
  h.add_term({0, 4}, 1.0 / 4);
  h.add_term({0, 5}, -3.0 / 4);
  h.add_term({0, 7}, 1.0);
  h.add_term({0, 8}, 1.0);
  h.add_term({1, 2}, 5.0 / 8);
  h.add_term({1, 3}, -3.0 / 8);
  h.add_term({1, 5}, 1.0 / 4);
  h.add_term({1, 6}, -3.0 / 4);
  h.add_term({1, 7}, -3.0 / 2);
  h.add_term({2, 3}, 5.0 / 8);
  h.add_term({2, 4}, -3.0 / 4);
  h.add_term({2, 5}, -1.0 / 4);
  h.add_term({2, 7}, -1.0);
  h.add_term({2, 8}, -1.0);
  h.add_term({3, 4}, 1.0 / 2);
  h.add_term({3, 5}, -3.0 / 4);
  h.add_term({3, 6}, -1.0 / 4);
  h.add_term({3, 7}, -1.0 / 2);
  h.add_term({4, 5}, -1.0);
  h.add_term({5, 6}, -1.0);
  h.add_term({5, 7}, -2.0);
  h.add_term({6, 7}, 4.0);
  h.add_term({6, 8}, -1.0);
  h.add_term({7, 8}, 1.0 / 2);
  h.add_term({0, 1, 2}, -3.0 / 8);
  h.add_term({0, 1, 3}, 1.0 / 8);
  h.add_term({0, 1, 4}, 1.0);
  h.add_term({0, 2, 3}, -3.0 / 8);
  h.add_term({0, 2, 4}, -1.0 / 4);
  h.add_term({0, 2, 5}, 1.0 / 2);
  h.add_term({0, 3, 5}, -1.0 / 4);
  h.add_term({0, 3, 6}, 1.0 / 2);
  h.add_term({0, 3, 7}, 1.0);
  h.add_term({1, 2, 3}, -3.0 / 8);
  h.add_term({1, 2, 5}, -1.0 / 4);
  h.add_term({1, 2, 6}, 1.0 / 2);
  h.add_term({1, 2, 7}, 1.0);
  h.add_term({1, 3, 6}, -1.0 / 4);
  h.add_term({1, 3, 8}, 1.0 / 2);
  h.add_term({0, 1, 2, 3}, 1.0 / 8);
  return h;
}

IsingHamiltonian make_h12q() {
  IsingHamiltonian h(12);
  h.add_term({}, 117.0 / 8);
  h.add_term({1}, -7.0 / 8);
  h.add_term({2}, -1.0 / 4);
  h.add_term({3}, -3.0 / 2);
  h.add_term({4}, 1.0 / 8);
  h.add_term({5}, 1.0 / 2);
  h.add_term({6}, 1.0 / 4);
  h.add_term({7}, 3.0 / 2);
  h.add_term({8}, 1.0 / 4);
  h.add_term({10}, -3.0 / 2);
  h.add_term({11}, 3.0 / 2);
  h.add_term({0, 2}, 1.0 / 8);
  h.add_term({0, 3}, -1.0 / 8);
  h.add_term({0, 4}, -1.0 / 2);
  h.add_term({0, 6}, 1.0 / 4);
  h.add_term({0, 7}, -1.0 / 2);
  h.add_term({0, 8}, -1.0 / 2);
  h.add_term({0, 9}, 3.0 / 2);
  h.add_term({0, 10}, -1.0);
  h.add_term({1, 2}, 1.0 / 2);
  h.add_term({1, 3}, 1.0 / 4);
  h.add_term({1, 4}, 1.0 / 8);
  h.add_term({1, 7}, 1.0 / 4);
  h.add_term({1, 8}, -1.0 / 2);
  h.add_term({1, 9}, -1.0 / 2);
  h.add_term({1, 10}, 3.0 / 2);
  h.add_term({1, 11}, -1.0);
  h.add_term({2, 3}, 5.0 / 8);
  h.add_term({2, 4}, 5.0 / 4);
  h.add_term({2, 5}, -3.0 / 4);
  h.add_term({2, 6}, -1.0 / 4);
  h.add_term({2, 7}, -1.0 / 4);
  h.add_term({2, 8}, -1.0 / 4);
  h.add_term({2, 9}, -1.0 / 2);
  h.add_term({2, 11}, 1.0 / 2);
  h.add_term({3, 4}, 1.0 / 2);
  h.add_term({3, 5}, -3.0 / 4);
  h.add_term({3, 6}, -1.0 / 4);
  h.add_term({3, 7}, -1.0 / 4);
  h.add_term({3, 8}, -1.0 / 2);
  h.add_term({3, 10}, 1.0 / 2);
  h.add_term({3, 11}, -1.0);
  h.add_term({4, 5}, 1.0 / 2);
  h.add_term({4, 6}, -3.0 / 4);
  h.add_term({4, 7}, -1.0 / 4);
  h.add_term({4, 8}, -1.0 / 4);
  h.add_term({4, 9}, -1.0 / 2);
  h.add_term({4, 11}, 1.0 / 2);
  h.add_term({5, 6}, -1.0);
  h.add_term({6, 7}, -1.0);
  h.add_term({7, 8}, -1.0);
  h.add_term({8, 9}, -1.0);
  h.add_term({9, 10}, -1.0);
  h.add_term({10, 11}, -1.0);
  h.add_term({0, 1, 2}, -5.0 / 8);
  h.add_term({0, 1, 3}, -3.0 / 8);
  h.add_term({0, 1, 5}, 1.0);
  h.add_term({0, 2, 4}, -3.0 / 8);
  h.add_term({0, 2, 5}, -1.0 / 4);
  h.add_term({0, 2, 6}, 1.0 / 2);
  h.add_term({0, 3, 4}, 3.0 / 8);
  h.add_term({0, 3, 5}, 1.0 / 4);
  h.add_term({0, 3, 6}, -1.0 / 2);
  h.add_term({0, 4, 6}, 1.0 / 4);
  h.add_term({0, 4, 7}, -1.0 / 2);
  h.add_term({1, 2, 3}, 1.0 / 8);
  h.add_term({1, 2, 6}, -1.0 / 4);
  h.add_term({1, 2, 7}, 1.0 / 2);
  h.add_term({1, 3, 4}, 1.0 / 4);
  h.add_term({1, 3, 6}, 1.0 / 4);
  h.add_term({1, 3, 7}, -1.0 / 2);
  h.add_term({1, 4, 7}, 1.0 / 4);
  h.add_term({1, 4, 8}, -1.0 / 2);
  h.add_term({2, 3, 4}, 1.0 / 8);
  h.add_term({2, 3, 7}, 1.0 / 4);
  h.add_term({2, 3, 8}, -1.0 / 2);
  h.add_term({2, 4, 8}, 1.0 / 4);
  h.add_term({2, 4, 9}, -1.0 / 2);
  h.add_term({0, 1, 2, 4}, -1.0 / 8);
  h.add_term({0, 1, 3, 4}, 1.0 / 8);
  h.add_term({1, 2, 3, 4}, 1.0 / 8);
  return h;
}

}  // namespace

IsingHamiltonian builtin(std::string_view name) {
  if (name == "H5q") return make_h5q();
  if (name == "H9q") return make_h9q();
  if (name == "H12q") return make_h12q();
  throw std::invalid_argument("builtin: unknown instance " + std::string(name));
}

}  // namespace dcqo
