#include "dcqo/transpiler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

namespace dcqo {

namespace {

using LogicalPair = std::pair<int, int>;

LogicalPair ordered(int a, int b) { return a < b ? LogicalPair{a, b} : LogicalPair{b, a}; }

// k-th layer of the periodic swap pattern.
SwapLayer alt_layer(int rows, int cols, int k) {
  const int period = cols + (rows > 2 ? 1 : 0);
  const int block = k / period, t = k % period;
  SwapLayer layer;
  if (t < cols) {
    for (int r = 0; r < rows; ++r)
      for (int c = (t + r) % 2; c + 1 < cols; c += 2) layer.emplace_back(r * cols + c, r * cols + c + 1);
  } else {
    for (int r = block % 2; r + 1 < rows; r += 2)
      for (int c = 0; c < cols; ++c) layer.emplace_back(r * cols + c, (r + 1) * cols + c);
  }
  return layer;
}

int layer_limit(const Grid& g) { return 4 * g.slots() + 16; }

// slot -> logical id; ancillas get ids q, q+1, ...
std::vector<int> initial_occupancy(const Grid& g) {
  std::vector<int> pos(g.slots(), -1);
  for (int l = 0; l < g.q; ++l) pos[g.placement[l]] = l;
  int next = g.q;
  for (auto& p : pos)
    if (p < 0) p = next++;
  return pos;
}

void apply_swaps(std::vector<int>& pos, const SwapLayer& layer) {
  for (auto [a, b] : layer) std::swap(pos[a], pos[b]);
}

std::set<LogicalPair> adjacent_logical(const Grid& g, const std::vector<int>& pos) {
  std::set<LogicalPair> out;
  for (auto [a, b] : g.edges())
    if (pos[a] < g.q && pos[b] < g.q) out.insert(ordered(pos[a], pos[b]));
  return out;
}

std::vector<std::vector<std::pair<int, int>>> greedy_matchings(const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::set<int>> used;
  for (const auto& e : edges) {
    bool placed = false;
    for (std::size_t k = 0; k < out.size() && !placed; ++k) {
      if (used[k].contains(e.first) || used[k].contains(e.second)) continue;
      out[k].push_back(e);
      used[k].insert({e.first, e.second});
      placed = true;
    }
    if (!placed) {
      out.push_back({e});
      used.push_back({e.first, e.second});
    }
  }
  return out;
}

using Mat2 = Eigen::Matrix2cd;

Mat2 single_matrix(const NativeGate& g) {
  const double h = std::numbers::sqrt2 / 2;
  const cplx i(0, 1);
  Mat2 m;
  switch (g.kind) {
    case NativeKind::x2p: m << h, -i * h, -i * h, h; break;
    case NativeKind::x2m: m << h, i * h, i * h, h; break;
    case NativeKind::y2p: m << h, -h, h, h; break;
    case NativeKind::y2m: m << h, h, -h, h; break;
    case NativeKind::rz: m << std::polar(1.0, -g.angle / 2), 0, 0, std::polar(1.0, g.angle / 2); break;
    case NativeKind::cz: throw std::logic_error("single_matrix: CZ");
  }
  return m;
}

void apply_native(std::vector<cplx>& amp, const NativeGate& g) {
  if (g.kind == NativeKind::cz) {
    const std::size_t mask = (std::size_t{1} << g.q0) | (std::size_t{1} << g.q1);
    for (std::size_t b = 0; b < amp.size(); ++b)
      if ((b & mask) == mask) amp[b] = -amp[b];
    return;
  }
  const Mat2 m = single_matrix(g);
  const std::size_t bit = std::size_t{1} << g.q0;
  for (std::size_t b = 0; b < amp.size(); ++b) {
    if (b & bit) continue;
    const cplx u = amp[b], v = amp[b | bit];
    amp[b] = m(0, 0) * u + m(0, 1) * v;
    amp[b | bit] = m(1, 0) * u + m(1, 1) * v;
  }
}

bool inverse_pair(const NativeGate& a, const NativeGate& b) {
  using K = NativeKind;
  return (a.kind == K::x2p && b.kind == K::x2m) || (a.kind == K::x2m && b.kind == K::x2p) ||
         (a.kind == K::y2p && b.kind == K::y2m) || (a.kind == K::y2m && b.kind == K::y2p);
}

// Cancels adjacent inverse pairs and back-to-back CZs, and fuses adjacent RZs.
std::vector<NativeGate> peephole(const std::vector<NativeGate>& in, int n_slots) {
  std::vector<NativeGate> out;
  std::vector<bool> alive;
  std::vector<std::vector<int>> last(n_slots);
  for (const auto& g : in) {
    if (g.kind == NativeKind::cz) {
      auto& la = last[g.q0];
      auto& lb = last[g.q1];
      if (!la.empty() && !lb.empty() && la.back() == lb.back() && out[la.back()].kind == NativeKind::cz) {
        alive[la.back()] = false;
        la.pop_back();
        lb.pop_back();
        continue;
      }
      out.push_back(g);
      alive.push_back(true);
      la.push_back(static_cast<int>(out.size()) - 1);
      lb.push_back(static_cast<int>(out.size()) - 1);
      continue;
    }
    auto& lq = last[g.q0];
    if (!lq.empty()) {
      NativeGate& prev = out[lq.back()];
      if (prev.kind != NativeKind::cz) {
        if (inverse_pair(prev, g)) {
          alive[lq.back()] = false;
          lq.pop_back();
          continue;
        }
        if (prev.kind == NativeKind::rz && g.kind == NativeKind::rz) {
          prev.angle += g.angle;
          continue;
        }
      }
    }
    out.push_back(g);
    alive.push_back(true);
    lq.push_back(static_cast<int>(out.size()) - 1);
  }
  std::vector<NativeGate> kept;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (alive[k] && !(out[k].kind == NativeKind::rz && out[k].angle == 0.0)) kept.push_back(out[k]);
  return kept;
}

// CZ gates go to the earliest CZ layer their qubits allow. The single-qubit
// chain between two CZs of a qubit may spread over every gap between those
// layers.
std::vector<GateLayer> schedule_layers(const std::vector<NativeGate>& seq, int n_slots) {
  std::vector<int> cz_layer(seq.size(), -1);
  std::vector<int> last_cz(n_slots, -1);
  int n_cz = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto& g = seq[k];
    if (g.kind != NativeKind::cz) continue;
    const int l = std::max(last_cz[g.q0], last_cz[g.q1]) + 1;
    cz_layer[k] = last_cz[g.q0] = last_cz[g.q1] = l;
    n_cz = std::max(n_cz, l + 1);
  }

  // Gap g sits before CZ layer g; gap n_cz follows the last one.
  struct Chain {
    int qubit, first_gap, last_gap;
    std::vector<std::size_t> gates;
  };
  std::vector<Chain> chains;
  std::vector<int> open(n_slots, -1);
  std::vector<int> prev_cz(n_slots, -1);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const auto& g = seq[k];
    if (g.kind == NativeKind::cz) {
      for (int q : {g.q0, g.q1}) {
        if (open[q] >= 0) chains[open[q]].last_gap = cz_layer[k];
        open[q] = -1;
        prev_cz[q] = cz_layer[k];
      }
      continue;
    }
    if (open[g.q0] < 0) {
      open[g.q0] = static_cast<int>(chains.size());
      chains.push_back({g.q0, prev_cz[g.q0] + 1, n_cz, {}});
    }
    chains[open[g.q0]].gates.push_back(k);
  }

  // Gap by gap: the width is set by chains whose last chance is this gap; every
  // other open chain rides along in the same rows.
  std::vector<int> width(n_cz + 1, 0);
  std::vector<std::vector<std::pair<int, std::size_t>>> placed(n_cz + 1);  // (row in gap, gate)
  std::vector<std::size_t> done(chains.size(), 0);
  for (int gap = 0; gap <= n_cz; ++gap) {
    for (std::size_t c = 0; c < chains.size(); ++c)
      if (chains[c].last_gap == gap) width[gap] = std::max(width[gap], static_cast<int>(chains[c].gates.size() - done[c]));
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto& ch = chains[c];
      if (ch.first_gap > gap || ch.last_gap < gap) continue;
      for (int row = 0; row < width[gap] && done[c] < ch.gates.size(); ++row) placed[gap].emplace_back(row, ch.gates[done[c]++]);
    }
  }

  std::vector<GateLayer> layers;
  for (int gap = 0; gap <= n_cz; ++gap) {
    const std::size_t base = layers.size();
    for (int row = 0; row < width[gap]; ++row) layers.push_back({GateLayer::Kind::single_q, {}});
    for (auto [row, k] : placed[gap]) layers[base + row].gates.push_back(seq[k]);
    if (gap < n_cz) {
      layers.push_back({GateLayer::Kind::cz, {}});
      for (std::size_t k = 0; k < seq.size(); ++k)
        if (cz_layer[k] == gap) layers.back().gates.push_back(seq[k]);
    }
  }
  std::erase_if(layers, [](const GateLayer& l) { return l.gates.empty(); });
  return layers;
}

struct PairTerms {
  double y_on_first = 0;  // coefficient of Y_i Z_j for pair (i, j), i < j
  double y_on_second = 0;  // coefficient of Z_i Y_j
  std::vector<PauliString> strings;
};

struct Routed {
  std::vector<Gate> gates;
  std::vector<PauliString> order;
  std::vector<int> final_pos;
  CircuitStats stats;
};

Routed route(const Grid& g, const std::map<LogicalPair, PairTerms>& terms) {
  Routed r;
  std::vector<int> pos = initial_occupancy(g);
  std::set<LogicalPair> remaining;
  for (const auto& [p, t] : terms) remaining.insert(p);

  auto emit_pair = [&](int sa, int sb) {
    const int la = pos[sa], lb = pos[sb];
    const auto& t = terms.at(ordered(la, lb));
    const bool a_first = la < lb;
    r.gates.push_back({GateKind::yz, sa, sb, a_first ? t.y_on_first : t.y_on_second,
                       a_first ? t.y_on_second : t.y_on_first});
    r.order.insert(r.order.end(), t.strings.begin(), t.strings.end());
    remaining.erase(ordered(la, lb));
  };
  auto emit_matchings = [&](const std::vector<std::pair<int, int>>& edges) {
    for (const auto& m : greedy_matchings(edges)) {
      ++r.stats.yz_layer_count;
      for (auto [a, b] : m) emit_pair(a, b);
    }
  };

  const auto edges = g.edges();
  for (int k = 0; !remaining.empty(); ++k) {
    if (k > layer_limit(g)) throw std::runtime_error("route: interaction endpoints never became adjacent on " + g.name());
    const SwapLayer cur = alt_layer(g.rows, g.cols, k);
    std::set<std::pair<int, int>> in_layer(cur.begin(), cur.end());
    std::vector<int> after = pos;
    apply_swaps(after, cur);
    const auto adj_after = adjacent_logical(g, after);

    std::vector<std::pair<int, int>> forced;
    for (const auto& e : edges) {
      if (in_layer.contains(e) || pos[e.first] >= g.q || pos[e.second] >= g.q) continue;
      const auto lp = ordered(pos[e.first], pos[e.second]);
      if (remaining.contains(lp) && !adj_after.contains(lp)) forced.push_back(e);
    }
    emit_matchings(forced);
    if (remaining.empty()) break;

    ++r.stats.swap_block_count;
    bool merged_any = false;
    for (auto [a, b] : cur) {
      ++r.stats.swap_gate_count;
      if (pos[a] < g.q && pos[b] < g.q && remaining.contains(ordered(pos[a], pos[b]))) {
        merged_any = true;
        const int la = pos[a], lb = pos[b];
        const auto& t = terms.at(ordered(la, lb));
        const double ya = la < lb ? t.y_on_first : t.y_on_second;
        const double yb = la < lb ? t.y_on_second : t.y_on_first;
        if (ya != 0 && yb != 0) {
          emit_pair(a, b);
          r.gates.push_back({GateKind::swap, a, b});
        } else {
          r.gates.push_back(ya != 0 ? Gate{GateKind::yz_swap, a, b, ya} : Gate{GateKind::yz_swap, b, a, yb});
          r.order.insert(r.order.end(), t.strings.begin(), t.strings.end());
          remaining.erase(ordered(la, lb));
        }
      } else if (pos[a] >= g.q && pos[b] >= g.q) {
        // two ancillas in |0>: nothing to do
      } else if (pos[b] >= g.q) {
        r.gates.push_back({GateKind::move, a, b});
      } else if (pos[a] >= g.q) {
        r.gates.push_back({GateKind::move, b, a});
      } else {
        r.gates.push_back({GateKind::swap, a, b});
      }
    }
    if (merged_any)
      ++r.stats.yz_swap_layer_count;
    else
      ++r.stats.swap_layer_count;
    pos = after;

    if (remaining.empty()) break;
    const auto adj_now = adjacent_logical(g, pos);
    if (std::all_of(remaining.begin(), remaining.end(), [&](const auto& p) { return adj_now.contains(p); })) {
      std::vector<std::pair<int, int>> last;
      for (const auto& e : edges)
        if (pos[e.first] < g.q && pos[e.second] < g.q && remaining.contains(ordered(pos[e.first], pos[e.second])))
          last.push_back(e);
      emit_matchings(last);
    }
  }
  r.final_pos.assign(g.q, -1);
  for (int s = 0; s < g.slots(); ++s)
    if (pos[s] < g.q) r.final_pos[pos[s]] = s;
  return r;
}

CompiledCircuit lower(const Grid& g, const std::vector<std::pair<int, double>>& ry, Routed routed) {
  // |-> = Y2M |0>, and exp(-i t Y) Y2M = exp(-i (t - pi/4) Y), so a qubit
  // with a Y term gets a single rotation.
  std::vector<double> prep(g.q, std::numeric_limits<double>::quiet_NaN());
  for (auto [l, theta] : ry) prep[l] = (std::isnan(prep[l]) ? 0.0 : prep[l]) + theta;
  std::vector<NativeGate> seq;
  for (int l = 0; l < g.q; ++l) {
    if (std::isnan(prep[l])) {
      seq.push_back({NativeKind::y2m, g.placement[l]});
      continue;
    }
    auto d = decompose({GateKind::ry, g.placement[l], -1, prep[l] - std::numbers::pi / 4});
    seq.insert(seq.end(), d.begin(), d.end());
  }
  for (const auto& gate : routed.gates) {
    auto d = decompose(gate);
    seq.insert(seq.end(), d.begin(), d.end());
  }
  CompiledCircuit c;
  c.grid = g;
  c.gates = std::move(routed.gates);
  c.layers = schedule_layers(peephole(seq, g.slots()), g.slots());
  c.stats = routed.stats;
  for (const auto& layer : c.layers) {
    if (layer.kind == GateLayer::Kind::cz) {
      ++c.stats.cz_layer_count;
      c.stats.cz_gate_count += static_cast<int>(layer.gates.size());
    } else {
      ++c.stats.single_q_layer_count;
    }
  }
  c.stats.total_duration_ns = kSingleQubitNs * c.stats.single_q_layer_count + kCzNs * c.stats.cz_layer_count;
  c.final_placement = std::move(routed.final_pos);
  c.term_order = std::move(routed.order);
  return c;
}

}  // namespace

Grid Grid::make(int rows, int cols, int q) {
  Grid g;
  g.rows = rows;
  g.cols = cols;
  g.q = q;
  g.placement.resize(q);
  for (int l = 0; l < q; ++l) g.placement[l] = l;
  g.validate();
  return g;
}

Grid Grid::parse(const std::string& shape, int q) {
  const auto x = shape.find('x');
  if (x == std::string::npos) throw std::invalid_argument("grid shape must look like 2x5: " + shape);
  return make(std::stoi(shape.substr(0, x)), std::stoi(shape.substr(x + 1)), q);
}

bool Grid::adjacent(int a, int b) const {
  const int ra = a / cols, ca = a % cols, rb = b / cols, cb = b % cols;
  return std::abs(ra - rb) + std::abs(ca - cb) == 1;
}

std::vector<std::pair<int, int>> Grid::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int s = r * cols + c;
      if (c + 1 < cols) e.emplace_back(s, s + 1);
      if (r + 1 < rows) e.emplace_back(s, s + cols);
    }
  return e;
}

std::string Grid::name() const { return std::to_string(rows) + "x" + std::to_string(cols); }

void Grid::validate() const {
  if (rows < 1 || cols < 1) throw std::invalid_argument("grid: non-positive dimension");
  if (q < 1) throw std::invalid_argument("grid: need at least one working qubit");
  if (q > slots()) throw std::invalid_argument("grid " + name() + " too small for " + std::to_string(q) + " qubits");
  if (static_cast<int>(placement.size()) != q) throw std::invalid_argument("grid: placement size mismatch");
  std::vector<bool> used(slots(), false);
  for (int s : placement) {
    if (s < 0 || s >= slots() || used[s]) throw std::invalid_argument("grid: placement is not a bijection");
    used[s] = true;
  }
}

std::string native_name(NativeKind k) {
  switch (k) {
    case NativeKind::x2p: return "X2P";
    case NativeKind::x2m: return "X2M";
    case NativeKind::y2p: return "Y2P";
    case NativeKind::y2m: return "Y2M";
    case NativeKind::rz: return "RZ";
    case NativeKind::cz: return "CZ";
  }
  return "?";
}

std::vector<NativeGate> decompose(const Gate& g) {
  using K = NativeKind;
  // exp(-i t Y) = X2M exp(-i t Z) X2P
  auto ry = [](int q, double t) {
    return std::vector<NativeGate>{{K::x2p, q}, {K::rz, q, -1, 2 * t}, {K::x2m, q}};
  };
  // CX with control c, target t: Y2P_t CZ Y2M_t
  auto cx = [](int c, int t) { return std::vector<NativeGate>{{K::y2m, t}, {K::cz, c, t}, {K::y2p, t}}; };
  auto append = [](std::vector<NativeGate>& out, const std::vector<NativeGate>& more) {
    out.insert(out.end(), more.begin(), more.end());
  };
  std::vector<NativeGate> out;
  switch (g.kind) {
    case GateKind::ry:
      return ry(g.a, g.theta_a);
    case GateKind::yz:
      out.push_back({K::cz, g.a, g.b});
      if (g.theta_a != 0) append(out, ry(g.a, g.theta_a));
      if (g.theta_b != 0) append(out, ry(g.b, g.theta_b));
      out.push_back({K::cz, g.a, g.b});
      return out;
    case GateKind::swap:
      append(out, cx(g.a, g.b));
      append(out, cx(g.b, g.a));
      append(out, cx(g.a, g.b));
      return out;
    case GateKind::move:
      append(out, cx(g.a, g.b));
      append(out, cx(g.b, g.a));
      return out;
    case GateKind::yz_swap:
      // SWAP V_a ZZ(t) V_a^dag = V_b CX_ab CX_ba RZ_b(2t) CX_ab V_a^dag, V = X2M.
      out.push_back({K::x2p, g.a});
      append(out, cx(g.a, g.b));
      out.push_back({K::rz, g.b, -1, 2 * g.theta_a});
      append(out, cx(g.b, g.a));
      append(out, cx(g.a, g.b));
      out.push_back({K::x2m, g.b});
      return out;
  }
  return out;
}

Eigen::MatrixXcd native_unitary(const std::vector<NativeGate>& seq, int n_qubits) {
  const std::size_t dim = std::size_t{1} << n_qubits;
  Eigen::MatrixXcd u(dim, dim);
  for (std::size_t col = 0; col < dim; ++col) {
    std::vector<cplx> amp(dim, 0);
    amp[col] = 1;
    for (const auto& g : seq) apply_native(amp, g);
    for (std::size_t row = 0; row < dim; ++row) u(row, col) = amp[row];
  }
  return u;
}

bool covers_all_pairs(const Grid& g, const std::vector<SwapLayer>& layers) {
  std::vector<int> pos = initial_occupancy(g);
  auto met = adjacent_logical(g, pos);
  for (const auto& layer : layers) {
    for (auto [a, b] : layer)
      if (!g.adjacent(a, b)) return false;
    apply_swaps(pos, layer);
    const auto now = adjacent_logical(g, pos);
    met.insert(now.begin(), now.end());
  }
  return met.size() == static_cast<std::size_t>(g.q) * (g.q - 1) / 2;
}

std::vector<SwapLayer> swap_schedule(const Grid& g) {
  g.validate();
  std::vector<SwapLayer> out;
  std::vector<int> pos = initial_occupancy(g);
  auto met = adjacent_logical(g, pos);
  const std::size_t need = static_cast<std::size_t>(g.q) * (g.q - 1) / 2;
  for (int k = 0; met.size() < need; ++k) {
    if (k > layer_limit(g)) throw std::runtime_error("swap_schedule: no full coverage on " + g.name());
    out.push_back(alt_layer(g.rows, g.cols, k));
    apply_swaps(pos, out.back());
    const auto now = adjacent_logical(g, pos);
    met.insert(now.begin(), now.end());
  }
  return out;
}

CompiledCircuit compile_pairs(const Grid& g, const std::vector<std::pair<int, int>>& pairs) {
  g.validate();
  std::map<LogicalPair, PairTerms> terms;
  for (auto [i, j] : pairs) {
    if (i == j || i < 0 || j < 0 || i >= g.q || j >= g.q) throw std::invalid_argument("compile_pairs: bad pair");
    const auto p = ordered(i, j);
    auto& t = terms[p];
    t.y_on_first = 0.1;
    t.strings = {PauliString::from_label(std::string(p.first, 'I') + "Y" + std::string(p.second - p.first - 1, 'I') +
                                         "Z" + std::string(g.q - p.second - 1, 'I'))};
  }
  std::vector<std::pair<int, double>> ry;
  for (int l = 0; l < g.q; ++l) ry.emplace_back(l, 0.1);
  auto c = lower(g, ry, route(g, terms));
  std::vector<PauliString> order;
  for (int l = 0; l < g.q; ++l) order.push_back(PauliString::single(g.q, l, 'Y'));
  order.insert(order.end(), c.term_order.begin(), c.term_order.end());
  c.term_order = std::move(order);
  return c;
}

CompiledCircuit compile_single_layer(const CDAnsatz& ansatz, const Eigen::VectorXd& theta, double dlambda,
                                     const Grid& g) {
  g.validate();
  if (ansatz.n != g.q) throw std::invalid_argument("compile_single_layer: ansatz size does not match grid q");
  if (theta.size() != ansatz.n_params) throw std::invalid_argument("compile_single_layer: parameter count mismatch");
  std::vector<std::pair<int, double>> ry;
  std::vector<PauliString> y_order;
  std::map<LogicalPair, PairTerms> terms;
  for (const auto& t : ansatz.terms) {
    const double angle = kCdSign * dlambda * theta[t.slot] * t.scale;
    const PauliString& p = t.string;
    const int w = p.weight();
    if (w == 1 && p.x == p.z) {
      ry.emplace_back(std::countr_zero(p.x), angle);
      y_order.push_back(p);
      continue;
    }
    if (w == 2 && std::popcount(p.x) == 1 && p.x == (p.x & p.z)) {
      const int i = std::countr_zero(p.z);
      const int j = std::bit_width(p.z) - 1;
      auto& pt = terms[{i, j}];
      (p.op_at(i) == 'Y' ? pt.y_on_first : pt.y_on_second) += angle;
      pt.strings.push_back(p);
      continue;
    }
    throw std::invalid_argument("compile_single_layer: term " + p.label() + " is not Y, YZ or ZY");
  }
  auto c = lower(g, ry, route(g, terms));
  y_order.insert(y_order.end(), c.term_order.begin(), c.term_order.end());
  c.term_order = std::move(y_order);
  return c;
}

StateVector simulate_native(const CompiledCircuit& c) {
  const Grid& g = c.grid;
  if (g.slots() > StateVector::kMaxQubits) throw std::invalid_argument("simulate_native: grid too large");
  std::vector<cplx> amp(std::size_t{1} << g.slots(), 0);
  amp[0] = 1;
  for (const auto& layer : c.layers)
    for (const auto& gate : layer.gates) apply_native(amp, gate);

  std::size_t working = 0;
  for (int s : c.final_placement) working |= std::size_t{1} << s;
  double leak = 0;
  for (std::size_t b = 0; b < amp.size(); ++b)
    if (b & ~working) leak += std::norm(amp[b]);
  if (leak > 1e-9) throw std::runtime_error("simulate_native: ancilla left outside |0>");

  StateVector psi(g.q);
  auto& out = psi.amplitudes();
  for (std::size_t b = 0; b < out.size(); ++b) {
    std::size_t phys = 0;
    for (int l = 0; l < g.q; ++l)
      if ((b >> l) & 1) phys |= std::size_t{1} << c.final_placement[l];
    out[b] = amp[phys];
  }
  return psi;
}

CDAnsatz reorder_terms(const CDAnsatz& ansatz, const std::vector<PauliString>& order) {
  std::map<PauliString, CDTerm> by_string;
  for (const auto& t : ansatz.terms) by_string.emplace(t.string, t);
  if (by_string.size() != order.size()) throw std::invalid_argument("reorder_terms: term count mismatch");
  CDAnsatz out = ansatz;
  out.terms.clear();
  for (const auto& p : order) {
    auto it = by_string.find(p);
    if (it == by_string.end()) throw std::invalid_argument("reorder_terms: unknown term " + p.label());
    out.terms.push_back(it->second);
  }
  return out;
}

std::vector<std::pair<int, int>> default_shapes(int q) {
  std::set<std::pair<int, int>> s;
  for (int k = 2; k <= 4; ++k) {
    const int other = (q + k - 1) / k;
    if (other >= 2) {
      s.insert({k, other});
      s.insert({other, k});
    }
  }
  int side = 1;
  while (side * side < q) ++side;
  if (side >= 2) s.insert({side, side});
  return {s.begin(), s.end()};
}

std::vector<TopologyRow> topology_report(int q, const std::vector<std::pair<int, int>>& shapes) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j) pairs.emplace_back(i, j);
  std::vector<TopologyRow> rows;
  for (auto [r, c] : shapes) rows.push_back({q, r, c, compile_pairs(Grid::make(r, c, q), pairs).stats});
  std::stable_sort(rows.begin(), rows.end(), [](const TopologyRow& a, const TopologyRow& b) {
    return a.stats.total_duration_ns < b.stats.total_duration_ns;
  });
  return rows;
}

void to_json(nlohmann::json& j, const CircuitStats& s) {
  j = {{"swap_block_count", s.swap_block_count},
       {"swap_gate_count", s.swap_gate_count},
       {"yz_layer_count", s.yz_layer_count},
       {"yz_swap_layer_count", s.yz_swap_layer_count},
       {"swap_layer_count", s.swap_layer_count},
       {"single_q_layer_count", s.single_q_layer_count},
       {"cz_layer_count", s.cz_layer_count},
       {"cz_gate_count", s.cz_gate_count},
       {"total_duration_ns", s.total_duration_ns}};
}

nlohmann::json to_json(const CompiledCircuit& c) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : c.layers) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : layer.gates) {
      nlohmann::json jg = {{"gate", native_name(g.kind)}, {"qubits", g.q1 >= 0 ? std::vector<int>{g.q0, g.q1} : std::vector<int>{g.q0}}};
      if (g.kind == NativeKind::rz) jg["angle"] = g.angle;
      gates.push_back(jg);
    }
    layers.push_back({{"kind", layer.kind == GateLayer::Kind::cz ? "cz" : "single_q"}, {"gates", gates}});
  }
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& p : c.term_order) terms.push_back(p.label());
  return {{"grid", {{"rows", c.grid.rows}, {"cols", c.grid.cols}, {"q", c.grid.q}, {"placement", c.grid.placement}}},
          {"layers", layers},
          {"stats", c.stats},
          {"term_order", terms},
          {"measure", c.final_placement}};
}

}  // namespace dcqo
