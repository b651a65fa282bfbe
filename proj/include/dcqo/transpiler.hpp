#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dcqo/counterdiabatic.hpp"
#include "dcqo/pauli.hpp"
#include "dcqo/simulator.hpp"

namespace dcqo {

inline constexpr double kSingleQubitNs = 30.0;
inline constexpr double kCzNs = 123.0;

// rows x cols grid; slot s sits at (s / cols, s % cols). Logical qubit l starts
// in slot placement[l]; slots beyond the q working qubits hold ancillas.
struct Grid {
  int rows = 1;
  int cols = 1;
  int q = 1;
  std::vector<int> placement;

  static Grid make(int rows, int cols, int q);
  static Grid parse(const std::string& shape, int q);  // "2x5"
  int slots() const { return rows * cols; }
  bool adjacent(int a, int b) const;
  std::vector<std::pair<int, int>> edges() const;
  std::string name() const;
  void validate() const;
};

enum class NativeKind { x2p, x2m, y2p, y2m, rz, cz };
std::string native_name(NativeKind k);

struct NativeGate {
  NativeKind kind;
  int q0;
  int q1 = -1;
  double angle = 0;  // RZ(angle) = exp(-i angle Z / 2)
};

struct GateLayer {
  enum class Kind { single_q, cz };
  Kind kind;
  std::vector<NativeGate> gates;
};

enum class GateKind { ry, swap, move, yz, yz_swap };

// ry:      exp(-i theta_a Y_a)
// yz:      exp(-i (theta_a Y_a Z_b + theta_b Z_a Y_b))
// yz_swap: SWAP_ab exp(-i theta_a Y_a Z_b)
// swap:    SWAP_ab
// move:    CX_ba CX_ab, equal to SWAP_ab when b holds |0>
struct Gate {
  GateKind kind;
  int a;
  int b = -1;
  double theta_a = 0;
  double theta_b = 0;
};

// Native sequence in time order.
std::vector<NativeGate> decompose(const Gate& g);
Eigen::MatrixXcd native_unitary(const std::vector<NativeGate>& seq, int n_qubits);

using SwapLayer = std::vector<std::pair<int, int>>;

// Odd-even transpositions along each row (adjacent rows offset by one),
// cols layers at a time, followed by a row-pair exchange in steps of two when
// rows > 2. Returns the shortest prefix after which every pair of working
// qubits has been adjacent at least once.
std::vector<SwapLayer> swap_schedule(const Grid& g);
bool covers_all_pairs(const Grid& g, const std::vector<SwapLayer>& layers);

struct CircuitStats {
  int swap_block_count = 0;
  int swap_gate_count = 0;
  int yz_layer_count = 0;
  int yz_swap_layer_count = 0;
  int swap_layer_count = 0;
  int single_q_layer_count = 0;
  int cz_layer_count = 0;
  int cz_gate_count = 0;
  double total_duration_ns = 0;
};

struct CompiledCircuit {
  Grid grid;
  std::vector<Gate> gates;  // routed gate list before lowering
  std::vector<GateLayer> layers;
  CircuitStats stats;
  std::vector<int> final_placement;  // logical -> slot at measurement
  std::vector<PauliString> term_order;  // logical CD terms in execution order
};

// Interaction pairs (i, j) between logical qubits; the angles are placeholders.
CompiledCircuit compile_pairs(const Grid& g, const std::vector<std::pair<int, int>>& pairs);
CompiledCircuit compile_single_layer(const CDAnsatz& ansatz, const Eigen::VectorXd& theta, double dlambda,
                                     const Grid& g);

// Runs the native circuit from |0...0> and returns the working-qubit state in
// logical order. Throws if an ancilla ends outside |0>.
StateVector simulate_native(const CompiledCircuit& c);

// The ansatz with its terms reordered to the circuit's execution order.
CDAnsatz reorder_terms(const CDAnsatz& ansatz, const std::vector<PauliString>& order);

struct TopologyRow {
  int q;
  int rows;
  int cols;
  CircuitStats stats;
};

// Shapes k x ceil(q/k) and ceil(q/k) x k for k = 2..4 plus the smallest square.
std::vector<std::pair<int, int>> default_shapes(int q);
// All-pairs interaction graph on each shape, sorted by duration.
std::vector<TopologyRow> topology_report(int q, const std::vector<std::pair<int, int>>& shapes);

void to_json(nlohmann::json& j, const CircuitStats& s);
nlohmann::json to_json(const CompiledCircuit& c);

}  // namespace dcqo
