#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qcdiff/errors.hpp"

namespace qcdiff {

enum class GateKind : std::uint8_t { H, Hy, CX, Rz };

std::string_view gate_kind_name(GateKind k);
GateKind gate_kind_from_name(std::string_view name);

/// One gate. q1 is used only by CX (q0 = control, q1 = target); param_index
/// is present exactly for Rz.
struct Gate {
  GateKind kind = GateKind::H;
  int q0 = 0;
  int q1 = -1;
  int param_index = -1;

  static Gate h(int q) { return {GateKind::H, q, -1, -1}; }
  static Gate hy(int q) { return {GateKind::Hy, q, -1, -1}; }
  static Gate cx(int control, int target) {
    return {GateKind::CX, control, target, -1};
  }
  static Gate rz(int q, int param) { return {GateKind::Rz, q, -1, param}; }

  bool is_two_qubit() const { return kind == GateKind::CX; }

  bool operator==(const Gate&) const = default;
};

/// Ordered gate list over a fixed qubit count. Rz parameters are indexed;
/// the index set of a valid circuit is exactly {0, ..., n_params-1}.
struct Circuit {
  int n_qubits = 0;
  std::vector<Gate> gates;
  int n_params = 0;

  /// Throws Error when an invariant is broken (range, param indexing, CX
  /// control == target).
  void validate() const;

  bool operator==(const Circuit&) const = default;
};

/// Moment layout: each column holds gates on disjoint qubits; concatenating
/// columns left to right reproduces the circuit's gate order up to
/// commutation of disjoint gates.
struct ColumnLayout {
  std::vector<std::vector<Gate>> columns;

  Circuit flatten(int n_qubits) const;
  bool operator==(const ColumnLayout&) const = default;
};

/// Greedy left-packed scheduling: every gate lands in the earliest column
/// after the last column occupied by any of its qubits.
ColumnLayout layout_columns(const Circuit& c);

// Circuit JSON interchange: {"n_qubits": int, "gates": [{"kind": ...,
// "qubits": [...], "param_index": ...?}]}.
std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(std::string_view text);
void save_circuits(const std::vector<Circuit>& cs,
                   const std::filesystem::path& path);
std::vector<Circuit> load_circuits(const std::filesystem::path& path);

}  // namespace qcdiff
