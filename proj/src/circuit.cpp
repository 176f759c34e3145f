#include "qcdiff/circuit.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace qcdiff {

std::string_view gate_kind_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::Hy: return "Hy";
    case GateKind::CX: return "CX";
    case GateKind::Rz: return "Rz";
  }
  return "?";
}

GateKind gate_kind_from_name(std::string_view name) {
  if (name == "H") return GateKind::H;
  if (name == "Hy") return GateKind::Hy;
  if (name == "CX") return GateKind::CX;
  if (name == "Rz") return GateKind::Rz;
  throw ParseError("unknown gate kind '" + std::string(name) + "'");
}

void Circuit::validate() const {
  if (n_qubits <= 0) throw Error("circuit must have a positive qubit count");
  std::set<int> params;
  for (const Gate& g : gates) {
    if (g.q0 < 0 || g.q0 >= n_qubits)
      throw Error("gate qubit out of range");
    if (g.kind == GateKind::CX) {
      if (g.q1 < 0 || g.q1 >= n_qubits) throw Error("CX target out of range");
      if (g.q0 == g.q1) throw Error("CX control equals target");
    } else if (g.q1 != -1) {
      throw Error("single-qubit gate carries a second qubit");
    }
    if (g.kind == GateKind::Rz) {
      if (g.param_index < 0) throw Error("Rz without parameter index");
      params.insert(g.param_index);
    } else if (g.param_index != -1) {
      throw Error("non-Rz gate carries a parameter index");
    }
  }
  if (static_cast<int>(params.size()) != n_params ||
      (!params.empty() &&
       (*params.begin() != 0 || *params.rbegin() != n_params - 1)))
    throw Error("parameter indices must be exactly {0..n_params-1}");
}

Circuit ColumnLayout::flatten(int n_qubits) const {
  Circuit c;
  c.n_qubits = n_qubits;
  int max_param = -1;
  for (const auto& col : columns)
    for (const Gate& g : col) {
      c.gates.push_back(g);
      max_param = std::max(max_param, g.param_index);
    }
  c.n_params = max_param + 1;
  return c;
}

ColumnLayout layout_columns(const Circuit& c) {
  // Left-packed, but column indices never decrease along the gate list, so
  // flattening a layout reproduces it (and mirrored UCC blocks keep their
  // trailing basis column instead of sliding into the ladder).
  ColumnLayout layout;
  std::vector<int> frontier(c.n_qubits, -1);
  int floor_col = 0;
  for (const Gate& g : c.gates) {
    int col = std::max(floor_col, frontier[g.q0] + 1);
    if (g.is_two_qubit()) col = std::max(col, frontier[g.q1] + 1);
    if (col >= static_cast<int>(layout.columns.size()))
      layout.columns.resize(col + 1);
    layout.columns[col].push_back(g);
    frontier[g.q0] = col;
    if (g.is_two_qubit()) frontier[g.q1] = col;
    floor_col = col;
  }
  return layout;
}

namespace {

nlohmann::ordered_json gate_to_json(const Gate& g) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(gate_kind_name(g.kind));
  if (g.is_two_qubit())
    j["qubits"] = {g.q0, g.q1};
  else
    j["qubits"] = {g.q0};
  if (g.kind == GateKind::Rz) j["param_index"] = g.param_index;
  return j;
}

nlohmann::ordered_json circuit_to_json_obj(const Circuit& c) {
  nlohmann::ordered_json j;
  j["n_qubits"] = c.n_qubits;
  j["gates"] = nlohmann::ordered_json::array();
  for (const Gate& g : c.gates) j["gates"].push_back(gate_to_json(g));
  return j;
}

Circuit circuit_from_json_obj(const nlohmann::ordered_json& j) {
  Circuit c;
  c.n_qubits = j.at("n_qubits").get<int>();
  int max_param = -1;
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
    const auto& qs = jg.at("qubits");
    g.q0 = qs.at(0).get<int>();
    g.q1 = qs.size() > 1 ? qs.at(1).get<int>() : -1;
    if (g.kind == GateKind::Rz) {
      g.param_index = jg.at("param_index").get<int>();
      max_param = std::max(max_param, g.param_index);
    }
    c.gates.push_back(g);
  }
  c.n_params = max_param + 1;
  c.validate();
  return c;
}

}  // namespace

std::string circuit_to_json(const Circuit& c) {
  return circuit_to_json_obj(c).dump(2);
}

Circuit circuit_from_json(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what());
  }
  try {
    return circuit_from_json_obj(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("circuit JSON: ") + e.what());
  }
}

void save_circuits(const std::vector<Circuit>& cs,
                   const std::filesystem::path& path) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Circuit& c : cs) arr.push_back(circuit_to_json_obj(c));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << arr.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<Circuit> load_circuits(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::ordered_json arr;
  try {
    in >> arr;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::vector<Circuit> cs;
  try {
    for (const auto& j : arr) cs.push_back(circuit_from_json_obj(j));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return cs;
}

}  // namespace qcdiff
