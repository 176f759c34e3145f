#pragma once

#include <Eigen/Dense>
#include <optional>

#include "qcdiff/circuit.hpp"

namespace qcdiff {

/// Dense amplitude vector. Index convention matches circuit_unitary: qubit 0
/// is the most significant bit of the basis index.
struct Statevector {
  int n_qubits = 0;
  Eigen::VectorXcd amps;

  double norm() const { return amps.norm(); }
};

/// |0...0> on n qubits. Dense cap: 24 qubits.
Statevector init_state(int n_qubits);

/// In-place gate application. theta must be supplied exactly for Rz.
void apply_gate(Statevector& state, const Gate& g,
                std::optional<double> theta = std::nullopt);

/// init_state followed by sequential gate application.
Statevector run_circuit(const Circuit& c, const Eigen::VectorXd& theta);

}  // namespace qcdiff
