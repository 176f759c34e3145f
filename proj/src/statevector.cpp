#include "qcdiff/statevector.hpp"

#include <complex>

#include "qcdiff/unitary.hpp"

namespace qcdiff {

Statevector init_state(int n_qubits) {
  if (n_qubits < 1 || n_qubits > 24)
    throw TooManyQubits("statevector supports 1..24 qubits, got " +
                        std::to_string(n_qubits));
  Statevector s;
  s.n_qubits = n_qubits;
  s.amps = Eigen::VectorXcd::Zero(Eigen::Index(1) << n_qubits);
  s.amps[0] = 1.0;
  return s;
}

namespace {

void apply_single(Statevector& state, const Eigen::Matrix2cd& m, int q) {
  const Eigen::Index bit = Eigen::Index(1) << (state.n_qubits - 1 - q);
  const Eigen::Index dim = state.amps.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & bit) continue;
    const std::complex<double> a0 = state.amps[i];
    const std::complex<double> a1 = state.amps[i | bit];
    state.amps[i] = m(0, 0) * a0 + m(0, 1) * a1;
    state.amps[i | bit] = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

void apply_cx(Statevector& state, int control, int target) {
  const Eigen::Index cbit = Eigen::Index(1) << (state.n_qubits - 1 - control);
  const Eigen::Index tbit = Eigen::Index(1) << (state.n_qubits - 1 - target);
  const Eigen::Index dim = state.amps.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(state.amps[i], state.amps[i | tbit]);
  }
}

}  // namespace

void apply_gate(Statevector& state, const Gate& g,
                std::optional<double> theta) {
  if (g.kind == GateKind::Rz && !theta)
    throw MissingParameter("Rz gate requires a parameter value");
  switch (g.kind) {
    case GateKind::CX:
      apply_cx(state, g.q0, g.q1);
      return;
    case GateKind::Rz:
      apply_single(state, single_qubit_matrix(GateKind::Rz, *theta), g.q0);
      return;
    default:
      apply_single(state, single_qubit_matrix(g.kind), g.q0);
      return;
  }
}

Statevector run_circuit(const Circuit& c, const Eigen::VectorXd& theta) {
  if (theta.size() != c.n_params)
    throw Error("theta length does not match circuit parameter count");
  Statevector s = init_state(c.n_qubits);
  for (const Gate& g : c.gates) {
    if (g.kind == GateKind::Rz)
      apply_gate(s, g, theta[g.param_index]);
    else
      apply_gate(s, g);
  }
  return s;
}

}  // namespace qcdiff
