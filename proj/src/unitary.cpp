#include "qcdiff/unitary.hpp"

#include <complex>

namespace qcdiff {

Eigen::Matrix2cd single_qubit_matrix(GateKind kind, double theta) {
  using namespace std::complex_literals;
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  switch (kind) {
    case GateKind::H:
      m << s, s, s, -s;
      return m;
    case GateKind::Hy:
      m << s, -s * 1i, s * 1i, -s;
      return m;
    case GateKind::Rz:
      m << std::exp(-0.5i * theta), 0, 0, std::exp(0.5i * theta);
      return m;
    case GateKind::CX:
      break;
  }
  throw Error("single_qubit_matrix called with CX");
}

namespace {

// kron(I_{2^q}, g, I_{2^{n-1-q}}) under the qubit-0-most-significant order.
Eigen::MatrixXcd embed_single(const Eigen::Matrix2cd& g, int q, int n) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  const Eigen::Index qbit = Eigen::Index(1) << (n - 1 - q);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int bit = (j & qbit) ? 1 : 0;
    for (int r = 0; r < 2; ++r) {
      const Eigen::Index row = (j & ~qbit) | (r ? qbit : 0);
      full(row, j) = g(r, bit);
    }
  }
  return full;
}

Eigen::MatrixXcd cx_matrix(int control, int target, int n) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  const Eigen::Index cbit = Eigen::Index(1) << (n - 1 - control);
  const Eigen::Index tbit = Eigen::Index(1) << (n - 1 - target);
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Eigen::Index i = (j & cbit) ? (j ^ tbit) : j;
    full(i, j) = 1.0;
  }
  return full;
}

}  // namespace

Eigen::MatrixXcd circuit_unitary(const Circuit& c,
                                 const Eigen::VectorXd& theta) {
  if (c.n_qubits > 6)
    throw TooManyQubits("circuit_unitary limited to 6 qubits, got " +
                        std::to_string(c.n_qubits));
  if (theta.size() != c.n_params)
    throw Error("theta length does not match circuit parameter count");
  const Eigen::Index dim = Eigen::Index(1) << c.n_qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const Gate& g : c.gates) {
    Eigen::MatrixXcd gm;
    if (g.kind == GateKind::CX) {
      gm = cx_matrix(g.q0, g.q1, c.n_qubits);
    } else {
      const double t = g.kind == GateKind::Rz ? theta[g.param_index] : 0.0;
      gm = embed_single(single_qubit_matrix(g.kind, t), g.q0, c.n_qubits);
    }
    u = (gm * u).eval();
  }
  return u;
}

}  // namespace qcdiff
