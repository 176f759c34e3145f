#pragma once

#include <Eigen/Dense>

#include "qcdiff/circuit.hpp"

namespace qcdiff {

/// 2x2 matrix of a single-qubit gate kind. theta is consumed by Rz only.
/// Conventions: Hy = (1/sqrt2) [[1, -i], [i, -1]] (Hermitian, self-inverse,
/// maps Y <-> Z); Rz(theta) = diag(e^{-i theta/2}, e^{+i theta/2}).
Eigen::Matrix2cd single_qubit_matrix(GateKind kind, double theta = 0.0);

/// Dense brute-force circuit unitary, qubit 0 = most significant bit of the
/// basis index. Oracle scale: N <= 6; throws TooManyQubits beyond.
Eigen::MatrixXcd circuit_unitary(const Circuit& c,
                                 const Eigen::VectorXd& theta);

}  // namespace qcdiff
