#pragma once

#include <Eigen/Dense>
#include <complex>
#include <filesystem>
#include <utility>
#include <vector>

#include "qcdiff/pauli.hpp"
#include "qcdiff/statevector.hpp"

namespace qcdiff {

/// Real-weighted sum of Pauli strings, H = sum_i h_i P_i. Canonical form has
/// no duplicate strings (duplicates merged by coefficient addition).
struct PauliSum {
  int n_qubits = 0;
  std::vector<std::pair<double, PauliString>> terms;
};

/// Merge duplicate strings; terms whose merged coefficient is exactly zero
/// are dropped. Term order is by first appearance.
PauliSum canonicalize(const PauliSum& h);

/// scratch <- P |in|. O(2^N) bitmask application, no matrices.
void apply_pauli(const PauliString& p, const Eigen::VectorXcd& in,
                 Eigen::VectorXcd& scratch);

/// <psi| H |psi> as a complex number, term by term through a scratch copy.
std::complex<double> expectation_complex(const Statevector& state,
                                         const PauliSum& h);

/// Real expectation value. Throws NonHermitianResidue if the imaginary part
/// exceeds 1e-8.
double expectation(const Statevector& state, const PauliSum& h);

/// Dense Hermitian matrix of the sum (oracle / small-N use).
Eigen::MatrixXcd pauli_sum_matrix(const PauliSum& h);

/// Smallest eigenvalue of the dense matrix; N <= 10.
double ground_energy(const PauliSum& h);

/// .ham text format: one `<coefficient> <pauli_string>` per line, `#` starts
/// a comment, blank lines ignored. Result is canonicalized.
PauliSum load_hamiltonian(const std::filesystem::path& path);
PauliSum parse_hamiltonian(std::string_view text);

}  // namespace qcdiff
