#include "qcdiff/pauli.hpp"

namespace qcdiff {

char to_char(PauliLetter l) {
  switch (l) {
    case PauliLetter::I: return 'I';
    case PauliLetter::X: return 'X';
    case PauliLetter::Y: return 'Y';
    case PauliLetter::Z: return 'Z';
  }
  return '?';
}

PauliString parse_pauli_string(std::string_view text) {
  if (text.empty()) throw InvalidLetter("empty Pauli string");
  PauliString p;
  p.n_qubits = static_cast<int>(text.size());
  p.letters.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case 'I': p.letters.push_back(PauliLetter::I); break;
      case 'X': p.letters.push_back(PauliLetter::X); break;
      case 'Y': p.letters.push_back(PauliLetter::Y); break;
      case 'Z': p.letters.push_back(PauliLetter::Z); break;
      default:
        throw InvalidLetter("invalid Pauli letter '" + std::string(1, c) +
                            "'");
    }
  }
  return p;
}

namespace {

Eigen::Matrix2cd letter_matrix(PauliLetter l) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  switch (l) {
    case PauliLetter::I: m << 1, 0, 0, 1; break;
    case PauliLetter::X: m << 0, 1, 1, 0; break;
    case PauliLetter::Y: m << 0, -1i, 1i, 0; break;
    case PauliLetter::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

Eigen::MatrixXcd pauli_matrix(const PauliString& p) {
  if (p.n_qubits > 6)
    throw TooManyQubits("pauli_matrix limited to 6 qubits, got " +
                        std::to_string(p.n_qubits));
  // kron(acc, letter): qubit 0 is the most significant factor.
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (PauliLetter l : p.letters) {
    const Eigen::Matrix2cd m = letter_matrix(l);
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        next.block(2 * r, 2 * c, 2, 2) = out(r, c) * m;
    out.swap(next);
  }
  return out;
}

}  // namespace qcdiff
