#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "qcdiff/errors.hpp"

namespace qcdiff {

enum class PauliLetter : std::uint8_t { I, X, Y, Z };

char to_char(PauliLetter l);

/// Word over {I,X,Y,Z}, one letter per qubit. Qubit 0 is the leftmost letter
/// and the most significant bit of basis-state indices.
struct PauliString {
  int n_qubits = 0;
  std::vector<PauliLetter> letters;

  int weight() const {
    int w = 0;
    for (PauliLetter l : letters)
      if (l != PauliLetter::I) ++w;
    return w;
  }

  std::string str() const {
    std::string s;
    s.reserve(letters.size());
    for (PauliLetter l : letters) s.push_back(to_char(l));
    return s;
  }

  bool operator==(const PauliString&) const = default;
};

/// Throws InvalidLetter for characters outside {I,X,Y,Z}.
PauliString parse_pauli_string(std::string_view text);

/// Dense 2^N x 2^N tensor-product matrix. Oracle scale: N <= 6.
Eigen::MatrixXcd pauli_matrix(const PauliString& p);

}  // namespace qcdiff
