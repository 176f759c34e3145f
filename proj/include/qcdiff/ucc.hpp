#pragma once

#include <cstdint>
#include <vector>

#include "qcdiff/circuit.hpp"
#include "qcdiff/pauli.hpp"
#include "qcdiff/rng.hpp"

namespace qcdiff {

struct DatasetSpec {
  int n_qubits = 4;
  int count = 10000;
  std::uint64_t seed = 0;
};

/// Letters i.i.d. uniform over {I,X,Y,Z}; an all-identity draw is resampled
/// as a whole string, so the result always has weight >= 1.
PauliString sample_pauli_string(int n_qubits, Rng& rng);

/// Symmetric exponential block exp(-i theta/2 P) for the given Pauli string:
/// a basis-change column (H on X qubits, Hy on Y qubits), a CX ladder down
/// the non-identity qubits, Rz(param_index) on the last of them, then the
/// mirrored ladder and basis column. Throws AllIdentity for weight 0.
Circuit build_ucc_block(const PauliString& p, int param_index);

/// Concatenation of one block per string; block k owns parameter k.
Circuit concat_ucc_blocks(const std::vector<PauliString>& ps);

/// spec.count single-block circuits on spec.n_qubits qubits, param index 0.
/// Item i is drawn from the stream derived as (seed, i), so generation is
/// reproducible and order-independent.
std::vector<Circuit> generate_corpus(const DatasetSpec& spec);

}  // namespace qcdiff
