#include "qcdiff/ucc.hpp"

namespace qcdiff {

PauliString sample_pauli_string(int n_qubits, Rng& rng) {
  PauliString p;
  p.n_qubits = n_qubits;
  for (;;) {
    p.letters.clear();
    for (int q = 0; q < n_qubits; ++q)
      p.letters.push_back(static_cast<PauliLetter>(rng.next_below(4)));
    if (p.weight() >= 1) return p;
  }
}

Circuit build_ucc_block(const PauliString& p, int param_index) {
  if (p.weight() == 0)
    throw AllIdentity("UCC block requires a non-identity Pauli string");

  std::vector<Gate> basis;
  std::vector<int> active;
  for (int q = 0; q < p.n_qubits; ++q) {
    switch (p.letters[q]) {
      case PauliLetter::I: break;
      case PauliLetter::X:
        basis.push_back(Gate::h(q));
        active.push_back(q);
        break;
      case PauliLetter::Y:
        basis.push_back(Gate::hy(q));
        active.push_back(q);
        break;
      case PauliLetter::Z:
        active.push_back(q);
        break;
    }
  }

  Circuit c;
  c.n_qubits = p.n_qubits;
  c.n_params = param_index + 1;
  for (const Gate& g : basis) c.gates.push_back(g);
  for (std::size_t i = 0; i + 1 < active.size(); ++i)
    c.gates.push_back(Gate::cx(active[i], active[i + 1]));
  c.gates.push_back(Gate::rz(active.back(), param_index));
  for (std::size_t i = active.size() - 1; i >= 1; --i)
    c.gates.push_back(Gate::cx(active[i - 1], active[i]));
  for (const Gate& g : basis) c.gates.push_back(g);
  return c;
}

Circuit concat_ucc_blocks(const std::vector<PauliString>& ps) {
  if (ps.empty()) throw AllIdentity("no Pauli strings to concatenate");
  Circuit c;
  c.n_qubits = ps.front().n_qubits;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (ps[k].n_qubits != c.n_qubits)
      throw QubitMismatch("blocks must share one qubit count");
    const Circuit block = build_ucc_block(ps[k], static_cast<int>(k));
    c.gates.insert(c.gates.end(), block.gates.begin(), block.gates.end());
  }
  c.n_params = static_cast<int>(ps.size());
  return c;
}

std::vector<Circuit> generate_corpus(const DatasetSpec& spec) {
  const Rng base(spec.seed);
  std::vector<Circuit> out;
  out.reserve(spec.count);
  for (int i = 0; i < spec.count; ++i) {
    Rng item = base.derive(static_cast<std::uint64_t>(i));
    out.push_back(build_ucc_block(sample_pauli_string(spec.n_qubits, item), 0));
  }
  return out;
}

}  // namespace qcdiff
