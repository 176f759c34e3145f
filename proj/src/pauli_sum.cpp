#include "qcdiff/pauli_sum.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace qcdiff {

PauliSum canonicalize(const PauliSum& h) {
  PauliSum out;
  out.n_qubits = h.n_qubits;
  std::map<std::string, std::size_t> index;
  for (const auto& [coeff, p] : h.terms) {
    const std::string key = p.str();
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.terms.size());
      out.terms.emplace_back(coeff, p);
    } else {
      out.terms[it->second].first += coeff;
    }
  }
  std::erase_if(out.terms, [](const auto& t) { return t.first == 0.0; });
  return out;
}

namespace {

struct PauliMasks {
  std::uint64_t flip = 0;   // X and Y positions
  std::uint64_t phase = 0;  // Y and Z positions (contribute (-1)^popcount)
  int n_y = 0;
};

PauliMasks masks_of(const PauliString& p, int n_qubits) {
  PauliMasks m;
  for (int q = 0; q < n_qubits; ++q) {
    const std::uint64_t bit = std::uint64_t(1) << (n_qubits - 1 - q);
    switch (p.letters[q]) {
      case PauliLetter::I: break;
      case PauliLetter::X: m.flip |= bit; break;
      case PauliLetter::Y:
        m.flip |= bit;
        m.phase |= bit;
        ++m.n_y;
        break;
      case PauliLetter::Z: m.phase |= bit; break;
    }
  }
  return m;
}

std::complex<double> y_phase(int n_y) {
  // i^n_y
  switch (n_y & 3) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

void apply_pauli(const PauliString& p, const Eigen::VectorXcd& in,
                 Eigen::VectorXcd& scratch) {
  const int n = p.n_qubits;
  const PauliMasks m = masks_of(p, n);
  const std::complex<double> global = y_phase(m.n_y);
  const Eigen::Index dim = in.size();
  scratch.resize(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const int par =
        std::popcount(static_cast<std::uint64_t>(j) & m.phase) & 1;
    const std::complex<double> v = par ? -global : global;
    scratch[static_cast<Eigen::Index>(j ^ static_cast<Eigen::Index>(m.flip))] =
        v * in[j];
  }
}

std::complex<double> expectation_complex(const Statevector& state,
                                         const PauliSum& h) {
  if (state.n_qubits != h.n_qubits)
    throw QubitMismatch("state has " + std::to_string(state.n_qubits) +
                        " qubits, Hamiltonian has " +
                        std::to_string(h.n_qubits));
  std::complex<double> total = 0.0;
  Eigen::VectorXcd scratch;
  for (const auto& [coeff, p] : h.terms) {
    apply_pauli(p, state.amps, scratch);
    total += coeff * state.amps.dot(scratch);
  }
  return total;
}

double expectation(const Statevector& state, const PauliSum& h) {
  const std::complex<double> v = expectation_complex(state, h);
  if (std::abs(v.imag()) > 1e-8)
    throw NonHermitianResidue("expectation has imaginary residue " +
                              std::to_string(v.imag()));
  return v.real();
}

Eigen::MatrixXcd pauli_sum_matrix(const PauliSum& h) {
  const Eigen::Index dim = Eigen::Index(1) << h.n_qubits;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [coeff, p] : h.terms) {
    const PauliMasks m = masks_of(p, h.n_qubits);
    const std::complex<double> global = y_phase(m.n_y);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const int par =
          std::popcount(static_cast<std::uint64_t>(j) & m.phase) & 1;
      mat(j ^ static_cast<Eigen::Index>(m.flip), j) +=
          coeff * (par ? -global : global);
    }
  }
  return mat;
}

double ground_energy(const PauliSum& h) {
  if (h.n_qubits > 10)
    throw TooManyQubits("ground_energy limited to 10 qubits, got " +
                        std::to_string(h.n_qubits));
  if (h.terms.empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      pauli_sum_matrix(h), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

PauliSum parse_hamiltonian(std::string_view text) {
  PauliSum h;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::string coeff_tok, pauli_tok, extra;
    if (!(ls >> coeff_tok)) continue;  // blank line
    if (!(ls >> pauli_tok))
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected `<coefficient> <pauli_string>`");
    if (ls >> extra)
      throw ParseError("line " + std::to_string(lineno) +
                       ": trailing token '" + extra + "'");
    double coeff = 0.0;
    const char* begin = coeff_tok.data();
    const char* end = begin + coeff_tok.size();
    const auto [ptr, ec] = std::from_chars(begin, end, coeff);
    if (ec != std::errc() || ptr != end)
      throw ParseError("line " + std::to_string(lineno) +
                       ": bad coefficient '" + coeff_tok + "'");
    PauliString p;
    try {
      p = parse_pauli_string(pauli_tok);
    } catch (const InvalidLetter& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (h.terms.empty())
      h.n_qubits = p.n_qubits;
    else if (p.n_qubits != h.n_qubits)
      throw LengthMismatch("line " + std::to_string(lineno) +
                           ": Pauli string length " +
                           std::to_string(p.n_qubits) +
                           " differs from earlier terms (" +
                           std::to_string(h.n_qubits) + ")");
    h.terms.emplace_back(coeff, std::move(p));
  }
  if (h.terms.empty()) throw ParseError("no Hamiltonian terms found");
  return canonicalize(h);
}

PauliSum load_hamiltonian(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_hamiltonian(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const LengthMismatch& e) {
    throw LengthMismatch(path.string() + ": " + e.what());
  }
}

}  // namespace qcdiff
