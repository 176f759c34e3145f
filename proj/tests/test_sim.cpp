#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>

#include "oracles.hpp"
#include "qcdiff/pauli_sum.hpp"
#include "qcdiff/rng.hpp"
#include "qcdiff/statevector.hpp"
#include "qcdiff/ucc.hpp"
#include "qcdiff/unitary.hpp"

using namespace qcdiff;
using namespace std::complex_literals;

namespace {

Statevector random_state(int n, Rng& rng) {
  Statevector s = init_state(n);
  for (Eigen::Index i = 0; i < s.amps.size(); ++i)
    s.amps[i] = std::complex<double>(rng.next_normal(), rng.next_normal());
  s.amps /= s.amps.norm();
  return s;
}

PauliSum random_sum(int n, int terms, Rng& rng) {
  PauliSum h;
  h.n_qubits = n;
  for (int i = 0; i < terms; ++i)
    h.terms.emplace_back(4.0 * rng.next_double() - 2.0,
                         sample_pauli_string(n, rng));
  return canonicalize(h);
}

}  // namespace

TEST_CASE("init_state basics") {
  const Statevector one = init_state(1);
  CHECK(one.amps.size() == 2);
  CHECK(one.amps[0] == 1.0);
  const Statevector three = init_state(3);
  CHECK(three.amps.size() == 8);
  CHECK(three.amps.tail(7).cwiseAbs().maxCoeff() == 0.0);
  CHECK(three.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(init_state(25), TooManyQubits);
  CHECK_THROWS_AS(init_state(0), TooManyQubits);
}

TEST_CASE("gate actions on small states") {
  Statevector s = init_state(1);
  apply_gate(s, Gate::h(0));
  CHECK(std::abs(s.amps[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(s.amps[1] - 1.0 / std::sqrt(2.0)) < 1e-15);

  // CX on |10>: qubit 0 (MSB) set -> target flips.
  Statevector t = init_state(2);
  t.amps.setZero();
  t.amps[2] = 1.0;  // |10>
  apply_gate(t, Gate::cx(0, 1));
  CHECK(std::abs(t.amps[3] - 1.0) < 1e-15);

  // Hy |0> = (|0> + i|1>) / sqrt(2).
  Statevector y = init_state(1);
  apply_gate(y, Gate::hy(0));
  CHECK(std::abs(y.amps[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(y.amps[1] - 1.0i / std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("Rz requires its parameter") {
  Statevector s = init_state(1);
  CHECK_THROWS_AS(apply_gate(s, Gate::rz(0, 0)), MissingParameter);
}

TEST_CASE("run_circuit matches the dense oracle on corpus circuits") {
  Rng rng(21);
  const std::vector<Circuit> corpus = generate_corpus({4, 500, 22});
  Eigen::VectorXd theta(1);
  for (const Circuit& c : corpus) {
    theta[0] = 4.0 * rng.next_double() - 2.0;
    const Statevector s = run_circuit(c, theta);
    const Eigen::VectorXcd expected =
        circuit_unitary(c, theta).col(0);
    CHECK((s.amps - expected).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("empty circuit and zero-angle blocks act as identity") {
  Circuit empty;
  empty.n_qubits = 3;
  CHECK(run_circuit(empty, {}).amps[0] == 1.0);

  const Circuit zz = build_ucc_block(parse_pauli_string("ZZ"), 0);
  Eigen::VectorXd theta(1);
  theta[0] = 0.0;
  const Statevector s = run_circuit(zz, theta);
  CHECK(std::abs(std::abs(s.amps[0]) - 1.0) < 1e-12);
}

TEST_CASE("norm is preserved across long random circuits") {
  Rng rng(23);
  Circuit c;
  c.n_qubits = 4;
  int params = 0;
  for (int i = 0; i < 1000; ++i) {
    switch (rng.next_below(4)) {
      case 0: c.gates.push_back(Gate::h(rng.next_below(4))); break;
      case 1: c.gates.push_back(Gate::hy(rng.next_below(4))); break;
      case 2: {
        const int a = static_cast<int>(rng.next_below(4));
        int b = static_cast<int>(rng.next_below(3));
        if (b >= a) ++b;
        c.gates.push_back(Gate::cx(a, b));
        break;
      }
      default: c.gates.push_back(Gate::rz(rng.next_below(4), params++));
    }
  }
  c.n_params = params;
  Eigen::VectorXd theta(params);
  for (int j = 0; j < params; ++j) theta[j] = rng.next_double() * 6.0 - 3.0;
  CHECK(std::abs(run_circuit(c, theta).norm() - 1.0) <= 1e-12);
}

TEST_CASE("expectation on textbook states") {
  PauliSum zz;
  zz.n_qubits = 2;
  zz.terms.emplace_back(1.0, parse_pauli_string("ZZ"));
  CHECK(expectation(init_state(2), zz) == doctest::Approx(1.0));

  PauliSum x;
  x.n_qubits = 1;
  x.terms.emplace_back(1.0, parse_pauli_string("X"));
  Statevector plus = init_state(1);
  apply_gate(plus, Gate::h(0));
  CHECK(expectation(plus, x) == doctest::Approx(1.0));
}

TEST_CASE("expectation matches the dense quadratic form") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const Statevector s = random_state(3, rng);
    const PauliSum h = random_sum(3, 5, rng);
    const double got = expectation(s, h);
    const std::complex<double> expected =
        (s.amps.adjoint() * pauli_sum_matrix(h) * s.amps)(0, 0);
    CHECK(std::abs(got - expected.real()) <= 1e-10);
    CHECK(std::abs(expectation_complex(s, h).imag()) <= 1e-10);
  }
}

TEST_CASE("expectation rejects mismatched qubit counts") {
  PauliSum h;
  h.n_qubits = 3;
  h.terms.emplace_back(1.0, parse_pauli_string("ZZZ"));
  CHECK_THROWS_AS(expectation(init_state(2), h), QubitMismatch);
}

TEST_CASE("canonicalize merges duplicates") {
  PauliSum h;
  h.n_qubits = 2;
  h.terms.emplace_back(1.0, parse_pauli_string("ZZ"));
  h.terms.emplace_back(2.0, parse_pauli_string("ZZ"));
  h.terms.emplace_back(-0.5, parse_pauli_string("XX"));
  const PauliSum canon = canonicalize(h);
  REQUIRE(canon.terms.size() == 2);
  CHECK(canon.terms[0].first == doctest::Approx(3.0));
}

TEST_CASE("ground energy of textbook Hamiltonians") {
  PauliSum zz;
  zz.n_qubits = 2;
  zz.terms.emplace_back(1.0, parse_pauli_string("ZZ"));
  CHECK(ground_energy(zz) == doctest::Approx(-1.0));

  PauliSum x;
  x.n_qubits = 1;
  x.terms.emplace_back(1.0, parse_pauli_string("X"));
  CHECK(ground_energy(x) == doctest::Approx(-1.0));

  PauliSum empty;
  empty.n_qubits = 2;
  CHECK(ground_energy(empty) == 0.0);

  PauliSum big;
  big.n_qubits = 11;
  CHECK_THROWS_AS(ground_energy(big), TooManyQubits);
}

TEST_CASE("Rayleigh bound holds for random states") {
  Rng rng(37);
  const PauliSum h = random_sum(3, 6, rng);
  const double ground = ground_energy(h);
  for (int trial = 0; trial < 100; ++trial) {
    const Statevector s = random_state(3, rng);
    CHECK(ground <= expectation(s, h) + 1e-8);
  }
}

TEST_CASE(".ham parsing follows the grammar") {
  const PauliSum h = parse_hamiltonian("1.0 ZZ\n-0.5 XX");
  CHECK(h.n_qubits == 2);
  CHECK(h.terms.size() == 2);

  const PauliSum merged = parse_hamiltonian("1.0 ZZ\n2.0 ZZ");
  REQUIRE(merged.terms.size() == 1);
  CHECK(merged.terms[0].first == doctest::Approx(3.0));

  CHECK_THROWS_WITH_AS(parse_hamiltonian("1.0 ZQ"),
                       doctest::Contains("line 1"), ParseError);
  CHECK_THROWS_AS(parse_hamiltonian("1.0 ZZ\n0.5 XXX"), LengthMismatch);
  CHECK_THROWS_AS(parse_hamiltonian("# only a comment\n"), ParseError);
  CHECK_NOTHROW(parse_hamiltonian("1.0 ZZ # inline comment\n\n-1 XX"));
}

TEST_CASE("bundled Hamiltonians load and match frozen ground energies") {
  const PauliSum toy =
      load_hamiltonian(std::filesystem::path(QCDIFF_DATA_DIR) / "toy_zz.ham");
  CHECK(toy.n_qubits == 2);
  CHECK(ground_energy(toy) == doctest::Approx(-1.0).epsilon(1e-10));

  const PauliSum h2 =
      load_hamiltonian(std::filesystem::path(QCDIFF_DATA_DIR) / "h2_like.ham");
  CHECK(h2.n_qubits == 4);
  // Frozen from an independent dense diagonalization of the same terms.
  CHECK(std::abs(ground_energy(h2) - (-2.0013197392882285)) < 1e-8);
}
