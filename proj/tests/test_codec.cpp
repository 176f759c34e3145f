#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "qcdiff/image.hpp"
#include "qcdiff/rng.hpp"
#include "qcdiff/ucc.hpp"

using namespace qcdiff;

namespace {

Circuit ucc(const std::string& s) {
  return build_ucc_block(parse_pauli_string(s), 0);
}

bool roundtrips(const Circuit& c) {
  const Decoded d =
      decode_image(normalize_to_28(encode_circuit(c)), c.n_qubits);
  return d.circuit == c;
}

}  // namespace

TEST_CASE("encode XZ matches the hand-derived pixel rows") {
  const GateImage img = encode_circuit(ucc("XZ"));
  REQUIRE(img.height == 2);
  REQUIRE(img.width == 5);
  const std::uint8_t q0[5] = {80, 255, 0, 255, 80};
  const std::uint8_t q1[5] = {0, 255, 40, 255, 0};
  for (int c = 0; c < 5; ++c) {
    CHECK(img.pixels(0, c) == q0[c]);
    CHECK(img.pixels(1, c) == q1[c]);
  }
}

TEST_CASE("encode ZZ matches the hand-derived pixel rows") {
  const GateImage img = encode_circuit(ucc("ZZ"));
  REQUIRE(img.height == 2);
  REQUIRE(img.width == 3);
  const std::uint8_t q0[3] = {255, 0, 255};
  const std::uint8_t q1[3] = {255, 40, 255};
  for (int c = 0; c < 3; ++c) {
    CHECK(img.pixels(0, c) == q0[c]);
    CHECK(img.pixels(1, c) == q1[c]);
  }
}

TEST_CASE("encoding an empty circuit fails") {
  Circuit c;
  c.n_qubits = 2;
  CHECK_THROWS_AS(encode_circuit(c), EmptyCircuit);
}

TEST_CASE("normalize maps palette endpoints to [-1, 1]") {
  const NormalizedImage img = normalize_to_28(encode_circuit(ucc("XZ")));
  double lo = 1e9, hi = -1e9;
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) {
      lo = std::min(lo, img.pixels(r, c));
      hi = std::max(hi, img.pixels(r, c));
    }
  CHECK(lo == doctest::Approx(-1.0));  // background 0
  CHECK(hi == doctest::Approx(1.0));   // CX 255
}

TEST_CASE("normalize expands source pixels into contiguous blocks") {
  const GateImage g = encode_circuit(ucc("XZ"));  // 2 x 5
  const NormalizedImage img = normalize_to_28(g);
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) {
      const int sr = r / 14;
      const int sc = resample_index(c, 5, 28);
      CHECK(img.pixels(r, c) ==
            doctest::Approx(g.pixels(sr, sc) / 127.5 - 1.0));
    }
}

TEST_CASE("oversized gate images are rejected") {
  GateImage g;
  g.height = 2;
  g.width = 29;
  g.pixels.setZero(2, 29);
  CHECK_THROWS_AS(normalize_to_28(g), TooLarge);
}

TEST_CASE("quantization bands follow the decode table") {
  CHECK(quantize_pixel(35) == PixelClass::Rz);
  CHECK(quantize_pixel(60) == PixelClass::Background);
  CHECK(quantize_pixel(200) == PixelClass::CX);
  // Half-open boundaries, last band inclusive.
  CHECK(quantize_pixel(0) == PixelClass::Background);
  CHECK(quantize_pixel(30) == PixelClass::Rz);
  CHECK(quantize_pixel(50) == PixelClass::Background);
  CHECK(quantize_pixel(70) == PixelClass::H);
  CHECK(quantize_pixel(90) == PixelClass::Hy);
  CHECK(quantize_pixel(120) == PixelClass::Background);
  CHECK(quantize_pixel(160) == PixelClass::CX);
  CHECK(quantize_pixel(255) == PixelClass::CX);
}

TEST_CASE("palette values decode back to their gate class") {
  CHECK(quantize_pixel(kPixelBackground) == PixelClass::Background);
  CHECK(quantize_pixel(kPixelRz) == PixelClass::Rz);
  CHECK(quantize_pixel(kPixelH) == PixelClass::H);
  CHECK(quantize_pixel(kPixelHy) == PixelClass::Hy);
  CHECK(quantize_pixel(kPixelCX) == PixelClass::CX);
}

TEST_CASE("estimate_width recovers clean widths") {
  CHECK(estimate_width(normalize_to_28(encode_circuit(ucc("XZ"))), 2) == 5);
  CHECK(estimate_width(normalize_to_28(encode_circuit(ucc("XXYZ"))), 4) == 9);
  CHECK(estimate_width(normalize_to_28(encode_circuit(ucc("ZZ"))), 2) == 3);
  CHECK(estimate_width(normalize_to_28(encode_circuit(ucc("IZII"))), 4) == 1);
}

TEST_CASE("an all-black image picks the smallest candidate width") {
  NormalizedImage img;
  img.pixels.setConstant(-1.0);
  CHECK(estimate_width(img, 4) == 1);
  CHECK_THROWS_AS(decode_image(img, 4), EmptyDecode);
}

TEST_CASE("roundtrip on a 2000-circuit corpus at N = 4") {
  const std::vector<Circuit> corpus = generate_corpus({4, 2000, 51});
  for (const Circuit& c : corpus) CHECK(roundtrips(c));
}

TEST_CASE("roundtrip covers gapped ladders and bare-Rz blocks") {
  for (const char* s :
       {"XIZ", "ZIIY", "IZII", "Z", "XY", "IIXI", "YIIZ", "ZIZI"}) {
    const std::string str(s);
    Circuit c = ucc(str);
    CAPTURE(str);
    CHECK(roundtrips(c));
  }
}

TEST_CASE("roundtrip across qubit counts up to 12") {
  Rng rng(77);
  for (int n = 2; n <= 12; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      const PauliString p = sample_pauli_string(n, rng);
      CHECK(roundtrips(build_ucc_block(p, 0)));
    }
  }
}

TEST_CASE("a lone CX pixel is repaired to background") {
  // Build a 2x3 image with a single 255: decode must drop it.
  GateImage g;
  g.height = 2;
  g.width = 3;
  g.pixels.setZero(2, 3);
  g.pixels(0, 1) = kPixelCX;
  g.pixels(1, 0) = kPixelRz;  // keeps the decode non-empty
  const Decoded d = decode_image(normalize_to_28(g), 2);
  REQUIRE(d.circuit.gates.size() == 1);
  CHECK(d.circuit.gates[0] == Gate::rz(1, 0));
}

TEST_CASE("decoder is total on random noise") {
  Rng rng(13);
  int empties = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    NormalizedImage img;
    for (int r = 0; r < 28; ++r)
      for (int c = 0; c < 28; ++c)
        img.pixels(r, c) = 2.0 * rng.next_double() - 1.0;
    try {
      const Decoded d = decode_image(img, 4);
      CHECK(!d.circuit.gates.empty());
      d.circuit.validate();
    } catch (const EmptyDecode&) {
      ++empties;
    }
  }
  CHECK(empties < 2000);  // noise may decode empty, never crash
}

TEST_CASE("palette survives per-pixel dead-zone noise") {
  Rng rng(14);
  const std::vector<Circuit> corpus = generate_corpus({4, 100, 15});
  for (const Circuit& c : corpus) {
    NormalizedImage img = normalize_to_28(encode_circuit(c));
    for (int r = 0; r < 28; ++r)
      for (int col = 0; col < 28; ++col)
        img.pixels(r, col) +=
            (2.0 * rng.next_double() - 1.0) * (10.0 / 127.5);
    const Decoded d = decode_image(clamp_normalized(img.pixels), c.n_qubits);
    CHECK(d.circuit == c);
  }
}

TEST_CASE("image container round-trips bitwise") {
  const std::vector<Circuit> corpus = generate_corpus({4, 32, 16});
  std::vector<NormalizedImage> images;
  for (const Circuit& c : corpus)
    images.push_back(normalize_to_28(encode_circuit(c)));
  const auto path = std::filesystem::temp_directory_path() / "qcdiff_t.qcim";
  save_images(images, path);
  const std::vector<NormalizedImage> loaded = load_images(path);
  REQUIRE(loaded.size() == images.size());
  for (std::size_t i = 0; i < images.size(); ++i)
    CHECK((loaded[i].pixels - images[i].pixels).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);
}
