#include "qcdiff/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace qcdiff {

GateImage encode_circuit(const Circuit& c) {
  if (c.gates.empty()) throw EmptyCircuit("cannot encode an empty circuit");
  const ColumnLayout layout = layout_columns(c);
  GateImage img;
  img.height = c.n_qubits;
  img.width = static_cast<int>(layout.columns.size());
  img.pixels.setZero(img.height, img.width);
  for (int col = 0; col < img.width; ++col) {
    for (const Gate& g : layout.columns[col]) {
      switch (g.kind) {
        case GateKind::H: img.pixels(g.q0, col) = kPixelH; break;
        case GateKind::Hy: img.pixels(g.q0, col) = kPixelHy; break;
        case GateKind::Rz: img.pixels(g.q0, col) = kPixelRz; break;
        case GateKind::CX:
          img.pixels(g.q0, col) = kPixelCX;
          img.pixels(g.q1, col) = kPixelCX;
          break;
      }
    }
  }
  return img;
}

NormalizedImage normalize_to_28(const GateImage& g) {
  if (g.height > 28 || g.width > 28)
    throw TooLarge("gate image " + std::to_string(g.height) + "x" +
                   std::to_string(g.width) + " exceeds 28x28");
  NormalizedImage out;
  for (int r = 0; r < 28; ++r) {
    const int sr = resample_index(r, g.height, 28);
    for (int c = 0; c < 28; ++c) {
      const int sc = resample_index(c, g.width, 28);
      out.pixels(r, c) = g.pixels(sr, sc) / 127.5 - 1.0;
    }
  }
  return out;
}

PixelClass quantize_pixel(int v) {
  if (v < 30) return PixelClass::Background;
  if (v < 50) return PixelClass::Rz;
  if (v < 70) return PixelClass::Background;
  if (v < 90) return PixelClass::H;
  if (v < 120) return PixelClass::Hy;
  if (v < 160) return PixelClass::Background;
  return PixelClass::CX;
}

std::uint8_t palette_value(PixelClass c) {
  switch (c) {
    case PixelClass::Background: return kPixelBackground;
    case PixelClass::Rz: return kPixelRz;
    case PixelClass::H: return kPixelH;
    case PixelClass::Hy: return kPixelHy;
    case PixelClass::CX: return kPixelCX;
  }
  return kPixelBackground;
}

std::uint8_t unnormalize_value(double x) {
  const long v = std::lround((x + 1.0) * 127.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0l, 255l));
}

namespace {

using ByteGrid =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

ByteGrid unnormalize(const NormalizedImage& img) {
  ByteGrid bytes(28, 28);
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) bytes(r, c) = unnormalize_value(img.pixels(r, c));
  return bytes;
}

ByteGrid remap(const ByteGrid& bytes, int rows, int cols) {
  ByteGrid grid(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int sr = resample_index(r, 28, rows);
    for (int c = 0; c < cols; ++c)
      grid(r, c) = bytes(sr, resample_index(c, 28, cols));
  }
  return grid;
}

}  // namespace

int estimate_width(const NormalizedImage& img, int n_qubits) {
  const ByteGrid bytes = unnormalize(img);
  int best_w = 1;
  long best_score = -1;
  for (int w = 1; w <= 27; w += 2) {
    // Quantize the width-w hypothesis, then measure how well its
    // reconstruction explains the full image.
    ByteGrid grid = remap(bytes, n_qubits, w);
    for (int r = 0; r < n_qubits; ++r)
      for (int c = 0; c < w; ++c)
        grid(r, c) = palette_value(quantize_pixel(grid(r, c)));
    long score = 0;
    for (int r = 0; r < 28; ++r) {
      const int sr = resample_index(r, n_qubits, 28);
      for (int c = 0; c < 28; ++c) {
        const int sc = resample_index(c, w, 28);
        score += std::abs(static_cast<long>(bytes(r, c)) -
                          static_cast<long>(grid(sr, sc)));
      }
    }
    if (best_score < 0 || score < best_score) {
      best_score = score;
      best_w = w;
    }
  }
  return best_w;
}

Decoded decode_image(const NormalizedImage& img, int n_qubits) {
  const int width = estimate_width(img, n_qubits);
  const ByteGrid grid = remap(unnormalize(img), n_qubits, width);

  Decoded out;
  out.circuit.n_qubits = n_qubits;
  int next_param = 0;
  for (int col = 0; col < width; ++col) {
    int pending_cx = -1;  // control row awaiting its target
    for (int row = 0; row < n_qubits; ++row) {
      switch (quantize_pixel(grid(row, col))) {
        case PixelClass::Background: break;
        case PixelClass::H:
          out.circuit.gates.push_back(Gate::h(row));
          break;
        case PixelClass::Hy:
          out.circuit.gates.push_back(Gate::hy(row));
          break;
        case PixelClass::Rz:
          out.circuit.gates.push_back(Gate::rz(row, next_param++));
          out.has_parameters = true;
          break;
        case PixelClass::CX:
          if (pending_cx < 0) {
            pending_cx = row;
          } else {
            out.circuit.gates.push_back(Gate::cx(pending_cx, row));
            pending_cx = -1;
          }
          break;
      }
    }
    // An unpaired CX pixel cannot form a gate; it is repaired to background.
  }
  out.circuit.n_params = next_param;
  if (out.circuit.gates.empty())
    throw EmptyDecode("image decodes to an empty circuit");
  return out;
}

NormalizedImage clamp_normalized(const Eigen::Matrix<double, 28, 28>& raw) {
  NormalizedImage out;
  out.pixels = raw.cwiseMax(-1.0).cwiseMin(1.0);
  return out;
}

namespace {

constexpr char kImageMagic[4] = {'Q', 'C', 'I', 'M'};

void put_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xFF),
                     static_cast<char>((v >> 8) & 0xFF)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 4);
}

std::uint16_t get_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (std::uint32_t(b[1]) << 8) |
         (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
}

}  // namespace

void save_images(const std::vector<NormalizedImage>& images,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(kImageMagic, 4);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(images.size()));
  out.put(static_cast<char>(28));
  out.put(static_cast<char>(28));
  for (const NormalizedImage& img : images)
    for (int r = 0; r < 28; ++r)
      for (int c = 0; c < 28; ++c)
        out.put(static_cast<char>(unnormalize_value(img.pixels(r, c))));
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<NormalizedImage> load_images(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kImageMagic, 4) != 0)
    throw IoError(path.string() + ": not a QCIM image container");
  const std::uint16_t version = get_u16(in);
  if (version != 1)
    throw IoError(path.string() + ": unsupported QCIM version " +
                  std::to_string(version));
  const std::uint32_t count = get_u32(in);
  const int height = in.get();
  const int width = in.get();
  if (height != 28 || width != 28)
    throw IoError(path.string() + ": expected 28x28 images, got " +
                  std::to_string(height) + "x" + std::to_string(width));
  std::vector<NormalizedImage> images(count);
  std::vector<char> buf(28 * 28);
  for (std::uint32_t i = 0; i < count; ++i) {
    in.read(buf.data(), buf.size());
    if (!in) throw IoError(path.string() + ": truncated image data");
    for (int r = 0; r < 28; ++r)
      for (int c = 0; c < 28; ++c)
        images[i].pixels(r, c) =
            static_cast<unsigned char>(buf[r * 28 + c]) / 127.5 - 1.0;
  }
  return images;
}

void write_image_sidecar(const std::filesystem::path& image_path,
                         int n_qubits, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["n_qubits"] = n_qubits;
  j["seed"] = seed;
  j["palette_version"] = 1;
  std::filesystem::path p = image_path;
  p += ".json";
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open " + p.string() + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace qcdiff
