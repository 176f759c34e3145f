#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "qcdiff/circuit.hpp"

namespace qcdiff {

// Gate palette (encoder values).
inline constexpr std::uint8_t kPixelBackground = 0;
inline constexpr std::uint8_t kPixelRz = 40;
inline constexpr std::uint8_t kPixelH = 80;
inline constexpr std::uint8_t kPixelHy = 100;
inline constexpr std::uint8_t kPixelCX = 255;

/// One pixel per gate slot: rows are qubits, columns are circuit moments.
struct GateImage {
  int height = 0;  // n_qubits
  int width = 0;   // column count
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> pixels;

  bool operator==(const GateImage&) const = default;
};

/// 28x28 real image in [-1, 1]; pixel value = byte/127.5 - 1.
struct NormalizedImage {
  Eigen::Matrix<double, 28, 28> pixels;
};

enum class PixelClass : std::uint8_t { Background, Rz, H, Hy, CX };

/// Nearest-neighbor index map shared by every resize in the codec:
/// src = floor((dst + 0.5) * src_len / dst_len).
inline int resample_index(int dst, int src_len, int dst_len) {
  return static_cast<int>((2 * dst + 1) * src_len / (2 * dst_len));
}

/// Throws EmptyCircuit for a gate-free circuit.
GateImage encode_circuit(const Circuit& c);

/// Nearest-neighbor upscale to 28x28 plus the affine value map. Throws
/// TooLarge when either dimension exceeds 28.
NormalizedImage normalize_to_28(const GateImage& g);

/// Decoder quantization bands: [0,30) background, [30,50) Rz, [70,90) H,
/// [90,120) Hy, [160,255] CX; [50,70) and [120,160) are dead zones decoded
/// as background.
PixelClass quantize_pixel(int v);
std::uint8_t palette_value(PixelClass c);

/// Most plausible source width: candidates W in {1, 3, ..., 27} are scored
/// by how exactly a width-W palette-quantized grid reconstructs the image;
/// ties go to the smallest W.
int estimate_width(const NormalizedImage& img, int n_qubits);

struct Decoded {
  Circuit circuit;
  bool has_parameters = false;
};

/// Total decoder: quantizes the remapped grid, drops unpairable CX pixels,
/// pairs the rest top-down (control above target), and assembles columns
/// left to right. Throws EmptyDecode when no gate survives.
Decoded decode_image(const NormalizedImage& img, int n_qubits);

NormalizedImage clamp_normalized(const Eigen::Matrix<double, 28, 28>& raw);

// Container: magic "QCIM", u16 version = 1, u32 count, u8 height, u8 width,
// then count * height * width bytes row-major. Normalized images are stored
// unnormalized-and-rounded.
void save_images(const std::vector<NormalizedImage>& images,
                 const std::filesystem::path& path);
std::vector<NormalizedImage> load_images(const std::filesystem::path& path);
void write_image_sidecar(const std::filesystem::path& image_path,
                         int n_qubits, std::uint64_t seed);

std::uint8_t unnormalize_value(double x);

}  // namespace qcdiff
