#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

namespace qcdiff {

template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline constexpr int kTimeEmbedDim = 32;
inline constexpr int kGroupNormGroups = 8;

/// Sinusoidal position features of the timestep, half sine / half cosine.
inline Eigen::VectorXd time_embedding(int t) {
  Eigen::VectorXd emb(kTimeEmbedDim);
  constexpr int half = kTimeEmbedDim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    emb[i] = std::sin(t * freq);
    emb[half + i] = std::cos(t * freq);
  }
  return emb;
}

// Feature maps are (channels x pixels) matrices; pixel p = y * width + x.

/// 3x3 convolution geometry with padding 1. src holds, for every output
/// pixel and kernel slot, the input pixel index or -1 (outside).
struct ConvGeometry {
  int cin = 0, cout = 0;
  int h_in = 0, w_in = 0, stride = 1;
  int h_out = 0, w_out = 0;
  std::vector<std::int32_t> src;  // h_out*w_out*9

  int pixels_in() const { return h_in * w_in; }
  int pixels_out() const { return h_out * w_out; }
};

inline ConvGeometry make_conv_geometry(int cin, int cout, int h_in, int w_in,
                                       int stride) {
  ConvGeometry g;
  g.cin = cin;
  g.cout = cout;
  g.h_in = h_in;
  g.w_in = w_in;
  g.stride = stride;
  g.h_out = (h_in - 1) / stride + 1;
  g.w_out = (w_in - 1) / stride + 1;
  g.src.resize(static_cast<std::size_t>(g.pixels_out()) * 9);
  for (int oy = 0; oy < g.h_out; ++oy)
    for (int ox = 0; ox < g.w_out; ++ox) {
      const int p = oy * g.w_out + ox;
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
          const int iy = oy * stride + ky - 1;
          const int ix = ox * stride + kx - 1;
          g.src[static_cast<std::size_t>(p) * 9 + ky * 3 + kx] =
              (iy >= 0 && iy < h_in && ix >= 0 && ix < w_in)
                  ? iy * w_in + ix
                  : -1;
        }
    }
  return g;
}

/// col (cin*9 x pixels_out) <- patches of x (cin x pixels_in).
template <typename S>
void im2col(const ConvGeometry& g, const MatX<S>& x, MatX<S>& col) {
  col.resize(g.cin * 9, g.pixels_out());
  for (int p = 0; p < g.pixels_out(); ++p) {
    const std::int32_t* s = &g.src[static_cast<std::size_t>(p) * 9];
    for (int k = 0; k < 9; ++k) {
      if (s[k] >= 0)
        col.block(k * g.cin, p, g.cin, 1) = x.col(s[k]);
      else
        col.block(k * g.cin, p, g.cin, 1).setZero();
    }
  }
}

/// dx (cin x pixels_in, zeroed here) <- scatter-add of dcol patches.
template <typename S>
void col2im(const ConvGeometry& g, const MatX<S>& dcol, MatX<S>& dx) {
  dx.resize(g.cin, g.pixels_in());
  dx.setZero();
  for (int p = 0; p < g.pixels_out(); ++p) {
    const std::int32_t* s = &g.src[static_cast<std::size_t>(p) * 9];
    for (int k = 0; k < 9; ++k)
      if (s[k] >= 0) dx.col(s[k]) += dcol.block(k * g.cin, p, g.cin, 1);
  }
}

/// Nearest-neighbor 2x upsampling table: out pixel -> source pixel.
inline std::vector<std::int32_t> make_upsample_map(int h_in, int w_in) {
  std::vector<std::int32_t> map(static_cast<std::size_t>(4) * h_in * w_in);
  const int w_out = 2 * w_in;
  for (int y = 0; y < 2 * h_in; ++y)
    for (int x = 0; x < w_out; ++x)
      map[static_cast<std::size_t>(y) * w_out + x] = (y / 2) * w_in + x / 2;
  return map;
}

template <typename S>
void upsample_forward(const std::vector<std::int32_t>& map, const MatX<S>& x,
                      MatX<S>& y) {
  y.resize(x.rows(), static_cast<Eigen::Index>(map.size()));
  for (std::size_t p = 0; p < map.size(); ++p)
    y.col(static_cast<Eigen::Index>(p)) = x.col(map[p]);
}

template <typename Dy, typename S>
void upsample_backward(const std::vector<std::int32_t>& map, const Dy& dy,
                       MatX<S>& dx, int pixels_in) {
  dx.resize(dy.rows(), pixels_in);
  dx.setZero();
  for (std::size_t p = 0; p < map.size(); ++p)
    dx.col(map[p]) += dy.col(static_cast<Eigen::Index>(p));
}

template <typename S>
S sigmoid(S x) {
  return S(1) / (S(1) + std::exp(-x));
}

/// y = x * sigmoid(x), elementwise. Works for any dense Eigen type.
template <typename M>
void silu_forward(const M& x, M& y) {
  using S = typename M::Scalar;
  y = x.unaryExpr([](S v) { return v * sigmoid(v); });
}

template <typename M>
void silu_backward(const M& x, const M& dy, M& dx) {
  using S = typename M::Scalar;
  dx = dy.cwiseProduct(x.unaryExpr([](S v) {
    const S s = sigmoid(v);
    return s * (S(1) + v * (S(1) - s));
  }));
}

inline constexpr double kGroupNormEps = 1e-5;

/// Per-group normalization over (channels/groups x pixels) slabs, then a
/// per-channel affine map. xhat and istd are retained for the backward pass.
template <typename S>
void groupnorm_forward(const VecX<S>& gamma, const VecX<S>& beta,
                       const MatX<S>& x, MatX<S>& xhat, VecX<S>& istd,
                       MatX<S>& y) {
  const int channels = static_cast<int>(x.rows());
  const int cpg = channels / kGroupNormGroups;
  xhat.resize(x.rows(), x.cols());
  y.resize(x.rows(), x.cols());
  istd.resize(kGroupNormGroups);
  for (int g = 0; g < kGroupNormGroups; ++g) {
    const auto block = x.middleRows(g * cpg, cpg);
    const S mu = block.mean();
    const S var = (block.array() - mu).square().mean();
    const S is = S(1) / std::sqrt(var + static_cast<S>(kGroupNormEps));
    istd[g] = is;
    xhat.middleRows(g * cpg, cpg) = (block.array() - mu).matrix() * is;
  }
  for (int c = 0; c < channels; ++c)
    y.row(c) = gamma[c] * xhat.row(c).array() + beta[c];
}

template <typename S>
void groupnorm_backward(const VecX<S>& gamma, const MatX<S>& xhat,
                        const VecX<S>& istd, const MatX<S>& dy, MatX<S>& dx,
                        VecX<S>& dgamma, VecX<S>& dbeta) {
  const int channels = static_cast<int>(xhat.rows());
  const int cpg = channels / kGroupNormGroups;
  dx.resize(xhat.rows(), xhat.cols());
  for (int c = 0; c < channels; ++c) {
    dgamma[c] += dy.row(c).dot(xhat.row(c));
    dbeta[c] += dy.row(c).sum();
    dx.row(c) = gamma[c] * dy.row(c);  // dx holds d/dxhat for now
  }
  for (int g = 0; g < kGroupNormGroups; ++g) {
    auto dxh = dx.middleRows(g * cpg, cpg);
    const auto xh = xhat.middleRows(g * cpg, cpg);
    const S m1 = dxh.mean();
    const S m2 = dxh.cwiseProduct(xh).mean();
    dxh = ((dxh.array() - m1) - xh.array() * m2).matrix() * istd[g];
  }
}

}  // namespace qcdiff
