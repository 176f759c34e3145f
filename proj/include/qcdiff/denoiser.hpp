#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcdiff/errors.hpp"
#include "qcdiff/nn.hpp"
#include "qcdiff/rng.hpp"

namespace qcdiff {

inline constexpr int kImagePixels = 784;  // 28 * 28, row-major flattening

template <typename S>
struct TensorRef {
  std::string name;
  std::vector<std::uint32_t> dims;
  S* data = nullptr;
  std::size_t size = 0;
};

namespace detail {

/// Glorot-uniform fill in storage order; draw sequence is part of the
/// reproducibility contract.
template <typename S, typename M>
void glorot_fill(M& m, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  S* p = m.data();
  for (Eigen::Index i = 0; i < m.size(); ++i)
    p[i] = static_cast<S>(limit * (2.0 * rng.next_double() - 1.0));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// mlp-small: flatten(784) ++ time embedding(32) -> 256 -> 256 -> 784,
// smooth-gated (SiLU) hidden activations, zero-initialized output layer.
// ---------------------------------------------------------------------------

template <typename S>
struct MlpSmall {
  static constexpr int kIn = kImagePixels + kTimeEmbedDim;
  static constexpr int kHidden = 256;

  MatX<S> fc1_w;
  VecX<S> fc1_b;
  MatX<S> fc2_w;
  VecX<S> fc2_b;
  MatX<S> out_w;
  VecX<S> out_b;

  void setup() {
    fc1_w = MatX<S>::Zero(kHidden, kIn);
    fc1_b = VecX<S>::Zero(kHidden);
    fc2_w = MatX<S>::Zero(kHidden, kHidden);
    fc2_b = VecX<S>::Zero(kHidden);
    out_w = MatX<S>::Zero(kImagePixels, kHidden);
    out_b = VecX<S>::Zero(kImagePixels);
  }

  bool allocated() const { return fc1_w.size() > 0; }

  void init_weights(Rng& rng) {
    detail::glorot_fill<S>(fc1_w, kIn, kHidden, rng);
    detail::glorot_fill<S>(fc2_w, kHidden, kHidden, rng);
    // out_w / out_b stay zero: the first training step then predicts
    // eps = 0, putting the initial loss at E[eps^2] = 1.
  }

  struct Tape {
    VecX<S> input, z1, h1, z2, h2;
    VecX<S> dz1, dz2, dh1, dh2;
  };

  void forward(const VecX<S>& x, int t, Tape& tape, VecX<S>& eps) const {
    tape.input.resize(kIn);
    tape.input.head(kImagePixels) = x;
    tape.input.tail(kTimeEmbedDim) = time_embedding(t).template cast<S>();
    tape.z1.noalias() = fc1_w * tape.input;
    tape.z1 += fc1_b;
    silu_forward(tape.z1, tape.h1);
    tape.z2.noalias() = fc2_w * tape.h1;
    tape.z2 += fc2_b;
    silu_forward(tape.z2, tape.h2);
    eps.noalias() = out_w * tape.h2;
    eps += out_b;
  }

  void backward(Tape& tape, const VecX<S>& deps, MlpSmall& g) const {
    g.out_w.noalias() += deps * tape.h2.transpose();
    g.out_b += deps;
    tape.dh2.noalias() = out_w.transpose() * deps;
    silu_backward(tape.z2, tape.dh2, tape.dz2);
    g.fc2_w.noalias() += tape.dz2 * tape.h1.transpose();
    g.fc2_b += tape.dz2;
    tape.dh1.noalias() = fc2_w.transpose() * tape.dz2;
    silu_backward(tape.z1, tape.dh1, tape.dz1);
    g.fc1_w.noalias() += tape.dz1 * tape.input.transpose();
    g.fc1_b += tape.dz1;
  }

  template <typename Self, typename Fn>
  static void visit_tensors(Self& self, Fn&& fn) {
    fn("fc1.w", self.fc1_w);
    fn("fc1.b", self.fc1_b);
    fn("fc2.w", self.fc2_w);
    fn("fc2.b", self.fc2_b);
    fn("out.w", self.out_w);
    fn("out.b", self.out_b);
  }
};

// ---------------------------------------------------------------------------
// unet-small: 28 -> 14 -> 7 -> 14 -> 28 with channel widths 32 -> 64, two
// stride-2 downsamplings, nearest-neighbor upsamplings with skip
// concatenations, 3x3 convolutions, 8-group normalization, SiLU, and a
// learned per-block time-embedding projection added as channel bias.
// ---------------------------------------------------------------------------

struct UnetGeometry {
  ConvGeometry stem;   // 1 -> 32 @ 28
  ConvGeometry down1;  // 32 -> 64, 28 -> 14
  ConvGeometry down2;  // 64 -> 64, 14 -> 7
  ConvGeometry mid;    // 64 -> 64 @ 7
  ConvGeometry up1;    // 128 -> 64 @ 14 (upsampled mid ++ down1 skip)
  ConvGeometry up2;    // 96 -> 32 @ 28 (upsampled up1 ++ stem skip)
  ConvGeometry out;    // 32 -> 1 @ 28
  std::vector<std::int32_t> up_7_14;
  std::vector<std::int32_t> up_14_28;

  static const UnetGeometry& get() {
    static const UnetGeometry g = [] {
      UnetGeometry geo;
      geo.stem = make_conv_geometry(1, 32, 28, 28, 1);
      geo.down1 = make_conv_geometry(32, 64, 28, 28, 2);
      geo.down2 = make_conv_geometry(64, 64, 14, 14, 2);
      geo.mid = make_conv_geometry(64, 64, 7, 7, 1);
      geo.up1 = make_conv_geometry(128, 64, 14, 14, 1);
      geo.up2 = make_conv_geometry(96, 32, 28, 28, 1);
      geo.out = make_conv_geometry(32, 1, 28, 28, 1);
      geo.up_7_14 = make_upsample_map(7, 7);
      geo.up_14_28 = make_upsample_map(14, 14);
      return geo;
    }();
    return g;
  }
};

template <typename S>
struct ConvBlockParams {
  MatX<S> conv_w;
  VecX<S> conv_b;
  MatX<S> tproj_w;
  VecX<S> tproj_b;
  VecX<S> gn_g, gn_b;

  void setup(const ConvGeometry& g) {
    conv_w = MatX<S>::Zero(g.cout, g.cin * 9);
    conv_b = VecX<S>::Zero(g.cout);
    tproj_w = MatX<S>::Zero(g.cout, kTimeEmbedDim);
    tproj_b = VecX<S>::Zero(g.cout);
    gn_g = VecX<S>::Zero(g.cout);
    gn_b = VecX<S>::Zero(g.cout);
  }

  void init_weights(const ConvGeometry& g, Rng& rng) {
    detail::glorot_fill<S>(conv_w, g.cin * 9.0, g.cout * 9.0, rng);
    detail::glorot_fill<S>(tproj_w, kTimeEmbedDim, g.cout, rng);
    gn_g.setOnes();
  }
};

template <typename S>
struct ConvBlockTape {
  MatX<S> col;     // im2col patches of the block input
  MatX<S> pre;     // conv output + conv/time bias (GN input)
  MatX<S> xhat;    // normalized pre
  VecX<S> istd;    // per-group inverse stddev
  MatX<S> gn_out;  // GN output (SiLU input)
  MatX<S> act;     // block output
  MatX<S> bwd_a, bwd_b, dcol;
};

template <typename S>
void conv_block_forward(const ConvGeometry& geo, const ConvBlockParams<S>& p,
                        const VecX<S>& emb, const MatX<S>& x,
                        ConvBlockTape<S>& tape) {
  im2col(geo, x, tape.col);
  tape.pre.noalias() = p.conv_w * tape.col;
  const VecX<S> bias = p.conv_b + p.tproj_w * emb + p.tproj_b;
  tape.pre.colwise() += bias;
  groupnorm_forward(p.gn_g, p.gn_b, tape.pre, tape.xhat, tape.istd,
                    tape.gn_out);
  silu_forward(tape.gn_out, tape.act);
}

/// dx gets the gradient w.r.t. the block input; parameter gradients are
/// accumulated into g.
template <typename S>
void conv_block_backward(const ConvGeometry& geo, const ConvBlockParams<S>& p,
                         const VecX<S>& emb, ConvBlockTape<S>& tape,
                         const MatX<S>& dact, ConvBlockParams<S>& g,
                         MatX<S>& dx) {
  silu_backward(tape.gn_out, dact, tape.bwd_a);
  groupnorm_backward(p.gn_g, tape.xhat, tape.istd, tape.bwd_a, tape.bwd_b,
                     g.gn_g, g.gn_b);
  const VecX<S> dbias = tape.bwd_b.rowwise().sum();
  g.conv_b += dbias;
  g.tproj_b += dbias;
  g.tproj_w.noalias() += dbias * emb.transpose();
  g.conv_w.noalias() += tape.bwd_b * tape.col.transpose();
  tape.dcol.noalias() = p.conv_w.transpose() * tape.bwd_b;
  col2im(geo, tape.dcol, dx);
}

template <typename S>
struct UnetSmall {
  ConvBlockParams<S> stem, down1, down2, mid, up1, up2;
  MatX<S> out_w;  // 1 x 288
  VecX<S> out_b;  // 1

  void setup() {
    const UnetGeometry& g = UnetGeometry::get();
    stem.setup(g.stem);
    down1.setup(g.down1);
    down2.setup(g.down2);
    mid.setup(g.mid);
    up1.setup(g.up1);
    up2.setup(g.up2);
    out_w = MatX<S>::Zero(1, g.out.cin * 9);
    out_b = VecX<S>::Zero(1);
  }

  bool allocated() const { return out_w.size() > 0; }

  void init_weights(Rng& rng) {
    const UnetGeometry& g = UnetGeometry::get();
    stem.init_weights(g.stem, rng);
    down1.init_weights(g.down1, rng);
    down2.init_weights(g.down2, rng);
    mid.init_weights(g.mid, rng);
    up1.init_weights(g.up1, rng);
    up2.init_weights(g.up2, rng);
    // Final conv stays zero-initialized.
  }

  struct Tape {
    VecX<S> emb;
    MatX<S> x0;
    ConvBlockTape<S> stem, down1, down2, mid, up1, up2;
    MatX<S> up_m, cat1, up_u1, cat2, out_col;
    MatX<S> out_dcol, dcat1, dcat2;
    MatX<S> d_up2, d_u1, d_mid, d_e2, d_e1, d_e0, d_x0, deps_m;
  };

  void forward(const VecX<S>& x, int t, Tape& tape, VecX<S>& eps) const {
    const UnetGeometry& g = UnetGeometry::get();
    tape.emb = time_embedding(t).template cast<S>();
    tape.x0 = x.transpose();  // 1 x 784
    conv_block_forward(g.stem, stem, tape.emb, tape.x0, tape.stem);
    conv_block_forward(g.down1, down1, tape.emb, tape.stem.act, tape.down1);
    conv_block_forward(g.down2, down2, tape.emb, tape.down1.act, tape.down2);
    conv_block_forward(g.mid, mid, tape.emb, tape.down2.act, tape.mid);
    upsample_forward(g.up_7_14, tape.mid.act, tape.up_m);
    tape.cat1.resize(128, 196);
    tape.cat1.topRows(64) = tape.up_m;
    tape.cat1.bottomRows(64) = tape.down1.act;
    conv_block_forward(g.up1, up1, tape.emb, tape.cat1, tape.up1);
    upsample_forward(g.up_14_28, tape.up1.act, tape.up_u1);
    tape.cat2.resize(96, 784);
    tape.cat2.topRows(64) = tape.up_u1;
    tape.cat2.bottomRows(32) = tape.stem.act;
    conv_block_forward(g.up2, up2, tape.emb, tape.cat2, tape.up2);
    im2col(g.out, tape.up2.act, tape.out_col);
    eps.noalias() = (out_w * tape.out_col).transpose();
    eps.array() += out_b[0];
  }

  void backward(Tape& tape, const VecX<S>& deps, UnetSmall& g) const {
    const UnetGeometry& geo = UnetGeometry::get();
    tape.deps_m = deps.transpose();  // 1 x 784
    g.out_b[0] += deps.sum();
    g.out_w.noalias() += tape.deps_m * tape.out_col.transpose();
    tape.out_dcol.noalias() = out_w.transpose() * tape.deps_m;
    col2im(geo.out, tape.out_dcol, tape.d_up2);
    // d_up2 now holds the gradient w.r.t. up2's activation.
    conv_block_backward(geo.up2, up2, tape.emb, tape.up2, tape.d_up2, g.up2,
                        tape.dcat2);
    upsample_backward(geo.up_14_28, tape.dcat2.topRows(64), tape.d_u1, 196);
    conv_block_backward(geo.up1, up1, tape.emb, tape.up1, tape.d_u1, g.up1,
                        tape.dcat1);
    upsample_backward(geo.up_7_14, tape.dcat1.topRows(64), tape.d_mid, 49);
    conv_block_backward(geo.mid, mid, tape.emb, tape.mid, tape.d_mid, g.mid,
                        tape.d_e2);
    conv_block_backward(geo.down2, down2, tape.emb, tape.down2, tape.d_e2,
                        g.down2, tape.d_e1);
    tape.d_e1 += tape.dcat1.bottomRows(64);  // skip into up1
    conv_block_backward(geo.down1, down1, tape.emb, tape.down1, tape.d_e1,
                        g.down1, tape.d_e0);
    tape.d_e0 += tape.dcat2.bottomRows(32);  // skip into up2
    conv_block_backward(geo.stem, stem, tape.emb, tape.stem, tape.d_e0,
                        g.stem, tape.d_x0);
  }

  template <typename Self, typename Fn>
  static void visit_tensors(Self& self, Fn&& fn) {
    auto block = [&fn](const char* prefix, auto& b) {
      const std::string p(prefix);
      fn((p + ".conv.w").c_str(), b.conv_w);
      fn((p + ".conv.b").c_str(), b.conv_b);
      fn((p + ".tproj.w").c_str(), b.tproj_w);
      fn((p + ".tproj.b").c_str(), b.tproj_b);
      fn((p + ".gn.g").c_str(), b.gn_g);
      fn((p + ".gn.b").c_str(), b.gn_b);
    };
    block("stem", self.stem);
    block("down1", self.down1);
    block("down2", self.down2);
    block("mid", self.mid);
    block("up1", self.up1);
    block("up2", self.up2);
    fn("out.conv.w", self.out_w);
    fn("out.conv.b", self.out_b);
  }
};

// ---------------------------------------------------------------------------
// Config-dispatching wrapper. Exactly one of the two nets is allocated.
// ---------------------------------------------------------------------------

inline constexpr const char* kConfigMlpSmall = "mlp-small";
inline constexpr const char* kConfigUnetSmall = "unet-small";

template <typename S>
struct DenoiserTape {
  typename MlpSmall<S>::Tape mlp;
  typename UnetSmall<S>::Tape unet;
};

template <typename S>
struct Denoiser {
  std::string config;
  MlpSmall<S> mlp;
  UnetSmall<S> unet;

  bool is_mlp() const { return config == kConfigMlpSmall; }

  static Denoiser make(std::string_view config_id) {
    Denoiser d;
    d.config = std::string(config_id);
    if (config_id == kConfigMlpSmall)
      d.mlp.setup();
    else if (config_id == kConfigUnetSmall)
      d.unet.setup();
    else
      throw InvalidRange("unknown denoiser config '" +
                         std::string(config_id) + "'");
    return d;
  }

  void init_weights(Rng& rng) {
    if (is_mlp())
      mlp.init_weights(rng);
    else
      unet.init_weights(rng);
  }

  template <typename Fn>
  void visit(Fn&& fn) {
    if (is_mlp())
      MlpSmall<S>::visit_tensors(mlp, fn);
    else
      UnetSmall<S>::visit_tensors(unet, fn);
  }
  template <typename Fn>
  void visit(Fn&& fn) const {
    if (is_mlp())
      MlpSmall<S>::visit_tensors(mlp, fn);
    else
      UnetSmall<S>::visit_tensors(unet, fn);
  }

  std::vector<TensorRef<S>> tensors() {
    std::vector<TensorRef<S>> refs;
    visit([&refs](const char* name, auto& m) {
      TensorRef<S> r;
      r.name = name;
      if (m.cols() == 1)
        r.dims = {static_cast<std::uint32_t>(m.rows())};
      else
        r.dims = {static_cast<std::uint32_t>(m.rows()),
                  static_cast<std::uint32_t>(m.cols())};
      r.data = m.data();
      r.size = static_cast<std::size_t>(m.size());
      refs.push_back(std::move(r));
    });
    return refs;
  }

  long param_count() const {
    long n = 0;
    visit([&n](const char*, const auto& m) { n += m.size(); });
    return n;
  }

  void set_zero() {
    visit([](const char*, auto& m) { m.setZero(); });
  }

  /// Accumulate other's tensors into this one (fixed order).
  void add(const Denoiser& other) {
    auto mine = tensors();
    auto theirs = const_cast<Denoiser&>(other).tensors();
    for (std::size_t i = 0; i < mine.size(); ++i)
      Eigen::Map<VecX<S>>(mine[i].data, mine[i].size) +=
          Eigen::Map<const VecX<S>>(theirs[i].data, theirs[i].size);
  }

  /// eps prediction for a flattened 28x28 image (row-major, 784 entries).
  void forward(const VecX<S>& x, int t, DenoiserTape<S>& tape,
               VecX<S>& eps) const {
    if (x.size() != kImagePixels)
      throw ShapeMismatch("denoiser input must have 784 entries, got " +
                          std::to_string(x.size()));
    if (t < 1) throw BadTimestep("timestep must be >= 1");
    if (is_mlp())
      mlp.forward(x, t, tape.mlp, eps);
    else
      unet.forward(x, t, tape.unet, eps);
  }

  void backward(DenoiserTape<S>& tape, const VecX<S>& deps,
                Denoiser& grads) const {
    if (is_mlp())
      mlp.backward(tape.mlp, deps, grads.mlp);
    else
      unet.backward(tape.unet, deps, grads.unet);
  }
};

}  // namespace qcdiff
