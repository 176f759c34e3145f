#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <optional>
#include <vector>

#include "qcdiff/adam.hpp"
#include "qcdiff/denoiser.hpp"
#include "qcdiff/image.hpp"
#include "qcdiff/parallel.hpp"
#include "qcdiff/rng.hpp"
#include "qcdiff/schedule.hpp"

namespace qcdiff {

using Image28 = Eigen::Matrix<double, 28, 28>;

/// Closed-form forward noising: sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
inline Image28 forward_noise(const Image28& x0, int t, const Image28& eps,
                             const NoiseSchedule& s) {
  if (t < 1 || t > s.T)
    throw BadTimestep("timestep " + std::to_string(t) + " outside 1.." +
                      std::to_string(s.T));
  const double ab = s.alpha_bar_at(t);
  return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * eps;
}

/// Row-major flattening shared by the codec and the denoisers.
template <typename S>
VecX<S> flatten_image(const Image28& img) {
  VecX<S> v(kImagePixels);
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c)
      v[r * 28 + c] = static_cast<S>(img(r, c));
  return v;
}

template <typename S>
Image28 unflatten_image(const VecX<S>& v) {
  Image28 img;
  for (int r = 0; r < 28; ++r)
    for (int c = 0; c < 28; ++c) img(r, c) = static_cast<double>(v[r * 28 + c]);
  return img;
}

/// NormalizedImage-level eps prediction (test/tooling convenience).
template <typename S>
Image28 predict_eps(const Denoiser<S>& params, const Image28& x_t, int t) {
  DenoiserTape<S> tape;
  VecX<S> out;
  params.forward(flatten_image<S>(x_t), t, tape, out);
  return unflatten_image(out);
}

template <typename S>
struct AdamNetState {
  Denoiser<S> m, v;
  long step_count = 0;
  AdamHyper hyper;

  static AdamNetState make(const Denoiser<S>& params, const AdamHyper& h) {
    AdamNetState s;
    s.m = Denoiser<S>::make(params.config);
    s.v = Denoiser<S>::make(params.config);
    s.hyper = h;
    return s;
  }
};

struct TrainConfig {
  long steps = 2000;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int T = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.01;
  std::string config_id = kConfigMlpSmall;
  int threads = 1;

  void validate() const {
    if (steps < 1 || batch_size < 1)
      throw InvalidRange("training needs steps >= 1 and batch_size >= 1");
    if (learning_rate <= 0) throw InvalidRange("learning rate must be > 0");
  }
};

/// Per-step scratch: one tape per worker, per-item gradients so the batch
/// reduction order is a fixed tree over item indices (thread-count
/// invariant).
template <typename S>
struct TrainWorkspace {
  MatX<S> batch;  // 784 x B
  std::vector<int> ts;
  MatX<S> eps;  // 784 x B
  std::vector<Denoiser<S>> item_grads;
  std::vector<DenoiserTape<S>> tapes;  // one per worker
  std::vector<double> item_loss;
  std::vector<VecX<S>> xt, eps_hat, deps;

  static TrainWorkspace make(const std::string& config, int batch_size,
                             int threads) {
    TrainWorkspace ws;
    ws.batch.resize(kImagePixels, batch_size);
    ws.ts.resize(batch_size);
    ws.eps.resize(kImagePixels, batch_size);
    ws.item_grads.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i)
      ws.item_grads.push_back(Denoiser<S>::make(config));
    ws.tapes.resize(std::max(1, threads));
    ws.item_loss.resize(batch_size);
    ws.xt.resize(batch_size);
    ws.eps_hat.resize(batch_size);
    ws.deps.resize(batch_size);
    return ws;
  }
};

namespace detail {

/// Fixed pairwise tree over item indices; identical result for any thread
/// count.
template <typename S>
void tree_reduce_grads(std::vector<Denoiser<S>>& grads, int n) {
  for (int stride = 1; stride < n; stride *= 2)
    for (int i = 0; i + stride < n; i += 2 * stride)
      grads[i].add(grads[i + stride]);
}

inline double tree_reduce_loss(std::vector<double>& loss, int n) {
  for (int stride = 1; stride < n; stride *= 2)
    for (int i = 0; i + stride < n; i += 2 * stride) loss[i] += loss[i + stride];
  return loss[0];
}

}  // namespace detail

/// One optimization step of Algorithm-1 training on a prepared batch
/// (columns of `batch` are flattened x0 images). Draws per item a uniform
/// timestep and a Gaussian eps from `rng`, in item order. Returns the batch
/// loss. Throws NonFiniteLoss on divergence.
template <typename S>
double train_step(Denoiser<S>& params, const MatX<S>& batch,
                  const NoiseSchedule& s, Rng& rng, AdamNetState<S>& opt,
                  TrainWorkspace<S>& ws, int threads) {
  const int b = static_cast<int>(batch.cols());
  if (b < 1) throw InvalidRange("empty training batch");
  for (int i = 0; i < b; ++i) {
    ws.ts[i] = 1 + static_cast<int>(rng.next_below(s.T));
    for (int p = 0; p < kImagePixels; ++p)
      ws.eps(p, i) = static_cast<S>(rng.next_normal());
  }

  const int workers = std::clamp(threads, 1, b);
  const double denom = static_cast<double>(b) * kImagePixels;
  std::atomic<int> next{0};
  auto work = [&](int worker) {
    DenoiserTape<S>& tape = ws.tapes[worker];
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= b) return;
      const int t = ws.ts[i];
      const S ca = static_cast<S>(std::sqrt(s.alpha_bar_at(t)));
      const S cb = static_cast<S>(std::sqrt(1.0 - s.alpha_bar_at(t)));
      ws.xt[i] = ca * batch.col(i) + cb * ws.eps.col(i);
      params.forward(ws.xt[i], t, tape, ws.eps_hat[i]);
      ws.deps[i] = ws.eps_hat[i] - ws.eps.col(i);
      ws.item_loss[i] = static_cast<double>(
          ws.deps[i].template cast<double>().squaredNorm());
      ws.deps[i] *= static_cast<S>(2.0 / denom);
      ws.item_grads[i].set_zero();
      params.backward(tape, ws.deps[i], ws.item_grads[i]);
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  detail::tree_reduce_grads(ws.item_grads, b);
  const double loss = detail::tree_reduce_loss(ws.item_loss, b) / denom;
  if (!std::isfinite(loss))
    throw NonFiniteLoss("training loss is not finite");

  ++opt.step_count;
  auto pt = params.tensors();
  auto gt = ws.item_grads[0].tensors();
  auto mt = opt.m.tensors();
  auto vt = opt.v.tensors();
  for (std::size_t k = 0; k < pt.size(); ++k)
    adam_update(pt[k].data, gt[k].data, mt[k].data, vt[k].data,
                static_cast<long>(pt[k].size), opt.step_count, opt.hyper);
  return loss;
}

template <typename S>
struct TrainResult {
  Denoiser<S> params;
  AdamNetState<S> opt;
  std::vector<double> loss_trace;
};

/// Full training driver: Glorot init (zero output layer), uniform batch
/// selection with replacement, `steps` train_step calls.
template <typename S>
TrainResult<S> train_denoiser(const MatX<S>& images, const TrainConfig& cfg) {
  cfg.validate();
  if (images.cols() < 1) throw InvalidRange("empty training corpus");
  const NoiseSchedule s = make_schedule(cfg.T, cfg.beta_start, cfg.beta_end);
  const Rng root(cfg.seed);
  Rng init_rng = root.derive("init");
  Rng step_rng = root.derive("steps");

  TrainResult<S> out;
  out.params = Denoiser<S>::make(cfg.config_id);
  out.params.init_weights(init_rng);
  out.opt = AdamNetState<S>::make(out.params,
                                  AdamHyper{cfg.learning_rate, 0.9, 0.999,
                                            1e-8});
  TrainWorkspace<S> ws =
      TrainWorkspace<S>::make(cfg.config_id, cfg.batch_size, cfg.threads);
  out.loss_trace.reserve(cfg.steps);
  const auto count = static_cast<std::uint64_t>(images.cols());
  for (long step = 0; step < cfg.steps; ++step) {
    for (int i = 0; i < cfg.batch_size; ++i)
      ws.batch.col(i) =
          images.col(static_cast<Eigen::Index>(step_rng.next_below(count)));
    out.loss_trace.push_back(train_step(out.params, ws.batch, s, step_rng,
                                        out.opt, ws, cfg.threads));
  }
  return out;
}

/// Ancestral sampling (Algorithm 2). Image i uses the stream derived from
/// (rng, i); z is drawn for t > 1 only. Outputs are clamped to [-1, 1] at
/// the decode boundary, not during iteration.
template <typename S>
std::vector<NormalizedImage> sample(const Denoiser<S>& params,
                                    const NoiseSchedule& s, int count,
                                    const Rng& rng, int threads = 1) {
  std::vector<NormalizedImage> out(count);
  parallel_for(count, threads, [&](int i) {
    Rng r = rng.derive(static_cast<std::uint64_t>(i));
    DenoiserTape<S> tape;
    VecX<S> x(kImagePixels), eps_hat(kImagePixels);
    for (int p = 0; p < kImagePixels; ++p)
      x[p] = static_cast<S>(r.next_normal());
    for (int t = s.T; t >= 1; --t) {
      params.forward(x, t, tape, eps_hat);
      const S c1 = static_cast<S>(1.0 / std::sqrt(s.alpha_at(t)));
      const S c2 = static_cast<S>((1.0 - s.alpha_at(t)) /
                                  std::sqrt(1.0 - s.alpha_bar_at(t)));
      x = c1 * (x - c2 * eps_hat);
      if (t > 1) {
        const S sg = static_cast<S>(s.sigma_at(t));
        for (int p = 0; p < kImagePixels; ++p)
          x[p] += sg * static_cast<S>(r.next_normal());
      }
    }
    out[i] = clamp_normalized(unflatten_image(x));
  });
  return out;
}

// Checkpoint container: magic "QDNM", u16 version = 1, config id, tensor
// blocks (params, then optimizer moments under "opt."). Float32 storage is
// the in-memory training precision, so round-trips are bitwise.
void save_checkpoint(const Denoiser<float>& params,
                     const AdamNetState<float>& opt,
                     const std::filesystem::path& path);

struct Checkpoint {
  Denoiser<float> params;
  AdamNetState<float> opt;
};

Checkpoint load_checkpoint(const std::filesystem::path& path,
                           std::optional<std::string> expected_config =
                               std::nullopt);

void write_loss_csv(const std::vector<double>& trace,
                    const std::filesystem::path& path);

}  // namespace qcdiff
