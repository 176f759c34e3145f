#include "qcdiff/vqe.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "qcdiff/statevector.hpp"

namespace qcdiff {

namespace {

double energy(const Circuit& c, const PauliSum& h,
              const Eigen::VectorXd& theta) {
  const Statevector s = run_circuit(c, theta);
  return expectation(s, h);
}

constexpr double kHalfPi = 1.5707963267948966;
constexpr double kStopTolerance = 1e-9;
constexpr int kStopWindow = 5;

}  // namespace

Eigen::VectorXd parameter_shift_grad(const Circuit& c, const PauliSum& h,
                                     const Eigen::VectorXd& theta) {
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd shifted = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    shifted[j] = theta[j] + kHalfPi;
    const double plus = energy(c, h, shifted);
    shifted[j] = theta[j] - kHalfPi;
    const double minus = energy(c, h, shifted);
    shifted[j] = theta[j];
    grad[j] = 0.5 * (plus - minus);
  }
  return grad;
}

VqeResult run_vqe(const Circuit& c, const PauliSum& h, const VqeConfig& cfg) {
  VqeResult result;
  if (c.n_params == 0) {
    const double e = energy(c, h, Eigen::VectorXd());
    result.best_energy = e;
    result.trace.push_back(e);
    result.iterations_run = 1;
    result.converged_reason = ConvergedReason::Tolerance;
    return result;
  }

  Rng rng(cfg.seed);
  Eigen::VectorXd theta(c.n_params);
  for (int j = 0; j < c.n_params; ++j)
    theta[j] = -0.1 + 0.2 * rng.next_double();

  AdamState opt = AdamState::make(c.n_params, AdamHyper{cfg.learning_rate});
  result.best_energy = std::numeric_limits<double>::infinity();
  result.converged_reason = ConvergedReason::MaxIters;
  int flat_count = 0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    const double e = energy(c, h, theta);
    if (!result.trace.empty() &&
        std::abs(e - result.trace.back()) < kStopTolerance)
      ++flat_count;
    else
      flat_count = 0;
    result.trace.push_back(e);
    if (e < result.best_energy) {
      result.best_energy = e;
      result.best_theta = theta;
    }
    if (flat_count >= kStopWindow) {
      result.converged_reason = ConvergedReason::Tolerance;
      break;
    }
    const Eigen::VectorXd grad = parameter_shift_grad(c, h, theta);
    adam_step(theta, grad, opt);
  }
  result.iterations_run = static_cast<int>(result.trace.size());
  return result;
}

VqeResult run_vqe_restarts(const Circuit& c, const PauliSum& h,
                           const VqeConfig& cfg, int restarts) {
  if (restarts < 1) throw InvalidRange("restart count must be >= 1");
  const Rng base(cfg.seed);
  VqeResult best;
  for (int r = 0; r < restarts; ++r) {
    VqeConfig run_cfg = cfg;
    run_cfg.seed = restarts == 1 ? cfg.seed : base.derive_seed(r);
    VqeResult res = run_vqe(c, h, run_cfg);
    if (r == 0 || res.best_energy < best.best_energy) best = std::move(res);
  }
  return best;
}

Circuit random_baseline(int n_qubits, int gate_count, Rng& rng) {
  if (gate_count < 1) throw InvalidRange("baseline needs at least one gate");
  if (n_qubits < 2)
    throw InvalidRange("baseline circuits need >= 2 qubits for CX draws");
  Circuit c;
  c.n_qubits = n_qubits;
  int next_param = 0;
  for (int i = 0; i < gate_count; ++i) {
    const auto kind = static_cast<GateKind>(rng.next_below(4));
    switch (kind) {
      case GateKind::H:
        c.gates.push_back(Gate::h(static_cast<int>(rng.next_below(n_qubits))));
        break;
      case GateKind::Hy:
        c.gates.push_back(
            Gate::hy(static_cast<int>(rng.next_below(n_qubits))));
        break;
      case GateKind::Rz:
        c.gates.push_back(Gate::rz(
            static_cast<int>(rng.next_below(n_qubits)), next_param++));
        break;
      case GateKind::CX: {
        const int control = static_cast<int>(rng.next_below(n_qubits));
        int target = static_cast<int>(rng.next_below(n_qubits - 1));
        if (target >= control) ++target;
        c.gates.push_back(Gate::cx(control, target));
        break;
      }
    }
  }
  c.n_params = next_param;
  return c;
}

void write_trace_csv(const VqeResult& result,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "iteration,energy\n";
  char buf[64];
  for (std::size_t k = 0; k < result.trace.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, result.trace[k]);
    out << buf;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace qcdiff
