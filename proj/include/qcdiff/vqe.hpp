#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "qcdiff/adam.hpp"
#include "qcdiff/circuit.hpp"
#include "qcdiff/pauli_sum.hpp"
#include "qcdiff/rng.hpp"

namespace qcdiff {

struct VqeConfig {
  int max_iters = 100;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
};

enum class ConvergedReason { MaxIters, Tolerance };

struct VqeResult {
  double best_energy = 0.0;
  Eigen::VectorXd best_theta;
  std::vector<double> trace;  // energy per iteration, trace[k] = E(theta_k)
  int iterations_run = 0;
  ConvergedReason converged_reason = ConvergedReason::MaxIters;
};

/// Exact parameter-shift gradient for exp(-i theta/2 P) generators:
/// grad[j] = (E(theta_j + pi/2) - E(theta_j - pi/2)) / 2.
Eigen::VectorXd parameter_shift_grad(const Circuit& c, const PauliSum& h,
                                     const Eigen::VectorXd& theta);

/// ADAM-driven VQE loop. Initial theta is uniform in [-0.1, 0.1) from the
/// seed; stops at max_iters or when |dE| < 1e-9 for 5 consecutive
/// iterations. Parameter-free circuits are scored once without optimization.
VqeResult run_vqe(const Circuit& c, const PauliSum& h, const VqeConfig& cfg);

/// Best result over `restarts` runs with derived init seeds.
VqeResult run_vqe_restarts(const Circuit& c, const PauliSum& h,
                           const VqeConfig& cfg, int restarts);

/// Reference circuit with uniformly random gate kinds and qubit choices;
/// every Rz gets a fresh parameter index.
Circuit random_baseline(int n_qubits, int gate_count, Rng& rng);

/// CSV trace `iteration,energy` with round-trippable 17-digit energies.
void write_trace_csv(const VqeResult& result,
                     const std::filesystem::path& path);

}  // namespace qcdiff
