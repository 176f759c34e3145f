#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "qcdiff/errors.hpp"

namespace qcdiff {

/// Linear beta schedule with derived alpha / alpha_bar / sigma tables.
/// Timesteps are 1-based in the algorithms; vectors store index t-1.
struct NoiseSchedule {
  int T = 0;
  Eigen::VectorXd beta;
  Eigen::VectorXd alpha;      // 1 - beta
  Eigen::VectorXd alpha_bar;  // running product of alpha
  Eigen::VectorXd sigma;      // sqrt(beta), i.e. sigma_t^2 = beta_t

  double beta_at(int t) const { return beta[t - 1]; }
  double alpha_at(int t) const { return alpha[t - 1]; }
  double alpha_bar_at(int t) const { return alpha_bar[t - 1]; }
  double sigma_at(int t) const { return sigma[t - 1]; }
};

inline NoiseSchedule make_schedule(int T, double beta_start, double beta_end) {
  if (T < 2) throw InvalidRange("schedule needs T >= 2");
  if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
    throw InvalidRange("schedule needs 0 < beta_start <= beta_end < 1");
  NoiseSchedule s;
  s.T = T;
  s.beta.resize(T);
  s.alpha.resize(T);
  s.alpha_bar.resize(T);
  s.sigma.resize(T);
  double running = 1.0;
  for (int t = 1; t <= T; ++t) {
    const double b = beta_start + (beta_end - beta_start) * (t - 1) / (T - 1);
    s.beta[t - 1] = b;
    s.alpha[t - 1] = 1.0 - b;
    running *= s.alpha[t - 1];
    s.alpha_bar[t - 1] = running;
    s.sigma[t - 1] = std::sqrt(b);
  }
  return s;
}

}  // namespace qcdiff
