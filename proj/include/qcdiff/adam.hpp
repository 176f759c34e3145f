#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "qcdiff/errors.hpp"

namespace qcdiff {

struct AdamHyper {
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected ADAM update over raw spans; shared by the VQE loop and the
/// diffusion trainer.
template <typename Scalar>
void adam_update(Scalar* theta, const Scalar* grad, Scalar* m, Scalar* v,
                 long n, long step_count, const AdamHyper& hyper) {
  const Scalar b1 = static_cast<Scalar>(hyper.beta1);
  const Scalar b2 = static_cast<Scalar>(hyper.beta2);
  const Scalar lr = static_cast<Scalar>(hyper.learning_rate);
  const Scalar eps = static_cast<Scalar>(hyper.epsilon);
  const Scalar c1 =
      Scalar(1) / (Scalar(1) - std::pow(b1, static_cast<Scalar>(step_count)));
  const Scalar c2 =
      Scalar(1) / (Scalar(1) - std::pow(b2, static_cast<Scalar>(step_count)));
  for (long i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (Scalar(1) - b1) * grad[i];
    v[i] = b2 * v[i] + (Scalar(1) - b2) * grad[i] * grad[i];
    theta[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  long step_count = 0;
  AdamHyper hyper;

  static AdamState make(long n, const AdamHyper& hyper) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0, hyper};
  }
};

inline void adam_step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad,
                      AdamState& state) {
  if (theta.size() != grad.size() ||
      theta.size() != state.first_moment.size())
    throw LengthMismatch("adam_step: parameter/gradient/moment sizes differ");
  ++state.step_count;
  adam_update(theta.data(), grad.data(), state.first_moment.data(),
              state.second_moment.data(), theta.size(), state.step_count,
              state.hyper);
}

}  // namespace qcdiff
