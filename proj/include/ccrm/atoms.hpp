#pragma once

#include <Eigen/Dense>

#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

/// Latent point configuration: shared jumps w0, per-community scores beta,
/// optional locations theta in [0, alpha]. Node weights are
/// w_{ik} = beta_{ik} * w0_i.
struct NodeAtoms {
  Eigen::VectorXd w0;     // K
  Eigen::MatrixXd beta;   // K x p
  Eigen::VectorXd theta;  // K, empty unless locations were requested

  Eigen::Index size() const { return w0.size(); }
  Eigen::MatrixXd weights() const {
    return beta.array().colwise() * w0.array();
  }
};

/// Draw the atoms of the (tilted, truncated) compound measure on [0, alpha].
/// tilt_lambda = 0 reproduces the untilted prior atoms.
NodeAtoms sample_ccrm_atoms(const CcrmParams& params, double alpha,
                            double epsilon, const Eigen::VectorXd& tilt_lambda,
                            Rng& rng, bool with_locations = true);

struct SmallJumpMoments {
  Eigen::VectorXd mu;     // p
  Eigen::MatrixXd sigma;  // p x p, symmetric PSD
};

/// Mean and covariance of the summed weights with shared jump below epsilon,
/// as one-dimensional integrals against the score mgf gradient and Hessian.
SmallJumpMoments small_jump_moments(const CcrmParams& params,
                                    const Eigen::VectorXd& tilt_lambda,
                                    double epsilon, double alpha);

struct RemainderMass {
  Eigen::VectorXd w_star;         // exact_part + gaussian_part, >= 0
  Eigen::VectorXd exact_part;     // summed weights of jumps above epsilon
  Eigen::VectorXd gaussian_part;  // truncated-normal small-jump remainder
  double epsilon_used = 0.0;
};

/// Draw the total masses of the tilted measure: jumps above epsilon are
/// summed exactly; the rest is a Gaussian approximation truncated to the
/// nonnegative orthant. For sigma < 0 the draw is exact (no Gaussian part);
/// for sigma = 0 a smaller exact-thinning truncation (1e-6) is used and the
/// Gaussian part is dropped.
RemainderMass sample_remainder_mass(const CcrmParams& params, double alpha,
                                    const Eigen::VectorXd& tilt_lambda,
                                    double epsilon, Rng& rng);

}  // namespace ccrm
