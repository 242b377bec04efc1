#pragma once

#include <Eigen/Dense>

#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

// Moment generating function of the score distribution, M(t) = E[exp(t'beta)],
// and relatives. All evaluation points used by the model are of the form
// t = -w0 * u with u >= 0 elementwise, which keeps M in (0, 1]; that is the
// form these functions take.

/// log M(-w0 * u) for u >= 0.
double score_log_mgf_neg(const CcrmParams& params, double w0,
                         const Eigen::VectorXd& u);

/// Gradient dM/dt_k evaluated at t = -w0 * u, i.e. E[beta_k exp(-w0 u'beta)].
Eigen::VectorXd score_mgf_grad_neg(const CcrmParams& params, double w0,
                                   const Eigen::VectorXd& u);

/// Hessian d2M/dt_k dt_l at t = -w0 * u, i.e. E[beta_k beta_l exp(-w0 u'beta)].
Eigen::MatrixXd score_mgf_hess_neg(const CcrmParams& params, double w0,
                                   const Eigen::VectorXd& u);

Eigen::VectorXd score_mean(const CcrmParams& params);           // E[beta]
Eigen::MatrixXd score_second_moment(const CcrmParams& params);  // E[beta beta']

/// log density of the scores at beta (0 for the degenerate point mass).
double score_log_density(const CcrmParams& params, const Eigen::VectorXd& beta);

/// Draw scores given the shared jump w0 under the exponentially tilted law;
/// component k is Gamma(a_k, b_k + w0 * tilt_k). tilt must include gamma_tilt.
Eigen::VectorXd sample_scores(const CcrmParams& params, double w0,
                              const Eigen::VectorXd& tilt, Rng& rng);

}  // namespace ccrm
