#include "ccrm/scores.hpp"

#include <cmath>

namespace ccrm {

double score_log_mgf_neg(const CcrmParams& params, double w0,
                         const Eigen::VectorXd& u) {
  if (params.degenerate_scores) return -w0 * u.sum();
  double log_m = 0.0;
  for (int k = 0; k < params.p; ++k) {
    log_m -= params.a[k] * std::log1p(w0 * u[k] / params.b[k]);
  }
  return log_m;
}

Eigen::VectorXd score_mgf_grad_neg(const CcrmParams& params, double w0,
                                   const Eigen::VectorXd& u) {
  const double m = std::exp(score_log_mgf_neg(params, w0, u));
  if (params.degenerate_scores) {
    return Eigen::VectorXd::Constant(params.p, m);
  }
  Eigen::VectorXd grad(params.p);
  for (int k = 0; k < params.p; ++k) {
    grad[k] = m * params.a[k] / (params.b[k] + w0 * u[k]);
  }
  return grad;
}

Eigen::MatrixXd score_mgf_hess_neg(const CcrmParams& params, double w0,
                                   const Eigen::VectorXd& u) {
  const double m = std::exp(score_log_mgf_neg(params, w0, u));
  if (params.degenerate_scores) {
    return Eigen::MatrixXd::Constant(params.p, params.p, m);
  }
  Eigen::VectorXd ratio(params.p);
  for (int k = 0; k < params.p; ++k) {
    ratio[k] = params.a[k] / (params.b[k] + w0 * u[k]);
  }
  Eigen::MatrixXd hess = m * (ratio * ratio.transpose());
  for (int k = 0; k < params.p; ++k) {
    // Diagonal picks up the a_k (a_k + 1) second moment of each factor.
    hess(k, k) += m * ratio[k] / (params.b[k] + w0 * u[k]);
  }
  return hess;
}

Eigen::VectorXd score_mean(const CcrmParams& params) {
  if (params.degenerate_scores) return Eigen::VectorXd::Ones(params.p);
  return params.a.cwiseQuotient(params.b);
}

Eigen::MatrixXd score_second_moment(const CcrmParams& params) {
  if (params.degenerate_scores) {
    return Eigen::MatrixXd::Ones(params.p, params.p);
  }
  const Eigen::VectorXd mean = score_mean(params);
  Eigen::MatrixXd second = mean * mean.transpose();
  for (int k = 0; k < params.p; ++k) {
    second(k, k) = params.a[k] * (params.a[k] + 1.0) /
                   (params.b[k] * params.b[k]);
  }
  return second;
}

double score_log_density(const CcrmParams& params,
                         const Eigen::VectorXd& beta) {
  if (params.degenerate_scores) return 0.0;
  double log_f = 0.0;
  for (int k = 0; k < params.p; ++k) {
    log_f += (params.a[k] - 1.0) * std::log(beta[k]) -
             params.b[k] * beta[k] + params.a[k] * std::log(params.b[k]) -
             std::lgamma(params.a[k]);
  }
  return log_f;
}

Eigen::VectorXd sample_scores(const CcrmParams& params, double w0,
                              const Eigen::VectorXd& tilt, Rng& rng) {
  if (params.degenerate_scores) return Eigen::VectorXd::Ones(params.p);
  Eigen::VectorXd beta(params.p);
  for (int k = 0; k < params.p; ++k) {
    beta[k] = gamma(params.a[k], params.b[k] + w0 * tilt[k], rng);
  }
  return beta;
}

}  // namespace ccrm
