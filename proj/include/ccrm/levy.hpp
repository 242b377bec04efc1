#pragma once

#include <Eigen/Dense>

#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

/// Density of the base jump measure at w0 > 0:
/// w0^{-1-sigma} exp(-tau w0) / Gamma(1-sigma).
double ggp_levy_density(double w0, const GgpParams& params);

double ggp_log_levy_density(double w0, const GgpParams& params);

/// Expected number of jumps above x per unit length: integral of the base
/// density over (x, infinity). Finite for every x > 0.
double tail_levy_intensity(double x, const GgpParams& params);

/// Total mass of the base measure; finite only for sigma < 0
/// (tau^sigma Gamma(-sigma) / Gamma(1-sigma)), +infinity otherwise.
double total_levy_mass(const GgpParams& params);

/// Closed-form univariate exponent ((t+tau)^sigma - tau^sigma)/sigma with the
/// exact sigma = 0 branch log1p(t/tau).
double ggp_laplace_exponent(double t, const GgpParams& params);

/// Multivariate Laplace exponent of the compound measure, reduced to a
/// one-dimensional integral over the shared jump. Nonnegative, zero at t = 0,
/// nondecreasing in each coordinate. Throws QuadratureError when the
/// quadrature cannot reach tolerance.
double laplace_exponent(const Eigen::VectorXd& t, const CcrmParams& params,
                        double rel_tol = 1e-8, double abs_tol = 1e-12);

struct MeanMoments {
  Eigen::VectorXd mu;     // integral of w against the (tilted) mean measure
  Eigen::MatrixXd sigma;  // integral of w w'
};

/// First and second moments of the compound measure per unit length, with an
/// optional extra exponential tilt exp(-tilt'w). Requires tau > 0.
MeanMoments ccrm_mean_measure_moments(const CcrmParams& params,
                                      const Eigen::VectorXd& tilt);

/// alpha^2 mu'mu + alpha tr(Sigma): the expected number of directed
/// multigraph edges. Requires tau > 0.
double expected_multigraph_edges(double alpha, const CcrmParams& params);

struct EdgeNodeEstimate {
  double edges_mean = 0.0;
  double edges_se = 0.0;
  double nodes_mean = 0.0;
  double nodes_se = 0.0;
};

/// Monte Carlo (over scores) + quadrature (over the shared jump) estimate of
/// the expected simple-edge and connected-node counts.
EdgeNodeEstimate expected_simple_edges_and_nodes(double alpha,
                                                 const CcrmParams& params,
                                                 int mc_samples, Rng& rng);

}  // namespace ccrm
