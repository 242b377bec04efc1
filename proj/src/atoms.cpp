#include "ccrm/atoms.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "ccrm/quadrature.hpp"
#include "ccrm/scores.hpp"
#include "ccrm/thinning.hpp"

namespace ccrm {

NodeAtoms sample_ccrm_atoms(const CcrmParams& params, double alpha,
                            double epsilon, const Eigen::VectorXd& tilt_lambda,
                            Rng& rng, bool with_locations) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("sample_ccrm_atoms: alpha must be > 0");
  }
  if (tilt_lambda.size() != params.p || (tilt_lambda.array() < 0.0).any()) {
    throw std::invalid_argument(
        "sample_ccrm_atoms: tilt_lambda must be nonnegative with length p");
  }
  const Eigen::VectorXd u = params.gamma_tilt + tilt_lambda;
  // The thinning tilt is the score mgf at -w0 u: bounded by 1 and
  // non-increasing in w0.
  auto h = [&](double w0) {
    return std::exp(score_log_mgf_neg(params, w0, u));
  };
  JumpSet jumps = sample_tilted_ggp(params.base, h, 1.0, alpha, epsilon, rng);

  NodeAtoms atoms;
  const Eigen::Index n = jumps.jumps.size();
  atoms.w0 = jumps.jumps;
  atoms.beta.resize(n, params.p);
  for (Eigen::Index i = 0; i < n; ++i) {
    atoms.beta.row(i) = sample_scores(params, atoms.w0[i], u, rng);
  }
  if (with_locations) {
    atoms.theta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) atoms.theta[i] = alpha * uniform(rng);
  }
  return atoms;
}

SmallJumpMoments small_jump_moments(const CcrmParams& params,
                                    const Eigen::VectorXd& tilt_lambda,
                                    double epsilon, double alpha) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("small_jump_moments: epsilon must be > 0");
  }
  const double sigma = params.base.sigma;
  const double tau = params.base.tau;
  const Eigen::VectorXd u = params.gamma_tilt + tilt_lambda;
  const double norm = alpha / std::tgamma(1.0 - sigma);

  SmallJumpMoments out;
  out.mu.resize(params.p);
  out.sigma.resize(params.p, params.p);

  // mu_k  = alpha int_0^eps w^{-sigma}   e^{-tau w} gradM_k(-w u) dw / Gamma(1-sigma)
  // Sig_kl= alpha int_0^eps w^{1-sigma} e^{-tau w} hessM_kl(-w u) dw / Gamma(1-sigma)
  // The substitution w = eps v^{1/(q-sigma)} absorbs the endpoint power.
  const double p1 = 1.0 - sigma;
  for (int k = 0; k < params.p; ++k) {
    auto res = integrate(
        [&](double v) {
          const double w = epsilon * std::pow(v, 1.0 / p1);
          return std::exp(-tau * w) * score_mgf_grad_neg(params, w, u)[k];
        },
        0.0, 1.0, 1e-9, 1e-14);
    out.mu[k] = norm * std::pow(epsilon, p1) / p1 * res.value;
    if (!res.converged) {
      throw QuadratureError("small_jump_moments: mean quadrature failed",
                            out.mu[k], res.error);
    }
  }
  const double p2 = 2.0 - sigma;
  for (int k = 0; k < params.p; ++k) {
    for (int l = k; l < params.p; ++l) {
      auto res = integrate(
          [&](double v) {
            const double w = epsilon * std::pow(v, 1.0 / p2);
            return std::exp(-tau * w) * score_mgf_hess_neg(params, w, u)(k, l);
          },
          0.0, 1.0, 1e-9, 1e-14);
      const double value = norm * std::pow(epsilon, p2) / p2 * res.value;
      out.sigma(k, l) = value;
      out.sigma(l, k) = value;
      if (!res.converged) {
        throw QuadratureError(
            "small_jump_moments: covariance quadrature failed", value,
            res.error);
      }
    }
  }
  return out;
}

namespace {

Eigen::VectorXd truncated_gaussian(const SmallJumpMoments& moments, Rng& rng) {
  const int p = static_cast<int>(moments.mu.size());
  Eigen::LLT<Eigen::MatrixXd> llt(moments.sigma);
  Eigen::MatrixXd root;
  if (llt.info() == Eigen::Success) {
    root = llt.matrixL();
  } else {
    std::cerr << "[ccrm] warning: small-jump covariance not positive "
                 "definite; falling back to its diagonal\n";
    root = moments.sigma.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  }
  Eigen::VectorXd draw(p);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Eigen::VectorXd z(p);
    for (int k = 0; k < p; ++k) z[k] = normal(rng);
    draw = moments.mu + root * z;
    if ((draw.array() >= 0.0).all()) return draw;
  }
  std::cerr << "[ccrm] warning: truncated-Gaussian rejection exhausted; "
               "clamping at zero\n";
  return draw.cwiseMax(0.0);
}

}  // namespace

RemainderMass sample_remainder_mass(const CcrmParams& params, double alpha,
                                    const Eigen::VectorXd& tilt_lambda,
                                    double epsilon, Rng& rng) {
  const double sigma = params.base.sigma;
  RemainderMass out;
  out.exact_part = Eigen::VectorXd::Zero(params.p);
  out.gaussian_part = Eigen::VectorXd::Zero(params.p);

  double eps_use;
  bool gaussian_tail;
  if (sigma < 0.0) {
    eps_use = 0.0;  // finite activity: the full process is drawn exactly
    gaussian_tail = false;
  } else if (sigma == 0.0) {
    // The Gaussian limit does not hold at sigma = 0; thin further instead.
    eps_use = (epsilon > 0.0) ? std::min(epsilon, 1e-6) : 1e-6;
    gaussian_tail = false;
  } else {
    if (!(epsilon > 0.0)) {
      throw std::invalid_argument(
          "sample_remainder_mass: epsilon must be > 0 for infinite-activity "
          "parameters");
    }
    eps_use = epsilon;
    gaussian_tail = true;
  }
  out.epsilon_used = eps_use;

  NodeAtoms atoms = sample_ccrm_atoms(params, alpha, eps_use, tilt_lambda, rng,
                                      /*with_locations=*/false);
  if (atoms.size() > 0) {
    out.exact_part = atoms.weights().colwise().sum().transpose();
  }
  if (gaussian_tail) {
    out.gaussian_part =
        truncated_gaussian(small_jump_moments(params, tilt_lambda, eps_use, alpha), rng);
  }
  out.w_star = out.exact_part + out.gaussian_part;
  return out;
}

}  // namespace ccrm
