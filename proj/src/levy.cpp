#include "ccrm/levy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ccrm/quadrature.hpp"
#include "ccrm/scores.hpp"

namespace ccrm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Upper integration limit beyond which w^{q-sigma} exp(-tau w) has underflowed.
double exp_cutoff(const GgpParams& base, double q) {
  return (900.0 + 50.0 * std::max(1.0, std::abs(q - base.sigma))) / base.tau;
}

// integral over (0, inf) of w^q f(w) rho0(dw) for tau > 0, where f is smooth
// and bounded with a finite limit at 0, and q > sigma. The endpoint
// singularity w^{q-1-sigma} is removed exactly by the substitution
// w = s v^{1/(q-sigma)} on (0, s]; the tail uses w = e^y.
template <class F>
double levy_weighted_integral(const GgpParams& base, double q, F&& f,
                              double rel_tol, double abs_tol, bool* ok) {
  const double sigma = base.sigma;
  const double tau = base.tau;
  const double s = 1.0 / (1.0 + tau);
  const double power = q - sigma;

  auto piece_a = integrate(
      [&](double v) {
        const double w = s * std::pow(v, 1.0 / power);
        return std::exp(-tau * w) * f(w);
      },
      0.0, 1.0, rel_tol, abs_tol);
  double value = piece_a.value * std::pow(s, power) / power;

  const double y_hi = std::log(exp_cutoff(base, q));
  const double y_lo = std::log(s);
  QuadResult piece_b;
  if (y_hi > y_lo) {
    piece_b = integrate(
        [&](double y) {
          const double w = std::exp(y);
          return std::exp(power * y - tau * w) * f(w);
        },
        y_lo, y_hi, rel_tol, abs_tol);
    value += piece_b.value;
  }
  if (ok) *ok = piece_a.converged && piece_b.converged;
  return value / std::tgamma(1.0 - sigma);
}

}  // namespace

double ggp_levy_density(double w0, const GgpParams& params) {
  if (!(w0 > 0.0)) {
    throw std::domain_error("ggp_levy_density: w0 must be > 0");
  }
  return std::exp(ggp_log_levy_density(w0, params));
}

double ggp_log_levy_density(double w0, const GgpParams& params) {
  if (!(w0 > 0.0)) {
    throw std::domain_error("ggp_levy_density: w0 must be > 0");
  }
  return -(1.0 + params.sigma) * std::log(w0) - params.tau * w0 -
         std::lgamma(1.0 - params.sigma);
}

double tail_levy_intensity(double x, const GgpParams& params) {
  if (!(x > 0.0)) {
    throw std::domain_error("tail_levy_intensity: x must be > 0");
  }
  const double sigma = params.sigma;
  const double tau = params.tau;
  if (tau == 0.0) {
    // Stable branch: the tail integrates in closed form.
    return std::pow(x, -sigma) / (sigma * std::tgamma(1.0 - sigma));
  }
  const double w_up = exp_cutoff(params, 0.0);
  if (x >= w_up) return 0.0;
  auto res = integrate(
      [&](double y) {
        return std::exp(-sigma * y - tau * std::exp(y));
      },
      std::log(x), std::log(w_up), 1e-10, 1e-300);
  return res.value / std::tgamma(1.0 - sigma);
}

double total_levy_mass(const GgpParams& params) {
  if (params.sigma >= 0.0) return kInf;
  return std::pow(params.tau, params.sigma) *
         std::tgamma(-params.sigma) / std::tgamma(1.0 - params.sigma);
}

double ggp_laplace_exponent(double t, const GgpParams& params) {
  if (t < 0.0) throw std::domain_error("ggp_laplace_exponent: t must be >= 0");
  const double sigma = params.sigma;
  const double tau = params.tau;
  if (sigma == 0.0) return std::log1p(t / tau);
  return (std::pow(t + tau, sigma) - std::pow(tau, sigma)) / sigma;
}

namespace {

// M(-w u0) - M(-w u1) with u1 = u0 + t, computed as
// -exp(logM0) expm1(logM1 - logM0) to stay accurate for both tiny and huge w.
double mgf_difference(const CcrmParams& params, double w,
                      const Eigen::VectorXd& u0, const Eigen::VectorXd& u1) {
  const double log_m0 = score_log_mgf_neg(params, w, u0);
  const double log_m1 = score_log_mgf_neg(params, w, u1);
  return -std::exp(log_m0) * std::expm1(log_m1 - log_m0);
}

}  // namespace

double laplace_exponent(const Eigen::VectorXd& t, const CcrmParams& params,
                        double rel_tol, double abs_tol) {
  if (t.size() != params.p) {
    throw std::invalid_argument("laplace_exponent: t must have length p");
  }
  if ((t.array() < 0.0).any()) {
    throw std::domain_error("laplace_exponent: t must be >= 0");
  }
  if (t.maxCoeff() == 0.0) return 0.0;

  const GgpParams& base = params.base;
  const double sigma = base.sigma;
  const double tau = base.tau;
  const Eigen::VectorXd& u0 = params.gamma_tilt;
  const Eigen::VectorXd u1 = params.gamma_tilt + t;
  const double s = 1.0 / (1.0 + tau);

  // (0, s]: the integrand behaves like w^{-sigma} near zero; dividing the
  // mgf difference by w and substituting w = s v^{1/(1-sigma)} removes the
  // endpoint exactly.
  const double power = 1.0 - sigma;
  auto piece_a = integrate(
      [&](double v) {
        const double w = s * std::pow(v, 1.0 / power);
        if (w <= 0.0) return 0.0;
        return std::exp(-tau * w) * mgf_difference(params, w, u0, u1) / w;
      },
      0.0, 1.0, rel_tol, abs_tol);
  double value = piece_a.value * std::pow(s, power) / power;
  bool converged = piece_a.converged;

  if (tau > 0.0) {
    const double y_hi = std::log(exp_cutoff(base, 0.0));
    auto piece_b = integrate(
        [&](double y) {
          const double w = std::exp(y);
          return std::exp(-sigma * y - tau * w) *
                 mgf_difference(params, w, u0, u1);
        },
        std::log(s), y_hi, rel_tol, abs_tol);
    value += piece_b.value;
    converged = converged && piece_b.converged;
  } else {
    // tau = 0 forces sigma in (0,1); map the tail to (0,1] by
    // u = (w/s)^{-sigma}.
    auto piece_b = integrate(
        [&](double u) {
          const double w = s * std::pow(u, -1.0 / sigma);
          return mgf_difference(params, w, u0, u1);
        },
        0.0, 1.0, rel_tol, abs_tol);
    value += piece_b.value * std::pow(s, -sigma) / sigma;
    converged = converged && piece_b.converged;
  }

  value /= std::tgamma(1.0 - sigma);
  if (!converged || !std::isfinite(value)) {
    throw QuadratureError("laplace_exponent: quadrature did not converge",
                          value, piece_a.error);
  }
  return std::max(0.0, value);
}

MeanMoments ccrm_mean_measure_moments(const CcrmParams& params,
                                      const Eigen::VectorXd& tilt) {
  if (tilt.size() != params.p) {
    throw std::invalid_argument("ccrm_mean_measure_moments: tilt size != p");
  }
  if (!(params.base.tau > 0.0)) {
    throw std::domain_error(
        "ccrm_mean_measure_moments: moments are infinite when tau = 0");
  }
  const Eigen::VectorXd u = params.gamma_tilt + tilt;
  MeanMoments out;
  out.mu.resize(params.p);
  out.sigma.resize(params.p, params.p);
  bool ok = true;
  for (int k = 0; k < params.p; ++k) {
    bool piece_ok = true;
    out.mu[k] = levy_weighted_integral(
        params.base, 1.0,
        [&](double w) { return score_mgf_grad_neg(params, w, u)[k]; }, 1e-9,
        1e-13, &piece_ok);
    ok = ok && piece_ok;
  }
  for (int k = 0; k < params.p; ++k) {
    for (int l = k; l < params.p; ++l) {
      bool piece_ok = true;
      const double v = levy_weighted_integral(
          params.base, 2.0,
          [&](double w) { return score_mgf_hess_neg(params, w, u)(k, l); },
          1e-9, 1e-13, &piece_ok);
      out.sigma(k, l) = v;
      out.sigma(l, k) = v;
      ok = ok && piece_ok;
    }
  }
  if (!ok) {
    throw QuadratureError("ccrm_mean_measure_moments: quadrature did not converge",
                          out.mu.sum(), 0.0);
  }
  return out;
}

double expected_multigraph_edges(double alpha, const CcrmParams& params) {
  if (alpha < 0.0) {
    throw std::domain_error("expected_multigraph_edges: alpha must be >= 0");
  }
  if (alpha == 0.0) return 0.0;
  if (!(params.base.tau > 0.0)) {
    throw std::domain_error(
        "expected_multigraph_edges: expectation is infinite when tau = 0");
  }
  const MeanMoments m =
      ccrm_mean_measure_moments(params, Eigen::VectorXd::Zero(params.p));
  return alpha * alpha * m.mu.squaredNorm() + alpha * m.sigma.trace();
}

EdgeNodeEstimate expected_simple_edges_and_nodes(double alpha,
                                                 const CcrmParams& params,
                                                 int mc_samples, Rng& rng) {
  if (alpha < 0.0) {
    throw std::domain_error("expected_simple_edges_and_nodes: alpha >= 0");
  }
  EdgeNodeEstimate est;
  if (alpha == 0.0) return est;
  if (!(params.base.tau > 0.0)) {
    throw std::domain_error(
        "expected_simple_edges_and_nodes: counts have infinite mean when "
        "tau = 0");
  }
  if (mc_samples < 2) {
    throw std::invalid_argument("expected_simple_edges_and_nodes: mc_samples");
  }

  // Linearization of psi(2 w beta) for w below this threshold, where a direct
  // quadrature of psi would be all absolute-tolerance noise.
  constexpr double kSmallW = 1e-6;
  const Eigen::VectorXd mu_tilted =
      ccrm_mean_measure_moments(params, Eigen::VectorXd::Zero(params.p)).mu;

  const double tol = 1e-7;
  double sum_e = 0.0, sum_e2 = 0.0, sum_n = 0.0, sum_n2 = 0.0;
  for (int s = 0; s < mc_samples; ++s) {
    Eigen::VectorXd beta(params.p);
    if (params.degenerate_scores) {
      beta.setOnes();
    } else {
      for (int k = 0; k < params.p; ++k) {
        beta[k] = gamma(params.a[k], params.b[k], rng);
      }
    }
    const double sq = beta.squaredNorm();
    const double gb = params.gamma_tilt.dot(beta);
    const double slope = 2.0 * beta.dot(mu_tilted);

    auto psi_2wb = [&](double w) {
      if (w <= kSmallW) return w * slope;
      return laplace_exponent((2.0 * w) * beta, params, tol, 1e-11);
    };

    const double term1 = levy_weighted_integral(
        params.base, 2.0,
        [&](double w) {
          return -std::expm1(-w * w * sq) * std::exp(-w * gb) / (w * w);
        },
        tol, 1e-11, nullptr);
    const double term2 = levy_weighted_integral(
        params.base, 1.0,
        [&](double w) { return psi_2wb(w) * std::exp(-w * gb) / w; }, tol,
        1e-11, nullptr);
    const double term3 = levy_weighted_integral(
        params.base, 1.0,
        [&](double w) {
          return -std::expm1(-w * w * sq - alpha * psi_2wb(w)) *
                 std::exp(-w * gb) / w;
        },
        tol, 1e-11, nullptr);

    const double e = alpha * term1 + 0.5 * alpha * alpha * term2;
    const double n = alpha * term3;
    sum_e += e;
    sum_e2 += e * e;
    sum_n += n;
    sum_n2 += n * n;
  }
  const double inv = 1.0 / mc_samples;
  est.edges_mean = sum_e * inv;
  est.nodes_mean = sum_n * inv;
  const double var_e =
      std::max(0.0, sum_e2 * inv - est.edges_mean * est.edges_mean);
  const double var_n =
      std::max(0.0, sum_n2 * inv - est.nodes_mean * est.nodes_mean);
  est.edges_se = std::sqrt(var_e / mc_samples);
  est.nodes_se = std::sqrt(var_n / mc_samples);
  return est;
}

}  // namespace ccrm
