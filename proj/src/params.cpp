#include "ccrm/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ccrm {

GgpParams::GgpParams(double sigma, double tau) : sigma(sigma), tau(tau) {
  const bool infinite_case = sigma > 0.0 && sigma < 1.0 && tau >= 0.0;
  const bool finite_case = sigma <= 0.0 && tau > 0.0;
  if (!std::isfinite(sigma) || !std::isfinite(tau) ||
      !(infinite_case || finite_case)) {
    throw std::invalid_argument(
        "GgpParams: require sigma in (0,1) with tau >= 0, or sigma <= 0 with "
        "tau > 0");
  }
}

CcrmParams::CcrmParams(int p, GgpParams base, Eigen::VectorXd a,
                       Eigen::VectorXd b, Eigen::VectorXd gamma_tilt,
                       bool degenerate_scores)
    : p(p),
      base(base),
      a(std::move(a)),
      b(std::move(b)),
      gamma_tilt(std::move(gamma_tilt)),
      degenerate_scores(degenerate_scores) {
  if (p < 1) throw std::invalid_argument("CcrmParams: p must be >= 1");
  if (this->a.size() != p || this->b.size() != p ||
      this->gamma_tilt.size() != p) {
    throw std::invalid_argument(
        "CcrmParams: a, b, gamma_tilt must all have length p");
  }
  if (!degenerate_scores &&
      ((this->a.array() <= 0.0).any() || (this->b.array() <= 0.0).any())) {
    throw std::invalid_argument("CcrmParams: shapes a and rates b must be > 0");
  }
  if ((this->gamma_tilt.array() < 0.0).any()) {
    throw std::invalid_argument("CcrmParams: gamma_tilt must be >= 0");
  }
}

CcrmParams CcrmParams::symmetric(int p, GgpParams base, double a, double b,
                                 bool degenerate_scores) {
  return CcrmParams(p, base, Eigen::VectorXd::Constant(p, a),
                    Eigen::VectorXd::Constant(p, b), Eigen::VectorXd::Zero(p),
                    degenerate_scores);
}

double GammaPrior::log_density(double x) const {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

void Hyperpriors::validate() const {
  for (const GammaPrior* prior :
       {&alpha, &one_minus_sigma, &tau, &score_shape, &score_rate}) {
    if (!(prior->shape > 0.0) || !(prior->rate > 0.0)) {
      throw std::invalid_argument("Hyperpriors: shapes and rates must be > 0");
    }
  }
}

}  // namespace ccrm
