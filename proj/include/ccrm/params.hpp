#pragma once

#include <Eigen/Dense>

namespace ccrm {

/// Base jump measure parameters of the generalized gamma family.
///
/// Valid ranges: sigma in (0,1) with tau >= 0, or sigma <= 0 with tau > 0.
/// sigma >= 0 gives an infinite-activity measure (infinitely many jumps in
/// any interval), sigma < 0 a finite-activity one.
struct GgpParams {
  double sigma;
  double tau;

  GgpParams(double sigma, double tau);

  bool infinite_activity() const { return sigma >= 0.0; }
};

/// Parameters of the compound measure: a shared base jump per atom and
/// independent Gamma(a_k, b_k) community scores, optionally exponentially
/// tilted by gamma_tilt.
///
/// degenerate_scores forces all scores to 1 (p-fold copy of the base
/// measure); a and b are then ignored by score sampling. This configuration
/// has closed-form expectations and exists for testing.
struct CcrmParams {
  int p;
  GgpParams base;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd gamma_tilt;
  bool degenerate_scores = false;

  CcrmParams(int p, GgpParams base, Eigen::VectorXd a, Eigen::VectorXd b,
             Eigen::VectorXd gamma_tilt, bool degenerate_scores = false);

  /// Convenience constructor with a_k = a, b_k = b, gamma_k = 0.
  static CcrmParams symmetric(int p, GgpParams base, double a, double b,
                              bool degenerate_scores = false);
};

struct GammaPrior {
  double shape = 0.01;
  double rate = 0.01;

  double log_density(double x) const;
};

/// Priors and free/fixed flags for the model hyperparameters.
struct Hyperpriors {
  GammaPrior alpha;            // prior on the plane size alpha
  GammaPrior one_minus_sigma;  // prior on 1 - sigma
  GammaPrior tau;
  GammaPrior score_shape;      // prior on each a_k
  GammaPrior score_rate;       // prior on each b_k

  bool sigma_free = true;
  bool tau_free = true;
  bool a_free = true;
  bool b_free = false;
  bool alpha_free = true;

  void validate() const;
};

}  // namespace ccrm
