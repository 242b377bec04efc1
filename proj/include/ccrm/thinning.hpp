#pragma once

#include <functional>

#include <Eigen/Dense>

#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

struct JumpSet {
  Eigen::VectorXd jumps;  // ascending, all >= epsilon
  double rate_scale = 0.0;
  double epsilon = 0.0;
  // Telemetry: envelope proposals vs accepted jumps (exact branch reports
  // candidate draws the same way).
  long proposals = 0;
  long accepted = 0;
};

/// Draw the jumps of a Poisson process with intensity
/// rate_scale * tilt(w) * ggp_levy_density(w) on (epsilon, infinity).
///
/// `tilt` must be non-increasing with 0 <= tilt <= tilt_max; a sampled
/// violation of the resulting envelope aborts with a diagnostic. epsilon must
/// be > 0 for infinite-activity parameters (sigma >= 0); for sigma < 0,
/// epsilon = 0 draws the full (finite) process exactly.
JumpSet sample_tilted_ggp(const GgpParams& params,
                          const std::function<double(double)>& tilt,
                          double tilt_max, double rate_scale, double epsilon,
                          Rng& rng);

}  // namespace ccrm
