#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ccrm {

using Rng = std::mt19937_64;

/// Derive an independent generator for substream `stream` of `seed`.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

double uniform(Rng& rng);      // U(0,1)
double normal(Rng& rng);       // N(0,1)
double exponential(Rng& rng);  // Exp(1)

/// Gamma(shape, rate) draw, mean shape/rate.
double gamma(double shape, double rate, Rng& rng);

long poisson(double mean, Rng& rng);

/// Poisson conditioned on being >= 1.
long zero_truncated_poisson(double mean, Rng& rng);

/// Split `total` into bins proportional to `weights` (nonnegative, not all zero).
Eigen::VectorXi multinomial(long total, const Eigen::VectorXd& weights, Rng& rng);

}  // namespace ccrm
