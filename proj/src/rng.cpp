#include "ccrm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ccrm {

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{seed, stream, std::uint64_t{0x9e3779b97f4a7c15ULL}};
  return Rng(seq);
}

double uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

double exponential(Rng& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

double gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw std::invalid_argument("gamma: shape and rate must be positive");
  }
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

long poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<long>(mean)(rng);
}

long zero_truncated_poisson(double mean, Rng& rng) {
  if (!(mean > 0.0)) {
    throw std::invalid_argument("zero_truncated_poisson: mean must be positive");
  }
  if (mean >= 1.0) {
    // P(X >= 1) >= 1 - e^{-1}; plain rejection terminates quickly.
    std::poisson_distribution<long> dist(mean);
    for (;;) {
      long x = dist(rng);
      if (x >= 1) return x;
    }
  }
  // Inversion on the truncated pmf for small means.
  double u = uniform(rng);
  double term = mean / std::expm1(mean);  // P(X = 1)
  double cum = term;
  long k = 1;
  while (u > cum && k < 200) {
    ++k;
    term *= mean / static_cast<double>(k);
    cum += term;
  }
  return k;
}

Eigen::VectorXi multinomial(long total, const Eigen::VectorXd& weights, Rng& rng) {
  const Eigen::Index p = weights.size();
  Eigen::VectorXi out = Eigen::VectorXi::Zero(p);
  double remaining_weight = weights.sum();
  if (!(remaining_weight > 0.0)) {
    throw std::invalid_argument("multinomial: weights must have positive sum");
  }
  long remaining = total;
  for (Eigen::Index k = 0; k + 1 < p && remaining > 0; ++k) {
    const double w = weights[k];
    if (w <= 0.0) continue;
    double prob = w / remaining_weight;
    if (prob >= 1.0) {
      out[k] = static_cast<int>(remaining);
      remaining = 0;
      break;
    }
    std::binomial_distribution<long> dist(remaining, prob);
    long x = dist(rng);
    out[k] = static_cast<int>(x);
    remaining -= x;
    remaining_weight -= w;
  }
  if (remaining > 0) {
    Eigen::Index last = p - 1;
    while (last > 0 && weights[last] <= 0.0) --last;
    out[last] += static_cast<int>(remaining);
  }
  return out;
}

}  // namespace ccrm
