#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccrm {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int panels = 0;
};

/// Thrown when an integral cannot be resolved to the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double value, double error)
      : std::runtime_error(what), value(value), error(error) {}
  double value;
  double error;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (positive half).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// Gauss weights for Kronrod nodes 1, 3, 5, 7.
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, double& integral, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kKronrodNodes[i]);
    fv[14 - i] = f(c + h * kKronrodNodes[i]);
  }
  fv[7] = f(c);
  double resk = 0.0;
  for (int i = 0; i < 7; ++i) resk += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
  resk += kKronrodWeights[7] * fv[7];
  double resg = 0.0;
  for (int i = 0; i < 3; ++i) resg += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  resg += kGaussWeights[3] * fv[7];
  integral = resk * h;
  error = std::abs((resk - resg) * h);
}

struct Segment {
  double a, b, integral, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
QuadResult integrate(F&& f, double a, double b, double rel_tol = 1e-8,
                     double abs_tol = 1e-12, int max_panels = 2000) {
  QuadResult result;
  if (!(b > a)) return result;
  std::priority_queue<detail::Segment> segments;
  detail::Segment s{a, b, 0.0, 0.0};
  detail::gk15(f, a, b, s.integral, s.error);
  double total = s.integral;
  double total_error = s.error;
  segments.push(s);
  int panels = 1;
  while (total_error > std::max(abs_tol, rel_tol * std::abs(total)) &&
         panels < max_panels) {
    detail::Segment worst = segments.top();
    segments.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval no longer splittable at double precision.
      segments.push(worst);
      break;
    }
    detail::Segment left{worst.a, mid, 0.0, 0.0};
    detail::Segment right{mid, worst.b, 0.0, 0.0};
    detail::gk15(f, left.a, left.b, left.integral, left.error);
    detail::gk15(f, right.a, right.b, right.integral, right.error);
    total += left.integral + right.integral - worst.integral;
    total_error += left.error + right.error - worst.error;
    segments.push(left);
    segments.push(right);
    ++panels;
  }
  result.value = total;
  result.error = total_error;
  result.panels = panels;
  result.converged = std::isfinite(total) &&
                     total_error <= std::max(abs_tol, rel_tol * std::abs(total));
  return result;
}

}  // namespace ccrm
