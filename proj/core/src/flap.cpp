#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/sin_pi.hpp>
#include <boost/math/special_functions/cos_pi.hpp>

#include "fraclap/assembly.hpp"
#include "fraclap/error.hpp"

namespace fraclap {

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
double adaptive(F f, double a, double b, double tol) {
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &err);
  require(std::isfinite(value), ErrorCategory::numerical, "non-finite value in truncated-sine integral");
  require(err <= 100.0 * tol * (1.0 + std::abs(value)), ErrorCategory::numerical,
          "truncated-sine integral did not reach the requested tolerance");
  return value;
}

}  // namespace

double eval_flap_sine(double x, double s, double tol) {
  require(std::abs(x) < 1.0, ErrorCategory::invalid_argument, "x must lie strictly inside (-1, 1)");
  require(s > 0.0 && s < 1.0, ErrorCategory::invalid_argument, "s must lie in (0, 1)");
  require(tol > 0.0, ErrorCategory::invalid_argument, "tolerance must be positive");
  const double ux = boost::math::sin_pi(x);
  const double delta = std::min(0.1, 0.5 * (1.0 - std::abs(x)));
  const double rtol = std::max(tol, 1e-14);

  // |y - x| < delta folded onto t > 0: 2u(x) - u(x+t) - u(x-t) = 4 u(x) sin^2(pi t / 2).
  // With t = delta w^(1/(2-2s)) the weight t^(1-2s) dt becomes constant.
  const double p = 1.0 / (2.0 - 2.0 * s);
  const double near_integral = adaptive(
      [&](double w) {
        if (w <= 0.0) return 0.25 * pi * pi;
        const double t = delta * std::pow(w, p);
        const double r = std::sin(0.5 * pi * t) / t;
        return r * r;
      },
      0.0, 1.0, rtol);
  const double near = 4.0 * ux * std::pow(delta, 2.0 - 2.0 * s) * p * near_integral;

  // delta <= |y - x| inside (-1, 1), with t = delta e^v; the difference
  // u(x) - u(x + sign t) is written as a product to avoid cancellation.
  auto side = [&](double sign, double reach) {
    if (reach <= delta) return 0.0;
    return adaptive(
        [&](double v) {
          const double t = delta * std::exp(v);
          const double diff = -2.0 * boost::math::cos_pi(x + 0.5 * sign * t) * boost::math::sin_pi(0.5 * sign * t);
          return diff * std::pow(t, -2.0 * s);
        },
        0.0, std::log(reach / delta), rtol);
  };
  const double far = side(1.0, 1.0 - x) + side(-1.0, 1.0 + x);

  const double tails = ux * (std::pow(1.0 - x, -2.0 * s) + std::pow(1.0 + x, -2.0 * s)) / (2.0 * s);
  return normalization_constant(1, s) * (near + far + tails);
}

}  // namespace fraclap
