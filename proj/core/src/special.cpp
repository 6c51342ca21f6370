#include "tivstat/special.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace tivstat {

double sinc_pi(double x) {
  const double px = std::numbers::pi * x;
  if (std::abs(px) < 1e-8) return 1.0 - px * px / 6.0;
  return std::sin(px) / px;
}

double sine_integral(double x) {
  const double ax = std::abs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  if (ax == 0.0) return 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  if (ax <= 2.0) {
    // Si(x) = sum_k (-1)^k x^(2k+1) / ((2k+1)(2k+1)!)
    double term = ax;
    double sum = ax;
    for (int k = 1; k < 100; ++k) {
      term *= -ax * ax / ((2.0 * k) * (2.0 * k + 1.0));
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (std::abs(add) < eps * std::abs(sum)) break;
    }
    return sign * sum;
  }

  // E1(ix) by the modified Lentz continued fraction; Si = pi/2 + Im(E1(ix)).
  const std::complex<double> one(1.0, 0.0);
  std::complex<double> b(1.0, ax);
  std::complex<double> c(1.0 / 1e-300, 0.0);
  std::complex<double> d = one / b;
  std::complex<double> h = d;
  for (int i = 1; i < 1000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = one / (a * d + b);
    c = b + a / c;
    const std::complex<double> del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps) break;
  }
  h *= std::complex<double>(std::cos(ax), -std::sin(ax));
  return sign * (std::numbers::pi / 2.0 + h.imag());
}

}  // namespace tivstat
