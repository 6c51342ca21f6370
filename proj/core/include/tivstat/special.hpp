#pragma once

namespace tivstat {

// Sine integral Si(x) = \int_0^x sin(t)/t dt. Power series for |x| <= 2,
// continued fraction for the complex exponential integral beyond.
double sine_integral(double x);

// sin(pi x) / (pi x), with the removable singularity filled in.
double sinc_pi(double x);

}  // namespace tivstat
