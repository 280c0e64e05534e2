#pragma once

namespace pev::normal {

// Standard normal CDF. Computed through erfc, accurate to machine precision.
double cdf(double x);

// Standard normal density.
double pdf(double x);

// Standard normal quantile (probit) on the open interval (0,1).
// Rational approximation refined by one Halley step against cdf();
// absolute error is well below 1e-12 across the usable range.
double quantile(double p);

// Two-sided critical value at the 0.05 level: quantile(0.975).
double default_z();

}  // namespace pev::normal
