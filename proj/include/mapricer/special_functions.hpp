#pragma once

namespace mapricer {

// Modified Bessel function of the first kind, order 1, by its power series.
// x >= 0 only; the closed-form prices never evaluate it elsewhere.
double bessel_i1(double x);

// Upper incomplete gamma Gamma(n, x) for positive integer n, as the exact
// finite sum (n-1)! e^{-x} sum_{j<n} x^j / j!.  Requires n <= 170 so the
// factorial stays in double range; the series code uses the regularised
// form below instead.
double upper_incomplete_gamma(int n, double x);

// gamma(n, x) = (n-1)! - Gamma(n, x), exact complement.
double lower_incomplete_gamma(int n, double x);

// Q(n, x) = Gamma(n, x) / (n-1)! = e^{-x} sum_{j<n} x^j / j!, stable for any n.
double regularized_gamma_q(int n, double x);

// P(n, x) = 1 - Q(n, x).
double regularized_gamma_p(int n, double x);

// Confluent hypergeometric 1F1(a; b; x) by its Pochhammer series with
// compensated summation.  b must not be a non-positive integer.
double hyp1f1(double a, double b, double x);

}  // namespace mapricer
