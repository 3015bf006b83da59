#pragma once

// Closed-form outage quantities for a t x 1 MISO link with i.i.d. CN(0,1)
// fading. Everything here is a pure function of its arguments.

namespace vlcq {

/// Link parameters. `alpha` is the gain threshold below which the link is in
/// outage and is always derived from (rho, power) through alpha_of().
struct SystemParams {
  int t = 2;
  double rho = 1.0;
  double power = 10.0;
  double alpha = 0.1;

  /// Validates and fills in alpha. Throws std::domain_error on bad input.
  static SystemParams make(int t, double rho, double power);
};

/// (2^rho - 1) / P.
double alpha_of(double rho, double power);

/// P(||h||^2 < alpha): CDF of a Gamma(t, 1) variable at alpha, evaluated with
/// the finite Poisson sum (or its complementary series when alpha is small,
/// where the finite sum cancels catastrophically).
double out_full_closed(int t, double alpha);

/// P(|h_1|^2 < alpha) = 1 - exp(-alpha).
double out_open_closed(double alpha);

}  // namespace vlcq
