#pragma once

namespace beamlab {

// Exponent bookkeeping for the long-time estimate of a degree-n nonlinearity
// on a d-dimensional torus.
struct ExponentTable {
  int d = 0;
  int n = 0;
  double a_exponent = 0;  // lifespan exponent a(d, n)
  int a_num = 0;          // a = a_num / a_den exactly
  int a_den = 1;
  int M = 0;              // first order not put in normal form
  int M_tilde = 0;        // first order beyond the modified energy
  int kappa = 0;
  int s_frak = 0;
  double alpha = 0;       // N_1 = eps^{-alpha}
  int alpha_num = 0;
  int alpha_den = 1;
  double gamma = 0;       // N = eps^{-gamma}, equality case of the lower bound on gamma
  // Smallest gamma making both secondary error exponents at least a; reported
  // next to `gamma` because the two differ (see README).
  double gamma_balanced = 0;

  double N_of(double eps) const;
  double N1_of(double eps) const;
};

// Throws ConfigError for d < 2, d > 5 or n < 3.
ExponentTable exponents(int d, int n);

}  // namespace beamlab
