#include "beamlab/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "beamlab/error.hpp"
#include "beamlab/lattice.hpp"

namespace beamlab {

double ExponentTable::N_of(double eps) const { return std::pow(eps, -gamma); }
double ExponentTable::N1_of(double eps) const { return std::pow(eps, -alpha); }

ExponentTable exponents(int d, int n) {
  if (d < kMinDim || d > kMaxDim) throw ConfigError("exponents: d must be in 2..5");
  if (n < 3) throw ConfigError("exponents: n must be >= 3");
  ExponentTable t;
  t.d = d;
  t.n = n;
  const bool odd = n % 2 != 0;
  if (d == 2)
    t.M = odd ? 3 * n - 3 : 3 * n - 4;
  else if (d == 3)
    t.M = 2 * n - 2;
  else
    t.M = n;
  // for d >= 4 the modified energy stops at M + n - 2 for either parity
  t.M_tilde = t.M + ((odd && d <= 3) ? n - 1 : n - 2);
  t.kappa = d == 2 ? 0 : (d == 3 ? 1 : d - 4);
  t.s_frak = d <= 3 ? 1 : 3;

  int g = std::gcd(t.M_tilde - t.M, t.s_frak + t.kappa);
  t.alpha_num = (t.M_tilde - t.M) / g;
  t.alpha_den = (t.s_frak + t.kappa) / g;
  t.alpha = static_cast<double>(t.alpha_num) / t.alpha_den;

  // a = (n-2)(1 + 3/(d-1)) [+ max(4-d,0)/(d-1) for odd n]
  int num = (n - 2) * (d - 1 + 3);
  if (odd) num += std::max(4 - d, 0);
  g = std::gcd(num, d - 1);
  t.a_num = num / g;
  t.a_den = (d - 1) / g;
  t.a_exponent = static_cast<double>(t.a_num) / t.a_den;

  t.gamma = std::max(t.M - 4 - n + t.alpha * t.s_frak, static_cast<double>(2 - n + t.M_tilde - t.M));
  t.gamma_balanced = std::max({t.alpha, (t.a_exponent - n + 2) / t.s_frak,
                               t.a_exponent - t.M - n + 4 + t.alpha * t.kappa});
  return t;
}

}  // namespace beamlab
