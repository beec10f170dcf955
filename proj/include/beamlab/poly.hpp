#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "beamlab/error.hpp"
#include "beamlab/lattice.hpp"
#include "beamlab/state.hpp"
#include "beamlab/tuples.hpp"

namespace beamlab {

// Storage convention.
// A key t is a sorted list of slot codes; its orbit multiplicity m(t) is the
// number of distinct orderings, k! / prod(repeat counts)!. With c_t the stored
// coefficient (the common value of the symmetric coefficient on the orbit),
//   G(u) = sum_t c_t * m(t) * prod_{slots} u_j^sigma,   u^{-1} = conj(u).
// Z_2 = sum omega_j |u_j|^2 is stored as c = omega_j / 2 on {(j,-),(j,+)}.

std::size_t poly_key_limit();
void set_poly_key_limit(std::size_t n);

double orbit_multiplicity(std::span<const SlotCode> key);

class HomogPoly {
 public:
  HomogPoly() = default;
  HomogPoly(LatticePtr lat, int degree, bool real = true) : lat_(std::move(lat)), k_(degree), real_(real) {}

  int degree() const { return k_; }
  std::size_t size() const { return coeffs_.size(); }
  bool empty() const { return coeffs_.empty(); }
  const Lattice& lattice() const { return *lat_; }
  const LatticePtr& lattice_ptr() const { return lat_; }
  bool is_real() const { return real_; }

  std::span<const SlotCode> key(std::size_t i) const {
    return {keys_.data() + i * static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)};
  }
  cplx coeff(std::size_t i) const { return coeffs_[i]; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  // Binary search; returns npos when absent.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t find(std::span<const SlotCode> key) const;
  cplx coeff_of(std::span<const SlotCode> key) const;

  double max_abs() const;

  // Builds from already sorted, duplicate-free keys.
  static HomogPoly from_sorted(LatticePtr lat, int degree, std::vector<SlotCode> keys, std::vector<cplx> coeffs,
                               bool real);

 private:
  friend class KeyAccumulator;
  LatticePtr lat_;
  int k_ = 0;
  bool real_ = true;
  std::vector<SlotCode> keys_;
  std::vector<cplx> coeffs_;
};

// Hash accumulator used to assemble polynomials from unsorted contributions.
class KeyAccumulator {
 public:
  KeyAccumulator(int degree, std::size_t max_keys = poly_key_limit());
  void add(const SlotCode* key, cplx v);
  void add(std::span<const SlotCode> key, cplx v) { add(key.data(), v); }
  std::size_t size() const { return vals_.size(); }
  // Sorts keys; drops entries that are exactly zero.
  HomogPoly finish(LatticePtr lat, bool real) &&;
  void merge_from(const KeyAccumulator& other);

 private:
  void grow();
  int k_;
  std::size_t max_keys_;
  std::vector<SlotCode> keys_;
  std::vector<cplx> vals_;
  std::vector<std::uint32_t> table_;
  std::size_t mask_ = 0;
};

class NearResonantError : public NumericError {
 public:
  NearResonantError(std::string msg, std::vector<std::pair<SignedTuple, double>> keys)
      : NumericError(std::move(msg)), keys_(std::move(keys)) {}
  const std::vector<std::pair<SignedTuple, double>>& keys() const { return keys_; }

 private:
  std::vector<std::pair<SignedTuple, double>> keys_;
};

inline constexpr double kDefaultDivisorFloor = 1e-8;

// Diagonal quadratic sum_j w_j |u_j|^2 as a degree-2 polynomial.
HomogPoly quadratic_diag(LatticePtr lat, std::span<const double> w);
HomogPoly z2_poly(LatticePtr lat);
HomogPoly ns_poly(LatticePtr lat, double s);

// Degree-m part of int F(psi) dx for F(psi) = lambda psi^m / m, psi the
// position field built from u.
HomogPoly taylor_monomial(int m, double lambda, LatticePtr lat);
inline HomogPoly taylor_cubic_plus(int n, double lambda, LatticePtr lat) { return taylor_monomial(n, lambda, std::move(lat)); }
// Normalization constant c(m, d, lambda) in (H_m)_{sigma,j} = c * prod (2 omega)^{-1/2}.
double taylor_constant(int m, int d, double lambda);

enum class Side { leq, gt };
HomogPoly truncate(const HomogPoly& g, double N, Side side);
std::pair<HomogPoly, HomogPoly> truncate_split(const HomogPoly& g, double N);

HomogPoly ad_z2(const HomogPoly& g);
HomogPoly ad_z2_inverse(const HomogPoly& g, double floor = kDefaultDivisorFloor);
// Keys with |divisor| < floor go to .second; the rest to .first.
std::pair<HomogPoly, HomogPoly> split_small_divisors(const HomogPoly& g, double floor);

HomogPoly resonant_part(const HomogPoly& g);
// (G^{(+1)}, G^{(-1)})
std::pair<HomogPoly, HomogPoly> pm_split(const HomogPoly& g);

// {F, G} = i sum_n (dG/du_n dF/dubar_n - dG/dubar_n dF/du_n).
// With this convention poisson(Z_2, G) = ad_z2(G).
HomogPoly poisson(const HomogPoly& f, const HomogPoly& g, int workers = 1);
HomogPoly poisson_with_ns(const HomogPoly& g, double s);

cplx evaluate(const HomogPoly& g, const SpectralState& z);
// (X_G)_n = i dG/dubar_n
SpectralState vector_field(const HomogPoly& g, const SpectralState& z);
void add_vector_field(const HomogPoly& g, const SpectralState& z, std::vector<cplx>& out);

HomogPoly add(const HomogPoly& a, const HomogPoly& b);
HomogPoly subtract(const HomogPoly& a, const HomogPoly& b);
HomogPoly scale(const HomogPoly& a, cplx factor);
HomogPoly filter_keys(const HomogPoly& g, const std::function<bool(std::span<const SlotCode>, cplx)>& keep);

// max over keys of |a_t - b_t| (missing keys count as zero).
double max_abs_diff(const HomogPoly& a, const HomogPoly& b);
// max |c_t - conj(c_{flip t})| ; 0 for an exactly real polynomial.
double reality_defect(const HomogPoly& g);

// Graded sums keyed by degree.
using Graded = std::map<int, HomogPoly>;
void accumulate(Graded& into, const HomogPoly& p);
cplx evaluate(const Graded& g, const SpectralState& z);

}  // namespace beamlab
