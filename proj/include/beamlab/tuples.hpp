#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamlab/lattice.hpp"

namespace beamlab {

// One factor u_j^sigma packed as 2 * mode_index + (sigma > 0).
using SlotCode = std::uint32_t;

constexpr SlotCode make_slot(int mode, int sign) {
  return (static_cast<SlotCode>(mode) << 1) | (sign > 0 ? 1u : 0u);
}
constexpr int slot_mode(SlotCode c) { return static_cast<int>(c >> 1); }
constexpr int slot_sign(SlotCode c) { return (c & 1u) ? 1 : -1; }
constexpr SlotCode slot_conj(SlotCode c) { return c ^ 1u; }

// Signed index tuple (sigma, j) kept sorted by (mode index, sign). The
// sorted slot list is the canonical representative of its permutation orbit.
class SignedTuple {
 public:
  SignedTuple() = default;
  explicit SignedTuple(std::vector<SlotCode> slots);
  SignedTuple(const Lattice& lat, std::span<const int> sigma, const std::vector<std::vector<int>>& modes);

  int degree() const { return static_cast<int>(slots_.size()); }
  std::span<const SlotCode> slots() const { return slots_; }
  int sign(int i) const { return slot_sign(slots_[i]); }
  int mode(int i) const { return slot_mode(slots_[i]); }

  // (-sigma, j), re-canonicalized.
  SignedTuple flipped() const;
  std::string to_string(const Lattice& lat) const;

  auto operator<=>(const SignedTuple&) const = default;
  bool operator==(const SignedTuple&) const = default;

 private:
  std::vector<SlotCode> slots_;
};

void canonicalize(std::vector<SlotCode>& slots);

std::vector<int> momentum(std::span<const SlotCode> t, const Lattice& lat);
bool has_zero_momentum(std::span<const SlotCode> t, const Lattice& lat);

// Sum sigma_i omega_{j_i}. Slots are first reduced to net counts per abs
// class, so resonant tuples give exactly 0 and flipping all signs negates the
// value bit for bit.
double small_divisor(std::span<const SlotCode> t, const Lattice& lat);
double small_divisor(std::span<const SlotCode> t, const Lattice& lat, const Anisotropy& a);

// Sum sigma_i <j_i>^{2s} with the same class reduction.
double weight_divisor(std::span<const SlotCode> t, const Lattice& lat, std::span<const double> weights);

// Reduced form of the divisor as a function of a: pairs (abs class, net count).
struct DivisorForm {
  std::vector<std::vector<int>> modes;
  std::vector<int> counts;

  static DivisorForm of(std::span<const SlotCode> t, const Lattice& lat);
  double evaluate(std::span<const double> a) const;
  bool identically_zero() const { return modes.empty(); }
};

bool is_resonant(std::span<const SlotCode> t, const Lattice& lat);

// k-th largest |j_i|^2 (k is 1-based); 0 when k exceeds the degree.
int mu_sq(std::span<const SlotCode> t, const Lattice& lat, int k);
double mu(std::span<const SlotCode> t, const Lattice& lat, int k);

// +1 when some pair of distinct slots realizing mu_1 and mu_2 has equal signs.
int classify_pm(std::span<const SlotCode> t, const Lattice& lat);

struct ZeroMomentumFilter {
  std::optional<double> mu2_max;      // keep mu_2 <= N
  bool nonresonant_only = false;
  std::optional<int> plus_count;      // number of + slots (sign multiset)
  std::size_t limit = std::size_t{50'000'000};
};

// Visits every canonical zero-momentum tuple of degree k exactly once,
// in increasing lexicographic order of slot codes.
void for_each_zero_momentum(const Lattice& lat, int k, const ZeroMomentumFilter& filter,
                            const std::function<void(std::span<const SlotCode>)>& fn);

// Materialized variant; throws ResourceError above filter.limit.
std::vector<SignedTuple> enumerate_zero_momentum(const Lattice& lat, int k,
                                                 const ZeroMomentumFilter& filter = {});

// Slots p, q with opposite signs and a component i such that
// |(j_{p,i} + j_{q,i}) * j_{r,i}| >= 2 (1 + sum_{k != p,q} j_{k,i}^2) for the
// remaining slot(s); only degree-3 tuples are examined.
struct PairBound {
  int slot_p = -1;
  int slot_q = -1;
  int component = -1;
  int pair_sum = 0;  // j_{p,i} + j_{q,i}
  double bound_for(double gamma) const { return 2.0 * gamma / std::abs(pair_sum); }
};
std::optional<PairBound> find_pair_bound(std::span<const SlotCode> t, const Lattice& lat);

struct MeasureReport {
  double gamma = 0;
  double fraction_bad = 0;
  double std_error = 0;      // binomial standard error
  std::size_t n_samples = 0;
  std::optional<double> bound;
  std::uint64_t seed = 0;
  double min_abs_divisor = 0;
};

// Monte Carlo estimate of the fraction of a in (1,4)^d with |divisor| < gamma.
// Samples are split in fixed blocks with independent streams seeded by
// (seed, block), so the result does not depend on the worker count.
MeasureReport measure_estimate(std::span<const SlotCode> t, const Lattice& lat, double gamma,
                               std::size_t n_samples, std::uint64_t seed, int workers = 0);

int default_workers();

}  // namespace beamlab
