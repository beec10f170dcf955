#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace beamlab {

inline constexpr int kMinDim = 2;
inline constexpr int kMaxDim = 5;
inline constexpr double kAnisotropyMargin = 1e-3;

// a = (a_1, ..., a_d), every a_i in the open interval (1, 4).
class Anisotropy {
 public:
  Anisotropy() = default;
  explicit Anisotropy(std::vector<double> a);

  int dim() const { return static_cast<int>(a_.size()); }
  double operator[](int i) const { return a_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return a_; }

  bool operator==(const Anisotropy&) const = default;

 private:
  std::vector<double> a_;
};

// |j|_a^2 = sum a_i j_i^2
double anisotropic_norm2(std::span<const int> j, const Anisotropy& a);

// omega_j = sqrt(|j|_a^4 + 1)
double freq(std::span<const int> j, const Anisotropy& a);

// <j>^{2s} = (1 + |j|^2)^s
double sobolev_weight(std::span<const int> j, double s);

// i.i.d. uniform components in (1 + 1e-3, 4 - 1e-3), deterministic in seed.
Anisotropy sample_anisotropy(std::uint64_t seed, int d);

// All j with |j_i| <= J, lexicographic order (first component most significant).
std::vector<std::vector<int>> enumerate_modes(int J, int d);

struct LatticeSpec {
  int J = 1;
  Anisotropy a;
  double s = 0.0;

  int dim() const { return a.dim(); }
};

inline constexpr std::size_t kDefaultMaxModes = std::size_t{1} << 22;

// Truncated frequency lattice with per-mode tables. Mode indices follow the
// lexicographic order of enumerate_modes, so index(-j) = size() - 1 - index(j).
class Lattice {
 public:
  explicit Lattice(LatticeSpec spec, std::size_t max_modes = kDefaultMaxModes);

  static std::shared_ptr<const Lattice> make(LatticeSpec spec);

  const LatticeSpec& spec() const { return spec_; }
  const Anisotropy& anisotropy() const { return spec_.a; }
  int dim() const { return d_; }
  int cutoff() const { return spec_.J; }
  int size() const { return size_; }

  std::span<const int> mode(int idx) const {
    return {modes_.data() + static_cast<std::size_t>(idx) * d_, static_cast<std::size_t>(d_)};
  }
  // -1 when j lies outside the cutoff box.
  int index_of(std::span<const int> j) const;
  int negated(int idx) const { return size_ - 1 - idx; }
  // Index of j + sign * mode(other), or -1 when outside the box.
  int shifted(std::span<const int> j, int sign, int other) const;

  // Modes related by componentwise sign flips share an abs class; the class
  // id is the index of the mode with all components non-negative.
  int abs_class(int idx) const { return abs_class_[idx]; }
  int norm2(int idx) const { return norm2_[idx]; }
  double omega(int idx) const { return omega_[idx]; }
  double weight(int idx) const { return weight_[idx]; }
  std::vector<double> weights(double s) const;
  int max_norm2() const { return spec_.J * spec_.J * d_; }

  const std::vector<double>& omegas() const { return omega_; }

 private:
  LatticeSpec spec_;
  int d_ = 0;
  int size_ = 0;
  std::vector<int> modes_;
  std::vector<int> abs_class_;
  std::vector<int> norm2_;
  std::vector<double> omega_;
  std::vector<double> weight_;
};

using LatticePtr = std::shared_ptr<const Lattice>;

}  // namespace beamlab
