#include "beamlab/lattice.hpp"

#include <cmath>
#include <random>
#include <string>

#include "beamlab/error.hpp"

namespace beamlab {

Anisotropy::Anisotropy(std::vector<double> a) : a_(std::move(a)) {
  const int d = dim();
  if (d < kMinDim || d > kMaxDim)
    throw ConfigError("anisotropy dimension " + std::to_string(d) + " outside 2..5");
  for (double ai : a_) {
    if (!(ai > 1.0 && ai < 4.0))
      throw ConfigError("anisotropy component " + std::to_string(ai) + " outside (1,4)");
  }
}

double anisotropic_norm2(std::span<const int> j, const Anisotropy& a) {
  double r = 0.0;
  for (std::size_t i = 0; i < j.size(); ++i) r += a[static_cast<int>(i)] * double(j[i]) * double(j[i]);
  return r;
}

double freq(std::span<const int> j, const Anisotropy& a) {
  const double n2 = anisotropic_norm2(j, a);
  return std::sqrt(n2 * n2 + 1.0);
}

double sobolev_weight(std::span<const int> j, double s) {
  long long n2 = 0;
  for (int c : j) n2 += static_cast<long long>(c) * c;
  return std::pow(1.0 + static_cast<double>(n2), s);
}

Anisotropy sample_anisotropy(std::uint64_t seed, int d) {
  if (d < kMinDim || d > kMaxDim) throw ConfigError("dimension outside 2..5");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(1.0 + kAnisotropyMargin, 4.0 - kAnisotropyMargin);
  std::vector<double> a(static_cast<std::size_t>(d));
  for (auto& x : a) x = dist(rng);
  return Anisotropy(std::move(a));
}

std::vector<std::vector<int>> enumerate_modes(int J, int d) {
  if (J < 0 || d < 1) throw ConfigError("enumerate_modes needs J >= 0 and d >= 1");
  std::vector<std::vector<int>> out;
  std::vector<int> j(static_cast<std::size_t>(d), -J);
  while (true) {
    out.push_back(j);
    int i = d - 1;
    while (i >= 0 && j[i] == J) j[i--] = -J;
    if (i < 0) break;
    ++j[i];
  }
  return out;
}

Lattice::Lattice(LatticeSpec spec, std::size_t max_modes) : spec_(std::move(spec)) {
  d_ = spec_.dim();
  if (d_ < kMinDim) throw ConfigError("lattice needs a valid anisotropy");
  if (spec_.J < 1) throw ConfigError("lattice cutoff J must be >= 1");
  if (spec_.s < 0) throw ConfigError("Sobolev index s must be >= 0");
  const double count = std::pow(2.0 * spec_.J + 1.0, d_);
  if (count > static_cast<double>(max_modes))
    throw ResourceError("lattice with " + std::to_string(count) + " modes exceeds budget");
  size_ = static_cast<int>(count);

  auto modes = enumerate_modes(spec_.J, d_);
  modes_.reserve(static_cast<std::size_t>(size_) * d_);
  for (auto& m : modes) modes_.insert(modes_.end(), m.begin(), m.end());

  abs_class_.resize(size_);
  norm2_.resize(size_);
  omega_.resize(size_);
  weight_.resize(size_);
  std::vector<int> absj(static_cast<std::size_t>(d_));
  for (int idx = 0; idx < size_; ++idx) {
    auto j = mode(idx);
    int n2 = 0;
    for (int i = 0; i < d_; ++i) {
      absj[i] = std::abs(j[i]);
      n2 += j[i] * j[i];
    }
    norm2_[idx] = n2;
    abs_class_[idx] = index_of(absj);
    omega_[idx] = freq(j, spec_.a);
    weight_[idx] = sobolev_weight(j, spec_.s);
  }
}

std::shared_ptr<const Lattice> Lattice::make(LatticeSpec spec) {
  return std::make_shared<const Lattice>(std::move(spec));
}

int Lattice::index_of(std::span<const int> j) const {
  const int J = spec_.J;
  const int base = 2 * J + 1;
  int idx = 0;
  for (int i = 0; i < d_; ++i) {
    if (j[i] < -J || j[i] > J) return -1;
    idx = idx * base + (j[i] + J);
  }
  return idx;
}

int Lattice::shifted(std::span<const int> j, int sign, int other) const {
  auto o = mode(other);
  const int J = spec_.J;
  const int base = 2 * J + 1;
  int idx = 0;
  for (int i = 0; i < d_; ++i) {
    const int c = j[i] + sign * o[i];
    if (c < -J || c > J) return -1;
    idx = idx * base + (c + J);
  }
  return idx;
}

std::vector<double> Lattice::weights(double s) const {
  std::vector<double> w(static_cast<std::size_t>(size_));
  for (int idx = 0; idx < size_; ++idx) w[idx] = std::pow(1.0 + norm2_[idx], s);
  return w;
}

}  // namespace beamlab
