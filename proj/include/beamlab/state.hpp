#pragma once

#include <complex>
#include <vector>

#include "beamlab/lattice.hpp"

namespace beamlab {

using cplx = std::complex<double>;

// Complex Fourier coefficients u_j, one per lattice mode in lattice order.
struct SpectralState {
  LatticePtr lattice;
  std::vector<cplx> u;
  double time = 0.0;

  SpectralState() = default;
  explicit SpectralState(LatticePtr lat) : lattice(std::move(lat)), u(static_cast<std::size_t>(lattice->size())) {}
  SpectralState(LatticePtr lat, std::vector<cplx> coeffs) : lattice(std::move(lat)), u(std::move(coeffs)) {}

  int size() const { return static_cast<int>(u.size()); }
};

// N_s(u) = sum <j>^{2s} |u_j|^2 using the lattice's own s.
double sobolev_energy(const SpectralState& z);
double sobolev_energy(const SpectralState& z, double s);
double sobolev_norm(const SpectralState& z, double s);

// Z_2(u) = sum omega_j |u_j|^2.
double quadratic_energy(const SpectralState& z);

}  // namespace beamlab
