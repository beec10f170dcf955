#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "beamlab/state.hpp"

namespace beamlab {

// F(psi) = sum_m lambda_m psi^m / m
struct Nonlinearity {
  std::vector<std::pair<int, double>> terms;  // (m, lambda_m)

  static Nonlinearity monomial(int n, double lambda) { return {{{n, lambda}}}; }
  int max_order() const;
  bool is_zero() const;
  double F(double psi) const;
  double dF(double psi) const;
};

// Smallest power of two M with M >= max_order * J + 1. On such a grid the
// Galerkin-projected force and the potential quadrature are alias-free.
int dealias_grid(int J, int max_order);

struct Observables {
  double t = 0;
  double H = 0;
  double Z2 = 0;
  double Ns = 0;
  double norm = 0;  // ||u||_{H^s}
};

enum class Scheme { strang, yoshida4 };

struct SimConfig {
  int grid = 0;  // points per dimension; 0 selects dealias_grid
  double dt = 1e-3;
  double t_end = 1.0;
  Nonlinearity f;
  double s = 0.0;
  int output_every = 1;  // record observables every this many steps
  Scheme scheme = Scheme::strang;

  void validate(int J) const;
};

// Physical variables are passed as spectra on the lattice (phi_j, v_j), which
// must be conjugate-symmetric: phi_{-j} = conj(phi_j).
SpectralState to_complex(const LatticePtr& lat, const std::vector<cplx>& phi, const std::vector<cplx>& v);
std::pair<std::vector<cplx>, std::vector<cplx>> from_complex(const SpectralState& z);

SpectralState linear_flow(const SpectralState& z, double t);

class Simulator {
 public:
  Simulator(LatticePtr lat, Nonlinearity f, int grid = 0);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  int grid() const { return M_; }
  const Nonlinearity& nonlinearity() const { return f_; }
  const LatticePtr& lattice() const { return lat_; }

  // (i / sqrt 2) omega^{-1/2} f_hat(psi), psi = omega^{-1/2}(u + conj u(-.)) / sqrt 2
  SpectralState nonlinear_force(const SpectralState& z) const;
  // int F(psi) dx by grid quadrature
  double potential(const SpectralState& z) const;
  Observables observables(const SpectralState& z, double s) const;
  // Values of a lattice spectrum on the physical grid (row-major).
  std::vector<cplx> to_grid(const std::vector<cplx>& spectrum) const;

  // half linear flow, exact nonlinear kick, half linear flow
  void step_strang(SpectralState& z, double dt) const;
  void step_yoshida4(SpectralState& z, double dt) const;
  void step(SpectralState& z, double dt, Scheme scheme) const;

 private:
  void fill_psi(const SpectralState& z) const;
  LatticePtr lat_;
  Nonlinearity f_;
  int M_;
  std::size_t points_;
  std::vector<std::size_t> grid_index_;  // lattice mode -> grid slot
  std::vector<double> inv_sqrt_omega_;
  mutable std::vector<cplx> buf_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

// Advances v = exp(-i omega t) u instead of u. The linear part is then exact
// with no rotation applied per step, so mode moduli do not pick up the
// systematic rounding bias of repeated phase multiplications. Each step is the
// same splitting as Simulator::step.
class Propagator {
 public:
  Propagator(const Simulator& sim, const SpectralState& z0);

  void step(double dt, Scheme scheme);
  double time() const { return t_; }
  SpectralState state() const;

 private:
  void kick(double h);
  const Simulator& sim_;
  std::vector<cplx> v_;
  double t_ = 0;
};

struct Trajectory {
  std::vector<Observables> series;
  SpectralState final_state;
  bool blew_up = false;
  double blowup_time = 0;
  bool stopped = false;  // stop predicate fired
};

// Integrates from z0 to cfg.t_end. The optional predicate is evaluated after
// every step and ends the run early when it returns true.
Trajectory run_trajectory(const Simulator& sim, SpectralState z0, const SimConfig& cfg,
                          const std::function<bool(const SpectralState&)>& stop = {});

// "single-mode:j1,...,jd" puts eps / <j>^s on mode j; "random-band:seed[:band]"
// draws Gaussian coefficients on |j|_inf <= band (default 2) and rescales to
// ||u||_{H^s} = eps.
SpectralState initial_state(const LatticePtr& lat, const std::string& ic, double eps, double s);

}  // namespace beamlab
