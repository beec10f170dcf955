#include "beamlab/sim.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "beamlab/error.hpp"

namespace beamlab {

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr cplx kI{0.0, 1.0};

}  // namespace

int Nonlinearity::max_order() const {
  int m = 0;
  for (auto& [k, l] : terms) m = std::max(m, k);
  return m;
}

bool Nonlinearity::is_zero() const {
  for (auto& [k, l] : terms)
    if (l != 0.0) return false;
  return true;
}

double Nonlinearity::F(double psi) const {
  double v = 0;
  for (auto& [m, l] : terms) v += l * std::pow(psi, m) / m;
  return v;
}

double Nonlinearity::dF(double psi) const {
  double v = 0;
  for (auto& [m, l] : terms) v += l * std::pow(psi, m - 1);
  return v;
}

int dealias_grid(int J, int max_order) {
  const int need = std::max(max_order, 2) * J + 1;
  int M = 4;
  while (M < need) M *= 2;
  return M;
}

void SimConfig::validate(int J) const {
  if (!(dt > 0)) throw ConfigError("simulation: dt must be positive");
  if (!(t_end >= 0)) throw ConfigError("simulation: t_end must be non-negative");
  if (output_every < 1) throw ConfigError("simulation: output cadence must be >= 1");
  for (auto& [m, l] : f.terms)
    if (m < 3) throw ConfigError("simulation: nonlinearity orders must be >= 3");
  if (grid != 0 && grid < std::max(f.max_order(), 2) * J + 1)
    throw ConfigError("simulation: grid too small for alias-free products");
}

SpectralState to_complex(const LatticePtr& lat, const std::vector<cplx>& phi, const std::vector<cplx>& v) {
  const int n = lat->size();
  if (static_cast<int>(phi.size()) != n || static_cast<int>(v.size()) != n)
    throw ConfigError("to_complex: spectra do not match the lattice");
  double scale = 0, defect = 0;
  for (int i = 0; i < n; ++i) {
    const int m = lat->negated(i);
    scale = std::max({scale, std::abs(phi[i]), std::abs(v[i])});
    defect = std::max({defect, std::abs(phi[m] - std::conj(phi[i])), std::abs(v[m] - std::conj(v[i]))});
  }
  if (defect > 1e-12 * std::max(scale, 1e-300)) throw ConfigError("to_complex: non-symmetric input spectrum");
  SpectralState z(lat);
  for (int i = 0; i < n; ++i) {
    const double w = lat->omega(i);
    z.u[i] = (std::sqrt(w) * phi[i] + kI * v[i] / std::sqrt(w)) / std::numbers::sqrt2;
  }
  return z;
}

std::pair<std::vector<cplx>, std::vector<cplx>> from_complex(const SpectralState& z) {
  const Lattice& lat = *z.lattice;
  std::vector<cplx> phi(z.u.size()), v(z.u.size());
  for (int i = 0; i < lat.size(); ++i) {
    const double w = lat.omega(i);
    const cplx a = z.u[i], b = std::conj(z.u[lat.negated(i)]);
    phi[i] = (a + b) / (std::sqrt(w) * std::numbers::sqrt2);
    v[i] = std::sqrt(w) * (a - b) / (kI * std::numbers::sqrt2);
  }
  return {phi, v};
}

SpectralState linear_flow(const SpectralState& z, double t) {
  SpectralState out = z;
  for (int i = 0; i < z.lattice->size(); ++i) out.u[i] = std::polar(1.0, z.lattice->omega(i) * t) * z.u[i];
  out.time = z.time + t;
  return out;
}

// ----------------------------------------------------------------- Simulator

Simulator::Simulator(LatticePtr lat, Nonlinearity f, int grid) : lat_(std::move(lat)), f_(std::move(f)) {
  const int J = lat_->cutoff();
  const int d = lat_->dim();
  M_ = grid > 0 ? grid : dealias_grid(J, f_.max_order());
  if (M_ < std::max(f_.max_order(), 2) * J + 1) throw ConfigError("simulation grid too small for alias-free products");
  points_ = 1;
  for (int i = 0; i < d; ++i) points_ *= static_cast<std::size_t>(M_);
  grid_index_.resize(static_cast<std::size_t>(lat_->size()));
  inv_sqrt_omega_.resize(static_cast<std::size_t>(lat_->size()));
  for (int idx = 0; idx < lat_->size(); ++idx) {
    auto j = lat_->mode(idx);
    std::size_t g = 0;
    for (int i = 0; i < d; ++i) g = g * M_ + static_cast<std::size_t>((j[i] % M_ + M_) % M_);
    grid_index_[idx] = g;
    inv_sqrt_omega_[idx] = 1.0 / std::sqrt(lat_->omega(idx));
  }
  buf_.resize(points_);
  std::vector<int> dims(static_cast<std::size_t>(d), M_);
  auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  fwd_ = fftw_plan_dft(d, dims.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(d, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) throw ResourceError("FFTW planning failed");
}

Simulator::~Simulator() {
  std::lock_guard<std::mutex> lock(fftw_planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

std::vector<cplx> Simulator::to_grid(const std::vector<cplx>& spectrum) const {
  std::fill(buf_.begin(), buf_.end(), cplx{});
  for (int idx = 0; idx < lat_->size(); ++idx) buf_[grid_index_[idx]] = spectrum[idx];
  fftw_execute(static_cast<fftw_plan>(bwd_));
  const double norm = std::pow(2.0 * std::numbers::pi, -lat_->dim() / 2.0);
  std::vector<cplx> out(buf_);
  for (auto& x : out) x *= norm;
  return out;
}

void Simulator::fill_psi(const SpectralState& z) const {
  std::fill(buf_.begin(), buf_.end(), cplx{});
  const double norm = std::pow(2.0 * std::numbers::pi, -lat_->dim() / 2.0) / std::numbers::sqrt2;
  for (int idx = 0; idx < lat_->size(); ++idx)
    buf_[grid_index_[idx]] = norm * inv_sqrt_omega_[idx] * (z.u[idx] + std::conj(z.u[lat_->negated(idx)]));
  fftw_execute(static_cast<fftw_plan>(bwd_));
}

SpectralState Simulator::nonlinear_force(const SpectralState& z) const {
  SpectralState out(lat_);
  out.time = z.time;
  if (f_.is_zero()) return out;
  fill_psi(z);
  for (auto& x : buf_) x = f_.dF(x.real());
  fftw_execute(static_cast<fftw_plan>(fwd_));
  const double d = lat_->dim();
  const double norm = std::pow(2.0 * std::numbers::pi, d / 2.0) / static_cast<double>(points_);
  for (int idx = 0; idx < lat_->size(); ++idx)
    out.u[idx] = kI / std::numbers::sqrt2 * inv_sqrt_omega_[idx] * norm * buf_[grid_index_[idx]];
  return out;
}

double Simulator::potential(const SpectralState& z) const {
  if (f_.is_zero()) return 0.0;
  fill_psi(z);
  double total = 0;
  for (const auto& x : buf_) total += f_.F(x.real());
  return total * std::pow(2.0 * std::numbers::pi / M_, lat_->dim());
}

Observables Simulator::observables(const SpectralState& z, double s) const {
  Observables o;
  o.t = z.time;
  o.Z2 = quadratic_energy(z);
  o.H = o.Z2 + potential(z);
  o.Ns = sobolev_energy(z, s);
  o.norm = std::sqrt(o.Ns);
  return o;
}

void Simulator::step_strang(SpectralState& z, double dt) const {
  const double t0 = z.time;
  if (f_.is_zero()) {
    z = linear_flow(z, dt);
    return;
  }
  z = linear_flow(z, dt / 2);
  const SpectralState k = nonlinear_force(z);
  for (int i = 0; i < lat_->size(); ++i) z.u[i] += dt * k.u[i];
  z = linear_flow(z, dt / 2);
  z.time = t0 + dt;
}

void Simulator::step_yoshida4(SpectralState& z, double dt) const {
  const double c = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - c);
  const double w0 = -c / (2.0 - c);
  const double t0 = z.time;
  step_strang(z, w1 * dt);
  step_strang(z, w0 * dt);
  step_strang(z, w1 * dt);
  z.time = t0 + dt;
}

void Simulator::step(SpectralState& z, double dt, Scheme scheme) const {
  if (scheme == Scheme::strang)
    step_strang(z, dt);
  else
    step_yoshida4(z, dt);
}

// ---------------------------------------------------------------- Propagator

Propagator::Propagator(const Simulator& sim, const SpectralState& z0) : sim_(sim), t_(z0.time) {
  const Lattice& lat = *sim.lattice();
  v_.resize(z0.u.size());
  for (int i = 0; i < lat.size(); ++i) v_[i] = std::polar(1.0, -lat.omega(i) * t_) * z0.u[i];
}

SpectralState Propagator::state() const {
  const Lattice& lat = *sim_.lattice();
  SpectralState z(sim_.lattice());
  z.time = t_;
  for (int i = 0; i < lat.size(); ++i) z.u[i] = std::polar(1.0, lat.omega(i) * t_) * v_[i];
  return z;
}

void Propagator::kick(double h) {
  const Lattice& lat = *sim_.lattice();
  const double tm = t_ + h / 2;
  SpectralState z(sim_.lattice());
  z.time = tm;
  std::vector<cplx> ph(v_.size());
  for (int i = 0; i < lat.size(); ++i) {
    ph[i] = std::polar(1.0, lat.omega(i) * tm);
    z.u[i] = ph[i] * v_[i];
  }
  const SpectralState k = sim_.nonlinear_force(z);
  for (int i = 0; i < lat.size(); ++i) v_[i] += h * std::conj(ph[i]) * k.u[i];
  t_ += h;
}

void Propagator::step(double dt, Scheme scheme) {
  if (sim_.nonlinearity().is_zero()) {
    t_ += dt;
    return;
  }
  if (scheme == Scheme::strang) {
    kick(dt);
    return;
  }
  const double c = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - c);
  const double w0 = -c / (2.0 - c);
  kick(w1 * dt);
  kick(w0 * dt);
  kick(w1 * dt);
}

Trajectory run_trajectory(const Simulator& sim, SpectralState z0, const SimConfig& cfg,
                          const std::function<bool(const SpectralState&)>& stop) {
  cfg.validate(sim.lattice()->cutoff());
  Trajectory tr;
  SpectralState z = std::move(z0);
  const double t_start = z.time;
  const long steps = static_cast<long>(std::llround((cfg.t_end - t_start) / cfg.dt));
  tr.series.push_back(sim.observables(z, cfg.s));
  Propagator prop(sim, z);
  for (long k = 1; k <= steps; ++k) {
    prop.step(cfg.dt, cfg.scheme);
    z = prop.state();
    z.time = t_start + k * cfg.dt;
    bool finite = true;
    for (const auto& x : z.u) finite = finite && std::isfinite(x.real()) && std::isfinite(x.imag());
    if (!finite) {
      tr.blew_up = true;
      tr.blowup_time = z.time;
      break;
    }
    const bool halt = stop && stop(z);
    if (k % cfg.output_every == 0 || k == steps || halt) tr.series.push_back(sim.observables(z, cfg.s));
    if (halt) {
      tr.stopped = true;
      break;
    }
  }
  tr.final_state = std::move(z);
  return tr;
}

SpectralState initial_state(const LatticePtr& lat, const std::string& ic, double eps, double s) {
  SpectralState z(lat);
  auto colon = ic.find(':');
  const std::string kind = ic.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : ic.substr(colon + 1);
  if (kind == "single-mode") {
    std::vector<int> j;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) j.push_back(std::stoi(tok));
    if (static_cast<int>(j.size()) != lat->dim()) throw ConfigError("single-mode: wrong number of components");
    const int idx = lat->index_of(j);
    if (idx < 0) throw ConfigError("single-mode: mode outside lattice");
    z.u[idx] = eps / std::sqrt(sobolev_weight(j, s));
    return z;
  }
  if (kind == "random-band") {
    std::uint64_t seed = 0;
    int band = 2;
    auto c2 = arg.find(':');
    try {
      seed = std::stoull(arg.substr(0, c2));
      if (c2 != std::string::npos) band = std::stoi(arg.substr(c2 + 1));
    } catch (const std::exception&) {
      throw ConfigError("random-band: expected seed[:band]");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int idx = 0; idx < lat->size(); ++idx) {
      const double re = g(rng), im = g(rng);
      bool inside = true;
      for (int c : lat->mode(idx)) inside = inside && std::abs(c) <= band;
      if (inside) z.u[idx] = cplx{re, im};
    }
    const double nrm = sobolev_norm(z, s);
    if (nrm == 0) throw ConfigError("random-band: empty band");
    for (auto& x : z.u) x *= eps / nrm;
    return z;
  }
  throw ConfigError("unknown initial condition '" + ic + "'");
}

}  // namespace beamlab
