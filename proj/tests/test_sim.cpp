#include <numbers>

#include "beamlab/poly.hpp"
#include "beamlab/sim.hpp"
#include "doctest.h"
#include "oracles/oracles.hpp"

using namespace beamlab;

namespace {

LatticePtr lat2(int J, double s = 0.0) { return Lattice::make(LatticeSpec{J, Anisotropy({1.37, 2.61}), s}); }

double max_rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double e = 0, s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e = std::max(e, std::abs(a[i] - b[i]));
    s = std::max(s, std::abs(b[i]));
  }
  return e / std::max(s, 1e-300);
}

std::pair<std::vector<cplx>, std::vector<cplx>> random_fields(const Lattice& lat, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 1);
  std::vector<cplx> phi(lat.size()), v(lat.size());
  for (int i = 0; i < lat.size(); ++i) {
    const int m = lat.negated(i);
    if (m < i) continue;
    phi[i] = {g(rng), m == i ? 0.0 : g(rng)};
    v[i] = {g(rng), m == i ? 0.0 : g(rng)};
    phi[m] = std::conj(phi[i]);
    v[m] = std::conj(v[i]);
  }
  return {phi, v};
}

// Force by explicit convolution of the position spectrum (F = lambda psi^3 / 3).
std::vector<cplx> force_by_convolution(const SpectralState& z, double lambda) {
  const Lattice& lat = *z.lattice;
  const int d = lat.dim();
  std::vector<cplx> psi(lat.size());
  for (int i = 0; i < lat.size(); ++i)
    psi[i] = (z.u[i] + std::conj(z.u[lat.negated(i)])) / std::sqrt(2.0 * lat.omega(i));
  std::vector<cplx> out(lat.size());
  std::vector<int> c(static_cast<std::size_t>(d));
  for (int n = 0; n < lat.size(); ++n) {
    cplx f{};
    for (int a = 0; a < lat.size(); ++a) {
      const int b = lat.shifted(lat.mode(n), -1, a);
      if (b < 0) continue;
      f += psi[a] * psi[b];
    }
    f *= lambda * std::pow(2 * std::numbers::pi, -d / 2.0);
    out[n] = cplx{0, 1} / std::numbers::sqrt2 / std::sqrt(lat.omega(n)) * f;
  }
  return out;
}

}  // namespace

TEST_CASE("complex variables") {
  auto lat = lat2(3);
  std::vector<cplx> zero(lat->size());
  auto z0 = to_complex(lat, zero, zero);
  for (auto& x : z0.u) CHECK(x == cplx{});

  std::vector<cplx> phi(lat->size());
  const int j = lat->index_of(std::vector<int>{1, 2});
  phi[j] = 0.3;
  phi[lat->negated(j)] = 0.3;
  auto z1 = to_complex(lat, phi, zero);
  CHECK(std::abs(z1.u[j] - std::sqrt(lat->omega(j)) * 0.3 / std::numbers::sqrt2) < 1e-15);
  CHECK(std::abs(z1.u[lat->negated(j)] - std::sqrt(lat->omega(j)) * 0.3 / std::numbers::sqrt2) < 1e-15);

  std::mt19937_64 rng(1);
  auto [p, v] = random_fields(*lat, rng);
  auto [p2, v2] = from_complex(to_complex(lat, p, v));
  CHECK(max_rel(p2, p) < 1e-13);
  CHECK(max_rel(v2, v) < 1e-13);

  phi[j] = cplx{0.3, 0.1};
  CHECK_THROWS_AS(to_complex(lat, phi, zero), ConfigError);
}

TEST_CASE("linear flow") {
  auto lat = lat2(3, 2.0);
  std::mt19937_64 rng(2);
  auto z = oracle::random_state(lat, 1.0, rng);
  CHECK(linear_flow(z, 0.0).u == z.u);
  auto w = linear_flow(z, 3.7);
  CHECK(std::abs(sobolev_energy(w) - sobolev_energy(z)) < 1e-13 * sobolev_energy(z));
  CHECK(max_rel(linear_flow(w, -3.7).u, z.u) < 1e-13);
}

TEST_CASE("dealias grid") {
  CHECK(dealias_grid(2, 3) == 8);
  CHECK(dealias_grid(3, 3) == 16);
  CHECK(dealias_grid(4, 4) == 32);
  CHECK_THROWS_AS(Simulator(lat2(3), Nonlinearity::monomial(3, 1.0), 8), ConfigError);
}

TEST_CASE("nonlinear force") {
  auto lat = lat2(2);
  std::mt19937_64 rng(3);
  Simulator zero(lat, Nonlinearity::monomial(3, 0.0));
  auto z = oracle::random_state(lat, 0.5, rng);
  for (auto& x : zero.nonlinear_force(z).u) CHECK(x == cplx{});

  Simulator sim(lat, Nonlinearity::monomial(3, 0.8));
  // against the direct convolution sum
  CHECK(max_rel(sim.nonlinear_force(z).u, force_by_convolution(z, 0.8)) < 1e-12);

  // single mode: support on two-fold combinations of +-j
  SpectralState one(lat);
  const int j = lat->index_of(std::vector<int>{1, 0});
  one.u[j] = 0.4;
  auto f = sim.nonlinear_force(one);
  for (int n = 0; n < lat->size(); ++n) {
    auto m = lat->mode(n);
    const bool reachable = m[1] == 0 && (m[0] == 0 || m[0] == 2 || m[0] == -2);
    if (!reachable) CHECK(std::abs(f.u[n]) < 1e-15);
  }
  CHECK(std::abs(f.u[lat->index_of(std::vector<int>{2, 0})]) > 1e-3);

  // same field as the Taylor polynomial's Hamiltonian vector field
  auto h3 = taylor_monomial(3, 0.8, lat);
  CHECK(max_rel(sim.nonlinear_force(z).u, vector_field(h3, z).u) < 1e-12);
  CHECK(sim.potential(z) == doctest::Approx(evaluate(h3, z).real()).epsilon(1e-12));

  // finite-difference gradient of the quadrature energy
  Simulator sim4(lat, Nonlinearity{{{3, 0.8}, {4, -0.3}}});
  auto h = oracle::random_state(lat, 1.0, rng);
  auto X = sim4.nonlinear_force(z);
  double pairing = 0;
  for (int n = 0; n < lat->size(); ++n) pairing += 2 * (cplx{0, -1} * X.u[n] * std::conj(h.u[n])).real();
  const double step = 1e-5;
  SpectralState zp(lat), zm(lat);
  for (int n = 0; n < lat->size(); ++n) {
    zp.u[n] = z.u[n] + step * h.u[n];
    zm.u[n] = z.u[n] - step * h.u[n];
  }
  const double fd = (sim4.potential(zp) - sim4.potential(zm)) / (2 * step);
  CHECK(std::abs(fd - pairing) < 1e-6 * std::abs(pairing));
}

TEST_CASE("strang step") {
  auto lat = lat2(3);
  std::mt19937_64 rng(4);
  auto z = initial_state(lat, "random-band:5:2", 0.3, 0.0);
  Simulator lin(lat, Nonlinearity::monomial(3, 0.0));
  auto a = z;
  lin.step_strang(a, 0.01);
  CHECK(a.u == linear_flow(z, 0.01).u);

  Simulator sim(lat, Nonlinearity::monomial(3, 1.0));
  auto b = z;
  sim.step_strang(b, 0.01);
  sim.step_strang(b, -0.01);
  double err = 0;
  for (int i = 0; i < lat->size(); ++i) err = std::max(err, std::abs(b.u[i] - z.u[i]));
  CHECK(err < 1e-13);

  // second-order energy error
  std::vector<double> drift;
  for (double dt : {0.01, 0.005, 0.0025}) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = 5.0;
    cfg.f = sim.nonlinearity();
    auto tr = run_trajectory(sim, z, cfg);
    double m = 0;
    for (auto& o : tr.series) m = std::max(m, std::abs(o.H - tr.series[0].H));
    drift.push_back(m);
  }
  CHECK(drift[0] / drift[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(drift[1] / drift[2] == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("observables and invariants") {
  auto lat = lat2(3, 1.0);
  Simulator sim(lat, Nonlinearity::monomial(3, 1.0));
  auto o = sim.observables(SpectralState(lat), 1.0);
  CHECK(o.H == 0.0);
  CHECK(o.Z2 == 0.0);
  CHECK(o.Ns == 0.0);

  auto z = initial_state(lat, "random-band:9", 0.2, 1.0);
  Simulator lin(lat, Nonlinearity::monomial(3, 0.0));
  SimConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 10;
  cfg.output_every = 50;
  auto tr = run_trajectory(lin, z, cfg);
  for (auto& r : tr.series) CHECK(std::abs(r.Z2 - tr.series[0].Z2) < 1e-13 * tr.series[0].Z2);

  // physical fields stay real
  cfg.f = sim.nonlinearity();
  auto tr2 = run_trajectory(sim, z, cfg);
  auto [phi, v] = from_complex(tr2.final_state);
  double im = 0;
  for (auto& x : sim.to_grid(phi)) im = std::max(im, std::abs(x.imag()));
  for (auto& x : sim.to_grid(v)) im = std::max(im, std::abs(x.imag()));
  CHECK(im < 1e-10);
}

TEST_CASE("initial states") {
  auto lat = lat2(3, 2.0);
  auto z = initial_state(lat, "single-mode:1,-2", 0.01, 2.0);
  CHECK(sobolev_norm(z, 2.0) == doctest::Approx(0.01));
  auto r = initial_state(lat, "random-band:3:1", 0.01, 2.0);
  CHECK(sobolev_norm(r, 2.0) == doctest::Approx(0.01));
  CHECK(r.u == initial_state(lat, "random-band:3:1", 0.01, 2.0).u);
  CHECK_THROWS_AS(initial_state(lat, "bogus", 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(initial_state(lat, "single-mode:9,9", 0.1, 0.0), ConfigError);
}

TEST_CASE("near conservation on the local time scale") {
  auto lat = lat2(3, 1.0);
  Simulator sim(lat, Nonlinearity::monomial(3, 1.0));
  const double eps = 1e-2;
  auto z = initial_state(lat, "random-band:1", eps, 1.0);
  SimConfig cfg;
  cfg.dt = 0.02;
  cfg.t_end = 10 / eps;
  cfg.s = 1.0;
  cfg.output_every = 100;
  cfg.f = sim.nonlinearity();
  auto tr = run_trajectory(sim, z, cfg);
  for (auto& o : tr.series) {
    CHECK(o.Ns / tr.series[0].Ns >= 0.5);
    CHECK(o.Ns / tr.series[0].Ns <= 2.0);
  }
}

TEST_CASE("interaction-picture propagator") {
  auto lat = lat2(3, 1.0);
  Simulator sim(lat, Nonlinearity::monomial(3, 2.0));
  const SpectralState z0 = initial_state(lat, "random-band:4", 0.05, 1.0);

  SUBCASE("same splitting as Simulator::step") {
    for (Scheme sc : {Scheme::strang, Scheme::yoshida4}) {
      SpectralState z = z0;
      Propagator p(sim, z0);
      for (int k = 0; k < 200; ++k) {
        sim.step(z, 0.01, sc);
        p.step(0.01, sc);
      }
      const SpectralState w = p.state();
      CHECK(w.time == doctest::Approx(z.time));
      CHECK(max_rel(w.u, z.u) < 1e-12);
    }
  }

  SUBCASE("moduli untouched by the linear part") {
    Simulator lin(lat, Nonlinearity::monomial(3, 0.0));
    Propagator p(lin, z0);
    for (int k = 0; k < 100000; ++k) p.step(0.003, Scheme::yoshida4);
    const SpectralState w = p.state();
    for (int i = 0; i < lat->size(); ++i) CHECK(std::abs(w.u[i]) == doctest::Approx(std::abs(z0.u[i])).epsilon(1e-15));
    CHECK(w.time == doctest::Approx(300.0));
  }
}
