// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "beamlab/manifest.hpp"
#include "beamlab/poly.hpp"
#include "oracles/oracles.hpp"

using namespace beamlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

LatticePtr lattice(int d, int J, double s, std::uint64_t seed) {
  return Lattice::make(LatticeSpec{J, sample_anisotropy(seed, d), s});
}

// 1: poisson against the monomial-expansion oracle
Outcome algebra_oracle(const json& c) {
  auto lat = lattice(2, 1, 0.0, 1);
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  const int pairs = c.at("random_pairs").get<int>();
  const double density = c.at("density").get<double>();
  double worst = 0;
  for (int i = 0; i < pairs; ++i) {
    const auto f = oracle::random_poly(lat, 3, density, rng, i % 2 == 0);
    const auto g = oracle::random_poly(lat, 3, density, rng, i % 3 == 0);
    const auto want = oracle::bracket(oracle::expand(f), oracle::expand(g), static_cast<std::size_t>(lat->size()));
    const auto got = oracle::expand(poisson(f, g));
    const double scale = oracle::max_abs(want);
    if (scale == 0) continue;
    worst = std::max(worst, oracle::max_diff(got, want) / scale);
  }
  const double tol = c.at("tol").get<double>();
  return {pairs >= 50 && worst < tol, std::to_string(pairs) + " pairs, max relative error " + fmt("%.2e", worst)};
}

// 2: poisson(Z2, G) = ad_Z2(G)
Outcome convention_lock(const json& c) {
  auto lat = lattice(2, 2, 0.0, 2);
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>() + 1);
  const auto z2 = z2_poly(lat);
  const int count = c.at("convention_polys").get<int>();
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    const int k = 3 + i % 3;
    const auto g = oracle::random_poly(lat, k, k == 5 ? 0.05 : 0.3, rng, i % 2 == 0);
    const double err = max_abs_diff(poisson(z2, g), ad_z2(g)) / std::max(ad_z2(g).max_abs(), 1e-300);
    worst = std::max(worst, err);
  }
  return {worst < c.at("tol").get<double>(), std::to_string(count) + " polynomials of degree 3-5, max relative error " +
                                                  fmt("%.2e", worst)};
}

// 3: homological identities of both steps
Outcome homological(const json& c) {
  auto lat = lattice(2, c.at("J").get<int>(), 0.0, c.at("anisotropy_seed").get<std::uint64_t>());
  BNFConfig cfg;
  cfg.N = c.at("N").get<double>();
  cfg.degree_cap = c.at("degree_cap").get<int>();
  Graded H;
  H.emplace(3, taylor_monomial(3, 1.0, lat));
  const auto R = bnf_pipeline(cfg, lat, H);
  double s1 = -1, s2 = -1;
  for (const auto& r : R.residuals) {
    if (r.stage == "step1 homological" && r.degree == 3) s1 = r.residual;
    if (r.stage == "step2 homological" && r.degree == 4) s2 = r.residual;
  }
  const double tol = c.at("tol").get<double>();
  return {s1 >= 0 && s2 >= 0 && s1 < tol && s2 < tol,
          "J=6: step 1 (degree 3) " + fmt("%.2e", s1) + ", step 2 (degree 4) " + fmt("%.2e", s2)};
}

// 4: modified-energy identity, planar degrees 6 and 7, d = 4 raw Hamiltonian
Outcome energy_identity(const json& c) {
  const double tol = c.at("tol").get<double>();
  std::ostringstream det;
  bool ok = true;
  for (const char* key : {"planar", "planar_cut"}) {
    const json& p = c.at(key);
    auto lat = lattice(2, p.at("J").get<int>(), p.at("s").get<double>(), p.at("anisotropy_seed").get<std::uint64_t>());
    BNFConfig cfg;
    cfg.N = p.at("N").get<double>();
    Graded H;
    H.emplace(3, taylor_monomial(3, 1.0, lat));
    const auto R = bnf_pipeline(cfg, lat, H);
    const auto me = modified_energy(R.K, p.at("s").get<double>(), p.at("N1").get<double>(), cfg);
    std::vector<int> degrees;
    for (const auto& r : me.residuals) {
      ok = ok && r.residual < tol;
      degrees.push_back(r.degree);
      det << key << " k=" << r.degree << " " << fmt("%.2e", r.residual) << "; ";
    }
    ok = ok && degrees == std::vector<int>{6, 7};
  }
  {
    const json& p = c.at("d4");
    auto lat = lattice(4, p.at("J").get<int>(), p.at("s").get<double>(), p.at("anisotropy_seed").get<std::uint64_t>());
    BNFConfig cfg;
    cfg.d = 4;
    cfg.N = p.at("N").get<double>();
    Graded H;
    H.emplace(3, taylor_monomial(3, 1.0, lat));
    const auto R = bnf_pipeline(cfg, lat, H);
    const auto me = modified_energy(R.K, p.at("s").get<double>(), p.at("N1").get<double>(), cfg);
    ok = ok && !me.residuals.empty();
    for (const auto& r : me.residuals) {
      ok = ok && r.residual < tol;
      det << "d=4 J=3 k=" << r.degree << " " << fmt("%.2e", r.residual);
    }
  }
  return {ok, det.str()};
}

// 5: resonance checker against permutation search on every tuple
Outcome resonance_oracle() {
  auto lat = lattice(2, 2, 0.0, 3);
  const int codes = 2 * lat->size();
  long long total = 0, zero_momentum = 0, disagree = 0, odd_resonant = 0;
  std::vector<SlotCode> t;
  std::function<void(int, int)> rec = [&](int k, int from) {
    if (static_cast<int>(t.size()) == k) {
      ++total;
      const bool got = is_resonant(t, *lat);
      // the search needs as many + slots as - slots; anything else cannot pair
      bool want = false;
      zero_momentum += has_zero_momentum(t, *lat);
      int balance = 0;
      for (SlotCode s : t) balance += slot_sign(s);
      if (balance == 0) {
        std::vector<int> sg;
        std::vector<std::vector<int>> md;
        for (SlotCode s : t) {
          sg.push_back(slot_sign(s));
          const auto m = lat->mode(slot_mode(s));
          md.emplace_back(m.begin(), m.end());
        }
        want = oracle::resonant_by_permutations(sg, md);
      }
      disagree += got != want;
      if (k % 2 == 1) odd_resonant += got;
      return;
    }
    for (int c = from; c < codes; ++c) {
      t.push_back(static_cast<SlotCode>(c));
      rec(k, c);
      t.pop_back();
    }
  };
  for (int k = 1; k <= 6; ++k) rec(k, 0);
  return {disagree == 0 && odd_resonant == 0,
          std::to_string(total) + " tuples (" + std::to_string(zero_momentum) + " zero-momentum), " +
              std::to_string(disagree) + " disagreements, " + std::to_string(odd_resonant) + " odd-degree resonant"};
}

// 6: cubic terms removed, Z4 commutes with Z2
Outcome z3_elimination(const json& c) {
  auto lat = lattice(2, c.at("J").get<int>(), 0.0, c.at("anisotropy_seed").get<std::uint64_t>());
  BNFConfig cfg;
  cfg.N = c.at("N").get<double>();
  cfg.degree_cap = 4;
  Graded H;
  H.emplace(3, taylor_monomial(3, 1.0, lat));
  const auto R = bnf_pipeline(cfg, lat, H);
  const double tol = c.at("tol").get<double>();
  const double scale = H.at(3).max_abs();
  double cubic = 0;
  if (R.after_step1.count(3)) {
    const auto& h3 = R.after_step1.at(3);
    for (std::size_t i = 0; i < h3.size(); ++i)
      if (mu(h3.key(i), *lat, 2) <= cfg.N) cubic = std::max(cubic, std::abs(h3.coeff(i)) / scale);
  }
  if (!R.Z.count(4) || R.Z.at(4).empty()) return {false, "no Z4 produced"};
  const auto& Z4 = R.Z.at(4);
  const bool exact = ad_z2(Z4).empty();
  const double generic = poisson(Z4, z2_poly(lat)).max_abs() / Z4.max_abs();
  bool all_resonant = true;
  for (std::size_t i = 0; i < Z4.size(); ++i) all_resonant = all_resonant && is_resonant(Z4.key(i), *lat);
  return {cubic < tol && exact && all_resonant,
          "max degree-3 coefficient (mu2 <= N) " + fmt("%.2e", cubic) + ", Z4: " + std::to_string(Z4.size()) +
              " keys, all resonant " + (all_resonant ? "yes" : "no") + ", ad_Z2(Z4) " + (exact ? "= 0" : "!= 0") +
              ", generic bracket " + fmt("%.1e", generic)};
}

// 7: pair-bound hypothesis, grid oracle and Monte Carlo
Outcome pair_bound(const json& c) {
  auto lat = lattice(2, c.at("J").get<int>(), 0.0, 4);
  const auto gammas = c.at("gammas").get<std::vector<double>>();
  const double gmax = *std::max_element(gammas.begin(), gammas.end());
  const int coarse = c.at("grid_coarse").get<int>();
  const auto samples = c.at("samples").get<std::size_t>();
  const auto seed = c.at("seed").get<std::uint64_t>();
  const int want = c.at("tuples").get<int>();

  std::vector<SignedTuple> cand;
  ZeroMomentumFilter f;
  f.nonresonant_only = true;
  for_each_zero_momentum(*lat, 3, f, [&](std::span<const SlotCode> t) {
    if (find_pair_bound(t, *lat)) cand.emplace_back(std::vector<SlotCode>(t.begin(), t.end()));
  });
  if (cand.size() < static_cast<std::size_t>(want)) return {false, "not enough tuples satisfy the hypothesis"};

  // spread the picks over the candidate list; skip tuples whose bad set is empty
  std::vector<SignedTuple> picked;
  const std::size_t stride = cand.size() / want;
  for (int i = 0; i < want; ++i)
    for (std::size_t j = i * stride; j < cand.size(); ++j) {
      const auto form = DivisorForm::of(cand[j].slots(), *lat);
      const auto pb = find_pair_bound(cand[j].slots(), *lat);
      if (oracle::grid_measure(form, 2, gmax, pb->component, 50, 2000) > 0 &&
          std::find(picked.begin(), picked.end(), cand[j]) == picked.end()) {
        picked.push_back(cand[j]);
        break;
      }
    }
  if (static_cast<int>(picked.size()) != want) return {false, "could not pick tuples with a non-empty bad set"};

  bool ok = true;
  double worst_ratio = 0, worst_z = 0;
  for (const auto& t : picked) {
    const auto pb = find_pair_bound(t.slots(), *lat);
    const auto form = DivisorForm::of(t.slots(), *lat);
    for (double g : gammas) {
      const int fine = c.at("grid_fine").at(fmt("%g", g)).get<int>();
      const double grid = oracle::grid_measure(form, 2, g, pb->component, coarse, fine);
      const double bound = pb->bound_for(g);
      const auto mc = measure_estimate(t.slots(), *lat, g, samples, seed);
      const double z = mc.std_error > 0 ? std::abs(mc.fraction_bad - grid) / mc.std_error
                                        : (mc.fraction_bad == grid ? 0.0 : 1e300);
      ok = ok && grid <= bound && z <= 3.0;
      worst_ratio = std::max(worst_ratio, grid / bound);
      worst_z = std::max(worst_z, z);
    }
  }
  return {ok, std::to_string(picked.size()) + " tuples x 2 gammas: max grid/bound " + fmt("%.3f", worst_ratio) +
                  ", max |MC - grid| / SE " + fmt("%.2f", worst_z)};
}

// 8: linear invariants, second order, force gradient
Outcome simulator(const json& c) {
  auto lat = lattice(2, c.at("J").get<int>(), 1.0, 5);
  std::ostringstream det;
  bool ok = true;

  const auto z0 = initial_state(lat, "random-band:9:3", 0.3, 1.0);
  {
    Simulator lin(lat, Nonlinearity::monomial(3, 0.0));
    SimConfig sc;
    sc.dt = c.at("linear_dt").get<double>();
    sc.t_end = sc.dt * c.at("linear_steps").get<int>();
    sc.f = lin.nonlinearity();
    sc.output_every = 1 << 30;
    const auto tr = run_trajectory(lin, z0, sc);
    double worst = 0;
    for (int i = 0; i < lat->size(); ++i)
      worst = std::max(worst, std::abs(std::abs(tr.final_state.u[i]) - std::abs(z0.u[i])) / std::abs(z0.u[i]));
    ok = ok && worst < c.at("linear_tol").get<double>();
    det << "|u_j| drift " << fmt("%.1e", worst);
  }
  {
    Simulator sim(lat, Nonlinearity::monomial(3, 1.0));
    std::vector<double> drift;
    for (double dt : c.at("halving_dts").get<std::vector<double>>()) {
      SimConfig sc;
      sc.dt = dt;
      sc.t_end = c.at("halving_T").get<double>();
      sc.f = sim.nonlinearity();
      const auto tr = run_trajectory(sim, z0, sc);
      double m = 0;
      for (const auto& o : tr.series) m = std::max(m, std::abs(o.H - tr.series[0].H));
      drift.push_back(m);
    }
    const auto band = c.at("halving_band").get<std::vector<double>>();
    det << ", H-drift ratios";
    for (std::size_t i = 0; i + 1 < drift.size(); ++i) {
      const double r = drift[i] / drift[i + 1];
      ok = ok && r >= band[0] && r <= band[1];
      det << " " << fmt("%.3f", r);
    }
  }
  {
    Simulator sim(lat, Nonlinearity{{{3, 0.8}, {4, -0.3}}});
    std::mt19937_64 rng(17);
    const auto z = oracle::random_state(lat, 0.5, rng);
    const auto h = oracle::random_state(lat, 1.0, rng);
    const auto X = sim.nonlinear_force(z);
    // dP(z)[h] = 2 Re <-i X, h> for X = i dP/d(conj u)
    double pairing = 0;
    for (int n = 0; n < lat->size(); ++n) pairing += 2 * (cplx{0, -1} * X.u[n] * std::conj(h.u[n])).real();
    const double step = c.at("fd_step").get<double>();
    SpectralState zp(lat), zm(lat);
    for (int n = 0; n < lat->size(); ++n) {
      zp.u[n] = z.u[n] + step * h.u[n];
      zm.u[n] = z.u[n] - step * h.u[n];
    }
    const double fd = (sim.potential(zp) - sim.potential(zm)) / (2 * step);
    const double rel = std::abs(fd - pairing) / std::abs(pairing);
    ok = ok && rel < c.at("fd_tol").get<double>();
    det << ", gradient check " << fmt("%.1e", rel);
  }
  return {ok, det.str()};
}

// 9: exponent table
Outcome exponent_table() {
  bool ok = true;
  const auto t = exponents(2, 3);
  ok = ok && t.a_num == 6 && t.a_den == 1 && t.alpha_num == 2 && t.alpha_den == 1 && t.M == 6 && t.M_tilde == 8;
  for (int n = 3; n <= 20; ++n) {
    const auto e = exponents(2, n);
    ok = ok && e.a_den == 1 && e.a_num == (n % 2 ? 4 * (n - 2) + 2 : 4 * (n - 2));
  }
  return {ok, "a(2,3) = " + std::to_string(t.a_num) + "/" + std::to_string(t.a_den) +
                  ", alpha = " + std::to_string(t.alpha_num) + "/" + std::to_string(t.alpha_den) +
                  ", M = " + std::to_string(t.M) + ", M_tilde = " + std::to_string(t.M_tilde) + ", n = 3..20 parity rule"};
}

// 10: lifespan slope floor and drift comparison
Outcome lifespan_and_drift(const json& lc, const json& dc) {
  LifespanConfig l;
  update_from_json(lc, l);
  const auto lr = lifespan_sweep(l);
  const double floor = l.n - 2 - lc.at("slope_tolerance").get<double>();
  const bool lok = lr.fit.has_value() && lr.censored == 0 && lr.slope >= floor;

  DriftConfig d;
  update_from_json(dc, d);
  const auto dr = drift_compare(d);
  const double target = dc.at("ratio_target").get<double>();
  bool res_ok = true;
  for (const auto& r : dr.residuals) res_ok = res_ok && r.residual < 1e-9;
  const bool dok = dr.max_raw > 0 && dr.ratio <= target && res_ok;

  std::ostringstream det;
  det << "lifespan slope " << fmt("%.3f", lr.slope);
  if (lr.fit) det << " [" << fmt("%.3f", -lr.fit->ci_hi) << ", " << fmt("%.3f", -lr.fit->ci_lo) << "]";
  det << " (floor " << fmt("%.2f", floor) << ", a = " << fmt("%g", lr.a_exponent) << ", censored " << lr.censored
      << "); drift max|E| " << fmt("%.2e", dr.max_modified) << " vs max|N_s| " << fmt("%.2e", dr.max_raw)
      << ", ratio " << fmt("%.4f", dr.ratio) << " (target " << fmt("%g", target) << ")";
  return {lok && dok, det.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : BEAMLAB_ACCEPTANCE_MANIFEST;
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "cannot open %s\n", path.c_str());
    return 2;
  }
  const json m = json::parse(in);
  std::vector<std::pair<int, std::function<Outcome()>>> checks{
      {1, [&] { return algebra_oracle(m.at("algebra")); }},
      {2, [&] { return convention_lock(m.at("algebra")); }},
      {3, [&] { return homological(m.at("homological")); }},
      {4, [&] { return energy_identity(m.at("modified_energy")); }},
      {5, [&] { return resonance_oracle(); }},
      {6, [&] { return z3_elimination(m.at("z3_elimination")); }},
      {7, [&] { return pair_bound(m.at("pair_bound")); }},
      {8, [&] { return simulator(m.at("simulator")); }},
      {9, [&] { return exponent_table(); }},
      {10, [&] { return lifespan_and_drift(m.at("lifespan"), m.at("drift")); }},
  };
  int failed = 0;
  for (auto& [id, fn] : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s | %s | %.1fs\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
