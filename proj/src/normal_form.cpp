#include "beamlab/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "beamlab/exponents.hpp"

namespace beamlab {

int BNFConfig::effective_r() const { return r > 0 ? r : exponents(d, n).M_tilde; }
int BNFConfig::effective_cap() const { return degree_cap > 0 ? degree_cap : effective_r() - 1; }

void BNFConfig::validate() const {
  if (d < kMinDim || d > kMaxDim) throw ConfigError("BNF: d must be in 2..5");
  if (n < 3) throw ConfigError("BNF: n must be >= 3");
  const auto ex = exponents(d, n);
  const int rr = effective_r();
  if (rr < ex.M || rr > 4 * n) throw ConfigError("BNF: r must satisfy M_{d,n} <= r <= 4n");
  if (!(N >= 1.0)) throw ConfigError("BNF: N must be >= 1");
  if (!(floor > 0)) throw ConfigError("BNF: divisor floor must be positive");
  if (effective_cap() < n) throw ConfigError("BNF: degree cap below n");
  if (L_step1 < 1 || L_step2 < 1) throw ConfigError("BNF: Lie-series length must be >= 1");
}

namespace {

double rel_residual(const HomogPoly& diff, double scale) { return diff.max_abs() / (scale > 0 ? scale : 1.0); }

void log_small(const HomogPoly& small, const std::string& stage, std::vector<NearResonantEntry>& log) {
  const Lattice& lat = small.lattice();
  for (std::size_t i = 0; i < small.size(); ++i) {
    std::vector<SlotCode> k(small.key(i).begin(), small.key(i).end());
    log.push_back({SignedTuple(k), std::abs(small_divisor(k, lat)), small.degree(), stage});
  }
}

[[noreturn]] void abort_near_resonant(const HomogPoly& small, double floor, const std::string& stage) {
  std::vector<std::pair<SignedTuple, double>> keys;
  const Lattice& lat = small.lattice();
  for (std::size_t i = 0; i < small.size(); ++i) {
    std::vector<SlotCode> k(small.key(i).begin(), small.key(i).end());
    keys.emplace_back(SignedTuple(k), std::abs(small_divisor(k, lat)));
  }
  throw NearResonantError(stage + ": " + std::to_string(keys.size()) + " near-resonant key(s) below floor " +
                              std::to_string(floor),
                          std::move(keys));
}

const HomogPoly* find_degree(const Graded& g, int k) {
  auto it = g.find(k);
  return it == g.end() ? nullptr : &it->second;
}

HomogPoly degree_or_zero(const Graded& g, int k, const LatticePtr& lat) {
  auto* p = find_degree(g, k);
  return p ? *p : HomogPoly(lat, k, true);
}

}  // namespace

HomologicalSolution solve_homological(const HomogPoly& H, double N, const BNFConfig& cfg, const std::string& stage) {
  HomologicalSolution sol;
  auto [low, high] = truncate_split(H, N);
  sol.high = std::move(high);
  HomogPoly Z = resonant_part(low);
  auto [ok, small] = split_small_divisors(subtract(low, Z), cfg.floor);
  if (!small.empty()) {
    if (cfg.policy == NearResonantPolicy::abort) abort_near_resonant(small, cfg.floor, stage);
    log_small(small, stage, sol.retained);
    Z = add(Z, small);
  }
  sol.Z = std::move(Z);
  sol.chi = ad_z2_inverse(ok, cfg.floor);
  const HomogPoly z2 = z2_poly(H.lattice_ptr());
  const HomogPoly lhs = add(poisson(sol.chi, z2, cfg.workers), H);
  sol.residual = rel_residual(subtract(lhs, add(sol.Z, sol.high)), H.max_abs());
  return sol;
}

// ------------------------------------------------------------------ flows

namespace {

void field(const Graded& chi, const std::vector<cplx>& u, const LatticePtr& lat, std::vector<cplx>& out) {
  std::fill(out.begin(), out.end(), cplx{});
  SpectralState z(lat, u);
  for (const auto& [k, p] : chi) add_vector_field(p, z, out);
}

double l2(const std::vector<cplx>& v) {
  double s = 0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

void rk4(const Graded& chi, const LatticePtr& lat, const std::vector<cplx>& y, double h, std::vector<cplx>& out,
         std::vector<std::vector<cplx>>& work) {
  const std::size_t n = y.size();
  auto& k1 = work[0];
  auto& k2 = work[1];
  auto& k3 = work[2];
  auto& k4 = work[3];
  auto& tmp = work[4];
  field(chi, y, lat, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  field(chi, tmp, lat, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  field(chi, tmp, lat, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  field(chi, tmp, lat, k4);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

bool finite(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

}  // namespace

SpectralState lie_flow(const Graded& chi, const SpectralState& z0, double tau, const FlowControl& ctl, FlowStats* stats) {
  SpectralState z = z0;
  bool trivial = true;
  for (const auto& [k, p] : chi) trivial = trivial && p.empty();
  if (tau == 0.0 || trivial) return z;
  const std::size_t n = z.u.size();
  std::vector<std::vector<cplx>> work(5, std::vector<cplx>(n));
  std::vector<cplx> full(n), half(n), two(n);
  const double dir = tau > 0 ? 1.0 : -1.0;
  const double T = std::abs(tau);
  double t = 0;
  double h = std::min(ctl.initial_step, T);
  long steps = 0;
  FlowStats local;
  while (t < T) {
    if (++steps > ctl.max_steps) throw NumericError("lie_flow: step budget exhausted at tau = " + std::to_string(dir * t));
    h = std::min(h, T - t);
    rk4(chi, z.lattice, z.u, dir * h, full, work);
    rk4(chi, z.lattice, z.u, dir * h / 2, half, work);
    rk4(chi, z.lattice, half, dir * h / 2, two, work);
    double err = 0;
    for (std::size_t i = 0; i < n; ++i) err += std::norm(two[i] - full[i]);
    err = std::sqrt(err) / 15.0;
    const double scale = std::max(l2(z.u), 1e-300);
    if (!finite(two) || !std::isfinite(err)) {
      h /= 2;
      ++local.rejected;
      if (h < ctl.min_step) throw NumericError("lie_flow: field blow-up, last valid tau = " + std::to_string(dir * t));
      continue;
    }
    if (err <= ctl.tol * scale) {
      for (std::size_t i = 0; i < n; ++i) z.u[i] = two[i] + (two[i] - full[i]) / 15.0;
      t += h;
      ++local.accepted;
      const double grow = err > 0 ? 0.9 * std::pow(ctl.tol * scale / err, 0.2) : 2.0;
      h *= std::clamp(grow, 0.2, 2.0);
    } else {
      h *= std::clamp(0.9 * std::pow(ctl.tol * scale / err, 0.2), 0.1, 0.5);
      ++local.rejected;
      if (h < ctl.min_step) throw NumericError("lie_flow: step control failed, last valid tau = " + std::to_string(dir * t));
    }
  }
  if (stats) *stats = local;
  return z;
}

SpectralState lie_flow(const HomogPoly& chi, const SpectralState& z0, double tau, const FlowControl& ctl, FlowStats* stats) {
  Graded g;
  g.emplace(chi.degree(), chi);
  return lie_flow(g, z0, tau, ctl, stats);
}

// ------------------------------------------------------------- Lie series

LieSeriesResult lie_series_compose(const Graded& H, const Graded& chi, int degree_cap, int L, int workers) {
  LieSeriesResult res;
  std::set<std::tuple<int, int, std::string>> seen;
  auto drop = [&](int p, int deg, const std::string& why) {
    if (seen.emplace(p, deg, why).second) res.dropped.push_back({p, deg, why});
  };
  for (const auto& [k, c] : chi)
    if (k < 3 && !c.empty()) throw ConfigError("lie_series_compose: generator degree must be >= 3");

  Graded prev;
  for (const auto& [k, h] : H) {
    if (k > degree_cap) {
      drop(0, k, "degree cap");
      continue;
    }
    prev.emplace(k, h);
    accumulate(res.terms, h);
  }
  for (int p = 1; p <= L && !prev.empty(); ++p) {
    Graded next;
    for (const auto& [kc, c] : chi) {
      if (c.empty()) continue;
      for (const auto& [kh, h] : prev) {
        const int kr = kc + kh - 2;
        if (kr > degree_cap) {
          drop(p, kr, "degree cap");
          continue;
        }
        if (h.empty()) continue;
        accumulate(next, scale(poisson(c, h, workers), 1.0 / p));
      }
    }
    for (const auto& [k, t] : next) accumulate(res.terms, t);
    prev = std::move(next);
  }
  if (!prev.empty()) {
    for (const auto& [kc, c] : chi)
      for (const auto& [kh, h] : prev)
        if (!c.empty() && !h.empty()) drop(L + 1, kc + kh - 2, "power limit");
  }
  return res;
}

// ---------------------------------------------------------------- pipeline

double BNFResult::max_residual() const {
  double m = 0;
  for (const auto& r : residuals) m = std::max(m, r.residual);
  return m;
}

double ModifiedEnergy::max_residual() const {
  double m = 0;
  for (const auto& r : residuals) m = std::max(m, r.residual);
  return m;
}

BNFResult bnf_pipeline(const BNFConfig& cfg, const LatticePtr& lat, const Graded& H) {
  cfg.validate();
  const auto ex = exponents(cfg.d, cfg.n);
  if (lat->dim() != cfg.d) throw ConfigError("BNF: lattice dimension differs from config");
  const int n = cfg.n;
  const int cap = cfg.effective_cap();
  BNFResult R;
  R.M = ex.M;
  R.M_tilde = ex.M_tilde;

  Graded Hcap;
  for (const auto& [k, h] : H) {
    if (k < n) throw ConfigError("BNF: Hamiltonian orders must start at n");
    if (k > cap)
      R.dropped.push_back({0, k, "degree cap"});
    else
      Hcap.emplace(k, h);
  }
  if (cfg.d >= 4) {
    R.K = Hcap;
    R.after_step1 = Hcap;
    return R;
  }

  const HomogPoly z2 = z2_poly(lat);

  // step 1: normalize orders n .. 2n-3
  for (int k = n; k <= std::min(2 * n - 3, cap); ++k) {
    const HomogPoly Hk = degree_or_zero(Hcap, k, lat);
    auto sol = solve_homological(Hk, cfg.N, cfg, "step1");
    R.residuals.push_back({"step1 homological", k, sol.residual});
    R.near_resonant.insert(R.near_resonant.end(), sol.retained.begin(), sol.retained.end());
    R.chi1.emplace(k, std::move(sol.chi));
    R.Z.emplace(k, std::move(sol.Z));
    R.K_high.emplace(k, std::move(sol.high));
  }
  Graded in1 = Hcap;
  in1.emplace(2, z2);
  auto s1 = lie_series_compose(in1, R.chi1, cap, cfg.L_step1, cfg.workers);
  R.dropped.insert(R.dropped.end(), s1.dropped.begin(), s1.dropped.end());
  R.after_step1 = s1.terms;
  for (int k = n; k <= std::min(2 * n - 3, cap); ++k) {
    const HomogPoly got = degree_or_zero(R.after_step1, k, lat);
    const HomogPoly want = add(R.Z.at(k), R.K_high.at(k));
    R.residuals.push_back({"step1 composed", k, rel_residual(subtract(got, want), degree_or_zero(Hcap, k, lat).max_abs())});
  }
  R.steps = 1;

  if (cfg.d == 3) {
    for (const auto& [k, p] : R.after_step1)
      if (k >= 2 * n - 2) R.K.emplace(k, p);
    return R;
  }

  // step 2 (d = 2): normalize orders 2n-2 .. M-1
  for (int k = 2 * n - 2; k <= std::min(ex.M - 1, cap); ++k) {
    const HomogPoly Kk = degree_or_zero(R.after_step1, k, lat);
    auto sol = solve_homological(Kk, cfg.N, cfg, "step2");
    R.residuals.push_back({"step2 homological", k, sol.residual});
    R.near_resonant.insert(R.near_resonant.end(), sol.retained.begin(), sol.retained.end());
    R.chi2.emplace(k, std::move(sol.chi));
    R.Z.emplace(k, std::move(sol.Z));
    R.K_high.emplace(k, std::move(sol.high));
  }
  Graded in2;
  in2.emplace(2, z2);
  for (const auto& [k, p] : R.Z)
    if (k < 2 * n - 2) in2.emplace(k, p);
  for (const auto& [k, p] : R.after_step1)
    if (k >= 2 * n - 2) in2.emplace(k, p);
  auto s2 = lie_series_compose(in2, R.chi2, cap, cfg.L_step2, cfg.workers);
  R.dropped.insert(R.dropped.end(), s2.dropped.begin(), s2.dropped.end());
  for (int k = 2 * n - 2; k <= std::min(ex.M - 1, cap); ++k) {
    const HomogPoly got = degree_or_zero(s2.terms, k, lat);
    const HomogPoly want = add(R.Z.at(k), R.K_high.at(k));
    R.residuals.push_back(
        {"step2 composed", k, rel_residual(subtract(got, want), degree_or_zero(R.after_step1, k, lat).max_abs())});
  }
  for (const auto& [k, p] : s2.terms)
    if (k >= ex.M) R.K.emplace(k, p);
  R.steps = 2;
  return R;
}

ModifiedEnergy modified_energy(const Graded& K, double s, double N1, const BNFConfig& cfg) {
  const auto ex = exponents(cfg.d, cfg.n);
  if (!(N1 > 1.0)) throw ConfigError("modified energy: N1 must exceed 1");
  if (N1 > cfg.N) throw ConfigError("modified energy: N1 must not exceed N");
  ModifiedEnergy out;
  out.s = s;
  out.N1 = N1;
  for (int k = ex.M; k < ex.M_tilde; ++k) {
    auto* Kk = find_degree(K, k);
    if (!Kk) continue;
    auto [plus, minus] = pm_split(*Kk);
    auto [minus_low, minus_high] = truncate_split(minus, N1);
    const HomogPoly q = poisson_with_ns(add(plus, minus_low), s);
    auto [ok, small] = split_small_divisors(q, cfg.floor);
    if (!small.empty()) {
      if (cfg.policy == NearResonantPolicy::abort) abort_near_resonant(small, cfg.floor, "modified energy");
      log_small(small, "modified energy", out.retained);
    }
    HomogPoly E = ad_z2_inverse(ok, cfg.floor);
    // {N_s,K} + {E,Z2} - {N_s,K^{(-1,>N1)}}, evaluated off the retained keys
    const HomogPoly lhs = add(poisson_with_ns(*Kk, s), poisson(E, z2_poly(Kk->lattice_ptr()), cfg.workers));
    HomogPoly diff = subtract(lhs, poisson_with_ns(minus_high, s));
    if (!small.empty()) diff = filter_keys(diff, [&](auto key, cplx) { return small.find(key) == HomogPoly::npos; });
    const double scale = poisson_with_ns(*Kk, s).max_abs();
    out.residuals.push_back({"modified energy", k, rel_residual(diff, scale)});
    out.E.emplace(k, std::move(E));
  }
  return out;
}

double energy_eval(const SpectralState& z, double s, const Graded& E) {
  double v = sobolev_energy(z, s);
  for (const auto& [k, p] : E) v += evaluate(p, z).real();
  return v;
}

}  // namespace beamlab
