#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "beamlab/error.hpp"
#include "beamlab/harness.hpp"

namespace beamlab {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("fit_line: size mismatch");
  const int n = static_cast<int>(x.size());
  if (n < 2) throw NumericError("fit_line: need at least 2 points");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw NumericError("fit_line: degenerate abscissae");
  LinearFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n == 2) {
    f.slope_se = std::numeric_limits<double>::infinity();
    f.ci_lo = -f.slope_se;
    f.ci_hi = f.slope_se;
    return f;
  }
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.slope_se = std::sqrt(rss / (n - 2) / sxx);
  boost::math::students_t dist(n - 2);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.ci_lo = f.slope - q * f.slope_se;
  f.ci_hi = f.slope + q * f.slope_se;
  return f;
}

KendallTau kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("kendall_tau: size mismatch");
  KendallTau r;
  r.n = static_cast<int>(x.size());
  if (r.n < 2) return r;
  long s = 0;
  for (int i = 0; i < r.n; ++i)
    for (int j = i + 1; j < r.n; ++j) {
      const double a = x[j] - x[i], b = y[j] - y[i];
      s += (a * b > 0) - (a * b < 0);
    }
  const double pairs = 0.5 * r.n * (r.n - 1);
  r.tau = s / pairs;
  const double var = 2.0 * (2.0 * r.n + 5) / (9.0 * r.n * (r.n - 1));
  r.z = r.tau / std::sqrt(var);
  return r;
}

namespace {

template <class Fn>
void run_pool(int jobs, int workers, Fn&& fn) {
  workers = std::clamp(workers <= 0 ? default_workers() : workers, 1, std::max(jobs, 1));
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < jobs;) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

LatticePtr make_lattice(int d, int J, double s, std::uint64_t seed) {
  return Lattice::make(LatticeSpec{J, sample_anisotropy(seed, d), s});
}

}  // namespace

// ---------------------------------------------------------------- lifespan

void LifespanConfig::validate() const {
  if (d < 2 || d > 5) throw ConfigError("lifespan: d must be in 2..5");
  if (n < 3) throw ConfigError("lifespan: n must be >= 3");
  if (J < 1) throw ConfigError("lifespan: J must be >= 1");
  if (eps.size() < 4) throw ConfigError("lifespan: need at least 4 eps values");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0)) throw ConfigError("lifespan: eps must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw ConfigError("lifespan: eps grid must be strictly decreasing");
  }
  if (!(t_budget > 0) || !(dt > 0) || dt > t_budget) throw ConfigError("lifespan: bad dt / t_budget");
}

LifespanReport lifespan_sweep(const LifespanConfig& cfg) {
  cfg.validate();
  auto lat = make_lattice(cfg.d, cfg.J, cfg.s, cfg.anisotropy_seed);
  const Nonlinearity f = Nonlinearity::monomial(cfg.n, cfg.lambda);

  LifespanReport rep;
  rep.a_exponent = exponents(cfg.d, cfg.n).a_exponent;
  rep.points.resize(cfg.eps.size());

  run_pool(static_cast<int>(cfg.eps.size()), cfg.workers, [&](int i) {
    const double eps = cfg.eps[static_cast<std::size_t>(i)];
    Simulator sim(lat, f, cfg.grid);
    SimConfig sc;
    sc.grid = sim.grid();
    sc.dt = cfg.dt;
    sc.t_end = cfg.t_budget;
    sc.f = f;
    sc.s = cfg.s;
    sc.scheme = cfg.scheme;
    sc.output_every = std::numeric_limits<int>::max();

    SpectralState z0 = initial_state(lat, cfg.ic, eps, cfg.s);
    const double threshold = 2.0 * eps;
    double prev_t = 0, prev_norm = sobolev_norm(z0, cfg.s), crossing = -1, peak = prev_norm;
    auto tr = run_trajectory(sim, z0, sc, [&](const SpectralState& z) {
      const double nrm = sobolev_norm(z, cfg.s);
      peak = std::max(peak, nrm);
      if (nrm > threshold) {
        const double w = (threshold - prev_norm) / (nrm - prev_norm);
        crossing = prev_t + w * (z.time - prev_t);
        return true;
      }
      prev_t = z.time;
      prev_norm = nrm;
      return false;
    });

    LifespanPoint& p = rep.points[static_cast<std::size_t>(i)];
    p.eps = eps;
    p.blew_up = tr.blew_up;
    p.blowup_time = tr.blowup_time;
    p.max_norm_ratio = peak / eps;
    if (crossing >= 0) {
      p.T_double = crossing;
    } else if (tr.blew_up) {
      // no finite sample above threshold was seen before the overflow
      p.T_double = tr.blowup_time;
    } else {
      p.T_double = cfg.t_budget;
      p.censored = true;
    }
  });

  std::vector<double> x, y;
  for (const auto& p : rep.points) {
    rep.censored += p.censored;
    rep.blowups += p.blew_up;
    if (p.censored) continue;
    x.push_back(std::log(p.eps));
    y.push_back(std::log(p.T_double));
  }
  if (x.size() >= 2) {
    rep.fit = fit_line(x, y);
    rep.slope = -rep.fit->slope;
  }
  return rep;
}

// ------------------------------------------------------------------ drift

void DriftConfig::validate() const {
  if (d < 2 || d > 5) throw ConfigError("energy-drift: d must be in 2..5");
  if (n < 3) throw ConfigError("energy-drift: n must be >= 3");
  if (J < 1) throw ConfigError("energy-drift: J must be >= 1");
  if (!(eps > 0)) throw ConfigError("energy-drift: eps must be positive");
  if (!(dt > 0) || !(t_end >= dt)) throw ConfigError("energy-drift: bad dt / t_end");
  if (samples < 1) throw ConfigError("energy-drift: samples must be >= 1");
  if (!(N1 > 1) || N1 > N) throw ConfigError("energy-drift: need 1 < N1 <= N");
}

DriftReport drift_compare(const DriftConfig& cfg) {
  cfg.validate();
  auto lat = make_lattice(cfg.d, cfg.J, cfg.s, cfg.anisotropy_seed);

  Graded H;
  H.emplace(cfg.n, taylor_monomial(cfg.n, cfg.lambda, lat));

  BNFConfig bc;
  bc.d = cfg.d;
  bc.n = cfg.n;
  bc.N = cfg.N;
  bc.policy = cfg.policy;
  bc.workers = cfg.workers;
  const BNFResult R = bnf_pipeline(bc, lat, H);
  const ModifiedEnergy ME = modified_energy(R.K, cfg.s, cfg.N1, bc);

  DriftReport rep;
  rep.normal_form = R.steps > 0;
  rep.residuals = R.residuals;
  for (const auto& r : ME.residuals) rep.residuals.push_back({"energy " + r.stage, r.degree, r.residual});
  rep.near_resonant = R.near_resonant;
  rep.near_resonant.insert(rep.near_resonant.end(), ME.retained.begin(), ME.retained.end());
  for (const auto& [k, p] : ME.E) rep.energy_support.emplace_back(k, p.size());

  long flow_steps = 0;
  auto to_normal = [&](const SpectralState& u) {
    SpectralState z = u;
    FlowStats st;
    if (!R.chi1.empty()) z = lie_flow(R.chi1, z, -1.0, cfg.flow, &st);
    if (!R.chi2.empty()) z = lie_flow(R.chi2, z, -1.0, cfg.flow, &st);
    flow_steps += st.accepted + st.rejected;
    z.time = u.time;
    return z;
  };

  const Nonlinearity f = Nonlinearity::monomial(cfg.n, cfg.lambda);
  Simulator sim(lat, f);
  SpectralState u = initial_state(lat, cfg.ic, cfg.eps, cfg.s);

  // H(u) against the transformed Hamiltonian at z = tau^{-1}(u)
  const SpectralState z0 = to_normal(u);
  {
    Graded H2;
    accumulate(H2, z2_poly(lat));
    for (const auto* g : {&R.Z, &R.K, &R.K_high})
      for (const auto& [k, p] : *g) accumulate(H2, p);
    const double h_u = sim.observables(u, cfg.s).H;
    const double h_z = evaluate(H2, z0).real();
    rep.residuals.push_back({"transform consistency", 0, std::abs(h_u - h_z) / std::abs(h_u)});
  }

  rep.Ns0 = sobolev_energy(z0, cfg.s);
  const double E0 = energy_eval(z0, cfg.s, ME.E);
  const double H0 = sim.observables(u, cfg.s).H;

  const long steps = std::max(1L, std::lround(cfg.t_end / cfg.dt));
  const long every = std::max(1L, steps / cfg.samples);
  rep.t.push_back(0);
  rep.raw.push_back(0);
  rep.modified.push_back(0);
  Propagator prop(sim, u);
  for (long k = 1; k <= steps; ++k) {
    prop.step(cfg.dt, cfg.scheme);
    if (k % every != 0 && k != steps) continue;
    u = prop.state();
    for (const auto& x : u.u)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
        throw NumericError("energy-drift: trajectory blew up at t = " + std::to_string(u.time));
    const SpectralState z = to_normal(u);
    rep.t.push_back(u.time);
    rep.raw.push_back(sobolev_energy(z, cfg.s) - rep.Ns0);
    rep.modified.push_back(energy_eval(z, cfg.s, ME.E) - E0);
    rep.H_drift = std::max(rep.H_drift, std::abs(sim.observables(u, cfg.s).H - H0) / std::abs(H0));
  }
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    rep.max_raw = std::max(rep.max_raw, std::abs(rep.raw[i]));
    rep.max_modified = std::max(rep.max_modified, std::abs(rep.modified[i]));
  }
  rep.ratio = rep.max_raw > 0 ? rep.max_modified / rep.max_raw : std::numeric_limits<double>::infinity();
  rep.flow_steps = flow_steps;
  return rep;
}

// --------------------------------------------------------------- smalldiv

void SmalldivConfig::validate() const {
  if (k < 2) throw ConfigError("smalldiv: k must be >= 2");
  if (d < 2 || d > 5) throw ConfigError("smalldiv: d must be in 2..5");
  if (J < 1) throw ConfigError("smalldiv: J must be >= 1");
  if (!(bucket_width > 0)) throw ConfigError("smalldiv: bucket width must be positive");
}

SmalldivReport smalldiv_survey(const SmalldivConfig& cfg) {
  cfg.validate();
  auto lat = make_lattice(cfg.d, cfg.J, 0.0, cfg.anisotropy_seed);
  SmalldivReport rep;
  rep.a = lat->anisotropy();
  rep.reference_exponent = -(cfg.d - 1);

  std::map<std::pair<int, long>, SmalldivBucket> acc;
  ZeroMomentumFilter filter;
  filter.limit = cfg.limit;
  for_each_zero_momentum(*lat, cfg.k, filter, [&](std::span<const SlotCode> t) {
    if (is_resonant(t, *lat)) {
      ++rep.resonant_skipped;
      return;
    }
    ++rep.tuples;
    if (rep.tuples > cfg.limit) throw ResourceError("smalldiv: tuple limit exceeded");
    const double m1 = mu(t, *lat, 1);
    const double om = std::abs(small_divisor(t, *lat));
    const int pm = classify_pm(t, *lat);
    const long b = static_cast<long>(std::floor(m1 / cfg.bucket_width));
    auto [it, fresh] = acc.try_emplace({pm, b});
    auto& bk = it->second;
    if (fresh) {
      bk.pm = pm;
      bk.mu1_lo = b * cfg.bucket_width;
      bk.mu1_hi = (b + 1) * cfg.bucket_width;
      bk.min_abs_divisor = om;
      bk.mu1_at_min = m1;
    } else if (om < bk.min_abs_divisor) {
      bk.min_abs_divisor = om;
      bk.mu1_at_min = m1;
    }
    ++bk.count;
  });

  std::vector<double> lx, ly, bx, by;
  for (auto& [key, bk] : acc) {
    rep.buckets.push_back(bk);
    if (bk.pm < 0 && bk.mu1_lo > 0 && bk.min_abs_divisor > 0) {
      lx.push_back(std::log(0.5 * (bk.mu1_lo + bk.mu1_hi)));
      ly.push_back(std::log(bk.min_abs_divisor));
    }
    if (bk.pm > 0 && bk.mu1_lo >= cfg.crossover) {
      bx.push_back(bk.mu1_lo);
      by.push_back(bk.min_abs_divisor);
    }
  }
  if (lx.size() >= 2) rep.minus_fit = fit_line(lx, ly);
  rep.plus_trend = kendall_tau(bx, by);
  return rep;
}

}  // namespace beamlab
