#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beamlab/exponents.hpp"
#include "beamlab/normal_form.hpp"
#include "beamlab/sim.hpp"

namespace beamlab {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double ci_lo = 0;  // 95% band on the slope (Student t)
  double ci_hi = 0;
  int points = 0;
};

// Ordinary least squares y = intercept + slope * x. Needs at least 2 points;
// the band is infinite with exactly 2.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct KendallTau {
  double tau = 0;
  double z = 0;  // normal approximation, no tie correction
  int n = 0;
};
KendallTau kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------- lifespan

struct LifespanConfig {
  int d = 2;
  int n = 3;
  int J = 3;
  double s = 1.0;
  double lambda = 1.0;
  std::vector<double> eps{0.2, 0.14, 0.1, 0.07};  // strictly decreasing
  double t_budget = 200.0;
  double dt = 0.01;
  Scheme scheme = Scheme::strang;
  std::string ic = "random-band:1:1";
  std::uint64_t anisotropy_seed = 1;
  int grid = 0;
  int workers = 1;

  void validate() const;
};

struct LifespanPoint {
  double eps = 0;
  double T_double = 0;  // t_budget when censored
  bool censored = false;
  bool blew_up = false;
  double blowup_time = 0;
  double max_norm_ratio = 0;  // max ||u(t)||_{H^s} / eps seen
};

struct LifespanReport {
  std::vector<LifespanPoint> points;  // in the order of cfg.eps
  // log T_double = c - slope * log eps over uncensored points
  std::optional<LinearFit> fit;
  double slope = 0;  // -fit->slope, 0 when no fit
  double a_exponent = 0;
  int censored = 0;
  int blowups = 0;
};

LifespanReport lifespan_sweep(const LifespanConfig& cfg);

// ------------------------------------------------------------------ drift

struct DriftConfig {
  int d = 2;
  int n = 3;
  int J = 2;
  double s = 1.0;
  double lambda = 1.0;
  double eps = 1e-2;
  double t_end = 5000.0;
  double dt = 1e-3;
  Scheme scheme = Scheme::yoshida4;
  int samples = 250;
  std::string ic = "random-band:1:1";
  std::uint64_t anisotropy_seed = 1;
  double N = 3.0;
  double N1 = 3.0;
  int workers = 1;
  FlowControl flow{1e-13, 0.25, 1e-8, 100'000};
  NearResonantPolicy policy = NearResonantPolicy::retain;

  void validate() const;
};

struct DriftReport {
  std::vector<double> t;
  std::vector<double> raw;       // N_s(z(t)) - N_s(z(0))
  std::vector<double> modified;  // E_s(z(t)) - E_s(z(0))
  double Ns0 = 0;
  double max_raw = 0;
  double max_modified = 0;
  double ratio = 0;  // max_modified / max_raw (inf when max_raw == 0)
  bool normal_form = false;  // false on the modified-energy-only path
  std::vector<StageResidual> residuals;  // transformation and energy identities
  std::vector<NearResonantEntry> near_resonant;
  std::vector<std::pair<int, std::size_t>> energy_support;  // (degree, keys)
  double H_drift = 0;  // max |H(u(t)) - H(u(0))| / |H(u(0))|
  long flow_steps = 0;
};

DriftReport drift_compare(const DriftConfig& cfg);

// --------------------------------------------------------------- smalldiv

struct SmalldivConfig {
  int k = 3;
  int d = 2;
  int J = 8;
  std::uint64_t anisotropy_seed = 1;
  double bucket_width = 1.0;  // mu_1 buckets [b w, (b + 1) w)
  double crossover = 0.0;     // buckets with lower edge below this are left out of the +1 trend test
  std::size_t limit = 50'000'000;

  void validate() const;
};

struct SmalldivBucket {
  int pm = 0;  // classify_pm
  double mu1_lo = 0;
  double mu1_hi = 0;
  double min_abs_divisor = 0;
  double mu1_at_min = 0;
  std::size_t count = 0;
};

struct SmalldivReport {
  Anisotropy a;
  std::size_t tuples = 0;
  std::size_t resonant_skipped = 0;
  std::vector<SmalldivBucket> buckets;  // sorted by (pm, mu1_lo)
  // log min|Omega| vs log mu_1 over the -1 class buckets
  std::optional<LinearFit> minus_fit;
  double reference_exponent = 0;  // -(d - 1)
  // min|Omega| vs bucket for the +1 class, buckets past the crossover
  KendallTau plus_trend;
};

SmalldivReport smalldiv_survey(const SmalldivConfig& cfg);

}  // namespace beamlab
