#pragma once

#include <string>
#include <vector>

#include "beamlab/poly.hpp"

namespace beamlab {

enum class NearResonantPolicy { retain, abort };

struct BNFConfig {
  int d = 2;
  int n = 3;
  int r = 0;              // total order; 0 selects M_tilde(d, n)
  double N = 3.0;
  double floor = kDefaultDivisorFloor;
  NearResonantPolicy policy = NearResonantPolicy::retain;
  int degree_cap = 0;     // 0 selects r - 1
  int L_step1 = 9;        // highest Lie-series power in step 1
  int L_step2 = 7;        // highest Lie-series power in step 2
  int workers = 1;

  int effective_r() const;
  int effective_cap() const;
  void validate() const;
};

struct NearResonantEntry {
  SignedTuple key;
  double divisor = 0;
  int degree = 0;
  std::string stage;
};

struct HomologicalSolution {
  HomogPoly chi;
  HomogPoly Z;
  HomogPoly high;  // H^{>N}
  std::vector<NearResonantEntry> retained;
  double residual = 0;  // max |{chi,Z2} + H - Z - H^{>N}| / max |H|
};

// chi = ad_Z2^{-1}(H^{<=N} - Z), Z = resonant part of H^{<=N} (plus retained
// near-resonant keys); the identity residual is recomputed with the general
// bracket.
HomologicalSolution solve_homological(const HomogPoly& H, double N, const BNFConfig& cfg,
                                      const std::string& stage = "homological");

struct FlowControl {
  double tol = 1e-10;     // local relative tolerance per step
  double initial_step = 0.05;
  double min_step = 1e-10;
  long max_steps = 1'000'000;
};

struct FlowStats {
  long accepted = 0;
  long rejected = 0;
};

// Time-tau map of z' = X_chi(z) (chi given by degree) by RK4 with
// step-doubling error control. Negative tau runs the inverse map.
SpectralState lie_flow(const Graded& chi, const SpectralState& z0, double tau, const FlowControl& ctl = {},
                       FlowStats* stats = nullptr);
SpectralState lie_flow(const HomogPoly& chi, const SpectralState& z0, double tau, const FlowControl& ctl = {},
                       FlowStats* stats = nullptr);

struct DroppedTerm {
  int power = 0;   // p in ad_chi^p
  int degree = 0;  // degree the term would have had
  std::string reason;
};

struct LieSeriesResult {
  Graded terms;
  std::vector<DroppedTerm> dropped;
};

// sum_{p <= L} ad_chi^p H / p! keeping only output degrees <= degree_cap.
LieSeriesResult lie_series_compose(const Graded& H, const Graded& chi, int degree_cap, int L, int workers = 1);

struct StageResidual {
  std::string stage;
  int degree = 0;
  double residual = 0;
};

struct BNFResult {
  Graded chi1;        // step-1 generators
  Graded chi2;        // step-2 generators (d = 2 only)
  Graded Z;           // normalized resonant orders
  Graded K;           // non-normalized orders >= M
  Graded K_high;      // terms with mu_2 > N kept out of the normalization
  Graded after_step1; // full graded Hamiltonian after step 1
  std::vector<StageResidual> residuals;
  std::vector<NearResonantEntry> near_resonant;
  std::vector<DroppedTerm> dropped;
  int steps = 0;
  int M = 0;
  int M_tilde = 0;

  double max_residual() const;
};

// Birkhoff steps: two for d = 2, one for d = 3, none for d >= 4. H holds the
// Taylor orders of the nonlinearity (degree >= n).
BNFResult bnf_pipeline(const BNFConfig& cfg, const LatticePtr& lat, const Graded& H);

struct ModifiedEnergy {
  Graded E;
  std::vector<StageResidual> residuals;
  std::vector<NearResonantEntry> retained;
  double s = 0;
  double N1 = 0;

  double max_residual() const;
};

// E_k = ad_Z2^{-1} {N_s, K_k^{(+1)} + K_k^{(-1), <=N1}} for degrees in [M, M_tilde).
ModifiedEnergy modified_energy(const Graded& K, double s, double N1, const BNFConfig& cfg);

// N_s(z) + sum_k Re E_k(z)
double energy_eval(const SpectralState& z, double s, const Graded& E);

}  // namespace beamlab
