#include "beamlab/tuples.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "beamlab/error.hpp"

namespace beamlab {

void canonicalize(std::vector<SlotCode>& slots) { std::sort(slots.begin(), slots.end()); }

SignedTuple::SignedTuple(std::vector<SlotCode> slots) : slots_(std::move(slots)) { canonicalize(slots_); }

SignedTuple::SignedTuple(const Lattice& lat, std::span<const int> sigma,
                         const std::vector<std::vector<int>>& modes) {
  if (sigma.size() != modes.size()) throw ConfigError("sign and mode lists differ in length");
  for (std::size_t i = 0; i < modes.size(); ++i) {
    if (sigma[i] != 1 && sigma[i] != -1) throw ConfigError("signs must be +1 or -1");
    if (static_cast<int>(modes[i].size()) != lat.dim()) throw ConfigError("mode has wrong dimension");
    const int idx = lat.index_of(modes[i]);
    if (idx < 0) throw ConfigError("mode outside lattice cutoff");
    slots_.push_back(make_slot(idx, sigma[i]));
  }
  canonicalize(slots_);
}

SignedTuple SignedTuple::flipped() const {
  std::vector<SlotCode> s(slots_);
  for (auto& c : s) c = slot_conj(c);
  return SignedTuple(std::move(s));
}

std::string SignedTuple::to_string(const Lattice& lat) const {
  std::ostringstream os;
  for (SlotCode c : slots_) {
    os << (slot_sign(c) > 0 ? '+' : '-') << '(';
    auto j = lat.mode(slot_mode(c));
    for (std::size_t i = 0; i < j.size(); ++i) os << (i ? "," : "") << j[i];
    os << ')';
  }
  return os.str();
}

std::vector<int> momentum(std::span<const SlotCode> t, const Lattice& lat) {
  std::vector<int> p(static_cast<std::size_t>(lat.dim()), 0);
  for (SlotCode c : t) {
    auto j = lat.mode(slot_mode(c));
    const int s = slot_sign(c);
    for (int i = 0; i < lat.dim(); ++i) p[i] += s * j[i];
  }
  return p;
}

bool has_zero_momentum(std::span<const SlotCode> t, const Lattice& lat) {
  auto p = momentum(t, lat);
  return std::all_of(p.begin(), p.end(), [](int x) { return x == 0; });
}

namespace {

// (abs class, net count) pairs sorted by class, zero counts removed.
template <class Fn>
void for_each_class_count(std::span<const SlotCode> t, const Lattice& lat, Fn&& fn) {
  constexpr std::size_t kStack = 16;
  std::pair<int, int> buf[kStack];
  std::vector<std::pair<int, int>> heap;
  std::pair<int, int>* cc = buf;
  if (t.size() > kStack) {
    heap.resize(t.size());
    cc = heap.data();
  }
  for (std::size_t i = 0; i < t.size(); ++i) cc[i] = {lat.abs_class(slot_mode(t[i])), slot_sign(t[i])};
  std::sort(cc, cc + t.size());
  std::size_t i = 0;
  while (i < t.size()) {
    const int cls = cc[i].first;
    int net = 0;
    for (; i < t.size() && cc[i].first == cls; ++i) net += cc[i].second;
    if (net != 0) fn(cls, net);
  }
}

}  // namespace

double small_divisor(std::span<const SlotCode> t, const Lattice& lat) {
  double r = 0.0;
  for_each_class_count(t, lat, [&](int cls, int net) { r += net * lat.omega(cls); });
  return r;
}

double small_divisor(std::span<const SlotCode> t, const Lattice& lat, const Anisotropy& a) {
  double r = 0.0;
  for_each_class_count(t, lat, [&](int cls, int net) { r += net * freq(lat.mode(cls), a); });
  return r;
}

double weight_divisor(std::span<const SlotCode> t, const Lattice& lat, std::span<const double> weights) {
  double r = 0.0;
  for_each_class_count(t, lat, [&](int cls, int net) { r += net * weights[cls]; });
  return r;
}

DivisorForm DivisorForm::of(std::span<const SlotCode> t, const Lattice& lat) {
  DivisorForm f;
  for_each_class_count(t, lat, [&](int cls, int net) {
    auto m = lat.mode(cls);
    f.modes.emplace_back(m.begin(), m.end());
    f.counts.push_back(net);
  });
  return f;
}

double DivisorForm::evaluate(std::span<const double> a) const {
  double r = 0.0;
  for (std::size_t c = 0; c < modes.size(); ++c) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) n2 += a[i] * modes[c][i] * modes[c][i];
    r += counts[c] * std::sqrt(n2 * n2 + 1.0);
  }
  return r;
}

bool is_resonant(std::span<const SlotCode> t, const Lattice& lat) {
  if (t.size() % 2 != 0) return false;
  bool zero = true;
  for_each_class_count(t, lat, [&](int, int) { zero = false; });
  return zero;
}

int mu_sq(std::span<const SlotCode> t, const Lattice& lat, int k) {
  if (k < 1 || k > static_cast<int>(t.size())) return 0;
  constexpr std::size_t kStack = 16;
  int buf[kStack] = {};
  std::vector<int> heap;
  int* n = buf;
  if (t.size() > kStack) {
    heap.resize(t.size());
    n = heap.data();
  }
  for (std::size_t i = 0; i < t.size(); ++i) n[i] = lat.norm2(slot_mode(t[i]));
  std::nth_element(n, n + (k - 1), n + t.size(), std::greater<int>());
  return n[k - 1];
}

double mu(std::span<const SlotCode> t, const Lattice& lat, int k) {
  return std::sqrt(static_cast<double>(mu_sq(t, lat, k)));
}

int classify_pm(std::span<const SlotCode> t, const Lattice& lat) {
  if (t.size() < 2) throw ConfigError("classify_pm needs degree >= 2");
  const int m1 = mu_sq(t, lat, 1);
  const int m2 = mu_sq(t, lat, 2);
  const int k = static_cast<int>(t.size());
  for (int i = 0; i < k; ++i) {
    if (lat.norm2(slot_mode(t[i])) != m1) continue;
    for (int p = 0; p < k; ++p) {
      if (p == i || lat.norm2(slot_mode(t[p])) != m2) continue;
      if (slot_sign(t[i]) == slot_sign(t[p])) return 1;
    }
  }
  return -1;
}

namespace {

struct ZmEnumerator {
  const Lattice& lat;
  int k;
  const ZeroMomentumFilter& filter;
  const std::function<void(std::span<const SlotCode>)>& fn;
  std::vector<SlotCode> slots;
  std::vector<int> p;  // running momentum
  std::vector<int> last;
  int J;
  int d;

  bool accept() const {
    if (filter.plus_count) {
      int plus = 0;
      for (SlotCode c : slots) plus += (c & 1u);
      if (plus != *filter.plus_count) return false;
    }
    if (filter.mu2_max) {
      const double n = *filter.mu2_max;
      if (static_cast<double>(mu_sq(slots, lat, 2)) > n * n) return false;
    }
    if (filter.nonresonant_only && is_resonant(slots, lat)) return false;
    return true;
  }

  void close() {
    // last slot must carry sign s with s * j = -p
    for (int s : {-1, 1}) {
      for (int i = 0; i < d; ++i) last[i] = -s * p[i];
      const int idx = lat.index_of(last);
      if (idx < 0) continue;
      const SlotCode c = make_slot(idx, s);
      if (!slots.empty() && c < slots.back()) continue;
      slots.push_back(c);
      if (accept()) fn(slots);
      slots.pop_back();
    }
  }

  void rec(SlotCode start) {
    const int placed = static_cast<int>(slots.size());
    if (placed == k - 1) {
      close();
      return;
    }
    const int remaining = k - placed;
    for (int i = 0; i < d; ++i)
      if (std::abs(p[i]) > remaining * J) return;
    const SlotCode end = static_cast<SlotCode>(2 * lat.size());
    for (SlotCode c = start; c < end; ++c) {
      auto j = lat.mode(slot_mode(c));
      const int s = slot_sign(c);
      for (int i = 0; i < d; ++i) p[i] += s * j[i];
      slots.push_back(c);
      rec(c);
      slots.pop_back();
      for (int i = 0; i < d; ++i) p[i] -= s * j[i];
    }
  }
};

}  // namespace

void for_each_zero_momentum(const Lattice& lat, int k, const ZeroMomentumFilter& filter,
                            const std::function<void(std::span<const SlotCode>)>& fn) {
  if (k < 2) throw ConfigError("zero-momentum enumeration needs k >= 2");
  ZmEnumerator e{lat, k, filter, fn, {}, std::vector<int>(lat.dim(), 0), std::vector<int>(lat.dim(), 0),
                 lat.cutoff(), lat.dim()};
  e.slots.reserve(static_cast<std::size_t>(k));
  e.rec(0);
}

std::vector<SignedTuple> enumerate_zero_momentum(const Lattice& lat, int k, const ZeroMomentumFilter& filter) {
  std::vector<SignedTuple> out;
  for_each_zero_momentum(lat, k, filter, [&](std::span<const SlotCode> t) {
    if (out.size() >= filter.limit)
      throw ResourceError("zero-momentum enumeration exceeds limit of " + std::to_string(filter.limit));
    out.emplace_back(std::vector<SlotCode>(t.begin(), t.end()));
  });
  return out;
}

std::optional<PairBound> find_pair_bound(std::span<const SlotCode> t, const Lattice& lat) {
  const int k = static_cast<int>(t.size());
  if (k < 3 || !has_zero_momentum(t, lat)) return std::nullopt;
  std::optional<PairBound> best;
  for (int p = 0; p < k; ++p) {
    if (slot_sign(t[p]) < 0) continue;
    for (int q = 0; q < k; ++q) {
      if (slot_sign(t[q]) > 0) continue;
      auto jp = lat.mode(slot_mode(t[p]));
      auto jq = lat.mode(slot_mode(t[q]));
      for (int i = 0; i < lat.dim(); ++i) {
        // j_p - j_q equals minus the signed momentum of the other slots
        const long long sum = jp[i] + jq[i];
        const long long diff = jp[i] - jq[i];
        long long rest = 1;
        for (int r = 0; r < k; ++r) {
          if (r == p || r == q) continue;
          const long long c = lat.mode(slot_mode(t[r]))[i];
          rest += c * c;
        }
        if (sum != 0 && std::llabs(sum * diff) >= 2 * rest) {
          if (!best || std::llabs(sum) > std::abs(best->pair_sum))
            best = PairBound{p, q, i, static_cast<int>(sum)};
        }
      }
    }
  }
  return best;
}

int default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

MeasureReport measure_estimate(std::span<const SlotCode> t, const Lattice& lat, double gamma,
                               std::size_t n_samples, std::uint64_t seed, int workers) {
  if (!(gamma > 0)) throw ConfigError("gamma must be positive");
  if (n_samples == 0) throw ConfigError("measure_estimate needs at least one sample");
  const DivisorForm form = DivisorForm::of(t, lat);
  const int d = lat.dim();
  constexpr std::size_t kBlock = 4096;
  const std::size_t n_blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> bad(n_blocks, 0);
  std::vector<double> minima(n_blocks, HUGE_VAL);

  auto run_block = [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> dist(1.0, 4.0);
    std::vector<double> a(static_cast<std::size_t>(d));
    const std::size_t lo = b * kBlock;
    const std::size_t hi = std::min(n_samples, lo + kBlock);
    std::size_t count = 0;
    double m = HUGE_VAL;
    for (std::size_t s = lo; s < hi; ++s) {
      for (auto& x : a) x = dist(rng);
      const double v = std::abs(form.evaluate(a));
      m = std::min(m, v);
      if (v < gamma) ++count;
    }
    bad[b] = count;
    minima[b] = m;
  };

  if (workers <= 0) workers = default_workers();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), n_blocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = static_cast<std::size_t>(w); b < n_blocks; b += static_cast<std::size_t>(workers))
          run_block(b);
      });
    for (auto& th : pool) th.join();
  }

  MeasureReport r;
  r.gamma = gamma;
  r.n_samples = n_samples;
  r.seed = seed;
  std::size_t total = 0;
  r.min_abs_divisor = HUGE_VAL;
  for (std::size_t b = 0; b < n_blocks; ++b) {
    total += bad[b];
    r.min_abs_divisor = std::min(r.min_abs_divisor, minima[b]);
  }
  r.fraction_bad = static_cast<double>(total) / static_cast<double>(n_samples);
  r.std_error = std::sqrt(r.fraction_bad * (1.0 - r.fraction_bad) / static_cast<double>(n_samples));
  if (auto pb = find_pair_bound(t, lat)) r.bound = pb->bound_for(gamma);
  return r;
}

}  // namespace beamlab
