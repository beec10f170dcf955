#include "beamlab/poly.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

namespace beamlab {

namespace {

std::atomic<std::size_t> g_key_limit{20'000'000};

constexpr cplx kI{0.0, 1.0};

int compare_keys(const SlotCode* a, const SlotCode* b, int k) {
  for (int i = 0; i < k; ++i) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

std::uint64_t hash_key(const SlotCode* key, int k) {
  std::uint64_t h = 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(k);
  for (int i = 0; i < k; ++i) {
    h ^= key[i];
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 31;
  }
  return h;
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

std::size_t poly_key_limit() { return g_key_limit.load(); }
void set_poly_key_limit(std::size_t n) { g_key_limit.store(n); }

double orbit_multiplicity(std::span<const SlotCode> key) {
  double denom = 1.0;
  std::size_t i = 0;
  while (i < key.size()) {
    std::size_t j = i;
    while (j < key.size() && key[j] == key[i]) ++j;
    denom *= factorial(static_cast<int>(j - i));
    i = j;
  }
  return factorial(static_cast<int>(key.size())) / denom;
}

// ---------------------------------------------------------------- HomogPoly

std::size_t HomogPoly::find(std::span<const SlotCode> key) const {
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const int c = compare_keys(keys_.data() + mid * k_, key.data(), k_);
    if (c == 0) return mid;
    if (c < 0)
      lo = mid + 1;
    else
      hi = mid;
  }
  return npos;
}

cplx HomogPoly::coeff_of(std::span<const SlotCode> key) const {
  const std::size_t i = find(key);
  return i == npos ? cplx{} : coeffs_[i];
}

double HomogPoly::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

HomogPoly HomogPoly::from_sorted(LatticePtr lat, int degree, std::vector<SlotCode> keys, std::vector<cplx> coeffs,
                                 bool real) {
  HomogPoly p(std::move(lat), degree, real);
  p.keys_ = std::move(keys);
  p.coeffs_ = std::move(coeffs);
  return p;
}

// ----------------------------------------------------------- KeyAccumulator

KeyAccumulator::KeyAccumulator(int degree, std::size_t max_keys) : k_(degree), max_keys_(max_keys) {
  table_.assign(1024, 0);
  mask_ = table_.size() - 1;
}

void KeyAccumulator::grow() {
  table_.assign(table_.size() * 2, 0);
  mask_ = table_.size() - 1;
  for (std::size_t idx = 0; idx < vals_.size(); ++idx) {
    std::size_t h = hash_key(keys_.data() + idx * k_, k_) & mask_;
    while (table_[h] != 0) h = (h + 1) & mask_;
    table_[h] = static_cast<std::uint32_t>(idx + 1);
  }
}

void KeyAccumulator::add(const SlotCode* key, cplx v) {
  std::size_t h = hash_key(key, k_) & mask_;
  while (true) {
    const std::uint32_t slot = table_[h];
    if (slot == 0) break;
    if (compare_keys(keys_.data() + (slot - 1) * static_cast<std::size_t>(k_), key, k_) == 0) {
      vals_[slot - 1] += v;
      return;
    }
    h = (h + 1) & mask_;
  }
  if (vals_.size() >= max_keys_)
    throw ResourceError("polynomial support exceeds key limit of " + std::to_string(max_keys_));
  keys_.insert(keys_.end(), key, key + k_);
  vals_.push_back(v);
  table_[h] = static_cast<std::uint32_t>(vals_.size());
  if (2 * vals_.size() > table_.size()) grow();
}

void KeyAccumulator::merge_from(const KeyAccumulator& other) {
  for (std::size_t i = 0; i < other.vals_.size(); ++i) add(other.keys_.data() + i * k_, other.vals_[i]);
}

HomogPoly KeyAccumulator::finish(LatticePtr lat, bool real) && {
  table_.clear();
  table_.shrink_to_fit();
  std::vector<std::uint32_t> order;
  order.reserve(vals_.size());
  for (std::size_t i = 0; i < vals_.size(); ++i)
    if (vals_[i] != cplx{}) order.push_back(static_cast<std::uint32_t>(i));
  const int k = k_;
  const SlotCode* base = keys_.data();
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return compare_keys(base + static_cast<std::size_t>(a) * k, base + static_cast<std::size_t>(b) * k, k) < 0;
  });
  std::vector<SlotCode> keys;
  std::vector<cplx> coeffs;
  keys.reserve(order.size() * static_cast<std::size_t>(k));
  coeffs.reserve(order.size());
  for (auto i : order) {
    keys.insert(keys.end(), base + static_cast<std::size_t>(i) * k, base + static_cast<std::size_t>(i + 1) * k);
    coeffs.push_back(vals_[i]);
  }
  keys_.clear();
  vals_.clear();
  return HomogPoly::from_sorted(std::move(lat), k, std::move(keys), std::move(coeffs), real);
}

// ------------------------------------------------------------ constructors

HomogPoly quadratic_diag(LatticePtr lat, std::span<const double> w) {
  std::vector<SlotCode> keys;
  std::vector<cplx> coeffs;
  for (int idx = 0; idx < lat->size(); ++idx) {
    if (w[idx] == 0.0) continue;
    keys.push_back(make_slot(idx, -1));
    keys.push_back(make_slot(idx, +1));
    coeffs.emplace_back(w[idx] / 2.0, 0.0);
  }
  return HomogPoly::from_sorted(std::move(lat), 2, std::move(keys), std::move(coeffs), true);
}

HomogPoly z2_poly(LatticePtr lat) {
  std::vector<double> w(lat->omegas());
  return quadratic_diag(std::move(lat), w);
}

HomogPoly ns_poly(LatticePtr lat, double s) {
  auto w = lat->weights(s);
  return quadratic_diag(std::move(lat), w);
}

double taylor_constant(int m, int d, double lambda) {
  return lambda / m * std::pow(2.0 * std::numbers::pi, d * (1.0 - m / 2.0));
}

HomogPoly taylor_monomial(int m, double lambda, LatticePtr lat) {
  if (m < 2) throw ConfigError("Taylor order must be >= 2");
  HomogPoly empty(lat, m, true);
  if (lambda == 0.0) return empty;
  const double c = taylor_constant(m, lat->dim(), lambda);
  std::vector<double> inv_sqrt(static_cast<std::size_t>(lat->size()));
  for (int i = 0; i < lat->size(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(2.0 * lat->omega(i));
  std::vector<SlotCode> keys;
  std::vector<cplx> coeffs;
  ZeroMomentumFilter all;
  for_each_zero_momentum(*lat, m, all, [&](std::span<const SlotCode> t) {
    if (coeffs.size() >= poly_key_limit())
      throw ResourceError("Taylor support exceeds key limit of " + std::to_string(poly_key_limit()));
    double v = c;
    for (SlotCode s : t) v *= inv_sqrt[slot_mode(s)];
    keys.insert(keys.end(), t.begin(), t.end());
    coeffs.emplace_back(v, 0.0);
  });
  // the enumeration is not globally sorted in its last slot
  KeyAccumulator acc(m, std::max<std::size_t>(coeffs.size() + 1, 1));
  for (std::size_t i = 0; i < coeffs.size(); ++i) acc.add(keys.data() + i * m, coeffs[i]);
  return std::move(acc).finish(std::move(lat), true);
}

// --------------------------------------------------------- keywise filters

HomogPoly filter_keys(const HomogPoly& g, const std::function<bool(std::span<const SlotCode>, cplx)>& keep) {
  std::vector<SlotCode> keys;
  std::vector<cplx> coeffs;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto key = g.key(i);
    if (!keep(key, g.coeff(i))) continue;
    keys.insert(keys.end(), key.begin(), key.end());
    coeffs.push_back(g.coeff(i));
  }
  return HomogPoly::from_sorted(g.lattice_ptr(), g.degree(), std::move(keys), std::move(coeffs), g.is_real());
}

namespace {

bool mu2_leq(std::span<const SlotCode> key, const Lattice& lat, double N) {
  return static_cast<double>(mu_sq(key, lat, 2)) <= N * N;
}

// Multiplies every coefficient by a key-dependent factor; drops exact zeros.
template <class Fn>
HomogPoly map_coeffs(const HomogPoly& g, bool real, Fn&& fn) {
  std::vector<SlotCode> keys;
  std::vector<cplx> coeffs;
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto key = g.key(i);
    const cplx v = fn(key, g.coeff(i));
    if (v == cplx{}) continue;
    keys.insert(keys.end(), key.begin(), key.end());
    coeffs.push_back(v);
  }
  return HomogPoly::from_sorted(g.lattice_ptr(), g.degree(), std::move(keys), std::move(coeffs), real);
}

}  // namespace

HomogPoly truncate(const HomogPoly& g, double N, Side side) {
  if (N < 0) throw ConfigError("truncation radius must be non-negative");
  const Lattice& lat = g.lattice();
  return filter_keys(g, [&](std::span<const SlotCode> key, cplx) { return mu2_leq(key, lat, N) == (side == Side::leq); });
}

std::pair<HomogPoly, HomogPoly> truncate_split(const HomogPoly& g, double N) {
  return {truncate(g, N, Side::leq), truncate(g, N, Side::gt)};
}

HomogPoly ad_z2(const HomogPoly& g) {
  const Lattice& lat = g.lattice();
  return map_coeffs(g, g.is_real(), [&](std::span<const SlotCode> key, cplx c) { return kI * small_divisor(key, lat) * c; });
}

std::pair<HomogPoly, HomogPoly> split_small_divisors(const HomogPoly& g, double floor) {
  const Lattice& lat = g.lattice();
  auto small = [&](std::span<const SlotCode> key, cplx) { return std::abs(small_divisor(key, lat)) < floor; };
  return {filter_keys(g, [&](auto key, cplx c) { return !small(key, c); }), filter_keys(g, small)};
}

HomogPoly ad_z2_inverse(const HomogPoly& g, double floor) {
  const Lattice& lat = g.lattice();
  std::vector<std::pair<SignedTuple, double>> bad;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double om = small_divisor(g.key(i), lat);
    if (std::abs(om) < floor) bad.emplace_back(SignedTuple(std::vector<SlotCode>(g.key(i).begin(), g.key(i).end())), std::abs(om));
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "near-resonant divisor on " << bad.size() << " key(s) below floor " << floor << ":";
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 8); ++i)
      os << ' ' << bad[i].first.to_string(lat) << " |Omega|=" << bad[i].second;
    throw NearResonantError(os.str(), std::move(bad));
  }
  return map_coeffs(g, g.is_real(), [&](std::span<const SlotCode> key, cplx c) { return c / (kI * small_divisor(key, lat)); });
}

HomogPoly resonant_part(const HomogPoly& g) {
  const Lattice& lat = g.lattice();
  if (g.degree() % 2 != 0) return HomogPoly(g.lattice_ptr(), g.degree(), g.is_real());
  return filter_keys(g, [&](std::span<const SlotCode> key, cplx) { return is_resonant(key, lat); });
}

std::pair<HomogPoly, HomogPoly> pm_split(const HomogPoly& g) {
  const Lattice& lat = g.lattice();
  return {filter_keys(g, [&](auto key, cplx) { return classify_pm(key, lat) > 0; }),
          filter_keys(g, [&](auto key, cplx) { return classify_pm(key, lat) < 0; })};
}

HomogPoly poisson_with_ns(const HomogPoly& g, double s) {
  const Lattice& lat = g.lattice();
  const auto w = lat.weights(s);
  return map_coeffs(g, g.is_real(), [&](std::span<const SlotCode> key, cplx c) { return kI * weight_divisor(key, lat, w) * c; });
}

// ------------------------------------------------------------------ poisson

namespace {

// Inverted index: for each slot code, the keys containing it and the count.
struct SlotIndex {
  std::vector<std::uint32_t> start;
  std::vector<std::uint32_t> key;
  std::vector<std::uint8_t> count;

  explicit SlotIndex(const HomogPoly& g) {
    const std::size_t n_codes = 2 * static_cast<std::size_t>(g.lattice().size());
    start.assign(n_codes + 1, 0);
    auto distinct = [&](std::size_t i, auto&& fn) {
      auto k = g.key(i);
      std::size_t a = 0;
      while (a < k.size()) {
        std::size_t b = a;
        while (b < k.size() && k[b] == k[a]) ++b;
        fn(k[a], static_cast<std::uint8_t>(b - a));
        a = b;
      }
    };
    for (std::size_t i = 0; i < g.size(); ++i) distinct(i, [&](SlotCode c, std::uint8_t) { ++start[c + 1]; });
    std::partial_sum(start.begin(), start.end(), start.begin());
    key.resize(start.back());
    count.resize(start.back());
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (std::size_t i = 0; i < g.size(); ++i)
      distinct(i, [&](SlotCode c, std::uint8_t n) {
        key[fill[c]] = static_cast<std::uint32_t>(i);
        count[fill[c]++] = n;
      });
  }
};

void poisson_range(const HomogPoly& f, const HomogPoly& g, const SlotIndex& gi, std::size_t lo, std::size_t hi,
                   KeyAccumulator& acc) {
  const int kf = f.degree();
  const int kg = g.degree();
  const int kr = kf + kg - 2;
  std::vector<double> mg(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) mg[i] = orbit_multiplicity(g.key(i));
  std::vector<SlotCode> rest_f(static_cast<std::size_t>(kf - 1));
  std::vector<SlotCode> out(static_cast<std::size_t>(kr));
  for (std::size_t fi = lo; fi < hi; ++fi) {
    auto tf = f.key(fi);
    const cplx cf = f.coeff(fi) * orbit_multiplicity(tf);
    std::size_t a = 0;
    while (a < tf.size()) {
      std::size_t b = a;
      while (b < tf.size() && tf[b] == tf[a]) ++b;
      const SlotCode c = tf[a];
      const double nf = static_cast<double>(b - a);
      // F's key with one copy of c removed
      std::copy(tf.begin(), tf.begin() + static_cast<std::ptrdiff_t>(a), rest_f.begin());
      std::copy(tf.begin() + static_cast<std::ptrdiff_t>(a) + 1, tf.end(), rest_f.begin() + static_cast<std::ptrdiff_t>(a));
      const cplx pref = (slot_sign(c) > 0 ? -kI : kI) * cf * nf;
      const SlotCode opp = slot_conj(c);
      for (std::uint32_t e = gi.start[opp]; e < gi.start[opp + 1]; ++e) {
        const std::uint32_t gk = gi.key[e];
        auto tg = g.key(gk);
        // merge rest_f with tg minus one copy of opp
        std::size_t p = 0, q = 0, o = 0;
        bool skipped = false;
        while (o < out.size()) {
          if (q < tg.size() && !skipped && tg[q] == opp) {
            skipped = true;
            ++q;
            continue;
          }
          if (q >= tg.size() || (p < rest_f.size() && rest_f[p] <= tg[q]))
            out[o++] = rest_f[p++];
          else
            out[o++] = tg[q++];
        }
        acc.add(out.data(), pref * g.coeff(gk) * mg[gk] * static_cast<double>(gi.count[e]));
      }
      a = b;
    }
  }
}

}  // namespace

HomogPoly poisson(const HomogPoly& f, const HomogPoly& g, int workers) {
  if (f.degree() < 2 || g.degree() < 2) throw ConfigError("poisson needs degrees >= 2");
  if (f.lattice_ptr() != g.lattice_ptr() && f.lattice().spec().J != g.lattice().spec().J)
    throw ConfigError("poisson operands live on different lattices");
  const int kr = f.degree() + g.degree() - 2;
  const bool real = f.is_real() && g.is_real();
  if (f.empty() || g.empty()) return HomogPoly(f.lattice_ptr(), kr, real);
  const SlotIndex gi(g);
  if (workers <= 0) workers = default_workers();
  const std::size_t nf = f.size();
  workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(nf / 256, 1)));
  KeyAccumulator acc(kr);
  if (workers <= 1) {
    poisson_range(f, g, gi, 0, nf, acc);
  } else {
    std::vector<KeyAccumulator> parts;
    for (int w = 0; w < workers; ++w) parts.emplace_back(kr);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          poisson_range(f, g, gi, nf * w / workers, nf * (w + 1) / workers, parts[w]);
        } catch (...) {
          errs[w] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    for (auto& p : parts) acc.merge_from(p);
  }
  // accumulated values are monomial-basis coefficients; divide by m(key)
  HomogPoly out = std::move(acc).finish(f.lattice_ptr(), real);
  std::vector<SlotCode> keys(out.size() * static_cast<std::size_t>(kr));
  std::vector<cplx> coeffs(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto k = out.key(i);
    std::copy(k.begin(), k.end(), keys.begin() + static_cast<std::ptrdiff_t>(i * kr));
    coeffs[i] = out.coeff(i) / orbit_multiplicity(k);
  }
  return HomogPoly::from_sorted(f.lattice_ptr(), kr, std::move(keys), std::move(coeffs), real);
}

// --------------------------------------------------------------- evaluation

cplx evaluate(const HomogPoly& g, const SpectralState& z) {
  cplx total{};
  std::vector<cplx> val(z.u.size() * 2);
  for (std::size_t i = 0; i < z.u.size(); ++i) {
    val[2 * i] = std::conj(z.u[i]);
    val[2 * i + 1] = z.u[i];
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto key = g.key(i);
    cplx p = g.coeff(i) * orbit_multiplicity(key);
    for (SlotCode c : key) p *= val[c];
    total += p;
  }
  return total;
}

void add_vector_field(const HomogPoly& g, const SpectralState& z, std::vector<cplx>& out) {
  std::vector<cplx> val(z.u.size() * 2);
  for (std::size_t i = 0; i < z.u.size(); ++i) {
    val[2 * i] = std::conj(z.u[i]);
    val[2 * i + 1] = z.u[i];
  }
  const int k = g.degree();
  std::vector<cplx> prefix(static_cast<std::size_t>(k + 1));
  std::vector<cplx> suffix(static_cast<std::size_t>(k + 1));
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto key = g.key(i);
    const cplx c = kI * g.coeff(i) * orbit_multiplicity(key);
    prefix[0] = 1.0;
    for (int a = 0; a < k; ++a) prefix[a + 1] = prefix[a] * val[key[a]];
    suffix[k] = 1.0;
    for (int a = k - 1; a >= 0; --a) suffix[a] = suffix[a + 1] * val[key[a]];
    int a = 0;
    while (a < k) {
      int b = a;
      while (b < k && key[b] == key[a]) ++b;
      if (slot_sign(key[a]) < 0) out[slot_mode(key[a])] += c * static_cast<double>(b - a) * prefix[a] * suffix[a + 1];
      a = b;
    }
  }
}

SpectralState vector_field(const HomogPoly& g, const SpectralState& z) {
  SpectralState out(z.lattice);
  out.time = z.time;
  add_vector_field(g, z, out.u);
  return out;
}

// ---------------------------------------------------------------- algebra

namespace {

HomogPoly merge(const HomogPoly& a, const HomogPoly& b, cplx sb) {
  if (a.degree() != b.degree()) throw ConfigError("cannot add polynomials of different degree");
  const int k = a.degree();
  std::vector<SlotCode> keys;
  std::vector<cplx> coeffs;
  keys.reserve((a.size() + b.size()) * static_cast<std::size_t>(k));
  coeffs.reserve(a.size() + b.size());
  auto push = [&](std::span<const SlotCode> key, cplx v) {
    if (v == cplx{}) return;
    keys.insert(keys.end(), key.begin(), key.end());
    coeffs.push_back(v);
  };
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i >= a.size())
      c = 1;
    else if (j >= b.size())
      c = -1;
    else
      c = compare_keys(a.key(i).data(), b.key(j).data(), k);
    if (c < 0) {
      push(a.key(i), a.coeff(i));
      ++i;
    } else if (c > 0) {
      push(b.key(j), sb * b.coeff(j));
      ++j;
    } else {
      push(a.key(i), a.coeff(i) + sb * b.coeff(j));
      ++i;
      ++j;
    }
  }
  const bool real = a.is_real() && b.is_real() && sb.imag() == 0.0;
  return HomogPoly::from_sorted(a.lattice_ptr(), k, std::move(keys), std::move(coeffs), real);
}

}  // namespace

HomogPoly add(const HomogPoly& a, const HomogPoly& b) { return merge(a, b, 1.0); }
HomogPoly subtract(const HomogPoly& a, const HomogPoly& b) { return merge(a, b, -1.0); }

HomogPoly scale(const HomogPoly& a, cplx factor) {
  return map_coeffs(a, a.is_real() && factor.imag() == 0.0, [&](auto, cplx c) { return c * factor; });
}

double max_abs_diff(const HomogPoly& a, const HomogPoly& b) {
  if (a.degree() != b.degree()) {
    return std::max(a.max_abs(), b.max_abs());
  }
  const int k = a.degree();
  double m = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i >= a.size())
      c = 1;
    else if (j >= b.size())
      c = -1;
    else
      c = compare_keys(a.key(i).data(), b.key(j).data(), k);
    if (c < 0)
      m = std::max(m, std::abs(a.coeff(i++)));
    else if (c > 0)
      m = std::max(m, std::abs(b.coeff(j++)));
    else
      m = std::max(m, std::abs(a.coeff(i++) - b.coeff(j++)));
  }
  return m;
}

double reality_defect(const HomogPoly& g) {
  double m = 0.0;
  std::vector<SlotCode> flipped(static_cast<std::size_t>(g.degree()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto key = g.key(i);
    for (std::size_t a = 0; a < key.size(); ++a) flipped[a] = slot_conj(key[a]);
    std::sort(flipped.begin(), flipped.end());
    m = std::max(m, std::abs(g.coeff(i) - std::conj(g.coeff_of(flipped))));
  }
  return m;
}

void accumulate(Graded& into, const HomogPoly& p) {
  auto it = into.find(p.degree());
  if (it == into.end())
    into.emplace(p.degree(), p);
  else
    it->second = add(it->second, p);
}

cplx evaluate(const Graded& g, const SpectralState& z) {
  cplx total{};
  for (const auto& [k, p] : g) total += evaluate(p, z);
  return total;
}

// ------------------------------------------------------------------- state

double sobolev_energy(const SpectralState& z, double s) {
  const auto w = z.lattice->weights(s);
  double r = 0.0;
  for (std::size_t i = 0; i < z.u.size(); ++i) r += w[i] * std::norm(z.u[i]);
  return r;
}

double sobolev_energy(const SpectralState& z) {
  double r = 0.0;
  for (std::size_t i = 0; i < z.u.size(); ++i) r += z.lattice->weight(static_cast<int>(i)) * std::norm(z.u[i]);
  return r;
}

double sobolev_norm(const SpectralState& z, double s) { return std::sqrt(sobolev_energy(z, s)); }

double quadratic_energy(const SpectralState& z) {
  double r = 0.0;
  for (std::size_t i = 0; i < z.u.size(); ++i) r += z.lattice->omega(static_cast<int>(i)) * std::norm(z.u[i]);
  return r;
}

}  // namespace beamlab
