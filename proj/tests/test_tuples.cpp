#include <set>

#include "beamlab/tuples.hpp"
#include "doctest.h"
#include "oracles/oracles.hpp"

using namespace beamlab;
using Modes = std::vector<std::vector<int>>;

namespace {

LatticePtr lat2(int J, std::vector<double> a = {1.37, 2.61}) {
  return Lattice::make(LatticeSpec{J, Anisotropy(std::move(a)), 0.0});
}

SignedTuple T(const Lattice& lat, std::vector<int> s, Modes m) { return SignedTuple(lat, s, m); }

}  // namespace

TEST_CASE("momentum examples") {
  auto lat = lat2(3);
  CHECK(momentum(T(*lat, {1, -1}, {{2, 1}, {2, 1}}).slots(), *lat) == std::vector<int>{0, 0});
  CHECK(momentum(T(*lat, {1, 1}, {{1, 0}, {-1, 0}}).slots(), *lat) == std::vector<int>{0, 0});
  CHECK(momentum(T(*lat, {1, 1, -1}, {{1, 0}, {0, 1}, {1, 1}}).slots(), *lat) == std::vector<int>{0, 0});
  CHECK(momentum(T(*lat, {1, 1}, {{1, 0}, {1, 2}}).slots(), *lat) == std::vector<int>{2, 2});
}

TEST_CASE("small_divisor examples") {
  auto lat = lat2(2, {1.0 + 1e-12, 2.0});
  CHECK(small_divisor(T(*lat, {1, -1}, {{2, 1}, {2, 1}}).slots(), *lat) == 0.0);
  CHECK(small_divisor(T(*lat, {1, 1}, {{0, 0}, {0, 0}}).slots(), *lat) == 2.0);
  CHECK(small_divisor(T(*lat, {1, -1}, {{1, 0}, {0, 1}}).slots(), *lat) ==
        doctest::Approx(std::sqrt(2.0) - std::sqrt(5.0)).epsilon(1e-10));
}

TEST_CASE("is_resonant examples") {
  auto lat = lat2(3);
  CHECK(is_resonant(T(*lat, {1, -1}, {{2, 1}, {2, 1}}).slots(), *lat));
  CHECK(is_resonant(T(*lat, {1, 1, -1, -1}, {{2, 1}, {0, 3}, {-2, 1}, {0, -3}}).slots(), *lat));
  CHECK(oracle::resonant_by_permutations({1, 1, -1, -1}, {{2, 1}, {0, 3}, {-2, 1}, {0, -3}}));
  CHECK_FALSE(is_resonant(T(*lat, {1, 1, -1}, {{1, 0}, {0, 1}, {1, 1}}).slots(), *lat));
  CHECK_FALSE(is_resonant(T(*lat, {1, 1, -1, -1}, {{2, 1}, {0, 3}, {-2, 1}, {0, 2}}).slots(), *lat));
}

TEST_CASE("classify_pm examples") {
  auto lat = Lattice::make(LatticeSpec{9, Anisotropy({1.5, 2.5}), 0.0});
  CHECK(classify_pm(T(*lat, {1, 1, -1}, {{5, 0}, {4, 0}, {9, 0}}).slots(), *lat) == -1);
  CHECK(classify_pm(T(*lat, {1, 1, -1}, {{9, 0}, {4, 0}, {5, 0}}).slots(), *lat) == -1);
  CHECK(classify_pm(T(*lat, {1, -1, 1, -1}, {{3, 0}, {3, 0}, {1, 0}, {1, 0}}).slots(), *lat) == -1);
  CHECK(classify_pm(T(*lat, {1, 1, -1}, {{9, 0}, {5, 0}, {4, 0}}).slots(), *lat) == 1);
  // tie at mu_2 resolved existentially
  CHECK(classify_pm(T(*lat, {1, -1, 1, -1}, {{5, 0}, {3, 0}, {0, 3}, {2, 0}}).slots(), *lat) == 1);
}

TEST_CASE("classify_pm agrees with admissible-pair enumeration") {
  auto lat = lat2(2);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> mode(0, lat->size() - 1), coin(0, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 2 + trial % 5;
    std::vector<SlotCode> s;
    for (int i = 0; i < k; ++i) s.push_back(make_slot(mode(rng), coin(rng) ? 1 : -1));
    SignedTuple t(s);
    std::vector<int> n2;
    for (int i = 0; i < k; ++i) n2.push_back(lat->norm2(t.mode(i)));
    auto sorted = n2;
    std::sort(sorted.rbegin(), sorted.rend());
    int expect = -1;
    for (int i = 0; i < k; ++i)
      for (int p = 0; p < k; ++p)
        if (i != p && n2[i] == sorted[0] && n2[p] == sorted[1] && t.sign(i) * t.sign(p) == 1) expect = 1;
    CHECK(classify_pm(t.slots(), *lat) == expect);
  }
}

TEST_CASE("enumeration k=2 matches brute force") {
  auto lat = lat2(1);
  std::set<std::vector<SlotCode>> brute;
  for (int a = 0; a < lat->size(); ++a)
    for (int b = 0; b < lat->size(); ++b)
      for (int sa : {-1, 1})
        for (int sb : {-1, 1}) {
          std::vector<SlotCode> t{make_slot(a, sa), make_slot(b, sb)};
          if (!has_zero_momentum(t, *lat)) continue;
          std::sort(t.begin(), t.end());
          brute.insert(t);
        }
  auto got = enumerate_zero_momentum(*lat, 2);
  CHECK(got.size() == brute.size());
  for (auto& t : got) CHECK(brute.count(std::vector<SlotCode>(t.slots().begin(), t.slots().end())) == 1);
}

TEST_CASE("enumeration k=3,4 matches brute force and is duplicate free") {
  for (int k : {3, 4}) {
    auto lat = lat2(k == 3 ? 2 : 1);
    std::set<std::vector<SlotCode>> brute;
    const int n = 2 * lat->size();
    std::vector<SlotCode> t(static_cast<std::size_t>(k));
    std::function<void(int)> rec = [&](int pos) {
      if (pos == k) {
        if (!has_zero_momentum(t, *lat)) return;
        auto c = t;
        std::sort(c.begin(), c.end());
        brute.insert(c);
        return;
      }
      for (int c = 0; c < n; ++c) {
        t[pos] = static_cast<SlotCode>(c);
        rec(pos + 1);
      }
    };
    rec(0);
    auto got = enumerate_zero_momentum(*lat, k);
    std::set<SignedTuple> uniq(got.begin(), got.end());
    CHECK(uniq.size() == got.size());
    CHECK(got.size() == brute.size());
  }
}

TEST_CASE("enumeration filters") {
  auto lat = lat2(2);
  ZeroMomentumFilter nr;
  nr.nonresonant_only = true;
  for (auto& t : enumerate_zero_momentum(*lat, 3, nr)) CHECK_FALSE(is_resonant(t.slots(), *lat));
  ZeroMomentumFilter m2;
  m2.mu2_max = 1.0;
  for (auto& t : enumerate_zero_momentum(*lat, 4, m2)) CHECK(mu(t.slots(), *lat, 2) <= 1.0);
  ZeroMomentumFilter sp;
  sp.plus_count = 2;
  for (auto& t : enumerate_zero_momentum(*lat, 3, sp)) {
    int plus = 0;
    for (int i = 0; i < 3; ++i) plus += t.sign(i) > 0;
    CHECK(plus == 2);
  }
  ZeroMomentumFilter lim;
  lim.limit = 10;
  CHECK_THROWS_AS(enumerate_zero_momentum(*lat, 3, lim), ResourceError);
}

TEST_CASE("resonant tuples have vanishing divisor for every a") {
  auto lat = lat2(2);
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int k : {2, 4}) {
    for (auto& t : enumerate_zero_momentum(*lat, k)) {
      if (!is_resonant(t.slots(), *lat)) continue;
      if (++checked % 7) continue;
      for (int r = 0; r < 100; ++r) {
        auto a = sample_anisotropy(rng(), 2);
        double scale = 0;
        for (int i = 0; i < k; ++i) scale += freq(lat->mode(t.mode(i)), a);
        CHECK(std::abs(small_divisor(t.slots(), *lat, a)) <= 1e-12 * scale);
      }
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("canonicalization, sign flip and odd degree") {
  auto lat = lat2(2);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> mode(0, lat->size() - 1), coin(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const int k = 2 + trial % 5;
    std::vector<SlotCode> raw;
    for (int i = 0; i < k; ++i) raw.push_back(make_slot(mode(rng), coin(rng) ? 1 : -1));
    SignedTuple t(raw);
    CHECK(SignedTuple(std::vector<SlotCode>(t.slots().begin(), t.slots().end())) == t);
    CHECK(momentum(raw, *lat) == momentum(t.slots(), *lat));
    CHECK(small_divisor(raw, *lat) == small_divisor(t.slots(), *lat));
    CHECK(small_divisor(t.flipped().slots(), *lat) == -small_divisor(t.slots(), *lat));
    if (k % 2) CHECK_FALSE(is_resonant(t.slots(), *lat));
    std::vector<int> sg;
    Modes md;
    for (int i = 0; i < k; ++i) {
      sg.push_back(t.sign(i));
      auto m = lat->mode(t.mode(i));
      md.emplace_back(m.begin(), m.end());
    }
    CHECK(is_resonant(t.slots(), *lat) == oracle::resonant_by_pairing(sg, md));
    if (k <= 4) CHECK(is_resonant(t.slots(), *lat) == oracle::resonant_by_permutations(sg, md));
  }
}

TEST_CASE("measure_estimate examples") {
  auto lat = lat2(4);
  auto res = T(*lat, {1, -1}, {{2, 1}, {-2, 1}});
  CHECK(measure_estimate(res.slots(), *lat, 0.3, 1000, 1).fraction_bad == 1.0);
  auto zz = T(*lat, {1, 1}, {{0, 0}, {0, 0}});
  CHECK(measure_estimate(zz.slots(), *lat, 1.0, 1000, 1).fraction_bad == 0.0);
  CHECK_THROWS_AS(measure_estimate(zz.slots(), *lat, 0.0, 10, 1), ConfigError);

  // independent of worker count
  auto t = T(*lat, {1, -1, -1}, {{4, 1}, {3, 1}, {1, 0}});
  auto r1 = measure_estimate(t.slots(), *lat, 0.5, 50000, 99, 1);
  auto r3 = measure_estimate(t.slots(), *lat, 0.5, 50000, 99, 3);
  CHECK(r1.fraction_bad == r3.fraction_bad);
  CHECK(r1.min_abs_divisor == r3.min_abs_divisor);
}

TEST_CASE("pair bound hypothesis and grid oracle") {
  auto lat = lat2(4);
  // j1 = (4,1)+, j2 = (3,1)-, j3 = (1,0)-: component 0 gives |7 * 1| >= 2 (1 + 1)
  auto t = T(*lat, {1, -1, -1}, {{4, 1}, {3, 1}, {1, 0}});
  auto pb = find_pair_bound(t.slots(), *lat);
  REQUIRE(pb.has_value());
  CHECK(std::abs(pb->pair_sum) == 7);
  const double gamma = 1e-2;
  const auto form = DivisorForm::of(t.slots(), *lat);
  const double grid = oracle::grid_measure(form, 2, gamma, pb->component, 200, 20000);
  CHECK(grid <= pb->bound_for(gamma));
  auto r = measure_estimate(t.slots(), *lat, gamma, 200000, 7);
  CHECK(r.bound.has_value());
  CHECK(r.fraction_bad <= *r.bound + 3 * r.std_error);
  CHECK(std::abs(r.fraction_bad - grid) <= 3 * r.std_error + 1e-4);
  // tuples without a usable component report no bound
  auto none = T(*lat, {1, -1, 1}, {{1, 0}, {1, 1}, {0, 1}});
  CHECK_FALSE(find_pair_bound(none.slots(), *lat).has_value());
}
