#include "beamlab/poly_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace beamlab {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_poly(std::ostream& os, const HomogPoly& p) {
  const Lattice& lat = p.lattice();
  os << "beamlab-poly " << kPolyFormatVersion << '\n';
  os << "lattice " << lat.dim() << ' ' << lat.cutoff() << ' ' << num(lat.spec().s);
  for (double a : lat.anisotropy().values()) os << ' ' << num(a);
  os << '\n';
  os << "poly " << p.degree() << ' ' << p.size() << ' ' << (p.is_real() ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto key = p.key(i);
    os << p.degree();
    for (SlotCode c : key) os << ' ' << (slot_sign(c) > 0 ? "+1" : "-1");
    for (SlotCode c : key)
      for (int x : lat.mode(slot_mode(c))) os << ' ' << x;
    os << ' ' << num(p.coeff(i).real()) << ' ' << num(p.coeff(i).imag()) << '\n';
  }
}

HomogPoly read_poly(std::istream& is, LatticePtr lat) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "beamlab-poly") throw ConfigError("not a polynomial file");
  if (version != kPolyFormatVersion) throw ConfigError("unsupported polynomial format version " + std::to_string(version));
  int d = 0, J = 0;
  double s = 0;
  if (!(is >> tag >> d >> J >> s) || tag != "lattice") throw ConfigError("missing lattice header");
  std::vector<double> a(static_cast<std::size_t>(d));
  for (auto& x : a) is >> x;
  if (!lat) {
    lat = Lattice::make(LatticeSpec{J, Anisotropy(a), s});
  } else if (lat->dim() != d || lat->cutoff() != J) {
    throw ConfigError("polynomial lattice does not match");
  }
  int k = 0, real = 0;
  std::size_t n = 0;
  if (!(is >> tag >> k >> n >> real) || tag != "poly") throw ConfigError("missing poly header");
  KeyAccumulator acc(k, std::max<std::size_t>(n + 1, poly_key_limit()));
  std::vector<int> sg(static_cast<std::size_t>(k));
  std::vector<int> j(static_cast<std::size_t>(d));
  std::vector<SlotCode> key(static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < n; ++r) {
    int kk = 0;
    if (!(is >> kk) || kk != k) throw ConfigError("malformed polynomial record");
    for (auto& x : sg) is >> x;
    for (int i = 0; i < k; ++i) {
      for (auto& x : j) is >> x;
      const int idx = lat->index_of(j);
      if (idx < 0) throw ConfigError("record mode outside lattice");
      key[i] = make_slot(idx, sg[i]);
    }
    double re = 0, im = 0;
    if (!(is >> re >> im)) throw ConfigError("malformed polynomial coefficient");
    std::sort(key.begin(), key.end());
    acc.add(key, cplx{re, im});
  }
  return std::move(acc).finish(lat, real != 0);
}

void save_poly(const std::string& path, const HomogPoly& p) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_poly(os, p);
}

HomogPoly load_poly(const std::string& path, LatticePtr lat) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_poly(is, std::move(lat));
}

}  // namespace beamlab
