// Thin bindings: configs travel as JSON text so the Python side can pass plain dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "beamlab/exponents.hpp"
#include "beamlab/manifest.hpp"
#include "beamlab/normal_form.hpp"
#include "beamlab/sim.hpp"

namespace py = pybind11;
using namespace beamlab;

namespace {

LatticePtr make_lattice(int d, int J, double s, std::uint64_t seed) {
  return Lattice::make(LatticeSpec{J, sample_anisotropy(seed, d), s});
}

std::vector<SlotCode> slots_of(const Lattice& lat, const std::vector<std::vector<int>>& modes,
                               const std::vector<int>& signs) {
  if (modes.size() != signs.size()) throw ConfigError("modes and signs differ in length");
  std::vector<SlotCode> t;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const int idx = lat.index_of(modes[i]);
    if (idx < 0) throw ConfigError("mode outside the cutoff box");
    if (signs[i] != 1 && signs[i] != -1) throw ConfigError("signs must be +1 or -1");
    t.push_back(make_slot(idx, signs[i]));
  }
  canonicalize(t);
  return t;
}

template <class Config, class Fn>
std::string run_json(const std::string& cfg_text, Fn fn) {
  Config c;
  update_from_json(json::parse(cfg_text), c);
  c.validate();
  py::gil_scoped_release release;
  return to_json(fn(c)).dump();
}

}  // namespace

PYBIND11_MODULE(_beamlab, m) {
  m.attr("version") = kVersion;

  // later registrations are tried first, so the subclass goes last
  py::register_exception<Error>(m, "BeamlabError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("exponents", [](int d, int n) {
    const auto e = exponents(d, n);
    py::dict r;
    r["d"] = e.d;
    r["n"] = e.n;
    r["a"] = py::make_tuple(e.a_num, e.a_den);
    r["alpha"] = py::make_tuple(e.alpha_num, e.alpha_den);
    r["M"] = e.M;
    r["M_tilde"] = e.M_tilde;
    r["gamma"] = e.gamma;
    r["gamma_balanced"] = e.gamma_balanced;
    return r;
  });

  m.def("anisotropy", [](std::uint64_t seed, int d) { return sample_anisotropy(seed, d).values(); });

  m.def(
      "tuple_info",
      [](const std::vector<std::vector<int>>& modes, const std::vector<int>& signs, int J, std::uint64_t seed) {
        if (modes.empty()) throw ConfigError("empty tuple");
        auto lat = make_lattice(static_cast<int>(modes[0].size()), J, 0.0, seed);
        const auto t = slots_of(*lat, modes, signs);
        py::dict r;
        r["zero_momentum"] = has_zero_momentum(t, *lat);
        r["resonant"] = is_resonant(t, *lat);
        r["divisor"] = small_divisor(t, *lat);
        r["pm_class"] = classify_pm(t, *lat);
        std::vector<double> mus;
        for (int k = 1; k <= static_cast<int>(t.size()); ++k) mus.push_back(mu(t, *lat, k));
        r["mu"] = mus;
        return r;
      },
      py::arg("modes"), py::arg("signs"), py::arg("J"), py::arg("seed") = 1);

  m.def(
      "bnf_summary",
      [](int J, double N, double lambda, std::uint64_t seed, int degree_cap) {
        auto lat = make_lattice(2, J, 0.0, seed);
        BNFConfig cfg;
        cfg.N = N;
        cfg.degree_cap = degree_cap;
        cfg.validate();
        Graded H;
        H.emplace(3, taylor_monomial(3, lambda, lat));
        const BNFResult R = [&] {
          py::gil_scoped_release release;
          return bnf_pipeline(cfg, lat, H);
        }();
        py::dict support;
        for (const auto& [k, p] : R.Z) support[py::int_(k)] = p.size();
        py::list res;
        for (const auto& r : R.residuals) res.append(py::make_tuple(r.stage, r.degree, r.residual));
        py::dict out;
        out["Z_support"] = support;
        out["residuals"] = res;
        out["max_residual"] = R.max_residual();
        return out;
      },
      py::arg("J") = 2, py::arg("N") = 3.0, py::arg("lam") = 1.0, py::arg("seed") = 1, py::arg("degree_cap") = 4);

  m.def(
      "simulate",
      [](int J, double lambda, double eps, double dt, double t_end, const std::string& ic, std::uint64_t seed,
         int output_every) {
        auto lat = make_lattice(2, J, 1.0, seed);
        SimConfig sc;
        sc.f = Nonlinearity::monomial(3, lambda);
        sc.dt = dt;
        sc.t_end = t_end;
        sc.s = 1.0;
        sc.output_every = output_every;
        sc.validate(J);
        Simulator sim(lat, sc.f);
        const auto z0 = initial_state(lat, ic, eps, sc.s);
        const Trajectory tr = [&] {
          py::gil_scoped_release release;
          return run_trajectory(sim, z0, sc);
        }();
        py::dict out;
        std::vector<double> t, H, Ns, norm;
        for (const auto& o : tr.series) {
          t.push_back(o.t);
          H.push_back(o.H);
          Ns.push_back(o.Ns);
          norm.push_back(o.norm);
        }
        out["t"] = t;
        out["H"] = H;
        out["N_s"] = Ns;
        out["norm"] = norm;
        out["blew_up"] = tr.blew_up;
        return out;
      },
      py::arg("J") = 3, py::arg("lam") = 1.0, py::arg("eps") = 0.1, py::arg("dt") = 1e-2, py::arg("t_end") = 1.0,
      py::arg("ic") = "random-band:1:1", py::arg("seed") = 1, py::arg("output_every") = 1);

  m.def("lifespan_json", [](const std::string& c) { return run_json<LifespanConfig>(c, lifespan_sweep); });
  m.def("drift_json", [](const std::string& c) { return run_json<DriftConfig>(c, drift_compare); });
  m.def("smalldiv_json", [](const std::string& c) { return run_json<SmalldivConfig>(c, smalldiv_survey); });
  m.def("lifespan_defaults", [] { return to_json(LifespanConfig{}).dump(); });
  m.def("drift_defaults", [] { return to_json(DriftConfig{}).dump(); });
  m.def("smalldiv_defaults", [] { return to_json(SmalldivConfig{}).dump(); });
}
