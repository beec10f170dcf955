#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <new>

#include "CLI11.hpp"

#include "beamlab/error.hpp"
#include "beamlab/manifest.hpp"
#include "beamlab/poly_io.hpp"

using namespace beamlab;
namespace fs = std::filesystem;

namespace {

// Options bound to JSON keys; only flags present on the command line
// contribute, so they override the --config file.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& flag, const std::string& key, const std::string& help) {
    auto v = std::make_shared<T>();
    CLI::Option* opt = app_->add_option(flag, *v, help);
    apply_.push_back([=](json& j) {
      if (opt->count()) j[key] = *v;
    });
    return opt;
  }
  CLI::Option* flag(const std::string& flag, const std::string& key, const std::string& help) {
    auto v = std::make_shared<bool>(false);
    CLI::Option* opt = app_->add_flag(flag, *v, help);
    apply_.push_back([=](json& j) {
      if (opt->count()) j[key] = *v;
    });
    return opt;
  }
  void merge_into(json& j) const {
    for (const auto& f : apply_) f(j);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(json&)>> apply_;
};

struct Global {
  std::uint64_t seed = 1;
  CLI::Option* seed_opt = nullptr;
  std::string out = "runs";
  std::string config_file;
};

json load_config_file(const std::string& path, const std::string& command) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  // a manifest from an earlier run replays its config
  if (j.contains("config") && j.contains("command")) {
    if (j.at("command").get<std::string>() != command)
      throw ConfigError("manifest was written by '" + j.at("command").get<std::string>() + "', not '" + command + "'");
    return j.at("config");
  }
  return j;
}

// defaults <- config file <- command line flags <- --seed
json resolve(json defaults, const Global& g, const Binder& b, const std::string& command, const char* seed_key) {
  defaults.update(load_config_file(g.config_file, command));
  b.merge_into(defaults);
  if (seed_key && (g.seed_opt->count() || !defaults.contains(seed_key))) defaults[seed_key] = g.seed;
  return defaults;
}

struct Run {
  fs::path dir;
  RunManifest m;

  Run(const Global& g, std::string command, json config, json seeds) {
    m.command = std::move(command);
    m.config = std::move(config);
    m.seeds = std::move(seeds);
    m.started = utc_timestamp();
    dir = make_run_dir(g.out, m);
  }
  std::ofstream open(const std::string& name) {
    m.outputs[name] = "";
    std::ofstream os(dir / name);
    if (!os) throw ResourceError("cannot write " + (dir / name).string());
    return os;
  }
  Run(const Run&) = delete;
  Run& operator=(const Run&) = delete;
  ~Run() {
    if (done_) return;
    // leave a record of the partial outputs behind a failed run
    try {
      m.summary = {{"status", "failed"}};
      finalize_manifest(dir, m);
    } catch (...) {
    }
  }
  void finish(json summary) {
    m.summary = std::move(summary);
    m.summary["status"] = "ok";
    finalize_manifest(dir, m);
    done_ = true;
    std::cout << dir.string() << "\n";
  }

 private:
  bool done_ = false;
};

LatticePtr lattice_from(const json& c) {
  return Lattice::make(LatticeSpec{c.at("J").get<int>(),
                                   sample_anisotropy(c.at("anisotropy_seed").get<std::uint64_t>(), c.at("d").get<int>()),
                                   c.value("s", 0.0)});
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ------------------------------------------------------------- subcommands

void cmd_spectrum(const Global& g, const Binder& b) {
  json c = resolve({{"d", 2}, {"J", 4}, {"s", 1.0}}, g, b, "spectrum", "anisotropy_seed");
  auto lat = lattice_from(c);
  Run run(g, "spectrum", c, {{"anisotropy", c["anisotropy_seed"]}});
  auto os = run.open("spectrum.csv");
  os << "index";
  for (int i = 0; i < lat->dim(); ++i) os << ",j" << i + 1;
  os << ",norm2_a,omega,weight\n";
  const auto w = lat->weights(c["s"].get<double>());
  for (int idx = 0; idx < lat->size(); ++idx) {
    os << idx;
    for (int x : lat->mode(idx)) os << ',' << x;
    os << ',' << fmt(lat->norm2(idx)) << ',' << fmt(lat->omega(idx)) << ',' << fmt(w[idx]) << '\n';
  }
  os.close();
  run.finish({{"a", lat->anisotropy().values()}, {"modes", lat->size()}});
}

ZeroMomentumFilter parse_filters(const json& list, int k, bool* resonant_only) {
  ZeroMomentumFilter f;
  if (resonant_only) *resonant_only = false;
  for (const auto& item : list) {
    const std::string s = item.get<std::string>();
    if (s == "nonresonant") {
      f.nonresonant_only = true;
    } else if (s == "resonant" && resonant_only) {
      *resonant_only = true;
    } else if (s.rfind("mu2-le:", 0) == 0) {
      try {
        f.mu2_max = std::stod(s.substr(7));
      } catch (const std::exception&) {
        throw ConfigError("bad filter " + s);
      }
    } else if (s.rfind("sign:", 0) == 0) {
      const std::string signs = s.substr(5);
      if (static_cast<int>(signs.size()) != k || signs.find_first_not_of("+-") != std::string::npos)
        throw ConfigError("filter " + s + ": expected " + std::to_string(k) + " characters from {+,-}");
      f.plus_count = static_cast<int>(std::count(signs.begin(), signs.end(), '+'));
    } else {
      throw ConfigError("unknown filter " + s);
    }
  }
  return f;
}

void cmd_resonances(const Global& g, const Binder& b) {
  json c = resolve({{"d", 2}, {"J", 2}, {"k", 4}, {"filter", json::array()}, {"limit", 5'000'000}}, g, b,
                   "resonances", "anisotropy_seed");
  auto lat = lattice_from(c);
  const int k = c["k"].get<int>();
  if (k < 2) throw ConfigError("resonances: k must be >= 2");
  bool resonant_only = false;
  ZeroMomentumFilter f = parse_filters(c["filter"], k, &resonant_only);
  f.limit = c["limit"].get<std::size_t>();
  Run run(g, "resonances", c, {{"anisotropy", c["anisotropy_seed"]}});
  auto os = run.open("resonances.csv");
  os << "tuple,resonant,divisor,mu1,mu2,pm\n";
  std::size_t total = 0, resonant = 0;
  for_each_zero_momentum(*lat, k, f, [&](std::span<const SlotCode> t) {
    const bool res = is_resonant(t, *lat);
    if (resonant_only && !res) return;
    if (++total > f.limit) throw ResourceError("resonances: more than " + std::to_string(f.limit) + " tuples");
    resonant += res;
    os << SignedTuple(std::vector<SlotCode>(t.begin(), t.end())).to_string(*lat) << ',' << res << ','
       << fmt(small_divisor(t, *lat)) << ',' << fmt(mu(t, *lat, 1)) << ',' << fmt(mu(t, *lat, 2)) << ','
       << classify_pm(t, *lat) << '\n';
  });
  os.close();
  run.finish({{"tuples", total}, {"resonant", resonant}});
}

void cmd_smalldiv(const Global& g, const Binder& b) {
  SmalldivConfig sc;
  json defaults = to_json(sc);
  defaults.erase("anisotropy_seed");  // follows --seed unless set
  defaults.update({{"gamma", 1e-3}, {"samples", 100'000}, {"filter", json::array()}, {"max_tuples", 2000},
                   {"workers", 1}});
  json c = resolve(defaults, g, b, "smalldiv", "seed");
  if (!c.contains("anisotropy_seed") || !c["anisotropy_seed"].is_number()) c["anisotropy_seed"] = c["seed"];
  update_from_json(c, sc);
  const double gamma = c["gamma"].get<double>();
  const auto samples = c["samples"].get<std::size_t>();
  const auto max_tuples = c["max_tuples"].get<std::size_t>();
  const auto seed = c["seed"].get<std::uint64_t>();
  if (!(gamma > 0)) throw ConfigError("smalldiv: gamma must be positive");
  if (samples == 0) throw ConfigError("smalldiv: samples must be positive");
  sc.validate();

  auto lat = Lattice::make(LatticeSpec{sc.J, sample_anisotropy(sc.anisotropy_seed, sc.d), 0.0});
  ZeroMomentumFilter f = parse_filters(c["filter"], sc.k, nullptr);
  f.limit = sc.limit;
  Run run(g, "smalldiv", c, {{"monte_carlo", seed}, {"anisotropy", sc.anisotropy_seed}});
  auto os = run.open("smalldiv.csv");
  os << "tuple,mu1,mu2,mu3,min_abs_divisor_over_samples,fraction_bad,std_error,analytic_bound\n";
  std::size_t count = 0;
  for_each_zero_momentum(*lat, sc.k, f, [&](std::span<const SlotCode> t) {
    if (++count > max_tuples)
      throw ResourceError("smalldiv: more than max_tuples = " + std::to_string(max_tuples) + " tuples; tighten --filter");
    const MeasureReport m = measure_estimate(t, *lat, gamma, samples, seed, c["workers"].get<int>());
    os << SignedTuple(std::vector<SlotCode>(t.begin(), t.end())).to_string(*lat) << ',' << fmt(mu(t, *lat, 1)) << ','
       << fmt(mu(t, *lat, 2)) << ',' << fmt(mu(t, *lat, 3)) << ',' << fmt(m.min_abs_divisor) << ','
       << fmt(m.fraction_bad) << ',' << fmt(m.std_error) << ',';
    if (m.bound) os << fmt(*m.bound);
    os << '\n';
  });
  os.close();
  const SmalldivReport survey = smalldiv_survey(sc);
  auto ss = run.open("survey.csv");
  write_csv(ss, survey);
  ss.close();
  run.finish({{"tuples", count}, {"survey", to_json(survey)}});
}

void cmd_bnf(const Global& g, const Binder& b) {
  json c = resolve({{"d", 2},
                    {"n", 3},
                    {"r", 0},
                    {"N", 3.0},
                    {"J", 2},
                    {"s", 1.0},
                    {"lambda", 1.0},
                    {"policy", "retain"},
                    {"degree_cap", 0},
                    {"N1", 0.0},
                    {"workers", 1},
                    {"dump", false}},
                   g, b, "bnf", "anisotropy_seed");
  auto lat = lattice_from(c);
  BNFConfig bc;
  bc.d = c["d"].get<int>();
  bc.n = c["n"].get<int>();
  bc.r = c["r"].get<int>();
  bc.N = c["N"].get<double>();
  bc.policy = policy_from_string(c["policy"].get<std::string>());
  bc.degree_cap = c["degree_cap"].get<int>();
  bc.workers = c["workers"].get<int>();
  bc.validate();

  Graded H;
  H.emplace(bc.n, taylor_monomial(bc.n, c["lambda"].get<double>(), lat));
  Run run(g, "bnf", c, {{"anisotropy", c["anisotropy_seed"]}});
  const BNFResult R = bnf_pipeline(bc, lat, H);

  auto support = [](const Graded& gr) {
    json j = json::object();
    for (const auto& [k, p] : gr) j[std::to_string(k)] = p.size();
    return j;
  };
  json res = json::array();
  for (const auto& r : R.residuals) res.push_back({{"stage", r.stage}, {"degree", r.degree}, {"residual", r.residual}});
  json nr = json::array();
  for (const auto& e : R.near_resonant)
    nr.push_back({{"tuple", e.key.to_string(*lat)}, {"divisor", e.divisor}, {"degree", e.degree}, {"stage", e.stage}});
  json dropped = json::array();
  for (const auto& d : R.dropped) dropped.push_back({{"power", d.power}, {"degree", d.degree}, {"reason", d.reason}});
  json summary{{"a", lat->anisotropy().values()},
               {"M", R.M},
               {"M_tilde", R.M_tilde},
               {"steps", R.steps},
               {"support", {{"chi1", support(R.chi1)}, {"chi2", support(R.chi2)}, {"Z", support(R.Z)},
                            {"K", support(R.K)}, {"K_high", support(R.K_high)}}},
               {"residuals", res},
               {"max_residual", R.max_residual()},
               {"near_resonant", nr},
               {"dropped", dropped}};

  const double N1 = c["N1"].get<double>();
  if (N1 > 0) {
    const ModifiedEnergy me = modified_energy(R.K, c["s"].get<double>(), N1, bc);
    json er = json::array();
    for (const auto& r : me.residuals) er.push_back({{"degree", r.degree}, {"residual", r.residual}});
    summary["energy"] = {{"support", support(me.E)}, {"residuals", er}, {"retained", me.retained.size()}};
    if (c["dump"].get<bool>())
      for (const auto& [k, p] : me.E) {
        const std::string name = "E_" + std::to_string(k) + ".poly";
        run.m.outputs[name] = "";
        save_poly((run.dir / name).string(), p);
      }
  }
  if (c["dump"].get<bool>()) {
    auto dump = [&](const char* tag, const Graded& gr) {
      for (const auto& [k, p] : gr) {
        const std::string name = std::string(tag) + "_" + std::to_string(k) + ".poly";
        run.m.outputs[name] = "";
        save_poly((run.dir / name).string(), p);
      }
    };
    dump("chi1", R.chi1);
    dump("chi2", R.chi2);
    dump("Z", R.Z);
    dump("K", R.K);
    dump("K_high", R.K_high);
  }
  {
    auto os = run.open("bnf.json");
    os << summary.dump(2) << '\n';
  }
  run.finish(summary);
}

void cmd_energy_drift(const Global& g, const Binder& b) {
  DriftConfig dc;
  json c = resolve(to_json(dc), g, b, "energy-drift", "anisotropy_seed");
  update_from_json(c, dc);
  dc.validate();
  Run run(g, "energy-drift", c, {{"anisotropy", dc.anisotropy_seed}, {"ic", dc.ic}});
  const DriftReport r = drift_compare(dc);
  auto os = run.open("drift.csv");
  write_csv(os, r);
  os.close();
  run.finish(to_json(r));
}

void cmd_simulate(const Global& g, const Binder& b) {
  json c = resolve({{"d", 2},
                    {"n", 3},
                    {"lambda", 1.0},
                    {"J", 4},
                    {"grid", 0},
                    {"dt", 1e-3},
                    {"t_end", 1.0},
                    {"s", 1.0},
                    {"eps", 1e-2},
                    {"ic", "random-band:1"},
                    {"scheme", "strang"},
                    {"output_every", 10}},
                   g, b, "simulate", "anisotropy_seed");
  auto lat = lattice_from(c);
  SimConfig sc;
  sc.f = Nonlinearity::monomial(c["n"].get<int>(), c["lambda"].get<double>());
  sc.grid = c["grid"].get<int>();
  sc.dt = c["dt"].get<double>();
  sc.t_end = c["t_end"].get<double>();
  sc.s = c["s"].get<double>();
  sc.scheme = scheme_from_string(c["scheme"].get<std::string>());
  sc.output_every = c["output_every"].get<int>();
  sc.validate(lat->cutoff());
  Simulator sim(lat, sc.f, sc.grid);
  sc.grid = sim.grid();
  c["grid"] = sim.grid();

  Run run(g, "simulate", c, {{"anisotropy", c["anisotropy_seed"]}, {"ic", c["ic"]}});
  const SpectralState z0 = initial_state(lat, c["ic"].get<std::string>(), c["eps"].get<double>(), sc.s);
  const Trajectory tr = run_trajectory(sim, z0, sc);
  auto os = run.open("series.csv");
  os << "t,H,Z2,N_s,norm\n";
  for (const auto& o : tr.series)
    os << fmt(o.t) << ',' << fmt(o.H) << ',' << fmt(o.Z2) << ',' << fmt(o.Ns) << ',' << fmt(o.norm) << '\n';
  os.close();
  const auto& first = tr.series.front();
  const auto& last = tr.series.back();
  run.finish({{"a", lat->anisotropy().values()},
              {"dealias", "grid M >= max(n, 2) J + 1 (power of two), all products alias-free; grid = " +
                              std::to_string(sim.grid())},
              {"blew_up", tr.blew_up},
              {"blowup_time", tr.blowup_time},
              {"H_relative_drift", std::abs(last.H - first.H) / std::abs(first.H)},
              {"norm_ratio", last.norm / first.norm}});
  if (tr.blew_up) throw NumericError("simulate: trajectory blew up at t = " + fmt(tr.blowup_time));
}

void cmd_lifespan(const Global& g, const Binder& b) {
  LifespanConfig lc;
  json c = resolve(to_json(lc), g, b, "lifespan", "anisotropy_seed");
  update_from_json(c, lc);
  lc.validate();
  Run run(g, "lifespan", c, {{"anisotropy", lc.anisotropy_seed}, {"ic", lc.ic}});
  const LifespanReport r = lifespan_sweep(lc);
  auto os = run.open("lifespan.csv");
  write_csv(os, r);
  os.close();
  run.finish(to_json(r));
}

void print_diagnostics(const NearResonantError& e) {
  std::cerr << "near-resonant keys:\n";
  for (const auto& [key, div] : e.keys()) {
    std::cerr << "  degree " << key.degree() << " divisor " << div << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Birkhoff normal form and simulation toolkit for anisotropic beam equations"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  g.seed_opt = app.add_option("--seed", g.seed, "master seed (anisotropy sampling, Monte Carlo)");
  app.add_option("--out", g.out, "directory that receives run directories")->capture_default_str();
  app.add_option("--config", g.config_file, "JSON config, or a manifest.json to replay");

  std::vector<std::pair<CLI::App*, std::function<void(const Global&, const Binder&)>>> cmds;
  std::vector<std::unique_ptr<Binder>> binders;
  auto sub = [&](const char* name, const char* help, auto fn) {
    CLI::App* s = app.add_subcommand(name, help);
    binders.push_back(std::make_unique<Binder>(s));
    cmds.emplace_back(s, fn);
    return binders.back().get();
  };

  {
    Binder* b = sub("spectrum", "lattice modes, |j|_a^2, frequencies, Sobolev weights", cmd_spectrum);
    b->add<int>("--d", "d", "dimension");
    b->add<int>("--J", "J", "cutoff |j|_inf <= J");
    b->add<double>("--s", "s", "Sobolev index");
  }
  {
    Binder* b = sub("resonances", "zero-momentum tuples with resonance flag and divisor", cmd_resonances);
    b->add<int>("--d", "d", "dimension");
    b->add<int>("--J", "J", "cutoff");
    b->add<int>("--k", "k", "degree");
    b->add<std::vector<std::string>>("--filter", "filter", "nonresonant | resonant | mu2-le:N | sign:+-..");
    b->add<std::size_t>("--limit", "limit", "maximum number of tuples");
  }
  {
    Binder* b = sub("smalldiv", "Monte Carlo small-divisor measures and a divisor survey", cmd_smalldiv);
    b->add<int>("--k", "k", "degree");
    b->add<int>("--J", "J", "cutoff");
    b->add<int>("--d", "d", "dimension");
    b->add<double>("--gamma", "gamma", "threshold on |divisor|");
    b->add<std::size_t>("--samples", "samples", "Monte Carlo samples per tuple");
    b->add<std::vector<std::string>>("--filter", "filter", "nonresonant | mu2-le:N | sign:+-..");
    b->add<std::size_t>("--max-tuples", "max_tuples", "refuse to measure more tuples than this");
    b->add<double>("--bucket-width", "bucket_width", "survey mu_1 bucket width");
    b->add<double>("--crossover", "crossover", "survey: lowest mu_1 bucket in the +1 trend test");
    b->add<std::uint64_t>("--anisotropy-seed", "anisotropy_seed", "seed of the surveyed anisotropy");
    b->add<int>("--workers", "workers", "Monte Carlo threads");
  }
  {
    Binder* b = sub("bnf", "Birkhoff normal form summary", cmd_bnf);
    b->add<int>("--d", "d", "dimension");
    b->add<int>("--n", "n", "degree of the nonlinearity");
    b->add<int>("--r", "r", "total order (0 selects M_tilde)");
    b->add<double>("--N", "N", "truncation on mu_2");
    b->add<int>("--J", "J", "cutoff");
    b->add<double>("--s", "s", "Sobolev index for the modified energy");
    b->add<double>("--lambda", "lambda", "coefficient of psi^n / n");
    b->add<std::string>("--policy", "policy", "retain | abort on near-resonant divisors");
    b->add<int>("--degree-cap", "degree_cap", "highest degree kept (0 selects r - 1)");
    b->add<double>("--N1", "N1", "also build the modified energy with this N1");
    b->add<int>("--workers", "workers", "bracket threads");
    b->flag("--dump", "dump", "write every polynomial to <name>_<degree>.poly");
  }
  {
    Binder* b = sub("energy-drift", "N_s drift against modified-energy drift along a trajectory", cmd_energy_drift);
    b->add<int>("--d", "d", "dimension");
    b->add<int>("--n", "n", "degree of the nonlinearity");
    b->add<int>("--J", "J", "cutoff");
    b->add<double>("--s", "s", "Sobolev index");
    b->add<double>("--lambda", "lambda", "coefficient of psi^n / n");
    b->add<double>("--eps", "eps", "initial H^s size");
    b->add<double>("--t-end", "t_end", "final time");
    b->add<double>("--dt", "dt", "time step");
    b->add<std::string>("--scheme", "scheme", "strang | yoshida4");
    b->add<int>("--samples", "samples", "number of drift samples");
    b->add<std::string>("--ic", "ic", "single-mode:j1,..,jd | random-band:seed[:band]");
    b->add<double>("--N", "N", "normal form truncation");
    b->add<double>("--N1", "N1", "modified energy truncation");
    b->add<std::string>("--policy", "policy", "retain | abort");
    b->add<int>("--workers", "workers", "bracket threads");
  }
  {
    Binder* b = sub("simulate", "integrate the beam equation", cmd_simulate);
    b->add<int>("--d", "d", "dimension");
    b->add<int>("--n", "n", "degree of the nonlinearity");
    b->add<double>("--lambda", "lambda", "coefficient of psi^n / n");
    b->add<int>("--J", "J", "cutoff");
    b->add<int>("--grid", "grid", "grid points per dimension (0: smallest alias-free)");
    b->add<double>("--dt", "dt", "time step");
    b->add<double>("--t-end", "t_end", "final time");
    b->add<double>("--s", "s", "Sobolev index of the reported norm");
    b->add<double>("--eps", "eps", "initial H^s size");
    b->add<std::string>("--ic", "ic", "single-mode:j1,..,jd | random-band:seed[:band]");
    b->add<std::string>("--scheme", "scheme", "strang | yoshida4");
    b->add<int>("--output-every", "output_every", "record every this many steps");
  }
  {
    Binder* b = sub("lifespan", "time to doubling of the H^s norm over an eps grid", cmd_lifespan);
    b->add<int>("--d", "d", "dimension");
    b->add<int>("--n", "n", "degree of the nonlinearity");
    b->add<int>("--J", "J", "cutoff");
    b->add<double>("--s", "s", "Sobolev index");
    b->add<double>("--lambda", "lambda", "coefficient of psi^n / n");
    b->add<std::vector<double>>("--eps", "eps", "decreasing eps grid");
    b->add<double>("--t-budget", "t_budget", "censoring time");
    b->add<double>("--dt", "dt", "time step");
    b->add<std::string>("--scheme", "scheme", "strang | yoshida4");
    b->add<std::string>("--ic", "ic", "initial datum");
    b->add<int>("--grid", "grid", "grid points per dimension");
    b->add<int>("--workers", "workers", "parallel sweep points");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
  }

  try {
    for (std::size_t i = 0; i < cmds.size(); ++i)
      if (cmds[i].first->parsed()) cmds[i].second(g, *binders[i]);
    return 0;
  } catch (const NearResonantError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    print_diagnostics(e);
    return static_cast<int>(e.exit_code());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config);
  } catch (const std::bad_alloc&) {
    std::cerr << "resource limit: out of memory\n";
    return static_cast<int>(ExitCode::resource);
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return static_cast<int>(ExitCode::numeric);
  }
}
