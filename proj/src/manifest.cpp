#include "beamlab/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "beamlab/error.hpp"

namespace beamlab {

namespace fs = std::filesystem;

namespace {

struct MdCtxFree {
  void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw ResourceError("sha256: digest init failed");
  }
  void update(const void* p, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), p, n) != 1) throw ResourceError("sha256: update failed");
  }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw ResourceError("sha256: final failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxFree> ctx_;
};

std::string format_time(const char* fmt) {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

template <class T>
void get_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": config must be a JSON object");
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ResourceError("cannot read " + file.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string RunManifest::config_digest() const { return sha256_hex(command + "\n" + config.dump()).substr(0, 12); }

json RunManifest::to_json() const {
  return json{{"command", command}, {"config", config},     {"seeds", seeds},     {"version", version},
              {"started", started}, {"finished", finished}, {"outputs", outputs}, {"summary", summary}};
}

RunManifest RunManifest::from_json(const json& j) {
  check_object(j, "manifest");
  RunManifest m;
  get_opt(j, "command", m.command);
  if (j.contains("config")) m.config = j.at("config");
  if (j.contains("seeds")) m.seeds = j.at("seeds");
  get_opt(j, "version", m.version);
  get_opt(j, "started", m.started);
  get_opt(j, "finished", m.finished);
  if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  if (j.contains("summary")) m.summary = j.at("summary");
  return m;
}

std::string utc_timestamp() { return format_time("%Y-%m-%dT%H:%M:%SZ"); }
std::string compact_timestamp() { return format_time("%Y%m%dT%H%M%SZ"); }

fs::path make_run_dir(const fs::path& base, const RunManifest& m) {
  const std::string stem = compact_timestamp() + "-" + m.config_digest();
  fs::path dir = base / stem;
  for (int i = 1; fs::exists(dir); ++i) dir = base / (stem + "-" + std::to_string(i));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create run directory " + dir.string() + ": " + ec.message());
  return dir;
}

void finalize_manifest(const fs::path& dir, RunManifest& m) {
  for (auto& [name, digest] : m.outputs) digest = sha256_file(dir / name);
  m.finished = utc_timestamp();
  std::ofstream out(dir / "manifest.json");
  if (!out) throw ResourceError("cannot write manifest in " + dir.string());
  out << m.to_json().dump(2) << "\n";
}

// ------------------------------------------------------------------ enums

std::string to_string(Scheme s) { return s == Scheme::strang ? "strang" : "yoshida4"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "strang") return Scheme::strang;
  if (s == "yoshida4") return Scheme::yoshida4;
  throw ConfigError("unknown scheme '" + s + "' (strang | yoshida4)");
}

std::string to_string(NearResonantPolicy p) { return p == NearResonantPolicy::retain ? "retain" : "abort"; }

NearResonantPolicy policy_from_string(const std::string& s) {
  if (s == "retain") return NearResonantPolicy::retain;
  if (s == "abort") return NearResonantPolicy::abort;
  throw ConfigError("unknown policy '" + s + "' (retain | abort)");
}

// ---------------------------------------------------------------- configs

json to_json(const LifespanConfig& c) {
  return json{{"d", c.d},
              {"n", c.n},
              {"J", c.J},
              {"s", c.s},
              {"lambda", c.lambda},
              {"eps", c.eps},
              {"t_budget", c.t_budget},
              {"dt", c.dt},
              {"scheme", to_string(c.scheme)},
              {"ic", c.ic},
              {"anisotropy_seed", c.anisotropy_seed},
              {"grid", c.grid},
              {"workers", c.workers}};
}

void update_from_json(const json& j, LifespanConfig& c) {
  check_object(j, "lifespan");
  try {
    get_opt(j, "d", c.d);
    get_opt(j, "n", c.n);
    get_opt(j, "J", c.J);
    get_opt(j, "s", c.s);
    get_opt(j, "lambda", c.lambda);
    get_opt(j, "eps", c.eps);
    get_opt(j, "t_budget", c.t_budget);
    get_opt(j, "dt", c.dt);
    if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    get_opt(j, "ic", c.ic);
    get_opt(j, "anisotropy_seed", c.anisotropy_seed);
    get_opt(j, "grid", c.grid);
    get_opt(j, "workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("lifespan config: ") + e.what());
  }
}

json to_json(const DriftConfig& c) {
  return json{{"d", c.d},
              {"n", c.n},
              {"J", c.J},
              {"s", c.s},
              {"lambda", c.lambda},
              {"eps", c.eps},
              {"t_end", c.t_end},
              {"dt", c.dt},
              {"scheme", to_string(c.scheme)},
              {"samples", c.samples},
              {"ic", c.ic},
              {"anisotropy_seed", c.anisotropy_seed},
              {"N", c.N},
              {"N1", c.N1},
              {"workers", c.workers},
              {"flow_tol", c.flow.tol},
              {"policy", to_string(c.policy)}};
}

void update_from_json(const json& j, DriftConfig& c) {
  check_object(j, "energy-drift");
  try {
    get_opt(j, "d", c.d);
    get_opt(j, "n", c.n);
    get_opt(j, "J", c.J);
    get_opt(j, "s", c.s);
    get_opt(j, "lambda", c.lambda);
    get_opt(j, "eps", c.eps);
    get_opt(j, "t_end", c.t_end);
    get_opt(j, "dt", c.dt);
    if (j.contains("scheme")) c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    get_opt(j, "samples", c.samples);
    get_opt(j, "ic", c.ic);
    get_opt(j, "anisotropy_seed", c.anisotropy_seed);
    get_opt(j, "N", c.N);
    get_opt(j, "N1", c.N1);
    get_opt(j, "workers", c.workers);
    get_opt(j, "flow_tol", c.flow.tol);
    if (j.contains("policy")) c.policy = policy_from_string(j.at("policy").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("energy-drift config: ") + e.what());
  }
}

json to_json(const SmalldivConfig& c) {
  return json{{"k", c.k},
              {"d", c.d},
              {"J", c.J},
              {"anisotropy_seed", c.anisotropy_seed},
              {"bucket_width", c.bucket_width},
              {"crossover", c.crossover},
              {"limit", c.limit}};
}

void update_from_json(const json& j, SmalldivConfig& c) {
  check_object(j, "smalldiv");
  try {
    get_opt(j, "k", c.k);
    get_opt(j, "d", c.d);
    get_opt(j, "J", c.J);
    get_opt(j, "anisotropy_seed", c.anisotropy_seed);
    get_opt(j, "bucket_width", c.bucket_width);
    get_opt(j, "crossover", c.crossover);
    get_opt(j, "limit", c.limit);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("smalldiv config: ") + e.what());
  }
}

// ---------------------------------------------------------------- reports

json to_json(const LinearFit& f) {
  return json{{"slope", f.slope},     {"intercept", f.intercept}, {"slope_se", f.slope_se},
              {"ci95", {f.ci_lo, f.ci_hi}}, {"points", f.points}};
}

json to_json(const LifespanReport& r) {
  json pts = json::array();
  for (const auto& p : r.points)
    pts.push_back({{"eps", p.eps},
                   {"T_double", p.T_double},
                   {"censored", p.censored},
                   {"blew_up", p.blew_up},
                   {"blowup_time", p.blowup_time},
                   {"max_norm_ratio", p.max_norm_ratio}});
  json j{{"points", pts}, {"slope", r.slope}, {"a_exponent", r.a_exponent}, {"censored", r.censored},
         {"blowups", r.blowups}};
  if (r.fit) {
    j["fit"] = to_json(*r.fit);
    // band on the lifespan exponent (sign flipped)
    j["slope_ci95"] = {-r.fit->ci_hi, -r.fit->ci_lo};
  }
  return j;
}

json to_json(const DriftReport& r) {
  json res = json::array();
  for (const auto& s : r.residuals) res.push_back({{"stage", s.stage}, {"degree", s.degree}, {"residual", s.residual}});
  json nr = json::array();
  for (const auto& e : r.near_resonant) nr.push_back({{"stage", e.stage}, {"degree", e.degree}, {"divisor", e.divisor}});
  json sup = json::object();
  for (const auto& [k, n] : r.energy_support) sup[std::to_string(k)] = n;
  return json{{"Ns0", r.Ns0},
              {"max_raw", r.max_raw},
              {"max_modified", r.max_modified},
              {"ratio", r.ratio},
              {"normal_form", r.normal_form},
              {"residuals", res},
              {"near_resonant", nr},
              {"energy_support", sup},
              {"H_drift", r.H_drift},
              {"flow_steps", r.flow_steps},
              {"samples", r.t.size()}};
}

json to_json(const SmalldivReport& r) {
  json b = json::array();
  for (const auto& x : r.buckets)
    b.push_back({{"pm", x.pm},
                 {"mu1_lo", x.mu1_lo},
                 {"mu1_hi", x.mu1_hi},
                 {"min_abs_divisor", x.min_abs_divisor},
                 {"mu1_at_min", x.mu1_at_min},
                 {"count", x.count}});
  json j{{"a", r.a.values()},
         {"tuples", r.tuples},
         {"resonant_skipped", r.resonant_skipped},
         {"buckets", b},
         {"reference_exponent", r.reference_exponent},
         {"plus_trend", {{"kendall_tau", r.plus_trend.tau}, {"z", r.plus_trend.z}, {"n", r.plus_trend.n}}}};
  if (r.minus_fit) j["minus_fit"] = to_json(*r.minus_fit);
  return j;
}

void write_csv(std::ostream& os, const LifespanReport& r) {
  os << "eps,T_double,censored,blew_up,blowup_time,max_norm_ratio\n";
  for (const auto& p : r.points)
    os << fmt(p.eps) << ',' << fmt(p.T_double) << ',' << p.censored << ',' << p.blew_up << ','
       << fmt(p.blowup_time) << ',' << fmt(p.max_norm_ratio) << '\n';
}

void write_csv(std::ostream& os, const DriftReport& r) {
  os << "t,Ns_drift,energy_drift\n";
  for (std::size_t i = 0; i < r.t.size(); ++i)
    os << fmt(r.t[i]) << ',' << fmt(r.raw[i]) << ',' << fmt(r.modified[i]) << '\n';
}

void write_csv(std::ostream& os, const SmalldivReport& r) {
  os << "pm,mu1_lo,mu1_hi,min_abs_divisor,mu1_at_min,count\n";
  for (const auto& b : r.buckets)
    os << b.pm << ',' << fmt(b.mu1_lo) << ',' << fmt(b.mu1_hi) << ',' << fmt(b.min_abs_divisor) << ','
       << fmt(b.mu1_at_min) << ',' << b.count << '\n';
}

}  // namespace beamlab
