#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "beamlab/harness.hpp"

namespace beamlab {

using json = nlohmann::json;

inline constexpr const char* kVersion = "beamlab 0.1.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& file);

struct RunManifest {
  std::string command;
  json config = json::object();
  json seeds = json::object();
  std::string version = kVersion;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::map<std::string, std::string> outputs;  // file name -> sha256
  json summary = json::object();

  // First 12 hex digits of sha256(command + canonical config dump).
  std::string config_digest() const;
  json to_json() const;
  static RunManifest from_json(const json& j);
};

std::string utc_timestamp();         // 2026-01-31T12:00:00Z
std::string compact_timestamp();     // 20260131T120000Z

// <base>/<compact timestamp>-<config digest>; a numeric suffix keeps it fresh.
std::filesystem::path make_run_dir(const std::filesystem::path& base, const RunManifest& m);

// Hashes every file listed in m.outputs (relative to dir), stamps `finished`
// and writes dir/manifest.json.
void finalize_manifest(const std::filesystem::path& dir, RunManifest& m);

// Config objects. Readers only override the keys that are present.
json to_json(const LifespanConfig& c);
json to_json(const DriftConfig& c);
json to_json(const SmalldivConfig& c);
void update_from_json(const json& j, LifespanConfig& c);
void update_from_json(const json& j, DriftConfig& c);
void update_from_json(const json& j, SmalldivConfig& c);

json to_json(const LinearFit& f);
json to_json(const LifespanReport& r);
json to_json(const DriftReport& r);  // without the time series
json to_json(const SmalldivReport& r);

void write_csv(std::ostream& os, const LifespanReport& r);
void write_csv(std::ostream& os, const DriftReport& r);
void write_csv(std::ostream& os, const SmalldivReport& r);

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
std::string to_string(NearResonantPolicy p);
NearResonantPolicy policy_from_string(const std::string& s);

}  // namespace beamlab
