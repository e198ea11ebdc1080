#pragma once

// Config schema "dnls-1" (JSON), CSV result files and the run manifest.
//
// Config keys (required): alpha, beta, gamma, eta, L, N, dt, T, u0 {type, center, width}
// Config keys (optional): schema ("dnls-1"), protocol, scheme (cnab2), dealias (pad2),
//   snapshots (10), levels (5), coarsest_dt (T/2), sweep {param, values, reference (0)}

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "dnls/error.hpp"
#include "dnls/experiments.hpp"

namespace dnls {

inline constexpr std::string_view kSchemaVersion = "dnls-1";
inline constexpr std::string_view kLibraryVersion = "1.0.0";

namespace detail {

using nlohmann::json;

inline double number_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(path, "must be finite");
  return d;
}

inline std::size_t count_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::size_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d >= 0.0 && d == std::floor(d) && d < 1e15) return static_cast<std::size_t>(d);
  }
  throw ParseError(path, "expected a non-negative integer");
}

inline std::string string_at(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ParseError(path, "expected a string");
  return v.get<std::string>();
}

inline void reject_unknown(const json& obj, std::initializer_list<std::string_view> known,
                           const std::string& prefix) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (auto k : known) ok = ok || item.key() == k;
    if (!ok) throw ParseError(prefix + item.key(), "unknown key");
  }
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

}  // namespace detail

/// Parses and validates a "dnls-1" config document.
inline ExperimentConfig parse_config(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("", "config must be a JSON object");

  detail::reject_unknown(doc,
                         {"schema", "alpha", "beta", "gamma", "eta", "L", "N", "dt", "T", "u0",
                          "protocol", "scheme", "dealias", "snapshots", "levels", "coarsest_dt",
                          "sweep"},
                         "");

  std::string missing;
  for (const char* key : {"alpha", "beta", "gamma", "eta", "L", "N", "dt", "T", "u0"})
    if (!doc.contains(key)) missing += missing.empty() ? key : std::string(", ") + key;
  if (!missing.empty()) throw ParseError("", "missing required keys: " + missing);

  if (doc.contains("schema") && detail::string_at(doc, "schema", "schema") != kSchemaVersion)
    throw ParseError("schema", "unsupported schema (expected " + std::string(kSchemaVersion) + ")");

  ExperimentConfig cfg;
  cfg.params.alpha = detail::number_at(doc, "alpha", "alpha");
  cfg.params.beta = detail::number_at(doc, "beta", "beta");
  cfg.params.gamma = detail::number_at(doc, "gamma", "gamma");
  cfg.params.eta = detail::number_at(doc, "eta", "eta");
  cfg.length = detail::number_at(doc, "L", "L");
  cfg.points = detail::count_at(doc, "N", "N");
  cfg.dt = detail::number_at(doc, "dt", "dt");
  cfg.final_time = detail::number_at(doc, "T", "T");

  const auto& u0 = doc.at("u0");
  if (!u0.is_object()) throw ParseError("u0", "expected an object");
  detail::reject_unknown(u0, {"type", "center", "width"}, "u0.");
  if (!u0.contains("type")) throw ParseError("u0.type", "missing required key");
  cfg.u0.type = detail::string_at(u0, "type", "u0.type");
  if (cfg.u0.type != "gaussian" && cfg.u0.type != "zero")
    throw ParseError("u0.type", "expected 'gaussian' or 'zero'");
  if (cfg.u0.type == "gaussian" && !u0.contains("center"))
    throw ParseError("u0.center", "missing required key");
  if (u0.contains("center")) cfg.u0.center = detail::number_at(u0, "center", "u0.center");
  if (u0.contains("width")) cfg.u0.width = detail::number_at(u0, "width", "u0.width");

  if (doc.contains("protocol")) {
    auto p = parse_protocol(detail::string_at(doc, "protocol", "protocol"));
    if (!p) throw ParseError("protocol", "unknown protocol");
    cfg.protocol = *p;
  }
  if (doc.contains("scheme")) {
    const auto name = detail::string_at(doc, "scheme", "scheme");
    if (name != "cnab2" && name != "etd2") throw ParseError("scheme", "expected cnab2 or etd2");
    cfg.scheme = parse_scheme(name);
  }
  if (doc.contains("dealias")) {
    const auto name = detail::string_at(doc, "dealias", "dealias");
    if (name == "pad2") cfg.dealias = Dealias::pad2;
    else if (name == "none") cfg.dealias = Dealias::none;
    else throw ParseError("dealias", "expected pad2 or none");
  }
  if (doc.contains("snapshots")) cfg.snapshots = detail::count_at(doc, "snapshots", "snapshots");
  if (doc.contains("levels")) cfg.levels = detail::count_at(doc, "levels", "levels");
  if (doc.contains("coarsest_dt"))
    cfg.coarsest_dt = detail::number_at(doc, "coarsest_dt", "coarsest_dt");

  if (doc.contains("sweep")) {
    const auto& sw = doc.at("sweep");
    if (!sw.is_object()) throw ParseError("sweep", "expected an object");
    detail::reject_unknown(sw, {"param", "values", "reference"}, "sweep.");
    if (!sw.contains("param")) throw ParseError("sweep.param", "missing required key");
    if (!sw.contains("values")) throw ParseError("sweep.values", "missing required key");
    SweepSpec spec;
    auto which = parse_sweep_parameter(detail::string_at(sw, "param", "sweep.param"));
    if (!which) throw ParseError("sweep.param", "expected eta or beta");
    spec.parameter = *which;
    const auto& values = sw.at("values");
    if (!values.is_array()) throw ParseError("sweep.values", "expected an array of numbers");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_number())
        throw ParseError("sweep.values[" + std::to_string(i) + "]", "expected a number");
      spec.values.push_back(values[i].get<double>());
    }
    if (sw.contains("reference"))
      spec.reference = detail::number_at(sw, "reference", "sweep.reference");
    cfg.sweep = std::move(spec);
  }

  // Key-level invariants first so errors name the offending key.
  if (cfg.params.eta < 0.0) throw ParseError("eta", "must be >= 0");
  if (!(cfg.length > 0.0)) throw ParseError("L", "must be > 0");
  if (cfg.points < 4 || cfg.points % 2 != 0) throw ParseError("N", "must be even and >= 4");
  if (!(cfg.final_time > 0.0)) throw ParseError("T", "must be > 0");
  if (!(cfg.dt > 0.0)) throw ParseError("dt", "must be > 0");
  if (cfg.dt > cfg.final_time) throw ParseError("dt", "dt exceeds T");
  if (!(cfg.u0.width > 0.0)) throw ParseError("u0.width", "must be > 0");
  if (cfg.snapshots < 1) throw ParseError("snapshots", "must be >= 1");
  try {
    cfg.validate();
  } catch (const InvalidInput& e) {
    throw ParseError("", std::string("invalid config: ") + e.what());
  }
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json doc = {
      {"schema", kSchemaVersion},
      {"alpha", cfg.params.alpha},
      {"beta", cfg.params.beta},
      {"gamma", cfg.params.gamma},
      {"eta", cfg.params.eta},
      {"L", cfg.length},
      {"N", cfg.points},
      {"dt", cfg.dt},
      {"T", cfg.final_time},
      {"u0", {{"type", cfg.u0.type}, {"center", cfg.u0.center}, {"width", cfg.u0.width}}},
      {"protocol", to_string(cfg.protocol)},
      {"scheme", to_string(cfg.scheme)},
      {"dealias", to_string(cfg.dealias)},
      {"snapshots", cfg.snapshots},
      {"levels", cfg.levels},
  };
  if (cfg.coarsest_dt) doc["coarsest_dt"] = *cfg.coarsest_dt;
  if (cfg.sweep)
    doc["sweep"] = {{"param", to_string(cfg.sweep->parameter)},
                    {"values", cfg.sweep->values},
                    {"reference", cfg.sweep->reference}};
  return doc;
}

/// Inverse of parse_config on valid configs.
inline std::string serialize_config(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

struct ManifestEntry {
  std::string path;  ///< relative to the output directory
  std::string kind;  ///< convergence | limit | snapshots | manifest
  std::size_t rows = 0;
};

struct LabeledSnapshot {
  std::string label;
  double t = 0.0;
  SpectralField field;
};

using SnapshotSet = std::vector<LabeledSnapshot>;

namespace detail {

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::string_view header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out_ << header << '\n';
  }

  void row(std::initializer_list<std::string> fields) {
    bool first = true;
    for (const auto& f : fields) {
      if (!first) out_ << ',';
      out_ << f;
      first = false;
    }
    out_ << '\n';
    ++rows_;
  }

  std::size_t close() {
    out_.close();
    if (!out_) throw std::runtime_error("write failed: " + path_.string());
    return rows_;
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t rows_ = 0;
};

inline ManifestEntry entry_for(const std::filesystem::path& path, std::string kind,
                               std::size_t rows) {
  return {path.filename().string(), std::move(kind), rows};
}

}  // namespace detail

/// Columns: resolution, abs_error, rel_error, order ("nan" on the first row).
inline ManifestEntry emit_csv(const ConvergenceReport& report, const std::filesystem::path& path) {
  using detail::format_double;
  detail::CsvWriter csv(path, "resolution,abs_error,rel_error,order");
  for (const auto& r : report.rows)
    csv.row({format_double(r.resolution), format_double(r.abs_error), format_double(r.rel_error),
             format_double(r.order)});
  return detail::entry_for(path, "convergence", csv.close());
}

/// Columns: param_value, sup_L2_distance.
inline ManifestEntry emit_csv(const LimitReport& report, const std::filesystem::path& path) {
  using detail::format_double;
  detail::CsvWriter csv(path, "param_value,sup_L2_distance");
  for (std::size_t i = 0; i < report.values.size(); ++i)
    csv.row({format_double(report.values[i]), format_double(report.distances[i])});
  return detail::entry_for(path, "limit", csv.close());
}

/// Columns: x, re_u, im_u, abs_u, t, run_label; one row per grid point per snapshot.
inline ManifestEntry emit_csv(const SnapshotSet& snapshots, const std::filesystem::path& path) {
  using detail::format_double;
  detail::CsvWriter csv(path, "x,re_u,im_u,abs_u,t,run_label");
  for (const auto& snap : snapshots) {
    const auto values = dft_inverse(snap.field);
    const auto& grid = snap.field.grid();
    const auto t = format_double(snap.t);
    for (std::size_t j = 0; j < values.size(); ++j)
      csv.row({format_double(grid.x(j)), format_double(values[j].real()),
               format_double(values[j].imag()), format_double(std::abs(values[j])), t,
               snap.label});
  }
  return detail::entry_for(path, "snapshots", csv.close());
}

inline SnapshotSet snapshots_of(const Trajectory& traj, const std::string& label) {
  SnapshotSet set;
  for (std::size_t m = 0; m < traj.size(); ++m)
    set.push_back({label, traj.times()[m], traj.snapshots()[m]});
  return set;
}

inline std::string platform_fingerprint() {
  std::string os =
#if defined(__linux__)
      "linux";
#elif defined(__APPLE__)
      "darwin";
#elif defined(_WIN32)
      "windows";
#else
      "unknown";
#endif
  std::string compiler =
#if defined(__clang__)
      "clang " __clang_version__;
#elif defined(__GNUC__)
      "gcc " __VERSION__;
#else
      "unknown";
#endif
  return os + "/" + std::to_string(sizeof(void*) * 8) + "-bit/" + compiler + "/fftw " +
         fftw_version;
}

struct RunManifest {
  std::string schema{kSchemaVersion};
  std::string command;
  nlohmann::json config;
  std::vector<ManifestEntry> files;
  double wall_seconds = 0.0;
  std::string platform = platform_fingerprint();
  std::string solver;

  nlohmann::json to_json() const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& f : files) list.push_back({{"path", f.path}, {"kind", f.kind}, {"rows", f.rows}});
    return {{"schema", schema},          {"command", command},
            {"config", config},          {"files", list},
            {"wall_seconds", wall_seconds}, {"platform", platform},
            {"solver", solver},          {"version", kLibraryVersion}};
  }

  /// Writes manifest.json into `dir`, listing itself alongside the data files.
  void write(const std::filesystem::path& dir) {
    files.push_back({"manifest.json", "manifest", 0});
    std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    out << to_json().dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed: " + (dir / "manifest.json").string());
  }
};

}  // namespace dnls
