#pragma once

// dnls {run | validate-linear | converge-time | converge-space | limit | version}
//
// Exit codes: 0 success, 1 I/O or internal failure, 2 usage/config error,
// 3 numerical blow-up (or Picard non-contraction).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dnls/error.hpp"
#include "dnls/experiments.hpp"
#include "dnls/io.hpp"

namespace dnls {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitBlowUp = 3 };

namespace detail {

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::string> scheme;
  std::optional<std::size_t> levels;
  std::optional<std::string> param;
  std::optional<std::string> values;
  std::optional<long long> seed;  // reserved
  bool quiet = false;
};

inline std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto* first = item.data();
    const auto* last = item.data() + item.size();
    while (first != last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) throw ParseError("--values", "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError("--values", "empty list");
  return out;
}

inline ExperimentConfig load_config(const CliOptions& opt) {
  std::ifstream in(opt.config_path, std::ios::binary);
  if (!in) throw ParseError("--config", "cannot read " + opt.config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_config(buf.str());
  if (opt.scheme) {
    if (*opt.scheme != "cnab2" && *opt.scheme != "etd2")
      throw ParseError("--scheme", "expected cnab2 or etd2");
    cfg.scheme = parse_scheme(*opt.scheme);
  }
  if (opt.levels) cfg.levels = *opt.levels;
  return cfg;
}

inline void print_report(std::ostream& out, const ConvergenceReport& report,
                         std::string_view resolution_name) {
  out << std::setw(14) << resolution_name << std::setw(16) << "abs_error" << std::setw(16)
      << "rel_error" << std::setw(10) << "order" << '\n';
  for (const auto& r : report.rows) {
    out << std::setw(14) << std::setprecision(6) << r.resolution << std::setw(16)
        << std::scientific << std::setprecision(4) << r.abs_error << std::setw(16) << r.rel_error
        << std::defaultfloat << std::setw(10) << std::fixed << std::setprecision(4);
    if (std::isnan(r.order)) out << "-";
    else out << r.order;
    out << std::defaultfloat << '\n';
  }
}

inline void run_command(const std::string& command, const CliOptions& opt, std::ostream& out) {
  const auto started = std::chrono::steady_clock::now();
  auto cfg = load_config(opt);

  const std::filesystem::path dir(opt.out_dir);
  std::filesystem::create_directories(dir);

  RunManifest manifest;
  manifest.command = command;
  manifest.solver = std::string(to_string(cfg.scheme)) + "/" + std::string(to_string(cfg.dealias));

  if (command == "run") {
    cfg.protocol = Protocol::run;
    const auto traj = run_simulation(cfg);
    manifest.files.push_back(
        emit_csv(snapshots_of(traj, std::string(to_string(cfg.scheme))), dir / "snapshots.csv"));
    if (!opt.quiet)
      out << "run: " << traj.size() << " snapshots to T = " << traj.times().back()
          << ", final L2 norm " << l2_norm(traj.back()) << '\n';
  } else if (command == "validate-linear") {
    cfg.protocol = Protocol::validate_linear;
    const auto result = validate_linear(cfg, cfg.levels);
    manifest.files.push_back(emit_csv(result.report, dir / "validate_linear.csv"));
    SnapshotSet overlay{{"numerical", cfg.final_time, result.stepped},
                        {"exact", cfg.final_time, result.exact}};
    manifest.files.push_back(emit_csv(overlay, dir / "overlay.csv"));
    if (!opt.quiet) print_report(out, result.report, "dt");
  } else if (command == "converge-time") {
    cfg.protocol = Protocol::converge_time;
    const auto report = converge_time(cfg, cfg.levels);
    manifest.files.push_back(emit_csv(report, dir / "converge_time.csv"));
    if (!opt.quiet) print_report(out, report, "dt");
  } else if (command == "converge-space") {
    cfg.protocol = Protocol::converge_space;
    const auto report = converge_space(cfg, cfg.levels);
    manifest.files.push_back(emit_csv(report, dir / "converge_space.csv"));
    if (!opt.quiet) print_report(out, report, "N");
  } else if (command == "limit") {
    cfg.protocol = Protocol::limit_sweep;
    SweepSpec spec = cfg.sweep.value_or(SweepSpec{});
    if (opt.param) {
      auto which = parse_sweep_parameter(*opt.param);
      if (!which) throw ParseError("--param", "expected eta or beta");
      spec.parameter = *which;
    } else if (!cfg.sweep) {
      throw ParseError("--param", "no sweep parameter given (use --param or a sweep block)");
    }
    if (opt.values) spec.values = parse_value_list(*opt.values);
    if (spec.values.empty()) spec.values = {1.0, 0.5, 0.1, 0.05, 0.01, 0.0};
    try {
      detail::check_sweep_values(spec.values);
    } catch (const InvalidInput& e) {
      throw ParseError("--values", e.what());
    }
    cfg.sweep = spec;
    const auto report = limit_sweep(cfg, spec.parameter, spec.values, spec.reference);
    manifest.files.push_back(emit_csv(report, dir / "limit.csv"));
    SnapshotSet panels;
    const std::string name(to_string(spec.parameter));
    for (std::size_t i = 0; i < report.values.size(); ++i) {
      auto set = snapshots_of(report.runs[i], name + "=" + format_double(report.values[i]));
      panels.insert(panels.end(), set.begin(), set.end());
    }
    manifest.files.push_back(emit_csv(panels, dir / "sweep_snapshots.csv"));
    if (!opt.quiet) {
      out << std::setw(12) << name << std::setw(20) << "sup_L2_distance" << '\n';
      for (std::size_t i = 0; i < report.values.size(); ++i)
        out << std::setw(12) << report.values[i] << std::setw(20) << std::scientific
            << std::setprecision(6) << report.distances[i] << std::defaultfloat << '\n';
    }
  }

  manifest.config = config_to_json(cfg);
  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest.write(dir);
}

}  // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Pseudospectral solver and experiment harness for the derivative NLS equation "
               "with diffusion",
               "dnls"};
  app.require_subcommand(1);

  detail::CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "experiment config (JSON, schema dnls-1)")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    sub->add_option("--scheme", opt.scheme, "time stepper: cnab2 | etd2");
    sub->add_option("--levels", opt.levels, "refinement levels / report rows");
    sub->add_option("--seed", opt.seed, "reserved");
    sub->add_flag("--quiet", opt.quiet, "suppress the summary table");
  };

  std::vector<std::pair<std::string, CLI::App*>> commands;
  for (const char* name : {"run", "validate-linear", "converge-time", "converge-space", "limit"}) {
    auto* sub = app.add_subcommand(name);
    add_common(sub);
    commands.emplace_back(name, sub);
  }
  commands[0].second->description("step one configuration and write snapshots");
  commands[1].second->description("compare linear stepping against the exact semigroup");
  commands[2].second->description("time-step refinement ladder");
  commands[3].second->description("spatial refinement ladder");
  commands[4].second->description("vanishing-parameter sweep");
  commands[4].second->add_option("--param", opt.param, "swept parameter: eta | beta");
  commands[4].second->add_option("--values", opt.values,
                                 "comma-separated, strictly decreasing values");
  auto* version = app.add_subcommand("version", "print schema and build identifiers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "dnls: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  if (version->parsed()) {
    out << "dnls " << kLibraryVersion << " schema " << kSchemaVersion << " ("
        << platform_fingerprint() << ")\n";
    return kExitOk;
  }

  for (const auto& [name, sub] : commands) {
    if (!sub->parsed()) continue;
    try {
      detail::run_command(name, opt, out);
      return kExitOk;
    } catch (const ParseError& e) {
      err << "dnls " << name << ": config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const InvalidInput& e) {
      err << "dnls " << name << ": config error: " << e.what() << '\n';
      return kExitConfig;
    } catch (const BlowUpError& e) {
      err << "dnls " << name << ": blow-up at step " << e.step() << ": " << e.what() << '\n';
      return kExitBlowUp;
    } catch (const NoContraction& e) {
      err << "dnls " << name << ": " << e.what() << '\n';
      return kExitBlowUp;
    } catch (const std::exception& e) {
      err << "dnls " << name << ": " << e.what() << '\n';
      return kExitFailure;
    }
  }
  return kExitConfig;
}

}  // namespace dnls
