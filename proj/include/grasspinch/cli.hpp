#pragma once

// Command-line front end. Exit codes: report status (0 pass, 1 fail,
// 2 hypothesis-not-met, 3 inconclusive), 64 configuration error, 65 unknown
// catalog member.

#include "grasspinch/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace grasspinch {

inline constexpr int kExitConfig = 64;
inline constexpr int kExitCatalog = 65;

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Holomorphic pinching and parallel second fundamental form checks", "grasspinch"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string immersion, configPath, format, outPath;
  std::uint64_t seed = 0;
  int grid = 0;
  auto add_common = [&](CLI::App* sub, bool withImmersion) {
    if (withImmersion) {
      sub->add_option("--immersion", immersion, "catalog id[:params] or a JSON file path");
    }
    sub->add_option("--config", configPath, "JSON run configuration");
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--grid", grid, "base grid density")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--out", outPath, "output path");
  };
  add_common(app.add_subcommand("verify", "run the full verification pipeline"), true);
  add_common(app.add_subcommand("identities", "ambient Grassmannian identity battery"), true);
  add_common(app.add_subcommand("catalog", "list catalog members"), false);
  add_common(app.add_subcommand("integrate", "integrals over the unit tangent bundle"), true);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "grasspinch: " << e.what() << "\n";
    return kExitConfig;
  }
  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const char* name) {
    const CLI::Option* o = sub->get_option_no_throw(name);
    return o && o->count() > 0;
  };

  RunConfig cfg;
  try {
    if (!configPath.empty()) cfg = config_from_file(configPath, cfg);
    cfg.command = sub->get_name();
    if (given("--immersion")) {
      const bool isFile = immersion.find(".json") != std::string::npos ||
                          immersion.find('/') != std::string::npos;
      if (isFile) {
        cfg.immersionFile = immersion;
      } else {
        cfg.immersion = immersion;
        cfg.immersionFile.clear();
      }
    }
    if (given("--seed")) cfg.seed = seed;
    if (given("--grid")) cfg.grid = grid;
    if (given("--format")) cfg.format = format;
    if (given("--out")) cfg.out = outPath;
    validate(cfg);

    const Report rep = run(cfg);
    const std::string json = rep.json.dump(2) + "\n";
    if (cfg.format == "text") {
      out << rep.summary;
      if (!cfg.out.empty()) write_file(cfg.out, json);
    } else {
      const std::string& text = cfg.format == "json" ? json : rep.csv;
      if (cfg.out.empty()) {
        out << text;
      } else {
        write_file(cfg.out, text);
      }
    }
    return exit_code(rep.status);
  } catch (const ConfigError& e) {
    err << "grasspinch: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CatalogError& e) {
    err << "grasspinch: " << e.what() << "\n";
    return kExitCatalog;
  } catch (const std::exception& e) {
    err << "grasspinch: " << e.what() << "\n";
    return exit_code(Status::Fail);
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace grasspinch
