#pragma once

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/commands.hpp"

namespace proxima::cli {

namespace detail {

inline json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("--config", "cannot open '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

// --preset expands first, the file is merged over it, flags win over both.
inline json effective_document(const std::string& preset, const std::string& config) {
  json doc = json::object();
  if (!preset.empty()) {
    const auto it = presets().find(preset);
    if (it == presets().end()) throw ConfigError("--preset", "unknown preset '" + preset + "'");
    doc = it->second;
  }
  if (!config.empty()) {
    const json file = load_config(config);
    if (!file.is_object()) throw ConfigError(config, "top level must be an object");
    doc.merge_patch(file);
  }
  if (preset.empty() && config.empty()) throw ConfigError("--config", "give --config and/or --preset");
  return doc;
}

}  // namespace detail

// Runs the command line; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proximity-approximation interactions of curved, modulated and rough surfaces", "proxima"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version);

  std::string config, preset, out_path;
  std::optional<double> dref, beta;
  auto scenario_options = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON scenario file");
    sub->add_option("--preset", preset, "named recipe: fig1, fig2, fig2-inset, fig4, cap-pyramid");
    sub->add_option("--out", out_path, "output CSV (one file per curve: <stem>_<name>.csv)");
    sub->add_option("--dref", dref, "far-field reference separation [nm]");
    sub->add_option("--beta", beta, "gradient-correction amplitude");
  };
  auto* shape = app.add_subcommand("shape", "tabulate the composed height distribution f(s)");
  auto* sweep_cmd = app.add_subcommand("sweep", "interaction versus separation");
  auto* asympt = app.add_subcommand("asympt", "predicted versus fitted small-d law");
  for (auto* sub : {shape, sweep_cmd, asympt}) scenario_options(sub);

  auto* heightmap = app.add_subcommand("heightmap", "empirical f(s), g(s), Gaussian fit and case of a heightmap");
  HeightmapOptions hopt;
  heightmap->add_option("path", hopt.path, "heightmap file")->required();
  heightmap->add_option("--bins", hopt.bins, "number of separation bins (default 512)")->check(CLI::PositiveNumber);
  heightmap->add_option("--dx", hopt.dx, "grid spacing in x for headerless files [nm]")->check(CLI::PositiveNumber);
  heightmap->add_option("--dy", hopt.dy, "grid spacing in y for headerless files [nm]")->check(CLI::PositiveNumber);
  heightmap->add_option("--case-tol", hopt.case_tol, "relative tolerance for vanishing Taylor coefficients");
  heightmap->add_option("--out", out_path, "output CSV");

  auto* synth = app.add_subcommand("synth", "write a synthetic heightmap");
  std::optional<std::uint64_t> seed;
  synth->add_option("--config", config, "JSON file with a surface section");
  synth->add_option("--preset", preset, "named recipe");
  synth->add_option("--seed", seed, "random seed for rough layers");
  synth->add_option("--out", out_path, "output heightmap");

  auto* list = app.add_subcommand("presets", "list presets, or print one as JSON");
  std::string show;
  list->add_option("name", show, "preset to print");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForVersion&) {
    out << version << '\n';
    return ok;
  } catch (const CLI::ParseError& e) {
    // Sub-command help arrives as CallForHelp through the sub-app.
    if (e.get_exit_code() == 0) {
      out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
      return ok;
    }
    err << "error: " << e.what() << '\n';
    return config_error;
  }

  const std::optional<std::string> out_opt = out_path.empty() ? std::nullopt : std::optional<std::string>(out_path);
  try {
    if (*list) {
      if (show.empty()) {
        for (const auto& [name, doc] : presets()) out << name << '\n';
      } else {
        const auto it = presets().find(show);
        if (it == presets().end()) throw ConfigError("presets", "unknown preset '" + show + "'");
        out << it->second.dump(2) << '\n';
      }
      return ok;
    }
    if (*heightmap) return cmd_heightmap(hopt, out_opt, out);
    json doc = detail::effective_document(preset, config);
    if (*synth) return cmd_synth(doc, seed, out_opt, out);
    if (dref) doc["dref"] = *dref;
    if (beta) doc["beta"] = *beta;
    const auto cfg = parse_scenario(doc);
    if (*shape) return cmd_shape(cfg, out_opt, out);
    if (*sweep_cmd) return cmd_sweep(cfg, out_opt, out);
    return cmd_asympt(cfg, out_opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return config_error;
  } catch (const InvalidParameter& e) {
    err << "invalid parameter: " << e.what() << '\n';
    return config_error;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric_error;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return numeric_error;
  }
}

}  // namespace proxima::cli
