#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cli/presets.hpp"
#include "cli/scenario.hpp"

namespace proxima::cli {

enum ExitCode : int { ok = 0, config_error = 2, numeric_error = 3, verification_failure = 4 };

// Where CSV output goes: one file per curve when several curves share --out
// (`<stem>_<name>.csv`), the file itself for a single curve, or stdout.
class CsvSink {
 public:
  CsvSink(std::optional<std::string> out, std::ostream& console) : out_(std::move(out)), console_(console) {}

  bool to_files() const { return out_.has_value(); }

  void write(const std::string& curve, bool several, const std::function<void(std::ostream&)>& body) {
    if (!out_) {
      if (several) console_ << "# curve=" << curve << '\n';
      body(console_);
      return;
    }
    const std::string path = several ? stem_path(curve) : *out_;
    std::ofstream os(path);
    if (!os) throw ConfigError("--out", "cannot write '" + path + "'");
    body(os);
    if (!os) throw ConfigError("--out", "write to '" + path + "' failed");
    written_.push_back(path);
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  std::string stem_path(const std::string& curve) const {
    std::filesystem::path p(*out_);
    const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
    return (p.parent_path() / (p.stem().string() + "_" + curve + ext)).string();
  }

  std::optional<std::string> out_;
  std::ostream& console_;
  std::vector<std::string> written_;
};

inline std::string provenance(const std::string& command, const json& config) {
  return std::string("# proxima ") + version + " command=" + command + " config=" + config.dump();
}

// Console summary goes to stdout only when the data went to files.
inline std::ostream& summary_stream(const CsvSink& sink, std::ostream& console) {
  static std::ostream null_stream(nullptr);
  return sink.to_files() ? console : null_stream;
}

// ---------------------------------------------------------------------------

inline int cmd_shape(const ScenarioConfig& cfg, const std::optional<std::string>& out, std::ostream& console) {
  if (cfg.curves.empty()) throw ConfigError("curves", "no curves to evaluate");
  CsvSink sink(out, console);
  auto& summary = summary_stream(sink, console);
  const bool several = cfg.curves.size() > 1;
  for (const auto& curve : cfg.curves) {
    const auto shape = build_shape(curve);
    const double s_max = cfg.s_max.value_or(shape.f.support_max());
    sink.write(curve.name, several, [&](std::ostream& os) {
      os << provenance("shape", cfg.document) << '\n';
      for (const auto& n : shape.notices) os << "# notice: " << n << '\n';
      os << "s_nm,f_nm" << (shape.g ? ",g_nm" : "") << '\n';
      for (std::size_t i = 0; i < cfg.shape_points; ++i) {
        const double s = s_max * static_cast<double>(i) / static_cast<double>(cfg.shape_points - 1);
        os << fmt17(s) << ',' << fmt17(shape.f(s));
        if (shape.g) os << ',' << fmt17((*shape.g)(s));
        os << '\n';
      }
    });
    summary << curve.name << ": support " << fmt6(shape.f.support_max()) << " nm, area " << fmt6(projected_area(shape.f))
            << (shape.f.unit_area_normalized() ? " (per unit area)" : " nm^2");
    try {
      summary << ", case " << case_number(shape.f).case_number << '\n';
    } catch (const UnclassifiableError&) {
      summary << ", case unclassifiable\n";
    }
  }
  for (const auto& p : sink.written()) summary << "wrote " << p << '\n';
  return ok;
}

inline int cmd_sweep(const ScenarioConfig& cfg, const std::optional<std::string>& out, std::ostream& console) {
  if (cfg.curves.empty()) throw ConfigError("curves", "no curves to evaluate");
  CsvSink sink(out, console);
  auto& summary = summary_stream(sink, console);
  const bool several = cfg.curves.size() > 1;
  const std::optional<double> subtract_at = cfg.subtract ? std::optional<double>(cfg.dref) : std::nullopt;
  for (const auto& curve : cfg.curves) {
    const auto shape = build_shape(curve);
    const auto result = sweep(shape.f, cfg.kernel, cfg.separations, subtract_at, shape.g ? &*shape.g : nullptr,
                              CorrectionConfig{cfg.beta});
    sink.write(curve.name, several, [&](std::ostream& os) {
      os << provenance("sweep", cfg.document) << '\n';
      for (const auto& n : shape.notices) os << "# notice: " << n << '\n';
      write_curve_csv(os, result, cfg.far_field);
    });
    summary << curve.name << ": I(" << fmt6(result.d.front()) << " nm) = " << fmt6(result.values.front()) << " nW";
    if (cfg.far_field) summary << ", far-field ratio " << fmt6(far_field_ratio(result.values.front(), *cfg.far_field));
    summary << '\n';
  }
  for (const auto& p : sink.written()) summary << "wrote " << p << '\n';
  return ok;
}

inline int cmd_asympt(const ScenarioConfig& cfg, const std::optional<std::string>& out, std::ostream& console) {
  if (cfg.curves.empty()) throw ConfigError("curves", "no curves to evaluate");
  std::ostringstream rows;
  rows << provenance("asympt", cfg.document) << '\n' << verification_csv_header << '\n';
  bool all_pass = true;
  for (const auto& curve : cfg.curves) {
    const auto shape = build_shape(curve);
    const auto report = case_number(shape.f);
    const auto predicted = predict(report, cfg.kernel);
    const auto numeric = sweep(shape.f, cfg.kernel, cfg.separations);
    AsymptoticLaw fitted;
    try {
      fitted = fit_scaling(numeric, cfg.window);
    } catch (const FitError& e) {
      throw FitError("curve '" + curve.name + "': " + e.what());
    }
    fitted.case_n = predicted.case_n;
    const auto v = verify(predicted, fitted, cfg.tolerance);
    all_pass = all_pass && v.pass;
    console << "[" << curve.name << "]\n" << v.text;
    rows << csv_row(v, curve.name) << '\n';
  }
  if (out) {
    std::ofstream os(*out);
    if (!os) throw ConfigError("--out", "cannot write '" + *out + "'");
    os << rows.str();
    console << "wrote " << *out << '\n';
  } else {
    console << rows.str();
  }
  return all_pass ? ok : verification_failure;
}

// ---------------------------------------------------------------------------

struct HeightmapOptions {
  std::string path;
  std::optional<std::size_t> bins;
  std::optional<double> dx, dy;
  double case_tol = 1e-2;
};

inline int cmd_heightmap(const HeightmapOptions& opt, const std::optional<std::string>& out, std::ostream& console) {
  std::ifstream is(opt.path);
  if (!is) throw ConfigError("path", "cannot open '" + opt.path + "'");
  const Heightmap hm = shift_to_contact(read_heightmap(is, LoadOptions{opt.dx, opt.dy}));
  const double bw = default_bin_width(hm, opt.bins.value_or(512));
  const auto f = empirical_distribution(hm, bw);
  const auto g = gradient_distribution(hm, bw);

  json effective{{"path", opt.path}, {"bin_width_nm", bw}, {"case_tol", opt.case_tol}};
  if (opt.bins) effective["bins"] = *opt.bins;
  if (opt.dx) effective["dx"] = *opt.dx;
  if (opt.dy) effective["dy"] = *opt.dy;

  std::vector<std::string> lines;
  const bool delta = f.nonempty_bins() <= 1;
  if (delta) {
    lines.push_back("notice: flat surface, the distribution is a single delta peak");
    lines.push_back("case=unclassifiable (delta distribution)");
    lines.push_back("gaussian_fit=skipped (delta distribution)");
  } else {
    CaseOptions copt;
    copt.tol = opt.case_tol;
    copt.degree = 2;
    try {
      lines.push_back("case=" + std::to_string(case_number(f.density(), copt).case_number));
    } catch (const UnclassifiableError& e) {
      lines.push_back(std::string("case=unclassifiable (") + e.what() + ")");
    }
    const auto fit = fit_gaussian(f);
    lines.push_back("gaussian_fit sigma_nm=" + fmt17(fit.sigma) + " s0_nm=" + fmt17(fit.s0) +
                    " residual=" + fmt17(fit.residual));
  }

  auto body = [&](std::ostream& os) {
    os << provenance("heightmap", effective) << '\n';
    os << "# grid nx=" << hm.nx << " ny=" << hm.ny << " dx=" << fmt17(hm.dx) << " dy=" << fmt17(hm.dy)
       << " bin_width_nm=" << fmt17(bw) << '\n';
    for (const auto& l : lines) os << "# " << l << '\n';
    os << "s_nm,f_nm,g_nm\n";
    for (std::size_t k = 0; k < f.weights.size(); ++k)
      os << fmt17(f.center(k)) << ',' << fmt17(f.weights[k] / bw) << ',' << fmt17(g.weights[k] / bw) << '\n';
  };
  if (out) {
    std::ofstream os(*out);
    if (!os) throw ConfigError("--out", "cannot write '" + *out + "'");
    body(os);
    console << opt.path << ": " << hm.nx << "x" << hm.ny << ", max separation " << fmt6(max_separation(hm)) << " nm, "
            << f.weights.size() << " bins\n";
    for (const auto& l : lines) console << l << '\n';
    console << "wrote " << *out << '\n';
  } else {
    body(console);
  }
  return ok;
}

// ---------------------------------------------------------------------------

// {"n": 1024, "dx": 15.625, "cap_R": 50000, "seed": 1,
//  "layers": [{"type": "pyramid" | "dome", "h": .., "l": ..} | {"type": "rough", "sigma": .., "xi": ..}]}
// Rough layers draw from seed + their index.
inline SurfaceSpec parse_surface(const json& doc, std::optional<std::uint64_t> seed_override) {
  const json* s = detail::member(doc, "surface");
  if (!s || !s->is_object()) throw ConfigError("surface", "missing surface section");
  SurfaceSpec spec;
  const json* n = detail::member(*s, "n");
  if (!n || !n->is_number_integer() || n->get<long long>() < 2) throw ConfigError("surface.n", "must be an integer >= 2");
  spec.nx = spec.ny = n->get<std::size_t>();
  spec.dx = spec.dy = detail::positive(*s, "dx", "surface");
  if (detail::member(*s, "cap_R")) spec.cap = SphericalCap{detail::positive(*s, "cap_R", "surface")};
  std::uint64_t seed = 0;
  if (const json* sd = detail::member(*s, "seed")) {
    if (!sd->is_number_integer() || sd->get<long long>() < 0)
      throw ConfigError("surface.seed", "must be a non-negative integer");
    seed = sd->get<std::uint64_t>();
  }
  if (seed_override) seed = *seed_override;
  if (const json* layers = detail::member(*s, "layers")) {
    if (!layers->is_array()) throw ConfigError("surface.layers", "expected a list");
    for (std::size_t i = 0; i < layers->size(); ++i) {
      const std::string path = "surface.layers[" + std::to_string(i) + "]";
      const json& l = (*layers)[i];
      const json* t = l.is_object() ? detail::member(l, "type") : nullptr;
      if (!t || !t->is_string()) throw ConfigError(path + ".type", "missing layer type");
      const auto type = t->get<std::string>();
      if (type == "pyramid") {
        spec.layers.push_back(PyramidTiling{detail::positive(l, "h", path), detail::positive(l, "l", path)});
      } else if (type == "dome") {
        spec.layers.push_back(DomeTiling{detail::positive(l, "h", path), detail::positive(l, "l", path)});
      } else if (type == "rough") {
        spec.layers.push_back(
            GaussianRoughness{detail::positive(l, "sigma", path), detail::positive(l, "xi", path), seed + i});
      } else {
        throw ConfigError(path + ".type", "unknown surface layer '" + type + "'");
      }
    }
  }
  return spec;
}

inline int cmd_synth(const json& doc, std::optional<std::uint64_t> seed, const std::optional<std::string>& out,
                     std::ostream& console) {
  const auto spec = parse_surface(doc, seed);
  Heightmap hm;
  try {
    hm = synthesize_surface(spec);
  } catch (const InvalidParameter& e) {
    throw ConfigError("surface", e.what());
  }
  json effective = doc;
  if (seed) effective["surface"]["seed"] = *seed;
  auto body = [&](std::ostream& os) {
    os << provenance("synth", effective) << '\n';
    write_heightmap(os, hm);
  };
  if (out) {
    std::ofstream os(*out);
    if (!os) throw ConfigError("--out", "cannot write '" + *out + "'");
    body(os);
    console << "wrote " << *out << " (" << hm.nx << "x" << hm.ny << ", max separation " << fmt6(max_separation(hm))
            << " nm)\n";
  } else {
    body(console);
  }
  return ok;
}

}  // namespace proxima::cli
