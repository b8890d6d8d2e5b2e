#pragma once

// Scenario configuration: a JSON document describing the kernel, the
// separation grid and one or more shape stacks ("curves").
//
//   {
//     "kernel": "heat-sio2" | {"preset": "casimir-ideal", "alpha": 1} | {"alpha": a, "nu": n},
//     "separations": [d...] | {"from": 1, "to": 300, "per_decade": 60},
//     "dref": 300, "subtract": true, "beta": 1, "far_field_nW": 4200,
//     "window": [lo, hi], "tolerance": 0.05, "shape_points": 1001, "s_max": 2000,
//     "curves": [{"name": "...", "layers": [{"type": "sphere", "R": 50000}, ...]}],
//     "surface": {...}   // synth only
//   }

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxima/proxima.hpp"

namespace proxima::cli {

using nlohmann::json;

inline constexpr const char* version = "0.1.0";

// Bad configuration; the message starts with the JSON path of the field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what) : Error(path + ": " + what) {}
};

struct Layer {
  std::string type;  // sphere | dome | pyramid | rough | monomial
  double R = 0.0;
  double h = 0.0;
  std::optional<double> l;
  double sigma = 0.0, s0 = 0.0;
  std::optional<double> xi;
  int n = 1;
  double width = 1.0;
};

struct CurveSpec {
  std::string name;
  std::vector<Layer> layers;
};

struct ScenarioConfig {
  json document;  // effective configuration, echoed into every CSV
  Kernel kernel = Kernel::heat_sio2();
  std::vector<double> separations;
  double dref = default_reference_separation;
  bool subtract = true;
  double beta = 1.0;
  std::optional<double> far_field;
  std::optional<FitWindow> window;
  double tolerance = 0.05;
  std::size_t shape_points = 1001;
  std::optional<double> s_max;
  std::vector<CurveSpec> curves;
};

namespace detail {

inline const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  return v.get<double>();
}

inline double positive(const json& obj, const char* key, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) throw ConfigError(path + "." + key, "missing");
  const double x = number(*v, path + "." + key);
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(path + "." + key, "must be positive");
  return x;
}

inline std::optional<double> optional_positive(const json& obj, const char* key, const std::string& path) {
  if (!member(obj, key)) return std::nullopt;
  return positive(obj, key, path);
}

inline Kernel parse_kernel(const json& v) {
  const std::string path = "kernel";
  auto preset = [&](const std::string& name, const json* alpha) -> Kernel {
    if (name == "heat-sio2") return Kernel::heat_sio2();
    if (name == "casimir-ideal") {
      if (!alpha) throw ConfigError(path + ".alpha", "casimir-ideal needs alpha");
      return Kernel::casimir_ideal(number(*alpha, path + ".alpha"));
    }
    throw ConfigError(path, "unknown preset '" + name + "'");
  };
  Kernel k;
  if (v.is_string()) {
    k = preset(v.get<std::string>(), nullptr);
  } else if (v.is_object()) {
    if (const json* p = member(v, "preset")) {
      if (!p->is_string()) throw ConfigError(path + ".preset", "expected a string");
      k = preset(p->get<std::string>(), member(v, "alpha"));
    } else {
      if (!member(v, "alpha") || !member(v, "nu")) throw ConfigError(path, "needs preset or alpha and nu");
      k = Kernel{number(v["alpha"], path + ".alpha"), number(v["nu"], path + ".nu"), "custom"};
    }
  } else {
    throw ConfigError(path, "expected a preset name or an object");
  }
  try {
    validate(k);
  } catch (const InvalidParameter& e) {
    throw ConfigError(path, e.what());
  }
  return k;
}

inline std::vector<double> parse_separations(const json& v) {
  const std::string path = "separations";
  std::vector<double> d;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) d.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
  } else if (v.is_object()) {
    const double from = positive(v, "from", path), to = positive(v, "to", path);
    int per = 60;
    if (const json* p = member(v, "per_decade")) {
      if (!p->is_number_integer() || p->get<int>() < 1) throw ConfigError(path + ".per_decade", "must be a positive integer");
      per = p->get<int>();
    }
    if (to < from) throw ConfigError(path, "'to' must not be below 'from'");
    d = log_spaced(from, to, per);
  } else {
    throw ConfigError(path, "expected a list or {from, to, per_decade}");
  }
  if (d.empty()) throw ConfigError(path, "empty");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw ConfigError(path + "[" + std::to_string(i) + "]", "must be positive");
    if (i && !(d[i] > d[i - 1])) throw ConfigError(path + "[" + std::to_string(i) + "]", "separations must increase");
  }
  return d;
}

inline Layer parse_layer(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  const json* t = member(v, "type");
  if (!t || !t->is_string()) throw ConfigError(path + ".type", "missing layer type");
  Layer layer;
  layer.type = t->get<std::string>();
  if (layer.type == "sphere") {
    layer.R = positive(v, "R", path);
  } else if (layer.type == "dome" || layer.type == "pyramid") {
    layer.h = positive(v, "h", path);
    layer.l = optional_positive(v, "l", path);
  } else if (layer.type == "rough") {
    layer.sigma = positive(v, "sigma", path);
    layer.s0 = member(v, "s0") ? positive(v, "s0", path) : 2.0 * layer.sigma;
    layer.xi = optional_positive(v, "xi", path);
  } else if (layer.type == "monomial") {
    const json* n = member(v, "n");
    if (!n || !n->is_number_integer() || n->get<int>() < 1) throw ConfigError(path + ".n", "must be an integer >= 1");
    layer.n = n->get<int>();
    layer.width = member(v, "width") ? positive(v, "width", path) : 1.0;
  } else {
    throw ConfigError(path + ".type", "unknown layer type '" + layer.type + "'");
  }
  return layer;
}

// Vertical scale of a modulation layer, used for the coarse-to-fine check.
inline double layer_scale(const Layer& l) {
  if (l.type == "dome" || l.type == "pyramid") return l.h;
  if (l.type == "rough") return l.s0 + gaussian_support_sigmas * l.sigma;
  return l.width;
}

inline CurveSpec parse_curve(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected an object");
  CurveSpec c;
  const json* name = member(v, "name");
  if (!name || !name->is_string() || name->get<std::string>().empty()) throw ConfigError(path + ".name", "missing");
  c.name = name->get<std::string>();
  for (char ch : c.name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_'))
      throw ConfigError(path + ".name", "use letters, digits, '-' and '_' only");
  const json* layers = member(v, "layers");
  if (!layers || !layers->is_array() || layers->empty()) throw ConfigError(path + ".layers", "needs at least one layer");
  for (std::size_t i = 0; i < layers->size(); ++i)
    c.layers.push_back(parse_layer((*layers)[i], path + ".layers[" + std::to_string(i) + "]"));
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    const std::string lp = path + ".layers[" + std::to_string(i) + "]";
    if (c.layers[i].type == "sphere" && i != 0) throw ConfigError(lp, "the base curvature layer must come first");
    if (c.layers[i].type == "monomial" && c.layers.size() != 1) throw ConfigError(lp, "monomial stands alone");
    if (i >= 1 && c.layers[i - 1].type != "sphere" && layer_scale(c.layers[i]) > layer_scale(c.layers[i - 1]))
      throw ConfigError(lp, "modulation layers must be ordered coarse to fine");
  }
  return c;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
  ScenarioConfig cfg;
  cfg.document = doc;
  if (const json* k = detail::member(doc, "kernel")) cfg.kernel = detail::parse_kernel(*k);
  cfg.separations = detail::member(doc, "separations") ? detail::parse_separations(doc["separations"])
                                                       : log_spaced(1.0, 300.0, 60);
  if (detail::member(doc, "dref")) cfg.dref = detail::positive(doc, "dref", "<root>");
  if (const json* s = detail::member(doc, "subtract")) {
    if (!s->is_boolean()) throw ConfigError("subtract", "expected true or false");
    cfg.subtract = s->get<bool>();
  }
  if (const json* b = detail::member(doc, "beta")) {
    cfg.beta = detail::number(*b, "beta");
    if (!std::isfinite(cfg.beta)) throw ConfigError("beta", "must be finite");
  }
  cfg.far_field = detail::optional_positive(doc, "far_field_nW", "<root>");
  if (const json* w = detail::member(doc, "window")) {
    if (!w->is_array() || w->size() != 2) throw ConfigError("window", "expected [lo, hi]");
    const double lo = detail::number((*w)[0], "window[0]"), hi = detail::number((*w)[1], "window[1]");
    if (!(lo > 0.0) || !(hi > lo)) throw ConfigError("window", "needs 0 < lo < hi");
    cfg.window = FitWindow{lo, hi};
  }
  if (detail::member(doc, "tolerance")) cfg.tolerance = detail::positive(doc, "tolerance", "<root>");
  if (const json* p = detail::member(doc, "shape_points")) {
    if (!p->is_number_integer() || p->get<long long>() < 2) throw ConfigError("shape_points", "must be an integer >= 2");
    cfg.shape_points = p->get<std::size_t>();
  }
  cfg.s_max = detail::optional_positive(doc, "s_max", "<root>");
  if (const json* c = detail::member(doc, "curves")) {
    if (!c->is_array()) throw ConfigError("curves", "expected a list");
    for (std::size_t i = 0; i < c->size(); ++i)
      cfg.curves.push_back(detail::parse_curve((*c)[i], "curves[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < cfg.curves.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (cfg.curves[i].name == cfg.curves[j].name)
          throw ConfigError("curves[" + std::to_string(i) + "].name", "duplicate name '" + cfg.curves[i].name + "'");
  }
  return cfg;
}

// ---------------------------------------------------------------------------

struct BuiltShape {
  HeightDistribution f;
  std::optional<HeightDistribution> g;  // only when every layer has a lateral length
  std::vector<std::string> notices;
};

namespace detail {

inline HeightDistribution layer_distribution(const Layer& l) {
  if (l.type == "sphere") return sphere_distribution(l.R);
  if (l.type == "dome") return dome_distribution(l.h);
  if (l.type == "pyramid") return pyramid_distribution(l.h, l.l.value_or(l.h), true);
  if (l.type == "rough") return truncated_gaussian_distribution(l.sigma, l.s0);
  return monomial_distribution(l.n, l.width);
}

inline std::optional<HeightDistribution> layer_gradient(const Layer& l) {
  if (l.type == "sphere") return sphere_gradient_density(l.R);
  if (l.type == "dome" && l.l) return dome_gradient_density(l.h, *l.l);
  if (l.type == "pyramid" && l.l) return pyramid_gradient_density(l.h, *l.l, true);
  if (l.type == "rough" && l.xi) return roughness_gradient_density(l.sigma, l.s0, *l.xi);
  return std::nullopt;
}

}  // namespace detail

// Folds the layers left to right with convolve; the gradient density follows
// along as long as every layer provides one.
inline BuiltShape build_shape(const CurveSpec& curve) {
  BuiltShape out{detail::layer_distribution(curve.layers.front()), detail::layer_gradient(curve.layers.front()), {}};
  for (std::size_t i = 1; i < curve.layers.size(); ++i) {
    const auto fm = detail::layer_distribution(curve.layers[i]);
    const auto gm = detail::layer_gradient(curve.layers[i]);
    if (out.g && gm) {
      out.g = compose_gradient(out.f, *out.g, fm, *gm);
    } else {
      out.g.reset();
    }
    out.f = convolve(out.f, fm, &out.notices);
  }
  return out;
}

}  // namespace proxima::cli
