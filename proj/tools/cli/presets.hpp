#pragma once

// Named recipes that expand to full scenario documents. Lengths in nm.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace proxima::cli {

namespace detail {

inline nlohmann::json sphere(double R) { return {{"type", "sphere"}, {"R", R}}; }
inline nlohmann::json dome(double h, double l) { return {{"type", "dome"}, {"h", h}, {"l", l}}; }
inline nlohmann::json pyramid(double h, double l) { return {{"type", "pyramid"}, {"h", h}, {"l", l}}; }
inline nlohmann::json rough(double sigma, double s0, double xi) {
  return {{"type", "rough"}, {"sigma", sigma}, {"s0", s0}, {"xi", xi}};
}
inline nlohmann::json curve(const std::string& name, std::vector<nlohmann::json> layers) {
  return {{"name", name}, {"layers", layers}};
}

// Heat transfer to a deformed 50 µm sphere; `scale` shrinks all modulation
// amplitudes (the inset uses 1/4).
inline nlohmann::json fig2(double scale) {
  const double R = 50000.0, h = 100.0 * scale, sigma = 10.0 * scale;
  return {
      {"kernel", "heat-sio2"},
      {"separations", {{"from", 1}, {"to", 300}, {"per_decade", 60}}},
      {"dref", 300},
      {"far_field_nW", 4200},
      {"curves",
       {curve("smooth", {sphere(R)}), curve("dome", {sphere(R), dome(h, 4.0 * h)}),
        curve("rough-2sigma", {sphere(R), rough(sigma, 2.0 * sigma, 5.0 * sigma)}),
        curve("rough-3sigma", {sphere(R), rough(sigma, 3.0 * sigma, 5.0 * sigma)}),
        curve("pyramid", {sphere(R), pyramid(h, 4.0 * h)})}},
  };
}

}  // namespace detail

inline const std::map<std::string, nlohmann::json>& presets() {
  using detail::curve;
  static const std::map<std::string, nlohmann::json> table{
      // Height distributions of the model surfaces, h = R/10, σ = R/40, s0 = 2σ.
      {"fig1",
       {{"shape_points", 1001},
        {"s_max", 10000},
        {"curves",
         {curve("smooth", {detail::sphere(50000)}), curve("dome", {detail::sphere(50000), detail::dome(5000, 20000)}),
          curve("pyramid", {detail::sphere(50000), detail::pyramid(5000, 20000)}),
          curve("rough", {detail::sphere(50000), detail::rough(1250, 2500, 6250)})}}}},
      {"fig2", detail::fig2(1.0)},
      {"fig2-inset", detail::fig2(0.25)},
      // Three well separated scales, 𝒞 = 1 + 1 + 2, with a ν = 3 kernel.
      {"fig4",
       {{"kernel", {{"preset", "casimir-ideal"}, {"alpha", 1}}},
        {"separations", {{"from", 1}, {"to", 300}, {"per_decade", 60}}},
        {"curves",
         {curve("sphere-dome-pyramid",
                {detail::sphere(100000), detail::dome(1000, 1000), detail::pyramid(100, 100)})}}}},
      // Synthetic cap + pyramid tiling, 1024² nodes over 16 µm.
      {"cap-pyramid",
       {{"surface",
         {{"n", 1024}, {"dx", 15.625}, {"cap_R", 50000}, {"seed", 1}, {"layers", {detail::pyramid(500, 500)}}}}}},
  };
  return table;
}

}  // namespace proxima::cli
