#pragma once

// Text form of a height distribution:
//
//   # height-distribution v1, kind=<analytic|sampled>, unit_area=<0|1>
//   lo,hi,c0,c1,...      (analytic: one line per segment)
//   s,f                  (sampled: one line per node)
//
// Numbers are written with 17 significant digits.

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "proxima/distribution.hpp"
#include "proxima/format.hpp"

namespace proxima {

namespace detail {

inline std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view tok, std::size_t line) {
  tok = trim_view(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("not a number: '" + std::string(tok) + "'", line);
  return x;
}

inline std::vector<double> parse_csv_numbers(std::string_view text, std::size_t line) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_double(text.substr(start, end - start), line));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline void write_distribution(std::ostream& os, const HeightDistribution& f) {
  os << "# height-distribution v1, kind=" << (f.is_analytic() ? "analytic" : "sampled")
     << ", unit_area=" << (f.unit_area_normalized() ? 1 : 0) << '\n';
  if (f.is_analytic()) {
    for (const auto& seg : f.segments()) {
      os << fmt17(seg.lo) << ',' << fmt17(seg.hi);
      for (double c : seg.coeffs) os << ',' << fmt17(c);
      os << '\n';
    }
    return;
  }
  const auto& smp = f.sampled_form();
  for (std::size_t i = 0; i < smp.values.size(); ++i)
    os << fmt17(smp.origin + static_cast<double>(i) * smp.bin_width) << ',' << fmt17(smp.values[i]) << '\n';
}

inline HeightDistribution read_distribution(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool analytic = false;
  bool unit = false;
  bool have_header = false;
  std::vector<PolySegment> segs;
  std::vector<double> s, v;
  while (std::getline(is, line)) {
    ++lineno;
    const auto text = detail::trim_view(line);
    if (text.empty()) continue;
    if (!have_header) {
      if (text.rfind("# height-distribution v1", 0) != 0) throw ParseError("missing height-distribution header", lineno);
      if (text.find("kind=analytic") != std::string_view::npos) analytic = true;
      else if (text.find("kind=sampled") == std::string_view::npos) throw ParseError("unknown kind", lineno);
      if (text.find("unit_area=1") != std::string_view::npos) unit = true;
      else if (text.find("unit_area=0") == std::string_view::npos) throw ParseError("missing unit_area flag", lineno);
      have_header = true;
      continue;
    }
    if (text.front() == '#') continue;
    auto nums = detail::parse_csv_numbers(text, lineno);
    if (analytic) {
      if (nums.size() < 3) throw ParseError("segment needs lo,hi and at least one coefficient", lineno);
      segs.push_back({nums[0], nums[1], std::vector<double>(nums.begin() + 2, nums.end())});
    } else {
      if (nums.size() != 2) throw ParseError("sampled row needs exactly s,f", lineno);
      s.push_back(nums[0]);
      v.push_back(nums[1]);
    }
  }
  if (!have_header) throw ParseError("empty distribution file");
  if (analytic) return HeightDistribution::analytic(std::move(segs), unit);
  if (s.size() < 2) throw ParseError("sampled distribution needs at least two nodes");
  const double dx = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  return HeightDistribution::sampled(s.front(), dx, std::move(v), unit);
}

inline std::string to_text(const HeightDistribution& f) {
  std::ostringstream os;
  write_distribution(os, f);
  return os.str();
}

inline HeightDistribution from_text(const std::string& text) {
  std::istringstream is(text);
  return read_distribution(is);
}

}  // namespace proxima
