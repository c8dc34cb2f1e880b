#pragma once

#include <string>
#include <vector>

#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"
#include "ehmarl/env/types.hpp"

namespace ehmarl::data {

inline constexpr const char* kSeriesHeader = "t,p_e,p_g,p_o,demand_e,demand_g,demand_h,pv";

inline ExogenousSeries parse_series(const std::string& text, const std::string& origin) {
  std::vector<std::string> lines;
  for (auto& l : split(text, '\n')) {
    std::string s(trim(l));
    if (!s.empty()) lines.push_back(std::move(s));
  }
  if (lines.empty()) throw LoadError(origin + ": file is empty");
  if (lines.front() != kSeriesHeader) {
    throw LoadError(origin + ": header must be '" + kSeriesHeader + "', got '" + lines.front() + "'");
  }
  if (lines.size() == 1) throw LoadError(origin + ": no data rows");
  ExogenousSeries s;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    const std::string where = origin + ": line " + std::to_string(i + 1);
    if (cells.size() != 8) {
      throw LoadError(where + ": expected 8 columns, found " + std::to_string(cells.size()));
    }
    double v[8];
    for (std::size_t c = 0; c < 8; ++c) {
      if (!parse_double(cells[c], v[c])) throw LoadError(where + ": '" + std::string(trim(cells[c])) + "' is not a number");
    }
    if (v[0] != static_cast<double>(i - 1)) {
      throw LoadError(where + ": slot index " + fmt_double(v[0]) + " out of sequence (expected " +
                      std::to_string(i - 1) + ")");
    }
    s.push_back(SlotData{v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
  }
  if (auto msg = s.check(); !msg.empty()) throw LoadError(origin + ": " + msg);
  return s;
}

inline ExogenousSeries load_series(const std::string& path) { return parse_series(read_file(path), path); }

// Shortest round-trip decimals, so load(write(s)) == s bit for bit.
inline std::string format_series(const ExogenousSeries& s) {
  s.validate();
  std::string out = std::string(kSeriesHeader) + "\n";
  for (std::size_t t = 0; t < s.horizon(); ++t) {
    const SlotData x = s.at(t);
    out += std::to_string(t);
    for (double v : {x.p_e, x.p_g, x.p_o, x.demand_e, x.demand_g, x.demand_h, x.pv}) out += "," + fmt_double(v);
    out += "\n";
  }
  return out;
}

inline void write_series(const std::string& path, const ExogenousSeries& s) { write_file(path, format_series(s)); }

}  // namespace ehmarl::data
