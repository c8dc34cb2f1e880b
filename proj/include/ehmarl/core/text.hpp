#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "ehmarl/core/errors.hpp"

namespace ehmarl {

// Shortest representation that parses back to the same double.
inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline double to_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  if (!parse_double(s, v)) {
    throw LoadError(context + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  out << content;
}

// Ordered `key = value` text with '#' comments. Keys are unique.
class KeyValueText {
 public:
  static KeyValueText parse(std::string_view text, const std::string& origin) {
    KeyValueText kv;
    kv.origin_ = origin;
    std::size_t lineno = 0;
    for (const auto& raw : split(text, '\n')) {
      ++lineno;
      std::string_view line = raw;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw LoadError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
      }
      std::string key(trim(line.substr(0, eq)));
      std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw LoadError(origin + ":" + std::to_string(lineno) + ": empty key");
      if (kv.values_.count(key)) {
        throw LoadError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
      }
      kv.values_[key] = value;
      kv.order_.push_back(key);
    }
    return kv;
  }

  static KeyValueText load(const std::string& path) { return parse(read_file(path), path); }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& str(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw LoadError(origin_ + ": missing key '" + key + "'");
    used_.insert({key, true});
    return it->second;
  }

  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }

  double num(const std::string& key) const { return to_double(str(key), origin_ + ": key '" + key + "'"); }

  double num_or(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

  long integer_or(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = num(key);
    if (v != static_cast<double>(static_cast<long>(v))) {
      throw LoadError(origin_ + ": key '" + key + "' must be an integer");
    }
    return static_cast<long>(v);
  }

  // Energy quantity in kWh; accepts a trailing "kWh" or "MWh" unit.
  double energy_kwh(const std::string& key) const {
    std::string_view v = trim(str(key));
    double scale = 1.0;
    auto ends_with = [&](std::string_view suffix) {
      return v.size() >= suffix.size() && v.substr(v.size() - suffix.size()) == suffix;
    };
    if (ends_with("MWh")) {
      scale = 1000.0;
      v = trim(v.substr(0, v.size() - 3));
    } else if (ends_with("kWh")) {
      v = trim(v.substr(0, v.size() - 3));
    }
    return scale * to_double(v, origin_ + ": key '" + key + "'");
  }

  double energy_kwh_or(const std::string& key, double fallback) const {
    return has(key) ? energy_kwh(key) : fallback;
  }

  // Keys that were never read; used to reject typos.
  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& k : order_) {
      if (!used_.count(k)) out.push_back(k);
    }
    return out;
  }

  void reject_unused() const {
    auto extra = unused();
    if (!extra.empty()) throw LoadError(origin_ + ": unknown key '" + extra.front() + "'");
  }

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
  std::vector<std::string> order_;
  mutable std::map<std::string, bool> used_;
};

// FNV-1a, used to fingerprint scenarios so reports can be matched.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[v & 0xF];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace ehmarl
