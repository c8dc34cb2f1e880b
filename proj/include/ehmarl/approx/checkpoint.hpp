#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ehmarl/approx/params.hpp"
#include "ehmarl/core/errors.hpp"
#include "ehmarl/core/text.hpp"

namespace ehmarl::approx {

// Text checkpoint:
//
//   ehmarl-checkpoint 1
//   layout <observation layout tag>
//   meta <key> <value...>            (any number, order preserved)
//   tensor <name> <rows> <cols>
//   <rows lines of cols values>       (shortest round-trip decimal)
//   ...
//   end
//
// Parameters round-trip bit-exactly.
struct Checkpoint {
  static constexpr const char* kMagic = "ehmarl-checkpoint";
  static constexpr int kVersion = 1;

  struct Tensor {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    std::vector<double> values;  // column-major
  };

  std::string layout;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Tensor> tensors;

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& kv : meta) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    meta.emplace_back(key, value);
  }

  const std::string& get_meta(const std::string& key) const {
    for (const auto& kv : meta) {
      if (kv.first == key) return kv.second;
    }
    throw IncompatibleCheckpoint("checkpoint lacks metadata '" + key + "'");
  }

  bool has_meta(const std::string& key) const {
    for (const auto& kv : meta) {
      if (kv.first == key) return true;
    }
    return false;
  }

  void add_params(const std::string& prefix, const ParamLayout& lay, const ParamVector& p) {
    lay.check(p, "Checkpoint::add_params");
    for (const auto& s : lay.slots()) {
      Tensor t{prefix + s.name, s.rows, s.cols, {}};
      t.values.assign(p.data() + s.offset, p.data() + s.offset + s.size());
      tensors.push_back(std::move(t));
    }
  }

  ParamVector load_params(const std::string& prefix, const ParamLayout& lay) const {
    std::map<std::string, const Tensor*> by_name;
    for (const auto& t : tensors) by_name[t.name] = &t;
    ParamVector p = lay.zeros();
    for (const auto& s : lay.slots()) {
      auto it = by_name.find(prefix + s.name);
      if (it == by_name.end()) throw IncompatibleCheckpoint("checkpoint lacks tensor '" + prefix + s.name + "'");
      if (it->second->rows != s.rows || it->second->cols != s.cols) {
        throw IncompatibleCheckpoint("tensor '" + prefix + s.name + "' has shape " +
                                     std::to_string(it->second->rows) + "x" + std::to_string(it->second->cols) +
                                     ", expected " + std::to_string(s.rows) + "x" + std::to_string(s.cols));
      }
      std::copy(it->second->values.begin(), it->second->values.end(), p.data() + s.offset);
    }
    return p;
  }

  std::string serialize() const {
    std::string out = std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
    out += "layout " + layout + "\n";
    for (const auto& [k, v] : meta) out += "meta " + k + " " + v + "\n";
    for (const auto& t : tensors) {
      out += "tensor " + t.name + " " + std::to_string(t.rows) + " " + std::to_string(t.cols) + "\n";
      for (Eigen::Index r = 0; r < t.rows; ++r) {
        for (Eigen::Index c = 0; c < t.cols; ++c) {
          if (c) out += ' ';
          out += fmt_double(t.values[static_cast<std::size_t>(c * t.rows + r)]);
        }
        out += '\n';
      }
    }
    out += "end\n";
    return out;
  }

  static Checkpoint parse(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != kMagic) throw IncompatibleCheckpoint("not a checkpoint file");
    if (version != kVersion) throw IncompatibleCheckpoint("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ck;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::istringstream ls(line);
      ls >> word;
      if (word == "layout") {
        std::getline(ls >> std::ws, ck.layout);
      } else if (word == "meta") {
        std::string key, value;
        ls >> key;
        std::getline(ls >> std::ws, value);
        ck.meta.emplace_back(key, value);
      } else if (word == "tensor") {
        Tensor t;
        if (!(ls >> t.name >> t.rows >> t.cols) || t.rows <= 0 || t.cols <= 0) {
          throw IncompatibleCheckpoint("malformed tensor header: " + line);
        }
        t.values.assign(static_cast<std::size_t>(t.rows * t.cols), 0.0);
        for (Eigen::Index r = 0; r < t.rows; ++r) {
          std::string row;
          if (!std::getline(in, row)) throw IncompatibleCheckpoint("truncated tensor " + t.name);
          auto cells = split(trim(row), ' ');
          if (static_cast<Eigen::Index>(cells.size()) != t.cols) {
            throw IncompatibleCheckpoint("tensor " + t.name + " row " + std::to_string(r) + " has wrong width");
          }
          for (Eigen::Index c = 0; c < t.cols; ++c) {
            double v = 0.0;
            if (!parse_double(cells[static_cast<std::size_t>(c)], v)) {
              throw IncompatibleCheckpoint("tensor " + t.name + " holds a non-number");
            }
            t.values[static_cast<std::size_t>(c * t.rows + r)] = v;
          }
        }
        ck.tensors.push_back(std::move(t));
      } else if (word == "end") {
        return ck;
      } else {
        throw IncompatibleCheckpoint("unexpected line in checkpoint: " + line);
      }
    }
    throw IncompatibleCheckpoint("checkpoint is missing its end marker");
  }

  void save(const std::string& path) const { write_file(path, serialize()); }

  static Checkpoint load(const std::string& path) {
    std::string text;
    try {
      text = read_file(path);
    } catch (const LoadError& e) {
      throw IncompatibleCheckpoint(e.what());
    }
    return parse(text);
  }
};

}  // namespace ehmarl::approx
