#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "declip/linalg.hpp"

namespace declip {

// Flat key-value experiment configs with dotted sections:
//
//   # comment
//   name = "quad5"
//   run.topology = "ring"
//   run.objective.spectrum = 1, 2, 3
//   analysis.checks = theorem1, lemma2
//
// Values are kept as raw text and converted on access; conversion failures
// raise ConfigError naming the key.
class Config {
public:
  static Config parse_string(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;

  // "1, 2.5, 3" (optionally bracketed)
  Vec get_vector(const std::string& key) const;
  // semicolon-separated vectors: "0, 0; 2, 2"
  std::vector<Vec> get_vector_list(const std::string& key) const;
  // "[[0,1],[1,2]]" or "0-1, 1-2"
  std::vector<std::pair<int, int>> get_edge_list(const std::string& key) const;
  // comma-separated names
  std::vector<std::string> get_name_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

private:
  std::map<std::string, std::string> kv_;
};

}  // namespace declip
