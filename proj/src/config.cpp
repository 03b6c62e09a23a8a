#include "declip/config.hpp"

#include <fstream>
#include <sstream>

#include "declip/errors.hpp"

namespace declip {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string strip_brackets(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[' && s.back() == ']') s = trim(s.substr(1, s.size() - 2));
  return s;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    cfg.kv_[key] = val;
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get_string(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config field '" + key + "'");
  return unquote(it->second);
}

std::string Config::get_string(const std::string& key, const std::string& dflt) const {
  return has(key) ? get_string(key) : dflt;
}

double Config::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': expected a number, got '" + raw + "'");
  }
}

double Config::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}

std::int64_t Config::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': expected an integer, got '" + raw + "'");
  }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? get_int(key) : dflt;
}

bool Config::get_bool(const std::string& key, bool dflt) const {
  if (!has(key)) return dflt;
  const std::string raw = get_string(key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("field '" + key + "': expected a boolean, got '" + raw + "'");
}

Vec Config::get_vector(const std::string& key) const {
  const std::string raw = strip_brackets(get_string(key));
  Vec v;
  for (const std::string& part : split(raw, ',')) {
    const std::string p = trim(part);
    if (p.empty()) continue;
    try {
      v.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw ConfigError("field '" + key + "': bad vector entry '" + p + "'");
    }
  }
  if (v.empty()) throw ConfigError("field '" + key + "': empty vector");
  return v;
}

std::vector<Vec> Config::get_vector_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<Vec> out;
  for (const std::string& chunk : split(raw, ';')) {
    const std::string c = strip_brackets(trim(chunk));
    if (c.empty()) continue;
    Vec v;
    for (const std::string& part : split(c, ',')) {
      const std::string p = trim(part);
      if (p.empty()) continue;
      try {
        v.push_back(std::stod(p));
      } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': bad vector entry '" + p + "'");
      }
    }
    if (!v.empty()) out.push_back(std::move(v));
  }
  if (out.empty()) throw ConfigError("field '" + key + "': empty vector list");
  return out;
}

std::vector<std::pair<int, int>> Config::get_edge_list(const std::string& key) const {
  std::string raw = trim(get_string(key));
  std::vector<std::pair<int, int>> edges;
  if (!raw.empty() && raw.front() == '[') {
    // [[0,1],[1,2]]
    std::string inner = strip_brackets(raw);
    std::size_t pos = 0;
    while ((pos = inner.find('[')) != std::string::npos) {
      const auto end = inner.find(']', pos);
      if (end == std::string::npos) throw ConfigError("field '" + key + "': unbalanced brackets");
      const auto parts = split(inner.substr(pos + 1, end - pos - 1), ',');
      if (parts.size() != 2) throw ConfigError("field '" + key + "': edge needs two endpoints");
      try {
        edges.emplace_back(std::stoi(trim(parts[0])), std::stoi(trim(parts[1])));
      } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': bad edge endpoints");
      }
      inner = inner.substr(end + 1);
    }
  } else {
    // 0-1, 1-2
    for (const std::string& chunk : split(raw, ',')) {
      const std::string c = trim(chunk);
      if (c.empty()) continue;
      const auto dash = c.find('-');
      if (dash == std::string::npos) throw ConfigError("field '" + key + "': expected i-j edges");
      try {
        edges.emplace_back(std::stoi(trim(c.substr(0, dash))), std::stoi(trim(c.substr(dash + 1))));
      } catch (const std::exception&) {
        throw ConfigError("field '" + key + "': bad edge endpoints");
      }
    }
  }
  if (edges.empty()) throw ConfigError("field '" + key + "': empty edge list");
  return edges;
}

std::vector<std::string> Config::get_name_list(const std::string& key) const {
  std::vector<std::string> names;
  for (const std::string& part : split(get_string(key), ',')) {
    const std::string p = unquote(trim(part));
    if (!p.empty()) names.push_back(p);
  }
  return names;
}

}  // namespace declip
