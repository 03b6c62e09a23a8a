#include "declip/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "declip/errors.hpp"
#include "declip/rng.hpp"

namespace declip {

namespace {

bool parse_double(const std::string& tok, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(tok, &pos);
    return pos == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_index(const std::string& tok, int& out) {
  if (tok.empty()) return false;
  for (char c : tok)
    if (c < '0' || c > '9') return false;
  try {
    out = std::stoi(tok);
  } catch (const std::exception&) {
    return false;
  }
  return true;
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset ds;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == '#') continue;

    double raw_label = 0.0;
    if (!parse_double(tok, raw_label)) throw MalformedLineError(line_no, "bad label '" + tok + "'");
    Sample s;
    s.label = raw_label <= 0.0 ? -1.0 : 1.0;

    int prev_idx = 0;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw MalformedLineError(line_no, "missing ':' in '" + tok + "'");
      int idx = 0;
      double val = 0.0;
      if (!parse_index(tok.substr(0, colon), idx) || idx < 1)
        throw MalformedLineError(line_no, "bad feature index in '" + tok + "'");
      if (!parse_double(tok.substr(colon + 1), val))
        throw MalformedLineError(line_no, "bad feature value in '" + tok + "'");
      if (idx <= prev_idx)
        throw MalformedLineError(line_no, "feature indices not strictly increasing");
      prev_idx = idx;
      s.features.emplace_back(idx, val);
      ds.dim = std::max(ds.dim, idx);
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw EmptyDatasetError("no samples in input");
  ds.dim = std::max(ds.dim, 1);
  return ds;
}

Dataset parse_libsvm(const std::string& text) {
  std::istringstream in(text);
  return parse_libsvm(in);
}

Dataset load_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyDatasetError("cannot open " + path);
  return parse_libsvm(in);
}

void serialize_libsvm(const Dataset& ds, std::ostream& out) {
  char buf[40];
  for (const auto& s : ds.samples) {
    std::snprintf(buf, sizeof buf, "%.17g", s.label);
    out << buf;
    for (const auto& [idx, val] : s.features) {
      std::snprintf(buf, sizeof buf, "%.17g", val);
      out << ' ' << idx << ':' << buf;
    }
    out << '\n';
  }
}

std::string serialize_libsvm(const Dataset& ds) {
  std::ostringstream out;
  serialize_libsvm(ds, out);
  return out.str();
}

Dataset synth_blobs(int n, int d, double margin, std::uint64_t seed) {
  if (n < 2) throw InvalidSizeError("synth_blobs needs n >= 2");
  if (d < 1) throw InvalidSizeError("synth_blobs needs d >= 1");
  if (margin < 0) throw InvalidSizeError("synth_blobs needs margin >= 0");
  Dataset ds;
  ds.dim = d;
  const int n_pos = (n + 1) / 2;
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.label = i < n_pos ? 1.0 : -1.0;
    const double center = s.label * margin;
    for (int j = 0; j < d; ++j) {
      Rng rng(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
      const double v = (j == 0 ? center : 0.0) + rng.next_gaussian();
      s.features.emplace_back(j + 1, v);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

std::vector<Shard> shard_uniform(const Dataset& ds, int n_agents, ShardScheme scheme, double) {
  const int m = static_cast<int>(ds.samples.size());
  if (n_agents < 1) throw InvalidSizeError("need at least one agent");
  if (n_agents > m) throw TooManyAgentsError("more agents than samples");

  std::vector<Shard> shards(n_agents);
  for (int a = 0; a < n_agents; ++a) {
    shards[a].agent_id = a;
    shards[a].dim = ds.dim;
  }

  switch (scheme) {
    case ShardScheme::round_robin:
      for (int i = 0; i < m; ++i) shards[i % n_agents].samples.push_back(ds.samples[i]);
      break;
    case ShardScheme::contiguous:
    case ShardScheme::label_skew: {
      std::vector<int> order(m);
      for (int i = 0; i < m; ++i) order[i] = i;
      if (scheme == ShardScheme::label_skew)
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
          return ds.samples[a].label < ds.samples[b].label;
        });
      const int base = m / n_agents, extra = m % n_agents;
      int pos = 0;
      for (int a = 0; a < n_agents; ++a) {
        const int count = base + (a < extra ? 1 : 0);
        for (int i = 0; i < count; ++i) shards[a].samples.push_back(ds.samples[order[pos++]]);
      }
      break;
    }
  }
  return shards;
}

std::vector<double> densify(const Sample& s, int dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& [idx, val] : s.features) {
    if (idx > dim) throw DimensionMismatchError("feature index exceeds dim");
    v[idx - 1] = val;
  }
  return v;
}

void normalize_maxabs(Dataset& ds) {
  std::vector<double> maxabs(ds.dim, 0.0);
  for (const auto& s : ds.samples)
    for (const auto& [idx, val] : s.features)
      maxabs[idx - 1] = std::max(maxabs[idx - 1], std::abs(val));
  for (auto& s : ds.samples)
    for (auto& [idx, val] : s.features)
      if (maxabs[idx - 1] > 0.0) val /= maxabs[idx - 1];
}

}  // namespace declip
