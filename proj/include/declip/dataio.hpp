#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace declip {

// One labelled sparse sample. Feature indices are 1-based (LIBSVM
// convention), strictly increasing, converted to 0-based only at
// densification. Labels are normalized to +-1.
struct Sample {
  double label = 0.0;
  std::vector<std::pair<int, double>> features;  // (index, value), index >= 1, ascending

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  int dim = 0;  // max feature index present

  bool operator==(const Dataset&) const = default;
};

// A contiguous view of one agent's data. Shards of one dataset are disjoint
// and their union is the dataset.
struct Shard {
  int agent_id = 0;
  int dim = 0;
  std::vector<Sample> samples;
};

// Parse LIBSVM text: one `<label> <idx>:<val> ...` sample per line, blank
// lines and '#' comments skipped. Labels <= 0 map to -1, otherwise +1.
// Indices within a line must be strictly increasing.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm(const std::string& text);
Dataset load_libsvm_file(const std::string& path);

// Inverse of parse_libsvm up to label normalization; values printed with
// %.17g so doubles round-trip exactly.
void serialize_libsvm(const Dataset& ds, std::ostream& out);
std::string serialize_libsvm(const Dataset& ds);

// Two unit-variance Gaussian clusters at +-margin*e1; the first ceil(n/2)
// samples are labelled +1. Deterministic for a fixed seed.
Dataset synth_blobs(int n, int d, double margin, std::uint64_t seed);

enum class ShardScheme { contiguous, round_robin, label_skew };

// Split into n_agents shards whose sizes differ by at most one. label_skew
// stably sorts by label before the contiguous split; alpha is reserved for a
// future Dirichlet skew and currently ignored.
std::vector<Shard> shard_uniform(const Dataset& ds, int n_agents, ShardScheme scheme,
                                 double alpha = 0.0);

// Sparse sample to a length-dim dense vector (0-based).
std::vector<double> densify(const Sample& s, int dim);

// Per-feature max-abs scaling, in place.
void normalize_maxabs(Dataset& ds);

}  // namespace declip
