#pragma once

#include <string>
#include <utility>
#include <vector>

#include "declip/linalg.hpp"

namespace declip {

// Undirected connected communication graph over agents 0..num_agents-1.
// Edges are stored with i < j; self-loops are implicit in the mixing weights.
struct Graph {
  int num_agents = 0;
  std::vector<std::pair<int, int>> edges;

  bool has_edge(int i, int j) const;
  int degree(int i) const;
};

enum class GraphKind { fully_connected, ring, star, custom };

Graph build_graph(GraphKind kind, int n, const std::vector<std::pair<int, int>>& custom_edges = {});

// Symmetric doubly stochastic gossip weights plus cached spectral statistics.
// rho is the squared second-largest eigenvalue magnitude, max{|l2|,|lN|}^2.
struct MixingMatrix {
  Matrix weights;
  double rho = 0.0;

  int size() const { return weights.rows; }
};

struct SpectralStats {
  double lambda2_abs = 0.0;
  double lambdaN_abs = 0.0;
  double rho = 0.0;
  double spectral_gap = 0.0;
  std::vector<double> eigenvalues;  // sorted descending by value
};

SpectralStats spectral_stats(const Matrix& weights);

// Metropolis weights: pi_ij = 1/(1 + max(deg_i, deg_j)) on edges, remainder
// on the diagonal.
MixingMatrix metropolis_weights(const Graph& g);

// 1/N everywhere; valid (doubly stochastic with rho = 0) only on the
// complete graph, otherwise NotComplete.
MixingMatrix uniform_weights(const Graph& g);

// Lazy ring weights: 1/2 self, 1/4 to each ring neighbour. Keeps the whole
// spectrum nonnegative, unlike the Metropolis ring whose smallest eigenvalue
// is -1/3.
MixingMatrix lazy_ring_weights(const Graph& g);

// One gossip round: out_i = sum_j pi_ij * states_j. Preserves the mean of
// the inputs.
std::vector<Vec> gossip(const MixingMatrix& m, const std::vector<Vec>& states);

// Presets named in config files: "fully_connected", "ring", "ring_lazy",
// "star", "custom" (custom requires an edge list).
struct Topology {
  Graph graph;
  MixingMatrix mixing;
};

Topology make_topology(const std::string& preset, int n,
                       const std::vector<std::pair<int, int>>& custom_edges = {});

}  // namespace declip
