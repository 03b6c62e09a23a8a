#include "declip/topology.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "declip/errors.hpp"
#include "declip/kernels.hpp"

namespace declip {

namespace {

bool is_connected(const Graph& g) {
  if (g.num_agents <= 0) return false;
  std::vector<char> seen(g.num_agents, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : g.edges) {
      const int v = (a == u) ? b : (b == u ? a : -1);
      if (v >= 0 && !seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == g.num_agents;
}

void validate_mixing(const Graph& g, const Matrix& w) {
  const int n = w.rows;
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      row += w(i, j);
      col += w(j, i);
      if (w(i, j) != w(j, i)) throw NumericalFailureError("mixing matrix not symmetric");
      if (i != j && w(i, j) > 0.0 && !g.has_edge(i, j))
        throw NumericalFailureError("positive weight off the edge set");
    }
    if (std::abs(row - 1.0) > 1e-12 || std::abs(col - 1.0) > 1e-12)
      throw NumericalFailureError("mixing matrix not doubly stochastic");
  }
}

MixingMatrix finish(const Graph& g, Matrix w) {
  validate_mixing(g, w);
  const SpectralStats st = spectral_stats(w);
  if (std::sqrt(st.rho) >= 1.0) throw NumericalFailureError("second eigenvalue not strictly below 1");
  return MixingMatrix{std::move(w), st.rho};
}

}  // namespace

bool Graph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  for (const auto& e : edges)
    if (e.first == i && e.second == j) return true;
  return false;
}

int Graph::degree(int i) const {
  int d = 0;
  for (const auto& e : edges)
    if (e.first == i || e.second == i) ++d;
  return d;
}

Graph build_graph(GraphKind kind, int n, const std::vector<std::pair<int, int>>& custom_edges) {
  if (n < 2) throw InvalidSizeError("graph needs at least 2 agents");
  Graph g;
  g.num_agents = n;
  switch (kind) {
    case GraphKind::fully_connected:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
      break;
    case GraphKind::ring:
      for (int i = 0; i < n; ++i) {
        int a = i, b = (i + 1) % n;
        if (a > b) std::swap(a, b);
        if (!g.has_edge(a, b)) g.edges.emplace_back(a, b);
      }
      break;
    case GraphKind::star:
      for (int i = 1; i < n; ++i) g.edges.emplace_back(0, i);
      break;
    case GraphKind::custom: {
      std::set<std::pair<int, int>> dedup;
      for (auto [a, b] : custom_edges) {
        if (a == b || a < 0 || b < 0 || a >= n || b >= n)
          throw InvalidSizeError("custom edge out of range or self-loop");
        if (a > b) std::swap(a, b);
        dedup.emplace(a, b);
      }
      g.edges.assign(dedup.begin(), dedup.end());
      break;
    }
  }
  if (!is_connected(g)) throw DisconnectedGraphError("graph is not connected");
  return g;
}

SpectralStats spectral_stats(const Matrix& weights) {
  SpectralStats st;
  st.eigenvalues = jacobi_eigenvalues(weights);  // sorted descending by value
  const auto& e = st.eigenvalues;
  st.lambda2_abs = e.size() > 1 ? std::abs(e[1]) : 0.0;
  st.lambdaN_abs = e.size() > 1 ? std::abs(e.back()) : 0.0;
  const double top = std::max(st.lambda2_abs, st.lambdaN_abs);
  st.rho = top * top;
  st.spectral_gap = 1.0 - top;
  return st;
}

MixingMatrix metropolis_weights(const Graph& g) {
  const int n = g.num_agents;
  std::vector<int> deg(n);
  for (int i = 0; i < n; ++i) deg[i] = g.degree(i);
  Matrix w(n, n);
  for (const auto& [i, j] : g.edges) {
    const double v = 1.0 / (1.0 + std::max(deg[i], deg[j]));
    w(i, j) = v;
    w(j, i) = v;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return finish(g, std::move(w));
}

MixingMatrix uniform_weights(const Graph& g) {
  const int n = g.num_agents;
  if (static_cast<int>(g.edges.size()) != n * (n - 1) / 2)
    throw NotCompleteError("uniform weights require the complete graph");
  Matrix w(n, n, 1.0 / n);
  return finish(g, std::move(w));
}

MixingMatrix lazy_ring_weights(const Graph& g) {
  const int n = g.num_agents;
  for (int i = 0; i < n; ++i) {
    int a = i, b = (i + 1) % n;
    if (a > b) std::swap(a, b);
    if (!g.has_edge(a, b)) throw InvalidSizeError("lazy weights require a ring graph");
  }
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 0.5;
    w(i, (i + 1) % n) += 0.25;
    w(i, (i + n - 1) % n) += 0.25;  // accumulates onto the same entry when n == 2
  }
  return finish(g, std::move(w));
}

std::vector<Vec> gossip(const MixingMatrix& m, const std::vector<Vec>& states) {
  const int n = m.size();
  if (static_cast<int>(states.size()) != n) throw DimensionMismatchError("gossip: wrong number of states");
  const std::size_t d = states.empty() ? 0 : states[0].size();
  for (const auto& s : states)
    if (s.size() != d) throw DimensionMismatchError("gossip: state dimensions differ");
  return kernels::mix_states(m.weights, states);
}

Topology make_topology(const std::string& preset, int n,
                       const std::vector<std::pair<int, int>>& custom_edges) {
  Topology t;
  if (n == 1 && preset != "custom") {
    // degenerate single-agent network: every preset collapses to pi = [1]
    t.graph.num_agents = 1;
    Matrix w(1, 1);
    w(0, 0) = 1.0;
    t.mixing = MixingMatrix{std::move(w), 0.0};
    return t;
  }
  if (preset == "fully_connected") {
    t.graph = build_graph(GraphKind::fully_connected, n);
    t.mixing = uniform_weights(t.graph);
  } else if (preset == "ring") {
    t.graph = build_graph(GraphKind::ring, n);
    t.mixing = metropolis_weights(t.graph);
  } else if (preset == "ring_lazy") {
    t.graph = build_graph(GraphKind::ring, n);
    t.mixing = lazy_ring_weights(t.graph);
  } else if (preset == "star") {
    t.graph = build_graph(GraphKind::star, n);
    t.mixing = metropolis_weights(t.graph);
  } else if (preset == "custom") {
    t.graph = build_graph(GraphKind::custom, n, custom_edges);
    t.mixing = metropolis_weights(t.graph);
  } else {
    throw InvalidSizeError("unknown topology preset: " + preset);
  }
  return t;
}

}  // namespace declip
