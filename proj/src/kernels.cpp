#include "declip/kernels.hpp"

namespace declip::kernels {

std::vector<Vec> mix_states(const Matrix& w, const std::vector<Vec>& states) {
  const int n = w.rows;
  const std::size_t d = states.empty() ? 0 : states[0].size();
  std::vector<Vec> out(n, Vec(d, 0.0));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Vec& row = out[i];
    for (int j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      const Vec& s = states[j];
      for (std::size_t c = 0; c < d; ++c) row[c] += wij * s[c];
    }
  }
  return out;
}

std::vector<Vec> mix_states_serial(const Matrix& w, const std::vector<Vec>& states) {
  const int n = w.rows;
  const std::size_t d = states.empty() ? 0 : states[0].size();
  std::vector<Vec> out(n, Vec(d, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) out[i][c] += wij * states[j][c];
    }
  }
  return out;
}

std::vector<Vec> per_agent(int n, const std::function<Vec(int)>& f) {
  std::vector<Vec> out(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

std::vector<Vec> per_agent_serial(int n, const std::function<Vec(int)>& f) {
  std::vector<Vec> out(n);
  for (int i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

}  // namespace declip::kernels
