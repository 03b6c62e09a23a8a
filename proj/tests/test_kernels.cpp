#include <doctest.h>

#include "declip/kernels.hpp"
#include "declip/rng.hpp"

using namespace declip;

// The OpenMP kernels assign each output slot from exactly one thread with a
// fixed per-slot accumulation order, so they must agree with the serial
// reference bit for bit, not just approximately.

TEST_CASE("parallel mix_states is bit-identical to the serial reference") {
  Rng rng(404);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(16));
    const int d = 1 + static_cast<int>(rng.next_below(12));
    Matrix w(n, n);
    for (double& v : w.data) v = rng.next_gaussian();
    std::vector<Vec> states(n, Vec(d));
    for (auto& s : states)
      for (double& c : s) c = rng.next_gaussian();

    const auto par = kernels::mix_states(w, states);
    const auto ser = kernels::mix_states_serial(w, states);
    REQUIRE(par.size() == ser.size());
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < d; ++c) CHECK(par[i][c] == ser[i][c]);
  }
}

TEST_CASE("parallel per_agent matches the serial reference bit for bit") {
  Rng rng(405);
  const int n = 13, d = 7;
  std::vector<Vec> inputs(n, Vec(d));
  for (auto& v : inputs)
    for (double& c : v) c = rng.next_gaussian();
  const auto f = [&](int i) {
    Vec out(d);
    for (int c = 0; c < d; ++c) out[c] = inputs[i][c] * inputs[i][c] + 0.5 * inputs[i][c];
    return out;
  };
  const auto par = kernels::per_agent(n, f);
  const auto ser = kernels::per_agent_serial(n, f);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < d; ++c) CHECK(par[i][c] == ser[i][c]);
}
