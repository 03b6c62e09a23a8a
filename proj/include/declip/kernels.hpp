#pragma once

#include <functional>
#include <vector>

#include "declip/linalg.hpp"

namespace declip::kernels {

// Data-parallel inner loops, parallelised with OpenMP across agents (each
// output slot is written by exactly one thread, so results are bit-identical
// to the serial reference for any thread count). The *_serial variants are
// the reference implementations used by the tests and the benchmark.

// out_i = sum_j w_ij * states_j
std::vector<Vec> mix_states(const Matrix& w, const std::vector<Vec>& states);
std::vector<Vec> mix_states_serial(const Matrix& w, const std::vector<Vec>& states);

// out_i = f(i), one independent evaluation per agent.
std::vector<Vec> per_agent(int n, const std::function<Vec(int)>& f);
std::vector<Vec> per_agent_serial(int n, const std::function<Vec(int)>& f);

}  // namespace declip::kernels
