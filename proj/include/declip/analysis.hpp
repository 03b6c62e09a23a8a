#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "declip/engine.hpp"

namespace declip {

enum class Theorem { T1, T2, T3, T4, C1, C2 };

std::string to_string(Theorem t);

// Outcome of checking one complexity bound on a recorded run: K_required is
// the bound's iteration count for the requested epsilon, K_achieved the
// first iteration at which the run actually met the epsilon-criterion (-1
// if it never did), and satisfied means K_achieved <= K_required.
struct BoundVerdict {
  Theorem theorem = Theorem::T1;
  std::int64_t k_required = 0;
  std::int64_t k_achieved = -1;
  double epsilon = 0.0;
  bool satisfied = false;
  std::map<std::string, double> inputs;
};

std::string verdict_to_json(const BoundVerdict& v);

// Per-step descent check of
//   f_i(xbar_k) - f_i(xbar_{k+1}) >= ||grad f_i(xbar_k)||^2
//                                    / (4 L0 + 6 L1 ||grad f_i(xbar_k)||)
// for every agent. Requires a det_clip trajectory.
struct DescentCheck {
  std::int64_t k = 0;
  int agent = 0;
  double drop = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // drop - bound
  bool pass = false;
};

std::vector<DescentCheck> check_descent_lemma2(const TrajectoryRecord& traj, double l0, double l1,
                                               double slack = 1e-9);

enum class Regime { high, low, mixed };

// Regime-split global descent check: when every agent's gradient norm at
// xbar_k is >= L0/L1 the drop must be at least ||grad F||/(10 L1); when all
// are below, at least ||grad F||^2/(10 L0). Mixed steps are reported but not
// checked.
struct RegimeCheck {
  std::int64_t k = 0;
  Regime regime = Regime::low;
  double drop = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = true;
};

std::vector<RegimeCheck> check_lemma3_regimes(const TrajectoryRecord& traj, double l0, double l1,
                                              double slack = 1e-9);

// ||xbar_k - x*|| nonincreasing, with an absolute per-step slack.
struct MonotoneCheck {
  std::int64_t k = 0;
  double increase = 0.0;
  bool pass = true;
};

std::vector<MonotoneCheck> check_distance_monotone(const TrajectoryRecord& traj,
                                                   double slack = 1e-10);

// K_required expressions, verbatim from the bound statements. Exposed
// separately so they can be pinned against hand-substituted golden values.
std::int64_t theorem1_k_required(double l0, double l1, double r, double f0, double eps);
std::int64_t theorem2_k_required(double l0, double l1, double f0, double eps);
std::int64_t theorem3_k_required(double l0, double l1, double rho, double sigma, double delta,
                                 int n_agents, double r, double eps);
std::int64_t theorem4_k_required(double l0, double l1, double rho, double sigma, double delta,
                                 int n_agents, double f1, double eps);
double corollary_c0(double l1, double rho, double max_init_dist);
std::int64_t corollary1_k_required(double l0, double l1, double rho, double max_init_dist,
                                   double f0, double eps);
std::int64_t corollary2_k_required(double l0, double l1, double rho, double max_init_dist,
                                   double eps);

BoundVerdict verdict_theorem1(const TrajectoryRecord& traj, double l0, double l1, double r,
                              double f0, double eps);
BoundVerdict verdict_theorem2(const TrajectoryRecord& traj, double l0, double l1, double f0,
                              double eps);

// Expectations in the stochastic bounds are estimated by ensemble means over
// independently seeded runs; fewer than `min_ensemble` runs is an error.
BoundVerdict verdict_theorem3(const std::vector<TrajectoryRecord>& ensemble, double l0, double l1,
                              double rho, double sigma, double delta, double f_star, double eps,
                              int min_ensemble = 20);
BoundVerdict verdict_theorem4(const std::vector<TrajectoryRecord>& ensemble, double l0, double l1,
                              double rho, double sigma, double delta, double f_star, double eps,
                              int min_ensemble = 20);

// Spectral-gap-explicit variants of the deterministic bounds, via
// C0 = sqrt(1/(9 (1-sqrt(rho))^2 L1^2) + max_i ||x_i_0 - x*||^2).
// NotApplicable when L1 = 0.
BoundVerdict verdict_corollary1(const TrajectoryRecord& traj, double l0, double l1, double rho,
                                double max_init_dist, double f0, double eps);
BoundVerdict verdict_corollary2(const TrajectoryRecord& traj, double l0, double l1, double rho,
                                double max_init_dist, double eps);

// Empirical stand-ins for the noise constants: sigma_hat is the largest
// realized minibatch deviation, delta_hat the largest realized gradient
// diversity across the ensemble.
struct NoiseStats {
  double sigma_hat = 0.0;
  double delta_hat = 0.0;
};

NoiseStats estimate_noise(const std::vector<TrajectoryRecord>& ensemble);

struct CurvatureStudy {
  std::vector<std::pair<double, double>> pairs;  // (grad_norm, hess_norm)
  SmoothnessFit fit;
};

// Collects (||grad F(xbar_k)||, ||hess F(xbar_k)||) pairs from the sampled
// curvature channel and fits hess ~ L0 + L1 * grad. Needs >= 10 samples.
CurvatureStudy curvature_study(const TrajectoryRecord& traj);

void write_curvature_csv(const std::vector<std::pair<double, double>>& pairs, std::ostream& out);

}  // namespace declip
