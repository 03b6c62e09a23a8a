#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "declip/objectives.hpp"
#include "declip/stepsize.hpp"
#include "declip/topology.hpp"

namespace declip {

// Stacked iterates of all agents plus the cached network average.
struct NetworkState {
  std::vector<Vec> iterates;
  Vec avg;
  std::int64_t iteration = 0;
};

struct TrajectoryRow {
  std::int64_t k = 0;
  double alpha = 0.0;
  double f_avg = 0.0;           // F(xbar_k)
  double grad_norm_avg = 0.0;   // ||grad F(xbar_k)||
  double max_local_grad = 0.0;  // max_i ||grad f_i(x_i_k)||
  double max_avg_grad = 0.0;    // max_i ||grad f_i(xbar_k)||
  double consensus_err = 0.0;   // (1/N) sum ||x_i_k - xbar_k||^2
  std::optional<double> hess_norm;  // ||hess F(xbar_k)||, sampled every m iterations
  std::optional<double> dist_opt;   // ||xbar_k - x*||, when x* is known
};

// Per-iteration metrics of one run, plus the per-agent channels the
// inequality checkers need. Rows are strictly increasing in k; a run that
// hits a non-finite iterate is truncated and carries a failure marker
// instead of throwing.
struct TrajectoryRecord {
  RuleKind rule = RuleKind::constant;
  int num_agents = 0;
  int dim = 0;
  std::vector<TrajectoryRow> rows;

  // rows.size() x N
  std::vector<std::vector<double>> agent_loss_at_avg;       // f_i(xbar_k)
  std::vector<std::vector<double>> agent_grad_norm_at_avg;  // ||grad f_i(xbar_k)||

  // stochastic runs only: realized deviation ||g_i_k - grad f_i(x_i_k)||
  // per agent and the drawn batch indices
  std::vector<std::vector<double>> stochastic_deviation;
  std::vector<std::vector<std::vector<int>>> batches;

  // sqrt((1/N) sum_i ||grad f_i(xbar_k) - grad F(xbar_k)||^2) per row
  std::vector<double> gradient_diversity;

  bool failed = false;
  std::int64_t failed_k = -1;
  int failed_agent = -1;

  std::optional<double> f_star;
  std::optional<double> max_init_dist;  // max_i ||x_i_0 - x*||
  Vec final_avg;
};

enum class InitKind { zeros, gaussian, custom };

struct RunConfig {
  Topology topology;
  std::vector<ObjectivePtr> objectives;  // one per agent
  StepSizeRule rule = StepSizeRule::constant(1.0);
  std::int64_t iterations = 1;  // K
  std::uint64_t seed = 0;

  InitKind init = InitKind::zeros;
  double init_scale = 1.0;
  std::vector<Vec> init_custom;

  int curvature_every = 0;  // sample ||hess F(xbar)|| every m iterations; 0 = off
  double curvature_tol = 1e-8;
  int curvature_max_iter = 10000;

  std::optional<Vec> x_star;       // reference optimum, enables dist_opt
  std::optional<double> f_star;    // F(x*), computed from x_star when absent

  int batch_size = 1;      // stochastic runs
  bool log_batches = false;
};

// Deterministic gossip + gradient loop, iterations indexed 0..K. Requires a
// det_clip or constant rule. The tracked average is verified online against
// the gossip-preservation identity within 1e-10.
TrajectoryRecord run_dgd(const RunConfig& cfg);

// Stochastic variant, iterations indexed 1..K+1 with minibatch gradients in
// place of exact ones. Requires a sto_convex, sto_nonconvex or constant
// rule and logistic objectives. Bit-reproducible for a fixed seed.
TrajectoryRecord run_dsgd(const RunConfig& cfg);

struct Optimum {
  Vec x_star;
  double f_star = 0.0;
};

// Minimizer of the averaged objective: closed form for quadratics,
// backtracking gradient descent down to ||grad F|| <= tol otherwise.
// Nonconvex kinds (quartic, double_well) are rejected; callers supply x*
// for those directly.
Optimum reference_optimum(const std::vector<ObjectivePtr>& objectives, double tol = 1e-10,
                          std::int64_t max_iter = 2000000);

// CSV with the fixed header
// k,alpha,F_avg,grad_norm_avg,max_local_grad,max_avg_grad,consensus_err,hess_norm,dist_opt
// (empty cells for unsampled optional metrics), and JSON-lines for
// programmatic use.
void write_csv(const TrajectoryRecord& traj, std::ostream& out);
void write_jsonl(const TrajectoryRecord& traj, std::ostream& out);

}  // namespace declip
