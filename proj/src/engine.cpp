#include "declip/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "declip/errors.hpp"
#include "declip/kernels.hpp"
#include "declip/rng.hpp"

namespace declip {

namespace {

bool all_finite(const Vec& v) {
  for (double c : v)
    if (!std::isfinite(c)) return false;
  return true;
}

std::vector<Vec> make_init(const RunConfig& cfg, int n, int d) {
  switch (cfg.init) {
    case InitKind::zeros:
      return std::vector<Vec>(n, Vec(d, 0.0));
    case InitKind::gaussian: {
      std::vector<Vec> x(n, Vec(d));
      for (int i = 0; i < n; ++i) {
        Rng rng(cfg.seed, 0x1717, static_cast<std::uint64_t>(i));
        for (double& c : x[i]) c = cfg.init_scale * rng.next_gaussian();
      }
      return x;
    }
    case InitKind::custom:
      if (static_cast<int>(cfg.init_custom.size()) != n)
        throw InvalidSizeError("custom init needs one vector per agent");
      for (const auto& v : cfg.init_custom)
        if (static_cast<int>(v.size()) != d) throw DimensionMismatchError("custom init: wrong dim");
      return cfg.init_custom;
  }
  throw InvalidSizeError("unknown init kind");
}

Vec mean_of(const std::vector<Vec>& xs) {
  Vec m(xs[0].size(), 0.0);
  for (const auto& x : xs) axpy(1.0, x, m);
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (double& c : m) c *= inv;
  return m;
}

// Stochastic runs swap the exact local gradient for a minibatch draw; the
// rest of the loop (metrics, step size, gossip, update) is shared so that a
// full-batch stochastic run reproduces the deterministic trace bit for bit.
TrajectoryRecord run_loop(const RunConfig& cfg, bool stochastic) {
  const int n = cfg.topology.mixing.size();
  if (static_cast<int>(cfg.objectives.size()) != n)
    throw InvalidSizeError("need one objective per agent");
  if (cfg.iterations < 1) throw InvalidSizeError("iteration budget must be >= 1");
  const int d = cfg.objectives[0]->dim();
  for (const auto& o : cfg.objectives)
    if (o->dim() != d) throw DimensionMismatchError("objectives disagree on dim");

  if (!stochastic && cfg.rule.kind() != RuleKind::det_clip && cfg.rule.kind() != RuleKind::constant)
    throw InvalidRuleError("deterministic runs take det_clip or constant rules");
  if (stochastic && cfg.rule.kind() == RuleKind::det_clip)
    throw InvalidRuleError("stochastic runs take sto_convex, sto_nonconvex or constant rules");

  std::vector<StochasticOracle> oracles;
  if (stochastic) {
    for (const auto& o : cfg.objectives) {
      auto logistic = std::dynamic_pointer_cast<const LogisticObjective>(o);
      if (!logistic) throw InvalidRuleError("stochastic runs need logistic objectives");
      oracles.emplace_back(logistic, std::min(cfg.batch_size, logistic->num_samples()), cfg.seed);
    }
  }

  AveragedObjective f_avg_obj(cfg.objectives);

  TrajectoryRecord rec;
  rec.rule = cfg.rule.kind();
  rec.num_agents = n;
  rec.dim = d;

  std::optional<Vec> x_star = cfg.x_star;
  if (x_star) {
    rec.f_star = cfg.f_star ? *cfg.f_star : f_avg_obj.value(*x_star);
  }

  NetworkState state;
  state.iterates = make_init(cfg, n, d);
  state.avg = mean_of(state.iterates);
  state.iteration = stochastic ? 1 : 0;  // the stochastic loop is indexed from 1

  if (x_star) {
    double md = 0.0;
    for (const auto& x : state.iterates) md = std::max(md, norm2(sub(x, *x_star)));
    rec.max_init_dist = md;
  }

  const std::int64_t k_first = state.iteration;
  const std::int64_t k_last = k_first + cfg.iterations;
  for (std::int64_t k = k_first; k <= k_last; ++k) {
    // exact gradients at the local iterates and at the average
    std::vector<Vec> grads_local = kernels::per_agent(
        n, [&](int i) { return cfg.objectives[i]->gradient(state.iterates[i]); });
    std::vector<Vec> grads_at_avg =
        kernels::per_agent(n, [&](int i) { return cfg.objectives[i]->gradient(state.avg); });

    GradStats stats;
    std::vector<double> agent_loss(n), agent_grad_norm(n);
    Vec gbar(d, 0.0);
    for (int i = 0; i < n; ++i) {
      stats.max_local_grad_norm = std::max(stats.max_local_grad_norm, norm2(grads_local[i]));
      agent_grad_norm[i] = norm2(grads_at_avg[i]);
      stats.max_avg_grad_norm = std::max(stats.max_avg_grad_norm, agent_grad_norm[i]);
      agent_loss[i] = cfg.objectives[i]->value(state.avg);
      axpy(1.0 / n, grads_at_avg[i], gbar);
    }
    stats.global_grad_norm = norm2(gbar);

    double diversity = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dev = norm2(sub(grads_at_avg[i], gbar));
      diversity += dev * dev / n;
    }
    diversity = std::sqrt(diversity);

    TrajectoryRow row;
    row.k = k;
    row.f_avg = 0.0;
    for (int i = 0; i < n; ++i) row.f_avg += agent_loss[i] / n;
    row.grad_norm_avg = stats.global_grad_norm;
    row.max_local_grad = stats.max_local_grad_norm;
    row.max_avg_grad = stats.max_avg_grad_norm;
    double cerr = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dev = norm2(sub(state.iterates[i], state.avg));
      cerr += dev * dev / n;
    }
    row.consensus_err = cerr;
    if (x_star) row.dist_opt = norm2(sub(state.avg, *x_star));

    if (!std::isfinite(row.f_avg) || !std::isfinite(stats.max_local_grad_norm) ||
        !std::isfinite(stats.max_avg_grad_norm) || !std::isfinite(stats.global_grad_norm)) {
      rec.failed = true;
      rec.failed_k = k;
      rec.failed_agent = -1;
      break;
    }

    if (cfg.curvature_every > 0 && (k - k_first) % cfg.curvature_every == 0)
      row.hess_norm = hessian_norm(f_avg_obj, state.avg, cfg.curvature_tol,
                                   cfg.curvature_max_iter, cfg.seed * 0x9e3779b9ULL + k);

    row.alpha = cfg.rule.alpha(stats, k);
    rec.rows.push_back(row);
    rec.agent_loss_at_avg.push_back(agent_loss);
    rec.agent_grad_norm_at_avg.push_back(agent_grad_norm);
    rec.gradient_diversity.push_back(diversity);

    if (k == k_last) break;

    // gradient used in the update: exact for DGD, minibatch for DSGD
    std::vector<Vec> update_grads;
    if (stochastic) {
      std::vector<StochasticOracle::Draw> draws(n);
#pragma omp parallel for schedule(static)
      for (int i = 0; i < n; ++i) draws[i] = oracles[i].stochastic_gradient(state.iterates[i], i, k);
      update_grads.resize(n);
      std::vector<double> devs(n);
      std::vector<std::vector<int>> batch_log(n);
      for (int i = 0; i < n; ++i) {
        devs[i] = norm2(sub(draws[i].g, grads_local[i]));
        update_grads[i] = std::move(draws[i].g);
        if (cfg.log_batches) batch_log[i] = std::move(draws[i].batch);
      }
      rec.stochastic_deviation.push_back(std::move(devs));
      if (cfg.log_batches) rec.batches.push_back(std::move(batch_log));
    } else {
      update_grads = grads_local;
    }

    std::vector<Vec> mixed = kernels::mix_states(cfg.topology.mixing.weights, state.iterates);
    Vec avg_pred = state.avg;
    for (int i = 0; i < n; ++i) {
      axpy(-row.alpha, update_grads[i], mixed[i]);
      axpy(-row.alpha / n, update_grads[i], avg_pred);
    }

    int bad_agent = -1;
    for (int i = 0; i < n; ++i)
      if (!all_finite(mixed[i])) {
        bad_agent = i;
        break;
      }
    if (bad_agent >= 0) {
      rec.failed = true;
      rec.failed_k = k + 1;
      rec.failed_agent = bad_agent;
      break;
    }

    state.iterates = std::move(mixed);
    state.avg = mean_of(state.iterates);
    state.iteration = k + 1;

    // gossip preserves the average, so the tracked value must follow
    // xbar_{k+1} = xbar_k - alpha_k * mean_i(update_i)
    if (norm2(sub(avg_pred, state.avg)) > 1e-10 * (1.0 + norm2(state.avg)))
      throw NumericalFailureError("average-preservation identity violated");
  }

  rec.final_avg = state.avg;
  return rec;
}

}  // namespace

TrajectoryRecord run_dgd(const RunConfig& cfg) { return run_loop(cfg, false); }

TrajectoryRecord run_dsgd(const RunConfig& cfg) { return run_loop(cfg, true); }

Optimum reference_optimum(const std::vector<ObjectivePtr>& objectives, double tol,
                          std::int64_t max_iter) {
  if (objectives.empty()) throw InvalidSizeError("reference_optimum: no objectives");
  const int d = objectives[0]->dim();

  bool all_quadratic = true;
  for (const auto& o : objectives) {
    const std::string k = o->kind();
    if (k == "quartic" || k == "double_well")
      throw NotConvexError("reference_optimum rejects nonconvex kinds; supply x* directly");
    if (k != "quadratic") all_quadratic = false;
  }

  if (all_quadratic) {
    Matrix a_avg(d, d);
    Vec b_avg(d, 0.0);
    const double inv = 1.0 / static_cast<double>(objectives.size());
    for (const auto& o : objectives) {
      const auto* q = dynamic_cast<const QuadraticObjective*>(o.get());
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) a_avg(i, j) += inv * q->a()(i, j);
        b_avg[i] += inv * q->b()[i];
      }
    }
    AveragedObjective f(objectives);
    Optimum opt;
    opt.x_star = solve_linear(a_avg, b_avg);
    opt.f_star = f.value(opt.x_star);
    return opt;
  }

  // backtracking gradient descent on the averaged objective
  AveragedObjective f(objectives);
  const auto local_curvature = [&](const Vec& at) {
    try {
      return hessian_norm(f, at, 1e-6, 500);
    } catch (const NoConvergenceError&) {
      return 0.0;
    }
  };
  // a vanishing-gradient point with vanishing curvature is the signature of
  // a minimum at infinity (separable logistic, single exponential), not of a
  // finite minimizer
  const auto certify_minimum = [&](const Vec& at) -> Optimum {
    if (local_curvature(at) <= 1e-8)
      throw NoConvergenceError(max_iter);
    return {at, f.value(at)};
  };

  Vec x(d, 0.0);
  double step = 1.0;
  for (std::int64_t it = 0; it < max_iter; ++it) {
    const Vec g = f.gradient(x);
    const double gn = norm2(g);
    if (gn <= tol) return certify_minimum(x);
    const double fx = f.value(x);
    // sufficient-decrease constant 0.3 keeps accepted steps below ~1.4/L,
    // away from the non-contracting edge at 2/L
    step = std::min(step * 2.0, 1e12);
    bool accepted = false;
    while (step >= 1e-18) {
      Vec trial = x;
      axpy(-step, g, trial);
      const double ft = f.value(trial);
      if (std::isfinite(ft) && ft <= fx - 0.3 * step * gn * gn) {
        if (trial == x) break;  // progress no longer representable in f
        x = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // f-differences have saturated in double precision; finish with plain
      // gradient steps sized by the local curvature
      const double h = local_curvature(x);
      if (h <= 1e-8) throw NoConvergenceError(it);
      const double t_fix = 0.9 / h;
      for (; it < max_iter; ++it) {
        const Vec gg = f.gradient(x);
        if (norm2(gg) <= tol) return certify_minimum(x);
        axpy(-t_fix, gg, x);
      }
      throw NoConvergenceError(max_iter);
    }
  }
  throw NoConvergenceError(max_iter);
}

namespace {

void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_csv(const TrajectoryRecord& traj, std::ostream& out) {
  out << "k,alpha,F_avg,grad_norm_avg,max_local_grad,max_avg_grad,consensus_err,hess_norm,dist_opt\n";
  for (const auto& r : traj.rows) {
    out << r.k << ',';
    put(out, r.alpha);
    out << ',';
    put(out, r.f_avg);
    out << ',';
    put(out, r.grad_norm_avg);
    out << ',';
    put(out, r.max_local_grad);
    out << ',';
    put(out, r.max_avg_grad);
    out << ',';
    put(out, r.consensus_err);
    out << ',';
    if (r.hess_norm) put(out, *r.hess_norm);
    out << ',';
    if (r.dist_opt) put(out, *r.dist_opt);
    out << '\n';
  }
}

void write_jsonl(const TrajectoryRecord& traj, std::ostream& out) {
  for (const auto& r : traj.rows) {
    out << "{\"k\":" << r.k << ",\"alpha\":";
    put(out, r.alpha);
    out << ",\"F_avg\":";
    put(out, r.f_avg);
    out << ",\"grad_norm_avg\":";
    put(out, r.grad_norm_avg);
    out << ",\"max_local_grad\":";
    put(out, r.max_local_grad);
    out << ",\"max_avg_grad\":";
    put(out, r.max_avg_grad);
    out << ",\"consensus_err\":";
    put(out, r.consensus_err);
    if (r.hess_norm) {
      out << ",\"hess_norm\":";
      put(out, *r.hess_norm);
    }
    if (r.dist_opt) {
      out << ",\"dist_opt\":";
      put(out, *r.dist_opt);
    }
    out << "}\n";
  }
}

}  // namespace declip
