#include "declip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "declip/errors.hpp"

namespace declip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t ceil_to_i64(double x) {
  if (!(x >= 0.0)) return 0;
  const double c = std::ceil(x);
  if (c >= 9.2e18) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(c);
}

double log_term(double f0, double eps) {
  // ln(F0/eps), clamped at zero when the run is already eps-accurate
  return f0 > eps ? std::log(f0 / eps) : 0.0;
}

}  // namespace

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3: return "T3";
    case Theorem::T4: return "T4";
    case Theorem::C1: return "C1";
    case Theorem::C2: return "C2";
  }
  return "?";
}

std::string verdict_to_json(const BoundVerdict& v) {
  nlohmann::json j;
  j["theorem"] = to_string(v.theorem);
  j["K_required"] = v.k_required;
  j["K_achieved"] = v.k_achieved;
  j["epsilon"] = v.epsilon;
  j["satisfied"] = v.satisfied;
  j["inputs"] = v.inputs;
  return j.dump();
}

std::vector<DescentCheck> check_descent_lemma2(const TrajectoryRecord& traj, double l0, double l1,
                                               double slack) {
  if (traj.rule != RuleKind::det_clip)
    throw WrongRuleError("lemma-2 descent holds for det_clip trajectories");
  std::vector<DescentCheck> checks;
  for (std::size_t t = 0; t + 1 < traj.rows.size(); ++t) {
    for (int i = 0; i < traj.num_agents; ++i) {
      DescentCheck c;
      c.k = traj.rows[t].k;
      c.agent = i;
      c.drop = traj.agent_loss_at_avg[t][i] - traj.agent_loss_at_avg[t + 1][i];
      const double gn = traj.agent_grad_norm_at_avg[t][i];
      const double denom = 4.0 * l0 + 6.0 * l1 * gn;
      c.bound = denom > 0.0 ? gn * gn / denom : 0.0;
      c.margin = c.drop - c.bound;
      c.pass = c.margin >= -slack;
      checks.push_back(c);
    }
  }
  return checks;
}

std::vector<RegimeCheck> check_lemma3_regimes(const TrajectoryRecord& traj, double l0, double l1,
                                              double slack) {
  if (traj.rule != RuleKind::det_clip)
    throw WrongRuleError("lemma-3 descent holds for det_clip trajectories");
  const double threshold = l1 > 0.0 ? l0 / l1 : kInf;
  std::vector<RegimeCheck> checks;
  for (std::size_t t = 0; t + 1 < traj.rows.size(); ++t) {
    RegimeCheck c;
    c.k = traj.rows[t].k;
    int above = 0;
    for (int i = 0; i < traj.num_agents; ++i)
      if (traj.agent_grad_norm_at_avg[t][i] >= threshold) ++above;
    c.regime = above == 0 ? Regime::low
                          : (above == traj.num_agents ? Regime::high : Regime::mixed);
    c.drop = traj.rows[t].f_avg - traj.rows[t + 1].f_avg;
    const double gn = traj.rows[t].grad_norm_avg;
    if (c.regime == Regime::high) {
      c.bound = gn / (10.0 * l1);
      c.margin = c.drop - c.bound;
      c.pass = c.margin >= -slack;
    } else if (c.regime == Regime::low) {
      c.bound = gn * gn / (10.0 * l0);
      c.margin = c.drop - c.bound;
      c.pass = c.margin >= -slack;
    } else {
      // the split descent statements give no guarantee across regimes
      c.bound = 0.0;
      c.margin = 0.0;
      c.pass = true;
    }
    checks.push_back(c);
  }
  return checks;
}

std::vector<MonotoneCheck> check_distance_monotone(const TrajectoryRecord& traj, double slack) {
  std::vector<MonotoneCheck> checks;
  for (std::size_t t = 0; t + 1 < traj.rows.size(); ++t) {
    if (!traj.rows[t].dist_opt || !traj.rows[t + 1].dist_opt)
      throw MissingOptimumError("distance monotonicity needs dist_opt in the record");
    MonotoneCheck c;
    c.k = traj.rows[t].k;
    c.increase = *traj.rows[t + 1].dist_opt - *traj.rows[t].dist_opt;
    c.pass = c.increase <= slack;
    checks.push_back(c);
  }
  return checks;
}

std::int64_t theorem1_k_required(double l0, double l1, double r, double f0, double eps) {
  const double t_log = l1 > 0.0 ? l1 * r * log_term(f0, eps) : 0.0;
  const double t_l0 = l0 * r * r / eps;
  return ceil_to_i64(10.0 * std::max(t_log, t_l0));
}

std::int64_t theorem2_k_required(double l0, double l1, double f0, double eps) {
  const double x = 10.0 * std::max(l1 * f0 / eps, l0 * f0 / (eps * eps));
  return ceil_to_i64(x) - 1;  // the bound constrains K + 1
}

std::int64_t theorem3_k_required(double l0, double l1, double rho, double sigma, double delta,
                                 int n_agents, double r, double eps) {
  const double gap = 1.0 - std::sqrt(rho);
  const double s2d2 = sigma * sigma + delta * delta;
  const double n = static_cast<double>(n_agents);
  const double term1 = 3.0 * r * r / eps +
                       (288.0 * l1 * l1 + 216.0 * l1) * s2d2 / (gap * gap * eps) +
                       6.0 * sigma * sigma / (n * eps);
  const double term2 = 64.0 * std::pow(r, 4) / (eps * eps) +
                       53.0 * std::pow(l0, 4.0 / 3.0) * std::pow(s2d2, 2.0 / 3.0) /
                           (std::pow(gap, 4.0 / 3.0) * std::pow(eps, 2.0 / 3.0)) +
                       288.0 * l0 * s2d2 / (gap * gap * eps) +
                       64.0 * std::pow(sigma, 4) / (n * n * eps * eps);
  return ceil_to_i64(2.0 * std::max(term1, term2));
}

std::int64_t theorem4_k_required(double l0, double l1, double rho, double sigma, double delta,
                                 int n_agents, double f1, double eps) {
  const double gap = 1.0 - std::sqrt(rho);
  const double c = f1 + 3.0 * (sigma * sigma + delta * delta) / (2.0 * gap * gap) +
                   (5.0 * l0 + 2.0 * l1 * sigma) * sigma * sigma / static_cast<double>(n_agents);
  const double inner = std::max({4.0 * c / std::pow(eps, 4), 144.0 * l1 * sigma / (eps * eps),
                                 64.0 * l1 / eps});
  return ceil_to_i64(c * inner);
}

double corollary_c0(double l1, double rho, double max_init_dist) {
  if (l1 <= 0.0) throw NotApplicableError("C0 is undefined at L1 = 0");
  const double gap = 1.0 - std::sqrt(rho);
  return std::sqrt(1.0 / (9.0 * gap * gap * l1 * l1) + max_init_dist * max_init_dist);
}

std::int64_t corollary1_k_required(double l0, double l1, double rho, double max_init_dist,
                                   double f0, double eps) {
  const double c0 = corollary_c0(l1, rho, max_init_dist);
  const double t_log = std::sqrt(2.0) * l1 * c0 * log_term(f0, eps);
  const double t_l0 = l0 / eps * c0 * c0;
  return ceil_to_i64(10.0 * std::max(t_log, t_l0));
}

std::int64_t corollary2_k_required(double l0, double l1, double rho, double max_init_dist,
                                   double eps) {
  const double c0 = corollary_c0(l1, rho, max_init_dist);
  return ceil_to_i64(
      15.0 * std::max(l0 * l1 * c0 * c0 / eps, l0 * l0 * c0 * c0 / (eps * eps)));
}

namespace {

std::int64_t first_row_with(const TrajectoryRecord& traj,
                            const std::function<bool(const TrajectoryRow&)>& pred) {
  for (const auto& r : traj.rows)
    if (pred(r)) return r.k;
  return -1;
}

BoundVerdict make_verdict(Theorem t, std::int64_t k_req, std::int64_t k_ach, double eps,
                          std::map<std::string, double> inputs) {
  BoundVerdict v;
  v.theorem = t;
  v.k_required = k_req;
  v.k_achieved = k_ach;
  v.epsilon = eps;
  v.satisfied = k_ach >= 0 && k_ach <= k_req;
  v.inputs = std::move(inputs);
  return v;
}

void check_ensemble(const std::vector<TrajectoryRecord>& ensemble, int min_ensemble) {
  if (static_cast<int>(ensemble.size()) < min_ensemble)
    throw InsufficientEnsembleError("need at least " + std::to_string(min_ensemble) + " runs");
  for (const auto& r : ensemble)
    if (r.rows.size() != ensemble[0].rows.size())
      throw InvalidSizeError("ensemble runs must share a common length");
}

}  // namespace

BoundVerdict verdict_theorem1(const TrajectoryRecord& traj, double l0, double l1, double r,
                              double f0, double eps) {
  if (traj.rows.empty()) throw InvalidSizeError("empty trajectory");
  const double f_star = traj.rows[0].f_avg - f0;
  const std::int64_t k_req = theorem1_k_required(l0, l1, r, f0, eps);
  const std::int64_t k_ach =
      first_row_with(traj, [&](const TrajectoryRow& row) { return row.f_avg - f_star <= eps; });
  return make_verdict(Theorem::T1, k_req, k_ach, eps,
                      {{"L0", l0}, {"L1", l1}, {"R", r}, {"F0", f0}});
}

BoundVerdict verdict_theorem2(const TrajectoryRecord& traj, double l0, double l1, double f0,
                              double eps) {
  const std::int64_t k_req = theorem2_k_required(l0, l1, f0, eps);
  const std::int64_t k_ach =
      first_row_with(traj, [&](const TrajectoryRow& row) { return row.grad_norm_avg <= eps; });
  return make_verdict(Theorem::T2, k_req, k_ach, eps, {{"L0", l0}, {"L1", l1}, {"F0", f0}});
}

BoundVerdict verdict_theorem3(const std::vector<TrajectoryRecord>& ensemble, double l0, double l1,
                              double rho, double sigma, double delta, double f_star, double eps,
                              int min_ensemble) {
  check_ensemble(ensemble, min_ensemble);
  const auto& first = ensemble[0];
  if (!first.rows[0].dist_opt)
    throw MissingOptimumError("theorem-3 verdict needs dist_opt (R = ||xbar_1 - x*||)");
  const double r = *first.rows[0].dist_opt;
  const int n_agents = first.num_agents;

  // running average of the ensemble-mean optimality gap
  std::int64_t k_ach = -1;
  double acc = 0.0;
  for (std::size_t t = 0; t < first.rows.size(); ++t) {
    double mean_gap = 0.0;
    for (const auto& run : ensemble) mean_gap += run.rows[t].f_avg - f_star;
    mean_gap /= static_cast<double>(ensemble.size());
    acc += mean_gap;
    if (acc / static_cast<double>(t + 1) <= eps) {
      k_ach = first.rows[t].k;
      break;
    }
  }
  const std::int64_t k_req = theorem3_k_required(l0, l1, rho, sigma, delta, n_agents, r, eps);
  return make_verdict(Theorem::T3, k_req, k_ach, eps,
                      {{"L0", l0},
                       {"L1", l1},
                       {"rho", rho},
                       {"sigma", sigma},
                       {"delta", delta},
                       {"N", static_cast<double>(n_agents)},
                       {"R", r}});
}

BoundVerdict verdict_theorem4(const std::vector<TrajectoryRecord>& ensemble, double l0, double l1,
                              double rho, double sigma, double delta, double f_star, double eps,
                              int min_ensemble) {
  check_ensemble(ensemble, min_ensemble);
  const auto& first = ensemble[0];
  const double f1 = first.rows[0].f_avg - f_star;  // xbar_1 is the common init
  const int n_agents = first.num_agents;

  std::int64_t k_ach = -1;
  for (std::size_t t = 0; t < first.rows.size(); ++t) {
    double mean_norm = 0.0;
    for (const auto& run : ensemble) mean_norm += run.rows[t].grad_norm_avg;
    mean_norm /= static_cast<double>(ensemble.size());
    if (mean_norm <= eps) {
      k_ach = first.rows[t].k;
      break;
    }
  }
  const std::int64_t k_req = theorem4_k_required(l0, l1, rho, sigma, delta, n_agents, f1, eps);
  return make_verdict(Theorem::T4, k_req, k_ach, eps,
                      {{"L0", l0},
                       {"L1", l1},
                       {"rho", rho},
                       {"sigma", sigma},
                       {"delta", delta},
                       {"N", static_cast<double>(n_agents)},
                       {"F1", f1}});
}

BoundVerdict verdict_corollary1(const TrajectoryRecord& traj, double l0, double l1, double rho,
                                double max_init_dist, double f0, double eps) {
  if (traj.rows.empty()) throw InvalidSizeError("empty trajectory");
  const double f_star = traj.rows[0].f_avg - f0;
  const std::int64_t k_req = corollary1_k_required(l0, l1, rho, max_init_dist, f0, eps);
  const std::int64_t k_ach =
      first_row_with(traj, [&](const TrajectoryRow& row) { return row.f_avg - f_star <= eps; });
  return make_verdict(Theorem::C1, k_req, k_ach, eps,
                      {{"L0", l0},
                       {"L1", l1},
                       {"rho", rho},
                       {"max_init_dist", max_init_dist},
                       {"F0", f0}});
}

BoundVerdict verdict_corollary2(const TrajectoryRecord& traj, double l0, double l1, double rho,
                                double max_init_dist, double eps) {
  const std::int64_t k_req = corollary2_k_required(l0, l1, rho, max_init_dist, eps);
  const std::int64_t k_ach =
      first_row_with(traj, [&](const TrajectoryRow& row) { return row.grad_norm_avg <= eps; });
  return make_verdict(Theorem::C2, k_req, k_ach, eps,
                      {{"L0", l0}, {"L1", l1}, {"rho", rho}, {"max_init_dist", max_init_dist}});
}

NoiseStats estimate_noise(const std::vector<TrajectoryRecord>& ensemble) {
  NoiseStats s;
  for (const auto& run : ensemble) {
    for (const auto& devs : run.stochastic_deviation)
      for (double d : devs) s.sigma_hat = std::max(s.sigma_hat, d);
    for (double d : run.gradient_diversity) s.delta_hat = std::max(s.delta_hat, d);
  }
  return s;
}

CurvatureStudy curvature_study(const TrajectoryRecord& traj) {
  CurvatureStudy study;
  for (const auto& r : traj.rows)
    if (r.hess_norm) study.pairs.emplace_back(r.grad_norm_avg, *r.hess_norm);
  if (study.pairs.size() < 10)
    throw TooFewSamplesError("curvature study needs >= 10 sampled iterations");
  study.fit = fit_smoothness(study.pairs);
  return study;
}

void write_curvature_csv(const std::vector<std::pair<double, double>>& pairs, std::ostream& out) {
  char buf[40];
  out << "grad_norm,hess_norm\n";
  for (const auto& [g, h] : pairs) {
    std::snprintf(buf, sizeof buf, "%.17g", g);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", h);
    out << buf << '\n';
  }
}

}  // namespace declip
