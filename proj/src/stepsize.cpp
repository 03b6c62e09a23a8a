#include "declip/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "declip/errors.hpp"

namespace declip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_stats(const GradStats& s) {
  if (std::isnan(s.max_local_grad_norm) || std::isnan(s.max_avg_grad_norm) ||
      std::isnan(s.global_grad_norm))
    throw InvalidStatsError("NaN in gradient statistics");
  if (s.max_local_grad_norm < 0 || s.max_avg_grad_norm < 0 || s.global_grad_norm < 0)
    throw InvalidStatsError("negative gradient statistic");
}

double inv_or_inf(double denom) { return denom > 0.0 ? 1.0 / denom : kInf; }

}  // namespace

std::string to_string(RuleKind k) {
  switch (k) {
    case RuleKind::det_clip: return "det_clip";
    case RuleKind::sto_convex: return "sto_convex";
    case RuleKind::sto_nonconvex: return "sto_nonconvex";
    case RuleKind::constant: return "constant";
  }
  return "?";
}

double det_clip_alpha(double l0, double l1, const GradStats& stats) {
  if (l0 <= 0.0) throw NonPositiveL0Error("det_clip requires L0 > 0");
  if (l1 < 0.0) throw InvalidStatsError("L1 must be nonnegative");
  check_stats(stats);
  double a = 1.0 / (2.0 * l0);
  a = std::min(a, inv_or_inf(3.0 * l1 * stats.max_local_grad_norm));
  a = std::min(a, inv_or_inf(3.0 * l1 * stats.max_avg_grad_norm));
  return a;
}

double sto_convex_alpha(double l0, double l1, double rho, double c1, std::int64_t k_total,
                        const GradStats& stats) {
  check_stats(stats);
  const double gap = 1.0 - std::sqrt(rho);
  const double ahat = std::min({gap / std::max(20.0 * l0, std::sqrt(24.0 * l0)),
                                1.0 / (4.0 * c1),
                                1.0 / std::sqrt(static_cast<double>(k_total))});
  double a = ahat;
  a = std::min(a, inv_or_inf(stats.max_avg_grad_norm));
  a = std::min(a, inv_or_inf(std::sqrt(24.0 * l1 * stats.max_avg_grad_norm)));
  return a;
}

double sto_nonconvex_alpha(double l0, double l1, double rho, double sigma, std::int64_t k_total,
                           const GradStats& stats) {
  check_stats(stats);
  const double gap = 1.0 - std::sqrt(rho);
  double ahat = 1.0 / std::sqrt(static_cast<double>(k_total + 1));
  ahat = std::min(ahat, inv_or_inf(36.0 * l1 * sigma));
  const double mid =
      1.0 / (2.0 * (1.5 / (gap * gap) + 5.0 * l0 + 4.0 * l1 * stats.global_grad_norm));
  const double denom = l0 + l1 * stats.max_avg_grad_norm;
  const double third = 1.0 / (denom * denom);
  return std::min({ahat, mid, third});
}

StepSizeRule StepSizeRule::det_clip(double l0, double l1) {
  if (l0 <= 0.0) throw NonPositiveL0Error("det_clip requires L0 > 0");
  if (l1 < 0.0) throw InvalidRuleError("L1 must be nonnegative");
  StepSizeRule r;
  r.kind_ = RuleKind::det_clip;
  r.l0_ = l0;
  r.l1_ = l1;
  return r;
}

StepSizeRule StepSizeRule::sto_convex(double l0, double l1, double rho, std::int64_t k_total) {
  if (l0 <= 0.0) throw NonPositiveL0Error("sto_convex requires L0 > 0");
  if (l1 < 0.0 || rho < 0.0 || rho >= 1.0 || k_total < 1)
    throw InvalidRuleError("sto_convex: bad parameters");
  const double gap = 1.0 - std::sqrt(rho);
  const double c1 = 1.0 - 5.0 * l1 - (240.0 * l1 * l1 * l1 + 180.0 * l1 * l1) / (gap * gap);
  if (c1 <= 0.0) throw InvalidRuleError("sto_convex: C1 <= 0, L1 too large for this topology");
  StepSizeRule r;
  r.kind_ = RuleKind::sto_convex;
  r.l0_ = l0;
  r.l1_ = l1;
  r.rho_ = rho;
  r.c1_ = c1;
  r.k_total_ = k_total;
  return r;
}

StepSizeRule StepSizeRule::sto_nonconvex(double l0, double l1, double rho, double sigma,
                                         std::int64_t k_total) {
  if (l0 <= 0.0) throw NonPositiveL0Error("sto_nonconvex requires L0 > 0");
  if (l1 < 0.0 || rho < 0.0 || rho >= 1.0 || sigma < 0.0 || k_total < 1)
    throw InvalidRuleError("sto_nonconvex: bad parameters");
  StepSizeRule r;
  r.kind_ = RuleKind::sto_nonconvex;
  r.l0_ = l0;
  r.l1_ = l1;
  r.rho_ = rho;
  r.sigma_ = sigma;
  r.k_total_ = k_total;
  return r;
}

StepSizeRule StepSizeRule::constant(double alpha) {
  if (!(alpha > 0.0)) throw InvalidRuleError("constant rule requires alpha > 0");
  StepSizeRule r;
  r.kind_ = RuleKind::constant;
  r.alpha_const_ = alpha;
  return r;
}

double StepSizeRule::alpha(const GradStats& stats, std::int64_t) const {
  switch (kind_) {
    case RuleKind::det_clip:
      return det_clip_alpha(l0_, l1_, stats);
    case RuleKind::sto_convex:
      return sto_convex_alpha(l0_, l1_, rho_, c1_, k_total_, stats);
    case RuleKind::sto_nonconvex:
      return sto_nonconvex_alpha(l0_, l1_, rho_, sigma_, k_total_, stats);
    case RuleKind::constant:
      check_stats(stats);
      return alpha_const_;
  }
  throw InvalidRuleError("unknown rule kind");
}

}  // namespace declip
