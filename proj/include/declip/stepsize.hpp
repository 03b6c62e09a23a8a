#pragma once

#include <cstdint>
#include <string>

namespace declip {

// Per-iteration gradient statistics the clipping rules are evaluated on.
// All three are computed centrally by the engine; the rules themselves are
// non-local by construction (they take a max over agents).
struct GradStats {
  double max_local_grad_norm = 0.0;  // max_i ||grad f_i(x_i)||
  double max_avg_grad_norm = 0.0;    // max_i ||grad f_i(xbar)||
  double global_grad_norm = 0.0;     // ||grad F(xbar)||
};

enum class RuleKind { det_clip, sto_convex, sto_nonconvex, constant };

std::string to_string(RuleKind k);

// alpha = min{ 1/(2 L0), 1/(3 L1 max_local), 1/(3 L1 max_avg) }.
// Terms with a zero denominator drop out of the min, so the rule
// degenerates to the constant 1/(2 L0) when L1 = 0 and deactivates the
// clipping terms at stationary points.
double det_clip_alpha(double l0, double l1, const GradStats& stats);

// Adaptive clipping schedules. sto_convex requires
// C1 = 1 - 5 L1 - (240 L1^3 + 180 L1^2)/(1-sqrt(rho))^2 > 0,
// checked at construction.
class StepSizeRule {
public:
  static StepSizeRule det_clip(double l0, double l1);
  static StepSizeRule sto_convex(double l0, double l1, double rho, std::int64_t k_total);
  static StepSizeRule sto_nonconvex(double l0, double l1, double rho, double sigma,
                                    std::int64_t k_total);
  static StepSizeRule constant(double alpha);

  double alpha(const GradStats& stats, std::int64_t k) const;

  RuleKind kind() const { return kind_; }
  double l0() const { return l0_; }
  double l1() const { return l1_; }
  double rho() const { return rho_; }
  double sigma() const { return sigma_; }
  double c1() const { return c1_; }

private:
  StepSizeRule() = default;

  RuleKind kind_ = RuleKind::constant;
  double l0_ = 0.0;
  double l1_ = 0.0;
  double rho_ = 0.0;
  double sigma_ = 0.0;
  double alpha_const_ = 0.0;
  double c1_ = 0.0;
  std::int64_t k_total_ = 1;
};

double sto_convex_alpha(double l0, double l1, double rho, double c1, std::int64_t k_total,
                        const GradStats& stats);
double sto_nonconvex_alpha(double l0, double l1, double rho, double sigma, std::int64_t k_total,
                           const GradStats& stats);

}  // namespace declip
