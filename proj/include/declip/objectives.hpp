#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "declip/dataio.hpp"
#include "declip/linalg.hpp"

namespace declip {

// Differentiable loss oracle for one agent: value, analytic gradient and
// Hessian-vector product. Objectives are immutable and safe to share across
// threads.
class Objective {
public:
  virtual ~Objective() = default;
  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual Vec hvp(const Vec& x, const Vec& v) const = 0;

protected:
  void check_dim(const Vec& x) const;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

// 0.5 x'Ax - b'x with symmetric A.
class QuadraticObjective : public Objective {
public:
  QuadraticObjective(Matrix a, Vec b);
  int dim() const override { return static_cast<int>(b_.size()); }
  std::string kind() const override { return "quadratic"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;
  const Matrix& a() const { return a_; }
  const Vec& b() const { return b_; }

private:
  Matrix a_;
  Vec b_;
};

// exp(a'x)
class ExponentialObjective : public Objective {
public:
  explicit ExponentialObjective(Vec a) : a_(std::move(a)) {}
  int dim() const override { return static_cast<int>(a_.size()); }
  std::string kind() const override { return "exponential"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;
  const Vec& a() const { return a_; }

private:
  Vec a_;
};

// (1/m) sum_s log(1 + exp(-y_s a_s'x)) + (l2/2)||x||^2 over one shard.
// The margin form with labels normalized to +-1; computed with the
// log1p/exp-shift trick so large |a'x| cannot overflow.
class LogisticObjective : public Objective {
public:
  LogisticObjective(Shard shard, int dim, double l2);
  int dim() const override { return dim_; }
  std::string kind() const override { return "logistic"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;

  int num_samples() const { return static_cast<int>(rows_.size()); }
  double l2() const { return l2_; }
  // Mean gradient over an explicit subset of samples (plus the l2 term);
  // gradient(x) is the full-index case of this.
  Vec minibatch_gradient(const Vec& x, const std::vector<int>& indices) const;
  Vec sample_gradient(const Vec& x, int index) const;

private:
  struct Row {
    double label;
    std::vector<std::pair<int, double>> features;  // 0-based
  };
  double margin(const Row& r, const Vec& x) const;

  int dim_;
  double l2_;
  std::vector<Row> rows_;
};

// sum_j c_j x_j^4 / 4
class QuarticObjective : public Objective {
public:
  explicit QuarticObjective(Vec c) : c_(std::move(c)) {}
  int dim() const override { return static_cast<int>(c_.size()); }
  std::string kind() const override { return "quartic"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;

private:
  Vec c_;
};

// sum_j (x_j^2 - 1)^2
class DoubleWellObjective : public Objective {
public:
  explicit DoubleWellObjective(int d) : d_(d) {}
  int dim() const override { return d_; }
  std::string kind() const override { return "double_well"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;

private:
  int d_;
};

// F = (1/N) sum_i f_i, the network objective.
class AveragedObjective : public Objective {
public:
  explicit AveragedObjective(std::vector<ObjectivePtr> parts);
  int dim() const override { return parts_.empty() ? 0 : parts_[0]->dim(); }
  std::string kind() const override { return "averaged"; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  Vec hvp(const Vec& x, const Vec& v) const override;
  const std::vector<ObjectivePtr>& parts() const { return parts_; }

private:
  std::vector<ObjectivePtr> parts_;
};

// Largest |eigenvalue| of the Hessian at x by power iteration on hvp.
// Converges when |lambda_{t+1} - lambda_t| <= tol * |lambda_t|; the start
// vector is drawn from `seed`, re-seeded once on stagnation, and
// NoConvergence is thrown if both passes exhaust max_iter.
double hessian_norm(const Objective& obj, const Vec& x, double tol = 1e-10, int max_iter = 2000,
                    std::uint64_t seed = 12345);

// Minibatch gradient oracle over a logistic shard. Batches are drawn
// uniformly without replacement by a counter-based RNG keyed on
// (rng_seed, agent_id, k), so draws are reproducible and independent of
// evaluation order.
class StochasticOracle {
public:
  StochasticOracle(std::shared_ptr<const LogisticObjective> objective, int batch_size,
                   std::uint64_t rng_seed);

  struct Draw {
    Vec g;
    std::vector<int> batch;
  };
  Draw stochastic_gradient(const Vec& x, int agent_id, std::int64_t k) const;

  const LogisticObjective& objective() const { return *objective_; }
  int batch_size() const { return batch_size_; }

private:
  std::shared_ptr<const LogisticObjective> objective_;
  int batch_size_;
  std::uint64_t rng_seed_;
};

// Result of a brute-force check of the smoothness inequality
//   ||grad f(y) - grad f(x)|| <= (L0 + L1 ||grad f(x)||) ||y - x||
// over grid pairs with ||y - x|| <= 1/L1. max_violation <= 0 means the
// inequality held at every tested pair.
struct SmoothnessCertificate {
  double l0 = 0.0;
  double l1 = 0.0;
  double verified_radius = std::numeric_limits<double>::infinity();  // 1/L1
  std::int64_t grid_points = 0;
  double max_violation = -std::numeric_limits<double>::infinity();
};

// box is one [lo, hi] interval per axis. Ordered pairs are enumerated
// exhaustively while their count stays within `pair_budget` (default 1e6);
// beyond that, `pair_budget` pairs are sampled uniformly, unless sampling is
// disabled, in which case BudgetExceeded is thrown.
SmoothnessCertificate certify_smoothness(const Objective& obj, double l0, double l1,
                                         const std::vector<std::pair<double, double>>& box,
                                         int grid_per_axis, bool allow_sampling = true,
                                         std::int64_t pair_budget = 1000000,
                                         std::uint64_t seed = 2024);

struct SmoothnessFit {
  double l0_hat = 0.0;
  double l1_hat = 0.0;
  double pearson_r = 0.0;
};

// Least-squares fit hess ~ L0 + L1 * grad over (grad_norm, hess_norm) pairs,
// both coefficients clamped at zero. pearson_r is the unclamped correlation
// (zero when the curvature values are constant).
SmoothnessFit fit_smoothness(const std::vector<std::pair<double, double>>& pairs);

}  // namespace declip
