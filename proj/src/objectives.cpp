#include "declip/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "declip/errors.hpp"
#include "declip/rng.hpp"

namespace declip {

namespace {

// log(1 + e^t) without overflow
double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void Objective::check_dim(const Vec& x) const {
  if (static_cast<int>(x.size()) != dim()) throw DimensionMismatchError("objective: dim(x) != dim");
}

QuadraticObjective::QuadraticObjective(Matrix a, Vec b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows != a_.cols || a_.rows != static_cast<int>(b_.size()))
    throw DimensionMismatchError("quadratic: A must be square and match b");
}

double QuadraticObjective::value(const Vec& x) const {
  check_dim(x);
  return 0.5 * dot(x, matvec(a_, x)) - dot(b_, x);
}

Vec QuadraticObjective::gradient(const Vec& x) const {
  check_dim(x);
  Vec g = matvec(a_, x);
  axpy(-1.0, b_, g);
  return g;
}

Vec QuadraticObjective::hvp(const Vec& x, const Vec& v) const {
  check_dim(x);
  return matvec(a_, v);
}

double ExponentialObjective::value(const Vec& x) const {
  check_dim(x);
  return std::exp(dot(a_, x));
}

Vec ExponentialObjective::gradient(const Vec& x) const {
  check_dim(x);
  const double e = std::exp(dot(a_, x));
  Vec g(a_.size());
  for (std::size_t i = 0; i < a_.size(); ++i) g[i] = a_[i] * e;
  return g;
}

Vec ExponentialObjective::hvp(const Vec& x, const Vec& v) const {
  check_dim(x);
  const double c = std::exp(dot(a_, x)) * dot(a_, v);
  Vec h(a_.size());
  for (std::size_t i = 0; i < a_.size(); ++i) h[i] = a_[i] * c;
  return h;
}

LogisticObjective::LogisticObjective(Shard shard, int dim, double l2) : dim_(dim), l2_(l2) {
  if (shard.samples.empty()) throw EmptyDatasetError("logistic objective needs a nonempty shard");
  if (l2 < 0.0) throw InvalidSizeError("l2 must be nonnegative");
  rows_.reserve(shard.samples.size());
  for (const auto& s : shard.samples) {
    Row r;
    r.label = s.label;
    for (const auto& [idx, val] : s.features) {
      if (idx > dim) throw DimensionMismatchError("sample feature index exceeds dim");
      r.features.emplace_back(idx - 1, val);
    }
    rows_.push_back(std::move(r));
  }
}

double LogisticObjective::margin(const Row& r, const Vec& x) const {
  double t = 0.0;
  for (const auto& [j, v] : r.features) t += v * x[j];
  return t;
}

double LogisticObjective::value(const Vec& x) const {
  check_dim(x);
  double s = 0.0;
  for (const auto& r : rows_) s += softplus(-r.label * margin(r, x));
  return s / static_cast<double>(rows_.size()) + 0.5 * l2_ * dot(x, x);
}

Vec LogisticObjective::minibatch_gradient(const Vec& x, const std::vector<int>& indices) const {
  check_dim(x);
  Vec g(dim_, 0.0);
  const double inv = 1.0 / static_cast<double>(indices.size());
  for (int i : indices) {
    const Row& r = rows_[i];
    const double coef = -r.label * sigmoid(-r.label * margin(r, x)) * inv;
    for (const auto& [j, v] : r.features) g[j] += coef * v;
  }
  axpy(l2_, x, g);
  return g;
}

Vec LogisticObjective::sample_gradient(const Vec& x, int index) const {
  return minibatch_gradient(x, {index});
}

Vec LogisticObjective::gradient(const Vec& x) const {
  std::vector<int> all(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) all[i] = static_cast<int>(i);
  return minibatch_gradient(x, all);
}

Vec LogisticObjective::hvp(const Vec& x, const Vec& v) const {
  check_dim(x);
  if (v.size() != x.size()) throw DimensionMismatchError("hvp: dim(v) != dim");
  Vec h(dim_, 0.0);
  const double inv = 1.0 / static_cast<double>(rows_.size());
  for (const auto& r : rows_) {
    const double sig = sigmoid(margin(r, x));
    double av = 0.0;
    for (const auto& [j, val] : r.features) av += val * v[j];
    const double coef = sig * (1.0 - sig) * av * inv;
    for (const auto& [j, val] : r.features) h[j] += coef * val;
  }
  axpy(l2_, v, h);
  return h;
}

double QuarticObjective::value(const Vec& x) const {
  check_dim(x);
  double s = 0.0;
  for (std::size_t j = 0; j < c_.size(); ++j) s += c_[j] * x[j] * x[j] * x[j] * x[j];
  return 0.25 * s;
}

Vec QuarticObjective::gradient(const Vec& x) const {
  check_dim(x);
  Vec g(c_.size());
  for (std::size_t j = 0; j < c_.size(); ++j) g[j] = c_[j] * x[j] * x[j] * x[j];
  return g;
}

Vec QuarticObjective::hvp(const Vec& x, const Vec& v) const {
  check_dim(x);
  Vec h(c_.size());
  for (std::size_t j = 0; j < c_.size(); ++j) h[j] = 3.0 * c_[j] * x[j] * x[j] * v[j];
  return h;
}

double DoubleWellObjective::value(const Vec& x) const {
  check_dim(x);
  double s = 0.0;
  for (double xi : x) {
    const double t = xi * xi - 1.0;
    s += t * t;
  }
  return s;
}

Vec DoubleWellObjective::gradient(const Vec& x) const {
  check_dim(x);
  Vec g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) g[j] = 4.0 * x[j] * (x[j] * x[j] - 1.0);
  return g;
}

Vec DoubleWellObjective::hvp(const Vec& x, const Vec& v) const {
  check_dim(x);
  Vec h(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) h[j] = (12.0 * x[j] * x[j] - 4.0) * v[j];
  return h;
}

AveragedObjective::AveragedObjective(std::vector<ObjectivePtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw InvalidSizeError("averaged objective needs at least one part");
  for (const auto& p : parts_)
    if (p->dim() != parts_[0]->dim()) throw DimensionMismatchError("averaged objective: mixed dims");
}

double AveragedObjective::value(const Vec& x) const {
  double s = 0.0;
  for (const auto& p : parts_) s += p->value(x);
  return s / static_cast<double>(parts_.size());
}

Vec AveragedObjective::gradient(const Vec& x) const {
  Vec g(dim(), 0.0);
  for (const auto& p : parts_) axpy(1.0, p->gradient(x), g);
  const double inv = 1.0 / static_cast<double>(parts_.size());
  for (double& v : g) v *= inv;
  return g;
}

Vec AveragedObjective::hvp(const Vec& x, const Vec& v) const {
  Vec h(dim(), 0.0);
  for (const auto& p : parts_) axpy(1.0, p->hvp(x, v), h);
  const double inv = 1.0 / static_cast<double>(parts_.size());
  for (double& c : h) c *= inv;
  return h;
}

double hessian_norm(const Objective& obj, const Vec& x, double tol, int max_iter,
                    std::uint64_t seed) {
  if (tol <= 0.0) throw InvalidSizeError("hessian_norm: tol must be positive");
  const int d = obj.dim();
  for (int attempt = 0; attempt < 2; ++attempt) {
    Rng rng(seed, 0x8e55, static_cast<std::uint64_t>(attempt));
    Vec v(d);
    for (double& c : v) c = rng.next_gaussian();
    const double n0 = norm2(v);
    for (double& c : v) c /= n0;

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      Vec w = obj.hvp(x, v);
      const double next = dot(v, w);  // Rayleigh quotient, ||v|| = 1
      const double wn = norm2(w);
      if (wn <= 1e-300) return 0.0;  // Hessian annihilates the start vector
      for (std::size_t j = 0; j < w.size(); ++j) v[j] = w[j] / wn;
      if (it > 0 && std::abs(next - lambda) <= tol * std::abs(next)) return std::abs(next);
      lambda = next;
    }
  }
  throw NoConvergenceError(max_iter);
}

StochasticOracle::StochasticOracle(std::shared_ptr<const LogisticObjective> objective,
                                   int batch_size, std::uint64_t rng_seed)
    : objective_(std::move(objective)), batch_size_(batch_size), rng_seed_(rng_seed) {
  if (!objective_) throw InvalidSizeError("stochastic oracle needs an objective");
  if (batch_size_ < 1 || batch_size_ > objective_->num_samples())
    throw InvalidSizeError("batch size must be in [1, shard size]");
}

StochasticOracle::Draw StochasticOracle::stochastic_gradient(const Vec& x, int agent_id,
                                                             std::int64_t k) const {
  Rng rng(rng_seed_, static_cast<std::uint64_t>(agent_id), static_cast<std::uint64_t>(k));
  std::vector<int> batch = rng.sample_without_replacement(objective_->num_samples(), batch_size_);
  // Ascending order makes the full-batch case accumulate exactly like the
  // deterministic gradient.
  std::sort(batch.begin(), batch.end());
  Vec g = objective_->minibatch_gradient(x, batch);
  return {std::move(g), std::move(batch)};
}

SmoothnessCertificate certify_smoothness(const Objective& obj, double l0, double l1,
                                         const std::vector<std::pair<double, double>>& box,
                                         int grid_per_axis, bool allow_sampling,
                                         std::int64_t pair_budget, std::uint64_t seed) {
  if (grid_per_axis < 2) throw InvalidSizeError("certify: grid_per_axis must be >= 2");
  if (l0 < 0.0 || l1 < 0.0) throw InvalidSizeError("certify: constants must be nonnegative");
  const int d = obj.dim();
  if (static_cast<int>(box.size()) != d) throw DimensionMismatchError("certify: box must match dim");

  std::int64_t num_points = 1;
  for (int j = 0; j < d; ++j) {
    if (num_points > (std::int64_t{1} << 53) / grid_per_axis)
      throw BudgetExceededError("certify: grid lattice too large to index");
    num_points *= grid_per_axis;
  }
  const auto point_at = [&](std::int64_t flat) {
    Vec p(d);
    for (int j = 0; j < d; ++j) {
      const std::int64_t c = flat % grid_per_axis;
      flat /= grid_per_axis;
      p[j] = box[j].first + (box[j].second - box[j].first) * static_cast<double>(c) /
                                static_cast<double>(grid_per_axis - 1);
    }
    return p;
  };

  const double radius = l1 > 0.0 ? 1.0 / l1 : std::numeric_limits<double>::infinity();
  const bool exhaustive = num_points <= pair_budget / num_points;  // num_points^2 <= budget
  if (!exhaustive && !allow_sampling)
    throw BudgetExceededError("certify: pair count exceeds budget and sampling is disabled");

  const std::int64_t total = exhaustive ? num_points * num_points : pair_budget;
  double max_violation = -std::numeric_limits<double>::infinity();

#pragma omp parallel for schedule(static) reduction(max : max_violation)
  for (std::int64_t t = 0; t < total; ++t) {
    std::int64_t xi, yi;
    if (exhaustive) {
      xi = t / num_points;
      yi = t % num_points;
    } else {
      Rng rng(seed, static_cast<std::uint64_t>(t));
      xi = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(num_points)));
      yi = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(num_points)));
    }
    if (xi == yi) continue;
    const Vec x = point_at(xi), y = point_at(yi);
    const double dist = norm2(sub(y, x));
    if (dist > radius) continue;
    const Vec gx = obj.gradient(x);
    const double lhs = norm2(sub(obj.gradient(y), gx));
    const double violation = lhs - (l0 + l1 * norm2(gx)) * dist;
    max_violation = std::max(max_violation, violation);
  }

  SmoothnessCertificate cert;
  cert.l0 = l0;
  cert.l1 = l1;
  cert.verified_radius = radius;
  cert.grid_points = num_points;
  cert.max_violation = max_violation;
  return cert;
}

SmoothnessFit fit_smoothness(const std::vector<std::pair<double, double>>& pairs) {
  const std::size_t n = pairs.size();
  if (n < 2) throw DegenerateInputError("fit_smoothness needs at least 2 pairs");
  double mx = 0.0, my = 0.0;
  for (const auto& [g, h] : pairs) {
    mx += g;
    my += h;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& [g, h] : pairs) {
    sxx += (g - mx) * (g - mx);
    syy += (h - my) * (h - my);
    sxy += (g - mx) * (h - my);
  }
  if (sxx == 0.0) throw DegenerateInputError("fit_smoothness: all gradient norms equal");

  SmoothnessFit fit;
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  fit.l1_hat = std::max(0.0, slope);
  fit.l0_hat = std::max(0.0, intercept);
  fit.pearson_r = syy == 0.0 ? 0.0 : sxy / std::sqrt(sxx * syy);
  return fit;
}

}  // namespace declip
