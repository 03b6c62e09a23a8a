#include "declip/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "declip/errors.hpp"

namespace declip {

namespace fs = std::filesystem;

namespace {

std::vector<ObjectivePtr> build_objectives(const Config& cfg, const std::string& base_dir,
                                           bool force_normalize, int n_agents) {
  const std::string kind = cfg.get_string("run.objective");
  std::vector<ObjectivePtr> objs;

  if (kind == "quadratic") {
    const Vec spectrum = cfg.get_vector("run.objective.spectrum");
    const Matrix a = Matrix::diag(spectrum);
    std::vector<Vec> bs;
    if (cfg.has("run.objective.b"))
      bs = cfg.get_vector_list("run.objective.b");
    else
      bs.assign(1, Vec(spectrum.size(), 0.0));
    if (static_cast<int>(bs.size()) != n_agents && bs.size() != 1)
      throw ConfigError("run.objective.b: need one vector, or one per agent");
    for (int i = 0; i < n_agents; ++i) {
      const Vec& b = bs[bs.size() == 1 ? 0 : i];
      if (b.size() != spectrum.size())
        throw ConfigError("run.objective.b: dimension must match spectrum");
      objs.push_back(std::make_shared<QuadraticObjective>(a, b));
    }
  } else if (kind == "exponential") {
    const Vec a = cfg.get_vector("run.objective.a");
    for (int i = 0; i < n_agents; ++i) objs.push_back(std::make_shared<ExponentialObjective>(a));
  } else if (kind == "quartic") {
    const Vec c = cfg.get_vector("run.objective.c");
    for (int i = 0; i < n_agents; ++i) objs.push_back(std::make_shared<QuarticObjective>(c));
  } else if (kind == "double_well") {
    const int d = static_cast<int>(cfg.get_int("run.objective.dim", 2));
    for (int i = 0; i < n_agents; ++i) objs.push_back(std::make_shared<DoubleWellObjective>(d));
  } else if (kind == "logistic") {
    Dataset ds;
    if (cfg.has("run.objective.data")) {
      fs::path p = cfg.get_string("run.objective.data");
      if (p.is_relative()) p = fs::path(base_dir) / p;
      ds = load_libsvm_file(p.string());
    } else {
      ds = synth_blobs(static_cast<int>(cfg.get_int("run.objective.synth.n", 100)),
                       static_cast<int>(cfg.get_int("run.objective.synth.dim", 2)),
                       cfg.get_double("run.objective.synth.margin", 2.0),
                       static_cast<std::uint64_t>(cfg.get_int("run.objective.synth.seed", 1)));
    }
    if (force_normalize || cfg.get_bool("run.normalize", false)) normalize_maxabs(ds);
    const std::string scheme_name = cfg.get_string("run.objective.shard", "contiguous");
    ShardScheme scheme;
    if (scheme_name == "contiguous")
      scheme = ShardScheme::contiguous;
    else if (scheme_name == "round_robin")
      scheme = ShardScheme::round_robin;
    else if (scheme_name == "label_skew")
      scheme = ShardScheme::label_skew;
    else
      throw ConfigError("run.objective.shard: unknown scheme '" + scheme_name + "'");
    const double l2 = cfg.get_double("run.objective.l2", 0.0);
    auto shards = shard_uniform(ds, n_agents, scheme);
    for (auto& s : shards)
      objs.push_back(std::make_shared<LogisticObjective>(std::move(s), ds.dim, l2));
  } else {
    throw ConfigError("run.objective: unknown kind '" + kind + "'");
  }
  return objs;
}

StepSizeRule build_rule(const Config& cfg, double rho, std::int64_t k_total) {
  const std::string kind = cfg.get_string("run.rule");
  if (kind == "det_clip")
    return StepSizeRule::det_clip(cfg.get_double("run.rule.L0"), cfg.get_double("run.rule.L1", 0.0));
  if (kind == "sto_convex")
    return StepSizeRule::sto_convex(cfg.get_double("run.rule.L0"),
                                    cfg.get_double("run.rule.L1", 0.0), rho, k_total);
  if (kind == "sto_nonconvex")
    return StepSizeRule::sto_nonconvex(cfg.get_double("run.rule.L0"),
                                       cfg.get_double("run.rule.L1", 0.0), rho,
                                       cfg.get_double("run.rule.sigma", 0.0), k_total);
  if (kind == "constant") return StepSizeRule::constant(cfg.get_double("run.rule.alpha"));
  throw ConfigError("run.rule: unknown rule '" + kind + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

BuiltRun build_run(const Config& cfg, const std::string& base_dir, bool force_normalize,
                   std::uint64_t seed) {
  BuiltRun built;
  const int n = static_cast<int>(cfg.get_int("run.agents", 1));
  std::vector<std::pair<int, int>> edges;
  const std::string preset = cfg.get_string("run.topology", "fully_connected");
  if (preset == "custom") edges = cfg.get_edge_list("run.topology.edges");

  built.run.topology = make_topology(preset, n, edges);
  built.objectives = build_objectives(cfg, base_dir, force_normalize, n);
  built.run.objectives = built.objectives;
  built.run.iterations = cfg.get_int("run.K", 100);
  built.run.rule = build_rule(cfg, built.run.topology.mixing.rho, built.run.iterations);
  built.run.seed = seed;
  built.stochastic = cfg.get_string("run.algorithm", "dgd") == "dsgd";
  built.run.batch_size = static_cast<int>(cfg.get_int("run.batch", 1));
  built.run.log_batches = cfg.get_bool("run.log_batches", false);
  built.run.curvature_every = static_cast<int>(cfg.get_int("run.curvature_every", 0));
  built.run.curvature_tol = cfg.get_double("run.curvature_tol", 1e-8);

  const std::string init = cfg.get_string("run.init", "zeros");
  if (init == "zeros") {
    built.run.init = InitKind::zeros;
  } else if (init == "gaussian") {
    built.run.init = InitKind::gaussian;
    built.run.init_scale = cfg.get_double("run.init.scale", 1.0);
  } else if (init == "custom") {
    built.run.init = InitKind::custom;
    built.run.init_custom = cfg.get_vector_list("run.init.values");
  } else {
    throw ConfigError("run.init: unknown init '" + init + "'");
  }

  const std::string opt = cfg.get_string("run.optimum", "none");
  if (opt == "auto") {
    const Optimum o =
        reference_optimum(built.objectives, cfg.get_double("run.optimum.tol", 1e-10));
    built.run.x_star = o.x_star;
    built.run.f_star = o.f_star;
  } else if (opt != "none") {
    built.run.x_star = cfg.get_vector("run.optimum");
    if (cfg.has("run.optimum.f_star")) built.run.f_star = cfg.get_double("run.optimum.f_star");
  }
  return built;
}

ExperimentResult run_experiment(const Config& cfg, const std::string& base_dir,
                                bool force_normalize) {
  ExperimentResult result;
  const std::string name = cfg.get_string("name");
  fs::path out_dir = cfg.get_string("output_dir", "out");
  if (out_dir.is_relative()) out_dir = fs::path(base_dir) / out_dir;
  out_dir /= name;
  fs::create_directories(out_dir);
  result.out_dir = out_dir.string();

  const int ensemble = static_cast<int>(cfg.get_int("ensemble", 1));
  if (ensemble < 1) throw ConfigError("ensemble must be >= 1");
  const std::uint64_t base_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));

  // ensemble members are independent; parallel execution leaves each record
  // bit-identical to a serial run
  std::vector<TrajectoryRecord> records(ensemble);
  std::vector<BuiltRun> builds(ensemble);
  for (int e = 0; e < ensemble; ++e) builds[e] = build_run(cfg, base_dir, force_normalize, base_seed + e);
#pragma omp parallel for schedule(dynamic)
  for (int e = 0; e < ensemble; ++e)
    records[e] = builds[e].stochastic ? run_dsgd(builds[e].run) : run_dgd(builds[e].run);

  for (int e = 0; e < ensemble; ++e) {
    std::ofstream csv(out_dir / ("trajectory_" + std::to_string(base_seed + e) + ".csv"));
    write_csv(records[e], csv);
  }

  const TrajectoryRecord& first = records[0];
  const BuiltRun& built = builds[0];
  const double rho = built.run.topology.mixing.rho;
  const double rule_l0 = cfg.get_double("run.rule.L0", 0.0);
  const double rule_l1 = cfg.get_double("run.rule.L1", 0.0);
  const double l0 = cfg.get_double("analysis.L0", rule_l0);
  const double l1 = cfg.get_double("analysis.L1", rule_l1);
  const double eps = cfg.get_double("analysis.epsilon", 1e-3);

  const auto f_star = first.f_star;
  const auto f0 = [&]() -> double {
    if (!f_star) throw MissingOptimumError("check needs F* (set run.optimum)");
    return first.rows[0].f_avg - *f_star;
  };
  const auto r0 = [&]() -> double {
    if (!first.rows[0].dist_opt) throw MissingOptimumError("check needs x* (set run.optimum)");
    return *first.rows[0].dist_opt;
  };

  double sigma = 0.0, delta = 0.0;
  const std::string sigma_src = cfg.get_string("analysis.sigma", "measured");
  const std::string delta_src = cfg.get_string("analysis.delta", "measured");
  if (sigma_src == "measured" || delta_src == "measured") {
    const NoiseStats noise = estimate_noise(records);
    sigma = sigma_src == "measured" ? noise.sigma_hat : cfg.get_double("analysis.sigma");
    delta = delta_src == "measured" ? noise.delta_hat : cfg.get_double("analysis.delta");
  } else {
    sigma = cfg.get_double("analysis.sigma");
    delta = cfg.get_double("analysis.delta");
  }

  std::vector<std::pair<double, double>> curvature_pairs;
  for (const auto& row : first.rows)
    if (row.hess_norm) curvature_pairs.emplace_back(row.grad_norm_avg, *row.hess_norm);

  std::vector<std::string> requested;
  if (cfg.has("analysis.checks")) requested = cfg.get_name_list("analysis.checks");

  for (const std::string& check : requested) {
    CheckResult cr;
    cr.name = check;
    if (check == "lemma2") {
      const auto checks = check_descent_lemma2(first, l0, l1, cfg.get_double("analysis.slack", 1e-9));
      double min_margin = std::numeric_limits<double>::infinity();
      cr.pass = true;
      for (const auto& c : checks) {
        min_margin = std::min(min_margin, c.margin);
        cr.pass = cr.pass && c.pass;
      }
      cr.detail = "min_margin=" + format_double(min_margin);
    } else if (check == "lemma3") {
      const auto checks = check_lemma3_regimes(first, l0, l1, cfg.get_double("analysis.slack", 1e-9));
      int mixed = 0;
      cr.pass = true;
      for (const auto& c : checks) {
        if (c.regime == Regime::mixed) ++mixed;
        cr.pass = cr.pass && c.pass;
      }
      cr.detail = "mixed_steps=" + std::to_string(mixed);
    } else if (check == "lemma6") {
      cr.pass = true;
      double worst = 0.0;
      for (const auto& rec : records)
        for (const auto& c : check_distance_monotone(rec, cfg.get_double("analysis.slack6", 1e-10))) {
          worst = std::max(worst, c.increase);
          cr.pass = cr.pass && c.pass;
        }
      cr.detail = "max_increase=" + format_double(worst);
    } else if (check == "theorem1") {
      const BoundVerdict v = verdict_theorem1(first, l0, l1, r0(), f0(), eps);
      result.verdicts.push_back(v);
      cr.pass = v.satisfied;
      cr.detail = "K_achieved=" + std::to_string(v.k_achieved) +
                  " K_required=" + std::to_string(v.k_required);
    } else if (check == "theorem2") {
      const BoundVerdict v = verdict_theorem2(first, l0, l1, f0(), eps);
      result.verdicts.push_back(v);
      cr.pass = v.satisfied;
      cr.detail = "K_achieved=" + std::to_string(v.k_achieved) +
                  " K_required=" + std::to_string(v.k_required);
    } else if (check == "theorem3" || check == "theorem4") {
      if (!f_star) throw MissingOptimumError("stochastic verdicts need F* (set run.optimum)");
      const BoundVerdict v =
          check == "theorem3"
              ? verdict_theorem3(records, l0, l1, rho, sigma, delta, *f_star, eps)
              : verdict_theorem4(records, l0, l1, rho, sigma, delta, *f_star, eps);
      result.verdicts.push_back(v);
      cr.pass = v.satisfied;
      cr.detail = "K_achieved=" + std::to_string(v.k_achieved) +
                  " K_required=" + std::to_string(v.k_required) +
                  " sigma=" + format_double(sigma) + " delta=" + format_double(delta);
    } else if (check == "corollary1") {
      if (!first.max_init_dist) throw MissingOptimumError("corollary-1 verdict needs x*");
      const BoundVerdict v = verdict_corollary1(first, l0, l1, rho, *first.max_init_dist, f0(), eps);
      result.verdicts.push_back(v);
      cr.pass = v.satisfied;
      cr.detail = "K_achieved=" + std::to_string(v.k_achieved) +
                  " K_required=" + std::to_string(v.k_required);
    } else if (check == "corollary2") {
      if (!first.max_init_dist) throw MissingOptimumError("corollary-2 verdict needs x*");
      const BoundVerdict v = verdict_corollary2(first, l0, l1, rho, *first.max_init_dist, eps);
      result.verdicts.push_back(v);
      cr.pass = v.satisfied;
      cr.detail = "K_achieved=" + std::to_string(v.k_achieved) +
                  " K_required=" + std::to_string(v.k_required);
    } else if (check == "curvature") {
      const CurvatureStudy study = curvature_study(first);
      curvature_pairs = study.pairs;
      const double min_r = cfg.get_double("analysis.curvature.min_r", -1.0);
      cr.pass = study.fit.pearson_r >= min_r;
      cr.detail = "pearson_r=" + format_double(study.fit.pearson_r) +
                  " L0_hat=" + format_double(study.fit.l0_hat) +
                  " L1_hat=" + format_double(study.fit.l1_hat);
    } else {
      throw ConfigError("analysis.checks: unknown check '" + check + "'");
    }
    result.checks.push_back(std::move(cr));
  }

  {
    std::ofstream json(out_dir / "verdicts.json");
    json << "[\n";
    for (std::size_t i = 0; i < result.verdicts.size(); ++i)
      json << "  " << verdict_to_json(result.verdicts[i])
           << (i + 1 < result.verdicts.size() ? ",\n" : "\n");
    json << "]\n";
  }
  {
    std::ofstream curv(out_dir / "curvature.csv");
    write_curvature_csv(curvature_pairs, curv);
  }
  {
    std::ofstream summary(out_dir / "summary.txt");
    summary << "experiment: " << name << "\n";
    summary << "agents: " << first.num_agents << "  rule: " << to_string(first.rule)
            << "  iterations: " << built.run.iterations << "  ensemble: " << ensemble << "\n";
    if (first.failed)
      summary << "RUN FAILED: non-finite iterate at k=" << first.failed_k << "\n";
    for (const auto& c : result.checks)
      summary << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
  }

  bool all_pass = !first.failed;
  for (const auto& c : result.checks) all_pass = all_pass && c.pass;
  result.exit_code = all_pass ? kExitPass : kExitCheckFailed;
  return result;
}

}  // namespace declip
