#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "declip/config.hpp"
#include "declip/errors.hpp"
#include "declip/experiment.hpp"

using namespace declip;

TEST_CASE("flat key-value parsing with comments and quotes") {
  const Config cfg = Config::parse_string(
      "# experiment\n"
      "name = \"demo\"\n"
      "run.topology = ring   # trailing comment\n"
      "run.agents = 4\n"
      "run.rule.L0 = 1.5\n"
      "flag = true\n"
      "vec = 1, 2.5, -3\n"
      "vecs = 0,0 ; 2,2\n"
      "edges = [[0,1],[1,2]]\n");
  CHECK(cfg.get_string("name") == "demo");
  CHECK(cfg.get_string("run.topology") == "ring");
  CHECK(cfg.get_int("run.agents") == 4);
  CHECK(cfg.get_double("run.rule.L0") == 1.5);
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_bool("missing", true));
  CHECK(cfg.get_vector("vec") == Vec{1.0, 2.5, -3.0});
  const auto vecs = cfg.get_vector_list("vecs");
  REQUIRE(vecs.size() == 2);
  CHECK(vecs[1] == Vec{2.0, 2.0});
  const auto edges = cfg.get_edge_list("edges");
  REQUIRE(edges.size() == 2);
  CHECK(edges[0] == std::pair<int, int>{0, 1});
  CHECK(edges[1] == std::pair<int, int>{1, 2});
  CHECK(cfg.get_string("run.description", "none") == "none");
}

TEST_CASE("config errors name the offending field") {
  const Config cfg = Config::parse_string("a = x\n");
  CHECK_THROWS_AS(cfg.get_double("a"), ConfigError);
  CHECK_THROWS_AS(cfg.get_int("a"), ConfigError);
  CHECK_THROWS_AS(cfg.get_string("b"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("no equals sign\n"), ConfigError);
  try {
    cfg.get_double("a");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("dash-separated edge lists parse too") {
  const Config cfg = Config::parse_string("edges = 0-1, 1-3, 2-3\n");
  const auto edges = cfg.get_edge_list("edges");
  REQUIRE(edges.size() == 3);
  CHECK(edges[2] == std::pair<int, int>{2, 3});
}

TEST_CASE("build_run assembles a full deterministic run") {
  const Config cfg = Config::parse_string(
      "name = build\n"
      "run.topology = ring_lazy\n"
      "run.agents = 4\n"
      "run.objective = quadratic\n"
      "run.objective.spectrum = 1, 2\n"
      "run.objective.b = 0,0 ; 1,0 ; 0,1 ; 1,1\n"
      "run.rule = det_clip\n"
      "run.rule.L0 = 2\n"
      "run.rule.L1 = 0.5\n"
      "run.K = 7\n"
      "run.optimum = auto\n");
  const BuiltRun built = build_run(cfg, ".", false, 42);
  CHECK_FALSE(built.stochastic);
  CHECK(built.run.iterations == 7);
  CHECK(built.run.topology.mixing.size() == 4);
  CHECK(built.run.topology.mixing.rho == doctest::Approx(0.25));
  REQUIRE(built.objectives.size() == 4);
  CHECK(built.run.x_star.has_value());
  CHECK((*built.run.x_star)[0] == doctest::Approx(0.5));  // mean b = (0.5, 0.5), A = diag(1,2)
  CHECK((*built.run.x_star)[1] == doctest::Approx(0.25));

  const TrajectoryRecord rec = run_dgd(built.run);
  CHECK(rec.rows.size() == 8);
}

TEST_CASE("build_run wires logistic shards and stochastic mode") {
  const Config cfg = Config::parse_string(
      "name = sto\n"
      "run.algorithm = dsgd\n"
      "run.topology = fully_connected\n"
      "run.agents = 3\n"
      "run.objective = logistic\n"
      "run.objective.synth.n = 30\n"
      "run.objective.synth.dim = 2\n"
      "run.objective.synth.margin = 1.0\n"
      "run.objective.synth.seed = 9\n"
      "run.objective.l2 = 0.1\n"
      "run.objective.shard = round_robin\n"
      "run.rule = sto_convex\n"
      "run.rule.L0 = 1\n"
      "run.rule.L1 = 0\n"
      "run.batch = 2\n"
      "run.K = 5\n");
  const BuiltRun built = build_run(cfg, ".", false, 7);
  CHECK(built.stochastic);
  const TrajectoryRecord rec = run_dsgd(built.run);
  CHECK(rec.rows.size() == 6);
  CHECK(rec.rows[0].k == 1);
}

TEST_CASE("unknown names surface as ConfigError") {
  const Config bad_obj = Config::parse_string(
      "name = x\nrun.objective = cubic\nrun.rule = constant\nrun.rule.alpha = 1\n");
  CHECK_THROWS_AS(build_run(bad_obj, ".", false, 1), ConfigError);

  const Config bad_rule = Config::parse_string(
      "name = x\nrun.objective = double_well\nrun.rule = magic\n");
  CHECK_THROWS_AS(build_run(bad_rule, ".", false, 1), ConfigError);

  const Config missing_obj = Config::parse_string("name = x\nrun.rule = constant\n");
  CHECK_THROWS_AS(build_run(missing_obj, ".", false, 1), ConfigError);
}

TEST_CASE("run_experiment writes the four artifacts and reports checks") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "declip_cfg_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const Config cfg = Config::parse_string(
      "name = quad\n"
      "output_dir = " + (dir / "out").string() + "\n"
      "seed = 11\n"
      "run.topology = fully_connected\n"
      "run.agents = 2\n"
      "run.objective = quadratic\n"
      "run.objective.spectrum = 1\n"
      "run.objective.b = 1 ; 1\n"
      "run.rule = det_clip\n"
      "run.rule.L0 = 1\n"
      "run.K = 40\n"
      "run.optimum = auto\n"
      "analysis.checks = lemma2, lemma6, theorem1\n"
      "analysis.epsilon = 0.001\n");
  const ExperimentResult res = run_experiment(cfg, dir.string());
  CHECK(res.exit_code == kExitPass);
  REQUIRE(res.checks.size() == 3);
  for (const auto& c : res.checks) CHECK(c.pass);
  REQUIRE(res.verdicts.size() == 1);
  CHECK(res.verdicts[0].satisfied);

  const fs::path out = fs::path(res.out_dir);
  CHECK(fs::exists(out / "trajectory_11.csv"));
  CHECK(fs::exists(out / "verdicts.json"));
  CHECK(fs::exists(out / "curvature.csv"));
  CHECK(fs::exists(out / "summary.txt"));

  // same config, same seed: byte-identical outputs
  const ExperimentResult res2 = run_experiment(cfg, dir.string());
  CHECK(res2.exit_code == kExitPass);
  std::ifstream a(out / "trajectory_11.csv"), b(out / "trajectory_11.csv");
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);

  fs::remove_all(dir);
}

TEST_CASE("a wrong lemma-2 constant turns the experiment red") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "declip_cfg_red";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const std::string base =
      "name = quadbad\n"
      "output_dir = " + (dir / "out").string() + "\n"
      "run.topology = fully_connected\n"
      "run.agents = 2\n"
      "run.objective = quadratic\n"
      "run.objective.spectrum = 1\n"
      "run.objective.b = 1 ; 1\n"
      "run.rule = det_clip\n"
      "run.rule.L0 = 1\n"
      "run.K = 40\n"
      "analysis.checks = lemma2\n";
  CHECK(run_experiment(Config::parse_string(base), dir.string()).exit_code == kExitPass);
  // rechecking against a tenth of the true constant demands too much descent
  CHECK(run_experiment(Config::parse_string(base + "analysis.L0 = 0.1\n"), dir.string()).exit_code ==
        kExitCheckFailed);
  fs::remove_all(dir);
}
