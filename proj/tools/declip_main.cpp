#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "declip/errors.hpp"
#include "declip/experiment.hpp"

namespace {

declip::ObjectivePtr objective_from_flags(const std::string& kind, const std::vector<double>& a,
                                          const std::vector<double>& spectrum,
                                          const std::vector<double>& c, int dim) {
  using namespace declip;
  if (kind == "exponential") {
    if (a.empty()) throw ConfigError("--objective exponential needs --a");
    return std::make_shared<ExponentialObjective>(a);
  }
  if (kind == "quadratic") {
    if (spectrum.empty()) throw ConfigError("--objective quadratic needs --spectrum");
    return std::make_shared<QuadraticObjective>(Matrix::diag(spectrum), Vec(spectrum.size(), 0.0));
  }
  if (kind == "quartic") {
    if (c.empty()) throw ConfigError("--objective quartic needs --c");
    return std::make_shared<QuarticObjective>(c);
  }
  if (kind == "double_well") return std::make_shared<DoubleWellObjective>(dim);
  throw ConfigError("unknown objective '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace declip;

  CLI::App app{"decentralized gradient descent under relaxed smoothness"};
  app.require_subcommand(1);
  int threads = 0;
  bool normalize = false;
  app.add_option("--threads", threads, "worker threads (0 = library default)");
  app.add_flag("--normalize", normalize, "apply per-feature max-abs scaling to datasets");

  auto* run_cmd = app.add_subcommand("run", "execute an experiment config");
  std::string config_path;
  run_cmd->add_option("config", config_path, "experiment config file")->required();

  auto* spectral_cmd = app.add_subcommand("spectral", "mixing-matrix spectral statistics");
  std::string topology = "fully_connected";
  int n_agents = 2;
  std::string edges;
  spectral_cmd->add_option("--topology", topology, "fully_connected|ring|ring_lazy|star|custom");
  spectral_cmd->add_option("--n", n_agents, "number of agents")->required();
  spectral_cmd->add_option("--edges", edges, "custom edges, e.g. \"[[0,1],[1,2]]\"");

  auto* certify_cmd = app.add_subcommand("certify", "brute-force smoothness certificate");
  std::string objective_kind;
  std::vector<double> a_vec, spectrum, c_vec, box_flat;
  int obj_dim = 2, grid = 16;
  double l0 = 0.0, l1 = 0.0;
  certify_cmd->add_option("--objective", objective_kind)->required();
  certify_cmd->add_option("--a", a_vec)->delimiter(',');
  certify_cmd->add_option("--spectrum", spectrum)->delimiter(',');
  certify_cmd->add_option("--c", c_vec)->delimiter(',');
  certify_cmd->add_option("--dim", obj_dim);
  certify_cmd->add_option("--L0", l0)->required();
  certify_cmd->add_option("--L1", l1)->required();
  certify_cmd->add_option("--box", box_flat, "lo,hi applied to every axis")->delimiter(',')->required();
  certify_cmd->add_option("--grid", grid, "grid points per axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*run_cmd) {
      const Config cfg = Config::parse_file(config_path);
      std::string base_dir = ".";
      const auto slash = config_path.find_last_of('/');
      if (slash != std::string::npos) base_dir = config_path.substr(0, slash);
      const ExperimentResult res = run_experiment(cfg, base_dir, normalize);
      for (const auto& c : res.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
      std::cout << "artifacts: " << res.out_dir << "\n";
      return res.exit_code;
    }

    if (*spectral_cmd) {
      std::vector<std::pair<int, int>> edge_list;
      if (!edges.empty()) {
        Config tmp = Config::parse_string("edges = " + edges);
        edge_list = tmp.get_edge_list("edges");
      }
      Topology topo;
      try {
        topo = make_topology(topology, n_agents, edge_list);
      } catch (const InvalidSizeError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
      }
      const SpectralStats st = spectral_stats(topo.mixing.weights);
      std::printf("rho=%.12g\n", st.rho);
      std::printf("spectral_gap=%.12g\n", st.spectral_gap);
      std::printf("lambda2_abs=%.12g\n", st.lambda2_abs);
      std::printf("lambdaN_abs=%.12g\n", st.lambdaN_abs);
      std::printf("eigenvalues=[");
      for (std::size_t i = 0; i < st.eigenvalues.size(); ++i)
        std::printf("%s%.12g", i ? ", " : "", st.eigenvalues[i]);
      std::printf("]\n");
      return kExitPass;
    }

    if (*certify_cmd) {
      if (box_flat.size() != 2) {
        std::cerr << "usage error: --box expects lo,hi\n";
        return kExitUsage;
      }
      const ObjectivePtr obj = objective_from_flags(objective_kind, a_vec, spectrum, c_vec, obj_dim);
      const std::vector<std::pair<double, double>> box(obj->dim(),
                                                       {box_flat[0], box_flat[1]});
      const SmoothnessCertificate cert = certify_smoothness(*obj, l0, l1, box, grid);
      std::printf("L0=%.12g L1=%.12g\n", cert.l0, cert.l1);
      std::printf("verified_radius=%.12g\n", cert.verified_radius);
      std::printf("grid_points=%lld\n", static_cast<long long>(cert.grid_points));
      std::printf("max_violation=%.12g\n", cert.max_violation);
      return cert.max_violation <= 0.0 ? kExitPass : kExitCheckFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
