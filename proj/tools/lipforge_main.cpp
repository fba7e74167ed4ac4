#include "lipforge/run.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int worker_threads() {
  if (const char* env = std::getenv("LIPFORGE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::optional<std::pair<int, int>> parse_lattice(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  auto x = spec.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--export-lattice expects NxM");
  int n = std::atoi(spec.substr(0, x).c_str());
  int m = std::atoi(spec.substr(x + 1).c_str());
  if (n < 2 || m < 2) throw CLI::ValidationError("--export-lattice needs N, M >= 2");
  return std::make_pair(n, m);
}

void print_certs(const std::vector<lipforge::Certificate>& certs) {
  std::cout << lipforge::certificates_csv(certs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lipforge: prescribed local Lipschitz constant constructor"};
  app.require_subcommand(1);

  std::string config_path, run_dir, lattice_spec;
  int imax_override = 0;
  long long seed_override = -1;
  bool slow = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_flag("--slow", slow, "enable the i >= 10 coverage/volume suites");
    cmd->add_option("--imax", imax_override, "override run.imax");
    cmd->add_option("--seed", seed_override, "override run.seed");
  };

  auto* build = app.add_subcommand("build", "run the construction and verification");
  build->add_option("config", config_path, "config file")->required();
  build->add_option("--export-lattice", lattice_spec, "export u on an NxM lattice");
  add_common(build);

  auto* verify = app.add_subcommand("verify", "re-verify a finished run directory");
  verify->add_option("run-dir", run_dir, "run directory")->required();
  add_common(verify);

  auto* baseline = app.add_subcommand("baseline", "run the grid baselines only");
  baseline->add_option("config", config_path, "config file")->required();
  add_common(baseline);

  auto* report = app.add_subcommand("report", "print the certificate report");
  report->add_option("run-dir", run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed() || baseline->parsed()) {
      lipforge::RunConfig cfg = lipforge::parse_config(slurp(config_path));
      if (imax_override > 0) cfg.imax = imax_override;
      if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
      if (baseline->parsed()) {
        lipforge::Domain dom = cfg.domain();
        lipforge::GridField g =
            lipforge::fast_march(dom, cfg.psi(), cfg.f(), cfg.baseline_h);
        double worst = 0.0;
        for (int iy = 0; iy < g.ny; ++iy)
          for (int ix = 0; ix < g.nx; ++ix)
            if (g.gamma[g.idx(ix, iy)])
              worst = std::max(worst, std::abs(g.at(ix, iy) -
                                               cfg.f().component(0).eval(g.node(ix, iy))));
        std::cout << "lattice " << g.nx << "x" << g.ny << " h=" << g.h
                  << " boundary_violation=" << worst << "\n";
        return 0;
      }
      lipforge::RunOptions opt;
      opt.slow = slow;
      opt.threads = worker_threads();
      opt.export_lattice = parse_lattice(lattice_spec);
      lipforge::RunArtifacts art = lipforge::execute_run(cfg, opt);
      lipforge::save_run(cfg, art, opt);
      print_certs(art.certificates);
      if (!art.error.empty()) std::cerr << "error: " << art.error << "\n";
      return art.exit_code;
    }
    if (verify->parsed()) {
      lipforge::LoadedRun run = lipforge::load_run(run_dir);
      auto certs = lipforge::verify_run(run, slow);
      print_certs(certs);
      for (const auto& c : certs)
        if (!c.pass && !c.report_only) return 3;
      return 0;
    }
    // report
    std::cout << slurp(run_dir + "/certificates.csv");
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
