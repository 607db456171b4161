// Command-line driver: `verify <suite>` runs checks over configured
// instances and writes CSV/JSON reports (exit status nonzero iff any row
// fails); `render` draws a configured instance as SVG.

#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "velling/harness.hpp"
#include "velling/svg.hpp"

using namespace velling;

namespace {

ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return ExperimentConfig{};
  return ExperimentConfig::from_json_file(path);
}

int cmd_verify(const std::string& suite, const std::string& config_path,
               const CLI::App& flags) {
  ExperimentConfig cfg = load_config(config_path);
  cfg.suites = {suite};
  if (flags.count("--seed")) cfg.solver.seed = flags.get_option("--seed")->as<std::uint64_t>();
  if (flags.count("--n-samples")) cfg.solver.n = flags.get_option("--n-samples")->as<long long>();
  if (flags.count("--eps")) cfg.solver.eps = flags.get_option("--eps")->as<double>();
  if (flags.count("--grid-h")) cfg.solver.h = flags.get_option("--grid-h")->as<double>();
  if (flags.count("--out")) cfg.out_dir = flags.get_option("--out")->as<std::string>();
  if (flags.count("--workers")) cfg.workers = flags.get_option("--workers")->as<int>();
  if (flags.count("--render")) cfg.render = true;
  if (cfg.openings.empty() && !cfg.random && suite != "solver-selftest") {
    RandomSpec rs;
    cfg.random = rs;  // default random batch when the config names no instances
  }

  const auto rows = run_suite(cfg);
  for (const auto& r : rows) {
    if (!r.error.empty())
      std::printf("%-4d %-12s ERROR %s\n", r.instance_id, r.check.c_str(),
                  r.error.c_str());
    else
      std::printf("%-4d %-12s %s value=%.6g margin=%.3g (%.2fs)\n", r.instance_id,
                  r.check.c_str(), r.passed ? "pass" : "FAIL", r.value, r.margin,
                  r.runtime_s);
  }
  const bool ok = all_passed(rows);
  std::printf("%zu rows, %s\n", rows.size(), ok ? "all passed" : "FAILURES");
  return ok ? 0 : 1;
}

int cmd_render(const std::string& config_path, const std::string& out_path,
               bool with_field) {
  ExperimentConfig cfg = load_config(config_path);
  std::vector<double> openings;
  if (!cfg.openings.empty()) {
    openings = cfg.openings.front();
  } else {
    RandomSpec rs = cfg.random.value_or(RandomSpec{});
    const ArcPartition p = random_partition(rs.min_arcs, rs.min_opening, rs.seed,
                                            rs.max_opening);
    for (const auto& a : p.arcs) openings.push_back(a.half_opening);
  }
  const ArcPartition p = make_partition(openings);
  auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
  const ScalarField* field = nullptr;
  if (with_field) {
    inst.ensure_fields(cfg.solver.h);
    field = &*inst.green_Dcirc;
  }
  write_svg(render_svg(inst, field), out_path);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-domain verification suite"};
  app.require_subcommand(1);

  std::string suite = "all", config_path, out_dir, out_svg;
  bool with_field = false;

  CLI::App* verify = app.add_subcommand("verify", "run a check suite");
  verify->add_option("suite", suite,
                     "theorem|conjecture|lemma|flux|regularity|comparison|"
                     "corollary|solver-selftest|all");
  verify->add_option("--config", config_path, "JSON config file");
  verify->add_option("--seed", "solver seed override")->type_name("UINT");
  verify->add_option("--n-samples", "walk count override")->type_name("INT");
  verify->add_option("--eps", "walk termination shell override")->type_name("FLOAT");
  verify->add_option("--grid-h", "FD grid spacing override")->type_name("FLOAT");
  verify->add_option("--out", "report output directory")->type_name("DIR");
  verify->add_option("--workers", "instance worker threads")->type_name("INT");
  verify->add_flag("--render", "write per-instance SVGs");

  CLI::App* render = app.add_subcommand("render", "draw an instance as SVG");
  render->add_option("--config", config_path, "JSON config file");
  render->add_option("--out", out_svg, "output SVG path")->required();
  render->add_flag("--with-field", with_field, "overlay the Green field heatmap");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return cmd_verify(suite, config_path, *verify);
    return cmd_render(config_path, out_svg, with_field);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
