#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "velling/harness.hpp"
#include "velling/rng.hpp"
#include "velling/svg.hpp"

namespace velling {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

const std::vector<std::string> kCheckOrder = {
    "selftest", "theorem", "conjecture", "lemma",      "flux",
    "regularity", "comparison", "corollary"};

int check_rank(const std::string& name) {
  for (std::size_t i = 0; i < kCheckOrder.size(); ++i)
    if (name.rfind(kCheckOrder[i], 0) == 0) return static_cast<int>(i);
  return static_cast<int>(kCheckOrder.size());
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Headline quantity per check for the CSV value/std_error columns.
const char* headline_of(const std::string& check) {
  if (check == "theorem") return "measure_wos";
  if (check == "conjecture") return "measure_D_wos";
  if (check == "lemma") return "min_angular_derivative";
  if (check == "flux") return "flux_phi0";
  if (check == "regularity") return "ray_deviation";
  if (check == "comparison") return "max_u";
  if (check == "corollary") return "side_measure_wos";
  return nullptr;
}

ReportRow row_from_report(const CheckReport& rep) {
  ReportRow row;
  row.check = rep.name;
  row.margin = rep.margin;
  row.passed = rep.passed;
  row.runtime_s = rep.runtime_s;
  row.quantities = rep.quantities;
  if (const char* h = headline_of(rep.name))
    if (const Quantity* q = rep.find(h)) {
      row.value = q->value;
      row.std_error = q->err;
    }
  if (const Quantity* q = rep.find("omega0")) row.omega0 = q->value;
  return row;
}

// ---------------------------------------------------------------------------
// Solver self-tests: closed-form disk and single-lens oracles on both
// backends.

ReportRow oracle_row(const std::string& check, double value, double err,
                     double target, double tol, double runtime_s) {
  ReportRow row;
  row.check = check;
  row.value = value;
  row.std_error = err;
  row.margin = tol - std::abs(value - target);
  row.passed = row.margin >= 0.0;
  row.runtime_s = runtime_s;
  row.quantities = {{"target", target, 0.0}, {"tolerance", tol, 0.0}};
  return row;
}

std::vector<ReportRow> selftest_rows(const SolverOptions& opts) {
  std::vector<ReportRow> rows;
  const auto timed = [](auto&& fn) {
    const auto t0 = Clock::now();
    fn();
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  // Quarter-circle arc of the disk: measure 1/4.
  const ArcPartition quarter = make_partition({kPi / 4, 3 * kPi / 8, 3 * kPi / 8});
  std::size_t qk = 0;
  for (std::size_t k = 0; k < quarter.size(); ++k)
    if (std::abs(quarter.arcs[k].half_opening - kPi / 4) < 1e-12) qk = k;
  const StarDomain disk = StarDomain::arc_labeled_disk(quarter);
  {
    Estimate e;
    const double s = timed([&] {
      e = wos_harmonic_measure(disk, Complex(0, 0), {static_cast<int>(qk)}, opts.wos());
    });
    rows.push_back(oracle_row("selftest-disk-wos", e.value, e.std_error, 0.25,
                              3.0 * e.std_error, s));
  }
  {
    double v = 0.0;
    const double s = timed([&] {
      const ScalarField f = fd_solve(
          disk, [&](int label, Complex) { return label == static_cast<int>(qk) ? 1.0 : 0.0; },
          opts.h);
      v = f.value(Complex(0, 0));
    });
    rows.push_back(oracle_row("selftest-disk-fd", v, 0.0, 0.25, opts.fd_tol, s));
  }

  // Green function of the disk: g(0.5, 0) = log 2.
  const StarDomain unit = StarDomain::unit_disk();
  {
    Estimate e;
    const double s = timed([&] {
      e = wos_green(unit, Complex(0, 0), Complex(0.5, 0), opts.wos());
    });
    rows.push_back(oracle_row("selftest-green-wos", e.value, e.std_error,
                              std::log(2.0), 3.0 * e.std_error, s));
  }
  {
    double v = 0.0;
    const double s = timed([&] {
      v = fd_green(unit, Complex(0, 0), opts.h).value(Complex(0.5, 0));
    });
    rows.push_back(oracle_row("selftest-green-fd", v, 0.0, std::log(2.0), opts.fd_tol, s));
  }

  // Disk minus one lens, alpha = pi/4: measure of the geodesic side 1/2.
  const StarDomain lens = StarDomain::single_lens(UnitArc(0.0, kPi / 4));
  {
    Estimate e;
    const double s = timed([&] {
      e = wos_harmonic_measure(lens, Complex(0, 0), {0}, opts.wos());
    });
    rows.push_back(oracle_row("selftest-lens-wos", e.value, e.std_error, 0.5,
                              3.0 * e.std_error + opts.fd_tol, s));
  }
  {
    double v = 0.0;
    const double s = timed([&] {
      const ScalarField f = fd_solve(
          lens, [](int label, Complex) { return label == 0 ? 1.0 : 0.0; }, opts.h);
      v = f.value(Complex(0, 0));
    });
    rows.push_back(oracle_row("selftest-lens-fd", v, 0.0, 0.5, opts.fd_tol, s));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Instance execution

struct InstanceSpec {
  int id = 0;
  std::vector<double> openings;
};

std::vector<ReportRow> run_instance(const InstanceSpec& spec,
                                    const std::vector<std::string>& checks,
                                    const ExperimentConfig& cfg) {
  SolverOptions opts = cfg.solver;
  opts.seed = splitmix64(cfg.solver.seed ^
                         (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(spec.id + 1)));

  std::vector<ReportRow> rows;
  const auto emit = [&](ReportRow row) {
    row.instance_id = spec.id;
    row.openings = spec.openings;
    row.seed = opts.seed;
    rows.push_back(std::move(row));
  };
  const auto emit_error = [&](const std::string& check, const std::string& what) {
    ReportRow row;
    row.check = check;
    row.error = what;
    emit(std::move(row));
  };

  std::optional<VellingInstance> inst;
  try {
    const ArcPartition p = make_partition(spec.openings);
    inst.emplace(VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0())));
    const bool needs_fields =
        std::any_of(checks.begin(), checks.end(), [](const std::string& c) {
          return c == "lemma" || c == "flux" || c == "regularity" || c == "comparison";
        });
    if (needs_fields) inst->ensure_fields(opts.h);
  } catch (const std::exception& e) {
    for (const auto& c : checks)
      if (c != "selftest") emit_error(c, e.what());
    return rows;
  }

  for (const auto& c : checks) {
    try {
      if (c == "theorem") emit(row_from_report(check_theorem(*inst, opts)));
      else if (c == "conjecture") emit(row_from_report(check_conjecture(*inst, opts)));
      else if (c == "lemma") emit(row_from_report(check_lemma(*inst, opts)));
      else if (c == "flux") emit(row_from_report(check_flux(*inst, opts)));
      else if (c == "regularity") emit(row_from_report(check_phi_regularity(*inst, opts)));
      else if (c == "comparison") emit(row_from_report(check_comparison(*inst, opts)));
      else if (c == "corollary") emit(row_from_report(check_corollary(inst->partition, opts)));
    } catch (const std::exception& e) {
      emit_error(c, e.what());
    }
  }
  return rows;
}

void write_outputs(const ExperimentConfig& cfg, const std::vector<ReportRow>& rows) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const auto dump = [&](const std::string& name, const std::string& text) {
    std::ofstream f(fs::path(cfg.out_dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("run_suite: cannot write " + name);
    f << text;
  };
  dump("report.csv", to_csv(rows));
  dump("report.json", report_json(cfg, rows));
  if (cfg.render) {
    std::set<int> done;
    for (const auto& row : rows) {
      if (row.instance_id < 0 || row.openings.empty() || !done.insert(row.instance_id).second)
        continue;
      const ArcPartition p = make_partition(row.openings);
      const auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
      char name[64];
      std::snprintf(name, sizeof name, "instance_%03d.svg", row.instance_id);
      write_svg(render_svg(inst), (fs::path(cfg.out_dir) / name).string());
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

ArcPartition random_partition(int n_arcs, double min_opening, std::uint64_t seed,
                              double max_opening) {
  if (n_arcs < 3) throw std::invalid_argument("random_partition: need >= 3 arcs");
  max_opening = std::min(max_opening, kMaxHalfOpening);
  if (!(min_opening > 0.0) || n_arcs * min_opening >= kPi ||
      n_arcs * max_opening <= kPi)
    throw std::invalid_argument("random_partition: infeasible opening bounds");

  SplitMix64 rng(splitmix64(seed));
  for (int attempt = 0; attempt < 10'000; ++attempt) {
    std::vector<double> spacings(n_arcs);
    double sum = 0.0;
    for (double& s : spacings) {
      s = -std::log(1.0 - rng.uniform());  // Exp(1); uniform() < 1
      sum += s;
    }
    bool ok = true;
    for (double& s : spacings) {
      s *= kPi / sum;
      if (s < min_opening || s > max_opening) ok = false;
    }
    if (ok) return make_partition(spacings);
  }
  throw std::runtime_error("random_partition: rejection cap exceeded");
}

void ExperimentConfig::validate() const {
  for (const auto& s : suites)
    if (s != "all" && s != "solver-selftest" && !headline_of(s))
      throw std::invalid_argument("unknown suite: " + s);
  const SolverOptions& so = solver;
  if (!(so.eps > 0 && so.n > 0 && so.h > 0 && so.dt > 0 && so.spacing > 0 &&
        so.offset > 0 && so.probe_radial > 0 && so.probe_angular > 0 &&
        so.fd_tol > 0 && so.boundary_margin > 0 && so.threads > 0))
    throw std::invalid_argument("solver parameters must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (random) {
    const RandomSpec& r = *random;
    if (r.count < 0 || r.min_arcs < 3 || r.max_arcs < r.min_arcs)
      throw std::invalid_argument("bad random arc counts");
    if (r.min_opening < 1e-2 || r.max_opening > kMaxHalfOpening ||
        r.max_opening <= r.min_opening)
      throw std::invalid_argument("bad random opening bounds");
  }
  for (const auto& o : openings)
    make_partition(o);  // throws on invalid openings
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig cfg;
  if (j.contains("suites")) cfg.suites = j["suites"].get<std::vector<std::string>>();
  if (j.contains("openings"))
    cfg.openings = j["openings"].get<std::vector<std::vector<double>>>();
  if (j.contains("random")) {
    const json& r = j["random"];
    RandomSpec rs;
    rs.count = r.value("count", rs.count);
    rs.min_arcs = r.value("min_arcs", rs.min_arcs);
    rs.max_arcs = r.value("max_arcs", rs.max_arcs);
    rs.min_opening = r.value("min_opening", rs.min_opening);
    rs.max_opening = r.value("max_opening", rs.max_opening);
    rs.seed = r.value("seed", rs.seed);
    cfg.random = rs;
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    SolverOptions& so = cfg.solver;
    so.eps = s.value("eps", so.eps);
    so.n = s.value("n", so.n);
    so.seed = s.value("seed", so.seed);
    so.threads = s.value("threads", so.threads);
    so.h = s.value("h", so.h);
    so.dt = s.value("dt", so.dt);
    so.spacing = s.value("spacing", so.spacing);
    so.offset = s.value("offset", so.offset);
    so.probe_radial = s.value("probe_radial", so.probe_radial);
    so.probe_angular = s.value("probe_angular", so.probe_angular);
    so.fd_tol = s.value("fd_tol", so.fd_tol);
    so.boundary_margin = s.value("boundary_margin", so.boundary_margin);
  }
  cfg.workers = j.value("workers", cfg.workers);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.render = j.value("render", cfg.render);
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  return from_json(text);
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["suites"] = suites;
  if (!openings.empty()) j["openings"] = openings;
  if (random)
    j["random"] = {{"count", random->count},
                   {"min_arcs", random->min_arcs},
                   {"max_arcs", random->max_arcs},
                   {"min_opening", random->min_opening},
                   {"max_opening", random->max_opening},
                   {"seed", random->seed}};
  j["solver"] = {{"eps", solver.eps},
                 {"n", solver.n},
                 {"seed", solver.seed},
                 {"threads", solver.threads},
                 {"h", solver.h},
                 {"dt", solver.dt},
                 {"spacing", solver.spacing},
                 {"offset", solver.offset},
                 {"probe_radial", solver.probe_radial},
                 {"probe_angular", solver.probe_angular},
                 {"fd_tol", solver.fd_tol},
                 {"boundary_margin", solver.boundary_margin}};
  j["workers"] = workers;
  j["out_dir"] = out_dir;
  j["render"] = render;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Suite execution

std::vector<std::string> suite_checks(const std::vector<std::string>& suites) {
  std::vector<std::string> out;
  const auto add = [&](const std::string& c) {
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
  };
  for (const auto& s : suites) {
    if (s == "all") {
      add("selftest");
      for (const char* c : {"theorem", "conjecture", "lemma", "flux", "regularity",
                            "comparison", "corollary"})
        add(c);
    } else if (s == "solver-selftest") {
      add("selftest");
    } else {
      add(s);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const std::string& a, const std::string& b) {
              return check_rank(a) < check_rank(b);
            });
  return out;
}

std::vector<ReportRow> run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::vector<std::string> checks = suite_checks(cfg.suites);

  std::vector<InstanceSpec> specs;
  for (const auto& o : cfg.openings)
    specs.push_back({static_cast<int>(specs.size()), o});
  if (cfg.random)
    for (int i = 0; i < cfg.random->count; ++i) {
      SplitMix64 rng = trajectory_stream(cfg.random->seed, static_cast<std::uint64_t>(i));
      const int span = cfg.random->max_arcs - cfg.random->min_arcs + 1;
      const int n_arcs = cfg.random->min_arcs +
                         static_cast<int>(rng.next() % static_cast<std::uint64_t>(span));
      const ArcPartition p = random_partition(n_arcs, cfg.random->min_opening,
                                              rng.next(), cfg.random->max_opening);
      std::vector<double> o;
      for (const auto& a : p.arcs) o.push_back(a.half_opening);
      specs.push_back({static_cast<int>(specs.size()), std::move(o)});
    }

  std::vector<ReportRow> rows;
  if (std::find(checks.begin(), checks.end(), "selftest") != checks.end()) {
    SolverOptions opts = cfg.solver;
    for (ReportRow& row : selftest_rows(opts)) {
      row.seed = opts.seed;
      rows.push_back(std::move(row));
    }
  }

  const std::vector<std::string> inst_checks = [&] {
    std::vector<std::string> c = checks;
    c.erase(std::remove(c.begin(), c.end(), "selftest"), c.end());
    return c;
  }();

  if (!inst_checks.empty() && !specs.empty()) {
    std::vector<std::vector<ReportRow>> slots(specs.size());
    const int workers = std::min<int>(cfg.workers, static_cast<int>(specs.size()));
    if (workers <= 1) {
      for (std::size_t i = 0; i < specs.size(); ++i)
        slots[i] = run_instance(specs[i], inst_checks, cfg);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < specs.size();
               i = next.fetch_add(1))
            slots[i] = run_instance(specs[i], inst_checks, cfg);
        });
      for (auto& th : pool) th.join();
    }
    for (auto& slot : slots)
      for (auto& row : slot) rows.push_back(std::move(row));
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     if (a.instance_id != b.instance_id)
                       return a.instance_id < b.instance_id;
                     return check_rank(a.check) < check_rank(b.check);
                   });

  if (!cfg.out_dir.empty()) write_outputs(cfg, rows);
  return rows;
}

bool all_passed(const std::vector<ReportRow>& rows) {
  return !rows.empty() &&
         std::all_of(rows.begin(), rows.end(),
                     [](const ReportRow& r) { return r.passed; });
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out =
      "instance_id,n_arcs,openings,check,omega0,value,std_error,margin,passed,"
      "seed,runtime_s\n";
  for (const auto& r : rows) {
    std::string joined;
    for (std::size_t i = 0; i < r.openings.size(); ++i) {
      if (i) joined += ';';
      joined += g17(r.openings[i]);
    }
    char head[32];
    std::snprintf(head, sizeof head, "%d,%zu,", r.instance_id, r.openings.size());
    out += head;
    out += joined + ',' + r.check + ',' + g17(r.omega0) + ',' + g17(r.value) + ',' +
           g17(r.std_error) + ',' + g17(r.margin) + ',' + (r.passed ? "1" : "0") +
           ',' + std::to_string(r.seed) + ',' + g17(r.runtime_s) + '\n';
  }
  return out;
}

std::string report_json(const ExperimentConfig& cfg, const std::vector<ReportRow>& rows) {
  json j;
  j["config"] = json::parse(cfg.to_json());
  j["all_passed"] = all_passed(rows);
  json jrows = json::array();
  for (const auto& r : rows) {
    json q = json::object();
    for (const auto& quantity : r.quantities)
      q[quantity.name] = {{"value", quantity.value}, {"err", quantity.err}};
    jrows.push_back({{"instance_id", r.instance_id},
                     {"openings", r.openings},
                     {"check", r.check},
                     {"omega0", r.omega0},
                     {"value", r.value},
                     {"std_error", r.std_error},
                     {"margin", r.margin},
                     {"passed", r.passed},
                     {"seed", r.seed},
                     {"runtime_s", r.runtime_s},
                     {"error", r.error},
                     {"quantities", q}});
  }
  j["rows"] = std::move(jrows);
  return j.dump(2);
}

}  // namespace velling
