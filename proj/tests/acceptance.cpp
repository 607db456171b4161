// Acceptance gate: runs every verification criterion end to end and prints
// one PASS/FAIL line per criterion. Exit status is nonzero iff any line
// fails. Expected runtime is tens of minutes on one core.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "velling/checks.hpp"
#include "velling/harness.hpp"
#include "velling/rng.hpp"

using namespace velling;

namespace {

int failures = 0;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%02d] %-22s %s  %s\n", id, name, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// Every (WoS, FD) measurement pair collected along the way; criterion 12
// re-checks their agreement globally.
struct BackendPair {
  std::string what;
  double wos = 0.0, fd = 0.0, sigma = 0.0;
};
std::vector<BackendPair> backend_pairs;

void collect_pair(const std::string& what, const CheckReport& rep,
                  const char* wos_name, const char* fd_name) {
  const Quantity* w = rep.find(wos_name);
  const Quantity* f = rep.find(fd_name);
  // NaN marks a cross-check the grid could not resolve (sub-grid inradius)
  if (w && f && !std::isnan(f->value))
    backend_pairs.push_back({what, w->value, f->value, w->err});
}

SolverOptions batch_opts(std::uint64_t seed) {
  SolverOptions o;
  o.n = 200'000;
  o.h = 1.0 / 128;
  o.seed = seed;
  return o;
}

constexpr std::uint64_t kBatchSeed = 20260826;

}  // namespace

int main() {
  // ------------------------------------------------------------------
  // 1-2: disk oracles at the pinned resolution.
  {
    WosParams wp;
    wp.eps = 1e-4;
    wp.n = 1'000'000;
    wp.seed = 11;
    const ArcPartition quarter = make_partition({kPi / 4, 3 * kPi / 8, 3 * kPi / 8});
    std::size_t qk = 0;
    for (std::size_t k = 0; k < quarter.size(); ++k)
      if (std::abs(quarter.arcs[k].half_opening - kPi / 4) < 1e-12) qk = k;
    const StarDomain disk = StarDomain::arc_labeled_disk(quarter);
    const Estimate e =
        wos_harmonic_measure(disk, Complex(0, 0), {static_cast<int>(qk)}, wp);
    const ScalarField f = fd_solve(
        disk, [&](int label, Complex) { return label == static_cast<int>(qk) ? 1.0 : 0.0; },
        1.0 / 256);
    const double fd = f.value(Complex(0, 0));
    const bool ok = std::abs(e.value - 0.25) <= 3 * e.std_error &&
                    std::abs(fd - 0.25) <= 5e-3;
    backend_pairs.push_back({"disk-quarter", e.value, fd, e.std_error});
    report(1, "disk-measure-oracle", ok,
           fmt("wos=%.5f (3sigma=%.1e) fd=%.5f target=0.25", e.value,
               3 * e.std_error, fd));
  }
  {
    WosParams wp;
    wp.eps = 1e-4;
    wp.n = 1'000'000;
    wp.seed = 12;
    const StarDomain unit = StarDomain::unit_disk();
    const Estimate e = wos_green(unit, Complex(0, 0), Complex(0.5, 0), wp);
    const double fd = fd_green(unit, Complex(0, 0), 1.0 / 256).value(Complex(0.5, 0));
    const double target = std::log(2.0);
    const bool ok = std::abs(e.value - target) <= 3 * e.std_error &&
                    std::abs(fd - target) <= 5e-3;
    backend_pairs.push_back({"disk-green", e.value, fd, e.std_error});
    report(2, "disk-green-oracle", ok,
           fmt("wos=%.5f fd=%.5f target=log2=%.5f", e.value, fd, target));
  }

  // ------------------------------------------------------------------
  // 3: single-lens closed form 2*alpha/pi on both backends.
  {
    bool ok = true;
    std::string detail;
    WosParams wp;
    wp.n = 400'000;
    wp.seed = 13;
    for (const double alpha : {kPi / 6, kPi / 4, kPi / 3}) {
      const StarDomain lens = StarDomain::single_lens(UnitArc(0.0, alpha));
      const double target = 2 * alpha / kPi;
      const Estimate e = wos_harmonic_measure(lens, Complex(0, 0), {0}, wp);
      const ScalarField f = fd_solve(
          lens, [](int label, Complex) { return label == 0 ? 1.0 : 0.0; }, 1.0 / 128);
      const double fd = f.value(Complex(0, 0));
      const double tol = 3 * e.std_error + 5e-3;
      ok = ok && std::abs(e.value - target) <= tol && std::abs(fd - target) <= tol;
      backend_pairs.push_back({fmt("lens-%.2f", alpha), e.value, fd, e.std_error});
      detail += fmt("a=%.2f wos=%.4f fd=%.4f tgt=%.4f  ", alpha, e.value, fd, target);
    }
    report(3, "lens-closed-form", ok, detail);
  }

  // ------------------------------------------------------------------
  // 4: equal-arc equality case for n in {3, 4, 6}.
  {
    bool ok = true;
    std::string detail;
    for (const int n : {3, 4, 6}) {
      const ArcPartition p = make_partition(std::vector<double>(n, kPi / n));
      const auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
      const SolverOptions opts = batch_opts(40 + n);
      const CheckReport th = check_theorem(inst, opts);
      const CheckReport cj = check_conjecture(inst, opts);
      const double target = 1.0 / n;
      const double sig = th.find("measure_wos")->err;
      const double mD = cj.find("measure_D_wos")->value;
      const double len = cj.find("image_arc_length")->value;
      const double len_target = kTwoPi / n;
      ok = ok && std::abs(th.find("measure_wos")->value - target) <= 3 * sig + 5e-3 &&
           std::abs(mD - target) <= 3 * cj.find("measure_D_wos")->err + 5e-3 &&
           std::abs(len - len_target) <= 0.02 * len_target;
      collect_pair(fmt("equal-%d", n), th, "measure_wos", "measure_fd");
      detail += fmt("n=%d m=%.4f mD=%.4f len=%.4f/%.4f  ", n,
                    th.find("measure_wos")->value, mD, len, len_target);
    }
    report(4, "equal-arc-equality", ok, detail);
  }

  // ------------------------------------------------------------------
  // Shared random batch: 100 seed-fixed partitions with 3-8 arcs. The
  // longest half-opening is capped at 1.3 so every instance stays
  // resolvable by the grid backend (alpha_0 -> pi/2 shrinks the inradius
  // at the origin below any practical spacing); the near-degenerate
  // regime is still exercised by a WoS-only wide batch below.
  std::vector<ArcPartition> batch;
  {
    SplitMix64 rng(kBatchSeed);
    for (int i = 0; i < 100; ++i) {
      const int n = 3 + static_cast<int>(rng.next() % 6);
      batch.push_back(random_partition(n, 0.05, splitmix64(kBatchSeed + i), 1.3));
    }
  }

  // 5: longest-arc measure of the basic domain dominates omega_0;
  // strictly for genuinely unequal partitions.
  std::vector<CheckReport> theorem_reports;
  {
    bool ok = true;
    double min_margin = 1e30;
    int strict_needed = 0, strict_seen = 0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto inst =
          VellingInstance::make(batch[i], PolarArc::geodesic_graph(batch[i].alpha0()));
      CheckReport rep = check_theorem(inst, batch_opts(100 + i));
      if (!rep.passed && batch[i].length_spread() > 0.2) {
        // near-threshold margins get a higher-resolution retry
        SolverOptions fine = batch_opts(100 + i);
        fine.n = 1'000'000;
        rep = check_theorem(inst, fine);
      }
      ok = ok && rep.passed;
      min_margin = std::min(min_margin, rep.margin);
      if (batch[i].length_spread() > 0.2) {
        ++strict_needed;
        if (rep.find("strict")->value == 1.0) {
          ++strict_seen;
        } else {
          SolverOptions fine = batch_opts(100 + i);
          fine.n = 2'000'000;
          const CheckReport rep2 = check_theorem(inst, fine);
          if (rep2.find("strict")->value == 1.0) ++strict_seen;
        }
      }
      collect_pair(fmt("theorem-%zu", i), rep, "measure_wos", "measure_fd");
      theorem_reports.push_back(std::move(rep));
    }
    // near-degenerate wide partitions, walk-only (the grid cross-check
    // reports NaN there and is skipped)
    double wide_min = 1e30;
    for (int i = 0; i < 10; ++i) {
      const ArcPartition p = random_partition(3, 0.05, splitmix64(kBatchSeed * 31 + i));
      const auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
      const CheckReport rep = check_theorem(inst, batch_opts(150 + i));
      ok = ok && rep.passed;
      wide_min = std::min(wide_min, rep.margin);
      collect_pair(fmt("theorem-wide-%d", i), rep, "measure_wos", "measure_fd");
    }
    ok = ok && strict_seen == strict_needed;
    report(5, "measure-batch", ok,
           fmt("100+10 instances, min margin=%.4f (wide %.4f), strict %d/%d",
               min_margin, wide_min, strict_seen, strict_needed));
  }

  // 6: two-step domain-extension chain on the same batch.
  {
    bool ok = true;
    double min_chain = 1e30, min_conj = 1e30;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto inst =
          VellingInstance::make(batch[i], PolarArc::geodesic_graph(batch[i].alpha0()));
      const CheckReport rep = check_conjecture(inst, batch_opts(200 + i));
      ok = ok && rep.passed;
      min_chain = std::min(min_chain, rep.find("chain_margin")->value);
      min_conj = std::min(min_conj, rep.find("conjecture_margin")->value);
      collect_pair(fmt("conjecture-%zu", i), rep, "measure_D_wos", "measure_D_fd");
    }
    report(6, "extension-chain-batch", ok,
           fmt("100 instances, min chain=%.4f, min excess=%.4f", min_chain, min_conj));
  }

  // ------------------------------------------------------------------
  // 7-8: angular monotonicity and the flux identity on 10 random
  // instances. Openings are capped so the powered domain keeps an
  // inradius above the probe margin; the fields are reused across both.
  std::vector<CheckReport> regularity_extra;
  {
    bool lemma_ok = true, flux_ok = true;
    double min_deriv = 1e30, max_sym = 0.0, max_rel = 0.0;
    long min_probes = 1L << 30;
    for (int i = 0; i < 10; ++i) {
      const int n = 6 + i % 3;
      // jittered-equal openings: +-20% around pi/n keeps the powered
      // domain's inradius above the probe margin
      SplitMix64 r(splitmix64(7000 + i));
      std::vector<double> o(n);
      double sum = 0.0;
      for (double& x : o) {
        x = 1.0 + 0.4 * (r.uniform() - 0.5);
        sum += x;
      }
      for (double& x : o) x *= kPi / sum;
      const ArcPartition p = make_partition(o);
      auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
      const SolverOptions opts = batch_opts(300 + i);
      inst.ensure_fields(opts.h);
      const CheckReport lm = check_lemma(inst, opts);
      lemma_ok = lemma_ok && lm.passed &&
                 lm.find("max_conjugation_gap")->value <= 1e-2;
      min_deriv = std::min(min_deriv, lm.find("min_angular_derivative")->value);
      max_sym = std::max(max_sym, lm.find("max_conjugation_gap")->value);
      min_probes = std::min(min_probes,
                            static_cast<long>(lm.find("probes")->value));
      const CheckReport fx = check_flux(inst, opts);
      flux_ok = flux_ok && fx.passed && fx.find("rel_err_phi0")->value <= 0.02 &&
                fx.find("rel_err_green")->value <= 0.02;
      max_rel = std::max(max_rel, std::max(fx.find("rel_err_phi0")->value,
                                           fx.find("rel_err_green")->value));
      if (i < 2) regularity_extra.push_back(check_phi_regularity(inst, opts));
    }
    report(7, "angular-monotonicity", lemma_ok,
           fmt("10 instances, min deriv=%.4f, sym gap=%.1e, min probes=%ld",
               min_deriv, max_sym, min_probes));
    report(8, "flux-identity", flux_ok,
           fmt("10 instances, max rel err=%.4f (tol 0.02)", max_rel));
  }

  // ------------------------------------------------------------------
  // 9: comparison-function deficiency on the full batch and the
  // equal-arc cases, plus the near-origin cancellation scan.
  {
    bool ok = true;
    double worst_u = -1e30;
    long min_probes = 1L << 30;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      auto inst =
          VellingInstance::make(batch[i], PolarArc::geodesic_graph(batch[i].alpha0()));
      const SolverOptions opts = batch_opts(400 + i);
      inst.ensure_fields(opts.h);
      const CheckReport rep = check_comparison(inst, opts);
      ok = ok && rep.passed;
      worst_u = std::max(worst_u, rep.find("max_u")->value);
      min_probes = std::min(min_probes, static_cast<long>(rep.find("probes")->value));
    }
    double worst_equal = 0.0;
    for (const int n : {3, 4, 6}) {
      const ArcPartition p = make_partition(std::vector<double>(n, kPi / n));
      auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
      const SolverOptions opts = batch_opts(450 + n);
      inst.ensure_fields(opts.h);
      const CheckReport rep = check_comparison(inst, opts);
      ok = ok && rep.passed;
      worst_equal = std::max(worst_equal, rep.find("max_abs_u")->value);
      if (n == 6) regularity_extra.push_back(check_phi_regularity(inst, opts));
    }
    report(9, "comparison-deficiency", ok,
           fmt("100+3 instances, max u=%.2e, equal max|u|=%.2e, min probes=%ld",
               worst_u, worst_equal, min_probes));
  }

  // ------------------------------------------------------------------
  // 10: regularity of phi across sector rays (mean-value deviation
  // calibrated on interior control points; mirror identity to 1e-12).
  {
    const ArcPartition p = make_partition({1.2, 0.7, 0.7, kPi - 2.6});
    auto inst = VellingInstance::make(p, PolarArc::geodesic_graph(p.alpha0()));
    const SolverOptions opts = batch_opts(500);
    inst.ensure_fields(opts.h);
    regularity_extra.push_back(check_phi_regularity(inst, opts));
    bool ok = true;
    double worst_mirror = 0.0, worst_ratio = 0.0;
    for (const CheckReport& rep : regularity_extra) {
      ok = ok && rep.passed && rep.find("mirror_gap")->value <= 1e-12;
      worst_mirror = std::max(worst_mirror, rep.find("mirror_gap")->value);
      const double thr = rep.find("threshold")->value;
      if (thr > 0)
        worst_ratio = std::max(worst_ratio, rep.find("ray_deviation")->value / thr);
    }
    report(10, "phi-ray-regularity", ok,
           fmt("%zu instances, mirror gap=%.1e, worst deviation ratio=%.2f",
               regularity_extra.size(), worst_mirror, worst_ratio));
  }

  // ------------------------------------------------------------------
  // 11: inscribed-polygon side measure dominates omega_0 on the batch;
  // the inscribed square gives exactly 1/4.
  {
    bool ok = true;
    double min_margin = 1e30;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const CheckReport rep = check_corollary(batch[i], batch_opts(600 + i));
      ok = ok && rep.passed;
      min_margin = std::min(min_margin, rep.margin);
    }
    const ArcPartition square = make_partition(std::vector<double>(4, kPi / 4));
    const CheckReport sq = check_corollary(square, batch_opts(650));
    const double m = sq.find("side_measure_wos")->value;
    const double sig = sq.find("side_measure_wos")->err;
    ok = ok && sq.passed && std::abs(m - 0.25) <= 3 * sig + 5e-3;
    report(11, "polygon-batch", ok,
           fmt("100 instances, min margin=%.4f, square side=%.4f", min_margin, m));
  }

  // ------------------------------------------------------------------
  // 12: backend agreement on every collected pair plus bit-identical
  // determinism across reruns, walk threads, and harness workers.
  {
    bool ok = true;
    double worst_gap = 0.0;
    std::string worst_what;
    for (const BackendPair& bp : backend_pairs) {
      const double gap = std::abs(bp.wos - bp.fd);
      const double tol = 3 * bp.sigma + 5e-3;
      if (gap > worst_gap) {
        worst_gap = gap;
        worst_what = bp.what;
      }
      ok = ok && gap <= tol;
    }

    const StarDomain lens = StarDomain::single_lens(UnitArc(0.0, kPi / 3));
    WosParams wp;
    wp.n = 50'000;
    wp.seed = 99;
    const Estimate a = wos_harmonic_measure(lens, Complex(0, 0), {0}, wp);
    const Estimate b = wos_harmonic_measure(lens, Complex(0, 0), {0}, wp);
    WosParams wp2 = wp;
    wp2.threads = 2;
    const Estimate c = wos_harmonic_measure(lens, Complex(0, 0), {0}, wp2);
    ok = ok && a.value == b.value && a.std_error == b.std_error &&
         a.value == c.value && a.std_error == c.std_error;

    ExperimentConfig cfg;
    cfg.suites = {"theorem"};
    cfg.openings = {{1.2, 0.7, 0.7, kPi - 2.6}, {1.1, 0.9, 0.6, kPi - 2.6}};
    cfg.solver.n = 20'000;
    cfg.solver.h = 1.0 / 64;
    const auto r1 = run_suite(cfg);
    cfg.workers = 2;
    const auto r2 = run_suite(cfg);
    ok = ok && r1.size() == r2.size();
    for (std::size_t i = 0; ok && i < r1.size(); ++i)
      ok = r1[i].instance_id == r2[i].instance_id && r1[i].value == r2[i].value &&
           r1[i].std_error == r2[i].std_error && r1[i].margin == r2[i].margin;

    report(12, "backends-determinism", ok,
           fmt("%zu pairs, worst gap=%.2e (%s); reruns bit-identical",
               backend_pairs.size(), worst_gap, worst_what.c_str()));
  }

  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAILURE" : "SUCCESS",
              failures);
  return failures ? 1 : 0;
}
