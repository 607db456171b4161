#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "velling/checks.hpp"
#include "velling/rng.hpp"

namespace velling {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double fd_measure(const StarDomain& d, const std::set<int>& target, double h) {
  // The grid cannot interpolate at the origin when the inradius there is
  // below its resolution (near-degenerate partitions); the cross-check is
  // then reported as NaN and skipped by consumers.
  if (d.distance_to_boundary(Complex(0, 0)).first < 2 * h)
    return std::numeric_limits<double>::quiet_NaN();
  const ScalarField f = fd_solve(
      d, [&target](int label, Complex) { return target.count(label) ? 1.0 : 0.0; }, h);
  return f.value(Complex(0, 0));
}

}  // namespace

std::string SolverOptions::fingerprint() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "eps=%g;n=%lld;h=%g;dt=%g;spacing=%g;offset=%g;seed=%llu",
                eps, n, h, dt, spacing, offset,
                static_cast<unsigned long long>(seed));
  return buf;
}

WosParams SolverOptions::wos() const {
  WosParams w;
  w.eps = eps;
  w.n = n;
  w.seed = seed;
  w.threads = threads;
  return w;
}

double omega0_of(const ArcPartition& p) { return p.alpha0() / kPi; }

const Quantity* CheckReport::find(const std::string& qname) const {
  for (const auto& q : quantities)
    if (q.name == qname) return &q;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Instance and comparison function

VellingInstance VellingInstance::make(const ArcPartition& p, const PolarArc& basic) {
  VellingInstance inst;
  inst.partition = p;
  inst.basic = basic;
  inst.omega0 = omega0_of(p);
  inst.D = velling_domain(p);
  inst.Dcirc = basic_domain(p, basic);
  inst.Omega = omega_domain(basic, inst.omega0);
  inst.sector_begins = partition_spans(p);
  return inst;
}

void VellingInstance::ensure_fields(double h) {
  if (!green_Omega || green_Omega->h != h)
    green_Omega = fd_green(Omega, Complex(0, 0), h);
  if (!green_Dcirc || green_Dcirc->h != h)
    green_Dcirc = fd_green(Dcirc, Complex(0, 0), h);
  if (!u_origin) {
    // g(z, 0, Omega) + log|z| at z -> 0, grid-independent via WoS; the tiny
    // start offset keeps the log terms finite and they cancel exactly.
    WosParams wp;
    wp.n = 20'000;
    wp.seed = 0x6f726967u;
    const Complex z0(1e-9, 0.0);
    // narrow-throat domains need a termination shell below the clearance;
    // when the throat is too thin even for that, fall back to the midpoint
    // of the max-principle range [log(rho0)/omega0, 0] of the regular part
    const double clearance = Omega.distance_to_boundary(z0).first;
    if (clearance > 1e-7) {
      wp.eps = std::min(wp.eps, 0.1 * clearance);
      u_origin = wos_green(Omega, Complex(0, 0), z0, wp).value + std::log(std::abs(z0));
    } else {
      u_origin = std::log(basic.rho0) / (2 * omega0);
    }
  }
}

std::size_t VellingInstance::sector_of(double theta) const {
  const double t = sector_begins[0] + wrap_from(theta, sector_begins[0]);
  std::size_t lo = 0, hi = sector_begins.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (sector_begins[mid] <= t) lo = mid; else hi = mid;
  }
  return lo;
}

namespace {

// phi_0 at polar point (r, s) with s the angle relative to the positive ray,
// |s| <= alpha_0. The Omega Green field is read at (Re w, |Im w|). The power
// map compresses radii, so mapped points near the origin can land in a throat
// of Omega narrower than the grid spacing; strict mode throws there (probe
// loops skip such points), lenient mode substitutes the origin value, which
// keeps the result inside the maximum-principle range of the regular part.
double phi0_polar(const VellingInstance& inst, double r, double s,
                  bool lenient = false) {
  const double w_angle = s / inst.omega0;
  const double w_r = std::pow(r, 1.0 / inst.omega0);
  const Complex w(w_r * std::cos(w_angle), std::abs(w_r * std::sin(w_angle)));
  const ScalarField& g = *inst.green_Omega;
  if (g.can_eval(w)) return -std::log(r) + inst.omega0 * g.regular(w);
  if (lenient && inst.u_origin) return -std::log(r) + inst.omega0 * *inst.u_origin;
  throw std::domain_error("phi0: mapped point is not grid-resolvable");
}

double phi_lenient(const VellingInstance& inst, const Complex& z);

}  // namespace

double phi0_at(const VellingInstance& inst, const Complex& z) {
  const double r = std::abs(z);
  if (r == 0.0) throw std::domain_error("phi0_at: z must be nonzero");
  const double a = std::arg(z);
  if (std::abs(a) > inst.partition.alpha0() + 1e-9)
    throw std::domain_error("phi0_at: z outside sector 0");
  return phi0_polar(inst, r, a);
}

namespace {

double phi_impl(const VellingInstance& inst, const Complex& z, bool lenient) {
  const double r = std::abs(z);
  if (r == 0.0) throw std::domain_error("phi_at: z must be nonzero");
  const double theta = std::arg(z);
  const std::size_t k = inst.sector_of(theta);
  const UnitArc& arc = inst.partition.arcs[k];
  const double dk = inst.partition.deviations[k];
  // Offset from the sector center; Im(e^{-i theta_k} z) >= 0 iff a >= 0.
  const double a = wrap_angle(theta - arc.center);
  const double s = a >= 0.0 ? a + dk : a - dk;
  return phi0_polar(inst, r, s, lenient);
}

double phi_lenient(const VellingInstance& inst, const Complex& z) {
  return phi_impl(inst, z, true);
}

}  // namespace

double phi_at(const VellingInstance& inst, const Complex& z) {
  return phi_impl(inst, z, false);
}

double u_at(const VellingInstance& inst, const Complex& z) {
  return phi_at(inst, z) - inst.green_Dcirc->value(z);
}

// ---------------------------------------------------------------------------
// Checks

CheckReport check_theorem(const VellingInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "theorem";
  rep.fingerprint = opts.fingerprint();

  const Estimate wos = wos_harmonic_measure(inst.Dcirc, Complex(0, 0), {0}, opts.wos());
  const double fd = fd_measure(inst.Dcirc, {0}, opts.h);
  const double tol = 3.0 * wos.std_error + opts.fd_tol;
  rep.margin = wos.value - inst.omega0;
  rep.passed = rep.margin >= -tol;
  // strictness is a statement about the measure itself, so it is judged
  // against the sampling noise alone, not the FD cross-check allowance
  const bool strict = !inst.equal_arcs() && rep.margin > 3.0 * wos.std_error;
  rep.quantities = {
      {"omega0", inst.omega0, 0.0},
      {"measure_wos", wos.value, wos.std_error},
      {"measure_fd", fd, opts.fd_tol},
      {"backend_gap", std::abs(wos.value - fd), 0.0},
      {"tolerance", tol, 0.0},
      {"strict", strict ? 1.0 : 0.0, 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

CheckReport check_conjecture(const VellingInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "conjecture";
  rep.fingerprint = opts.fingerprint();
  if (!inst.basic.geodesic)
    throw std::invalid_argument("check_conjecture: needs the geodesic basic arc");

  const Estimate wD = wos_harmonic_measure(inst.D, Complex(0, 0), {0}, opts.wos());
  WosParams wp = opts.wos();
  wp.seed = splitmix64(opts.seed ^ 0x636f6e6aULL);  // independent stream
  const Estimate wDc = wos_harmonic_measure(inst.Dcirc, Complex(0, 0), {0}, wp);
  const double fdD = fd_measure(inst.D, {0}, opts.h);

  const double sigma = std::sqrt(wD.std_error * wD.std_error +
                                 wDc.std_error * wDc.std_error);
  const double tol = 3.0 * sigma + opts.fd_tol;
  const double chain_margin = wD.value - wDc.value;
  const double conj_margin = wD.value - inst.omega0;
  rep.margin = std::min(chain_margin, conj_margin);
  rep.passed = rep.margin >= -tol;
  rep.quantities = {
      {"omega0", inst.omega0, 0.0},
      {"measure_D_wos", wD.value, wD.std_error},
      {"measure_D_fd", fdD, opts.fd_tol},
      {"measure_Dcirc_wos", wDc.value, wDc.std_error},
      {"chain_margin", chain_margin, sigma},
      {"conjecture_margin", conj_margin, wD.std_error},
      {"image_arc_length", kTwoPi * wD.value, kTwoPi * wD.std_error},
      {"tolerance", tol, 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

CheckReport check_lemma(const VellingInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "lemma";
  rep.fingerprint = opts.fingerprint();
  if (!inst.green_Omega)
    throw std::logic_error("check_lemma: ensure_fields was not called");
  const ScalarField& g = *inst.green_Omega;

  double min_deriv = std::numeric_limits<double>::infinity();
  double max_sym = 0.0;
  int used = 0;
  for (int j = 0; j < opts.probe_angular; ++j) {
    const double t = kPi * (j + 0.5) / opts.probe_angular;
    const double rmax = inst.Omega.boundary_radius(t);
    for (int i = 0; i < opts.probe_radial; ++i) {
      const Complex z = std::polar(rmax * (i + 0.5) / opts.probe_radial, t);
      if (inst.Omega.boundary_proximity(z).first < opts.boundary_margin) continue;
      if (!g.can_eval(z) || !g.can_eval(std::conj(z))) continue;
      min_deriv = std::min(min_deriv, angular_derivative(g, z, opts.dt));
      max_sym = std::max(max_sym, std::abs(g.value(z) - g.value(std::conj(z))));
      ++used;
    }
  }
  rep.margin = min_deriv;
  rep.passed = used > 0 && min_deriv > 0.0 && max_sym <= 1e-2;
  rep.quantities = {
      {"min_angular_derivative", min_deriv, 0.0},
      {"max_conjugation_gap", max_sym, 0.0},
      {"probes", static_cast<double>(used), 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

CheckReport check_flux(const VellingInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "flux";
  rep.fingerprint = opts.fingerprint();
  if (!inst.green_Omega || !inst.green_Dcirc)
    throw std::logic_error("check_flux: ensure_fields was not called");

  const double offset = std::max(opts.offset, 2.0 * opts.h);
  // Direct flux of phi_0 through the basic arc, split as -log|z| (analytic
  // normal derivative) plus the smooth remainder v = phi + log|z|, whose
  // boundary value log|p| is exact since phi vanishes on the arc. The offset
  // adapts to the power-map derivative so the stations' images keep grid
  // clearance in Omega; phi extends phi_0 past the sector rays, so stations
  // near the arc ends stay admissible.
  const double w_clear = 2.5 * opts.h;
  const double flux_phi0 = normal_flux(
      [&inst, &opts, offset, w_clear](const Complex& p, const Complex& nrm) {
        const double r = std::abs(p);
        const double dn_log = -(p.real() * nrm.real() + p.imag() * nrm.imag()) / (r * r);
        const double fprime = (1.0 / inst.omega0) * std::pow(r, 1.0 / inst.omega0 - 1.0);
        const double t = std::min(std::max(offset, w_clear / fprime), 0.3 * r);
        auto v = [&inst](const Complex& z) { return phi_at(inst, z) + std::log(std::abs(z)); };
        const double f0 = std::log(r);
        const double f1 = v(p + t * nrm);
        const double f2 = v(p + 2.0 * t * nrm);
        return dn_log + (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * t);
      },
      inst.Dcirc, 0, opts.spacing);
  const double rel_phi0 = std::abs(flux_phi0 - inst.omega0) / inst.omega0;

  // Green-flux representation of the harmonic measure of the basic arc.
  const double flux_green =
      normal_flux(*inst.green_Dcirc, inst.Dcirc, 0, opts.spacing, offset);
  const double direct = fd_measure(inst.Dcirc, {0}, opts.h);
  const double rel_green = std::abs(flux_green - direct) / direct;

  rep.margin = 0.02 - std::max(rel_phi0, rel_green);
  rep.passed = rep.margin >= 0.0;
  rep.quantities = {
      {"omega0", inst.omega0, 0.0},
      {"flux_phi0", flux_phi0, 0.0},
      {"rel_err_phi0", rel_phi0, 0.0},
      {"flux_green", flux_green, 0.0},
      {"measure_direct", direct, 0.0},
      {"rel_err_green", rel_green, 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

namespace {

double circle_average(const VellingInstance& inst, const Complex& z, double delta) {
  constexpr int kSamples = 64;
  double sum = 0.0;
  for (int i = 0; i < kSamples; ++i)
    sum += phi_at(inst, z + std::polar(delta, kTwoPi * i / kSamples));
  return sum / kSamples;
}

// Radii along the ray at `angle` keeping the given boundary margin.
std::vector<double> admissible_radii(const VellingInstance& inst, double angle,
                                     int count, double margin) {
  std::vector<double> out;
  const double rmax = inst.Dcirc.boundary_radius(angle);
  for (int i = 0; i < count; ++i) {
    const double r = 0.1 + (rmax - 0.1) * (i + 0.5) / count;
    if (r <= 0.0) continue;
    const Complex z = std::polar(r, angle);
    if (inst.Dcirc.boundary_proximity(z).first >= margin) out.push_back(r);
  }
  return out;
}

}  // namespace

CheckReport check_phi_regularity(const VellingInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "regularity";
  rep.fingerprint = opts.fingerprint();
  if (!inst.green_Omega || !inst.green_Dcirc)
    throw std::logic_error("check_phi_regularity: ensure_fields was not called");

  const double delta = 0.01;
  const double margin = opts.boundary_margin + delta;
  const int per_ray = std::max(4, opts.probe_radial / 2);
  const auto& p = inst.partition;

  // Control points strictly inside sectors, away from both the sector rays
  // and the branch seam on the center ray: phi is harmonic there.
  double ctrl_dev = 0.0;
  int ctrl_used = 0;
  for (std::size_t k = 0; k < p.size(); ++k)
    for (double side : {-0.5, 0.5}) {
      const double angle = p.arcs[k].center + side * p.arcs[k].half_opening;
      for (double r : admissible_radii(inst, angle, per_ray, margin)) {
        const Complex z = std::polar(r, angle);
        try {
          ctrl_dev = std::max(ctrl_dev, std::abs(phi_at(inst, z) - circle_average(inst, z, delta)));
          ++ctrl_used;
        } catch (const std::domain_error&) {
        }
      }
    }
  const double c_fit = std::max(ctrl_dev / (delta * delta), 1e-6 / (delta * delta));
  const double threshold = 4.0 * c_fit * delta * delta;

  // Sector rays gamma_lm: mirrored-value identity and two-sided mean value.
  double ray_dev = 0.0;
  double mirror_gap = 0.0;
  int ray_used = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double ray = p.arcs[k].center + p.arcs[k].half_opening;
    // Keep the mirrored pair inside the two sectors adjacent to the ray.
    const double off = 0.3 * std::min(p.arcs[k].half_opening,
                                      p.arcs[(k + 1) % p.size()].half_opening);
    for (double r : admissible_radii(inst, ray, per_ray, margin)) {
      const Complex z = std::polar(r, ray);
      try {
        ray_dev = std::max(ray_dev, std::abs(phi_at(inst, z) - circle_average(inst, z, delta)));
        ++ray_used;
      } catch (const std::domain_error&) {
      }
      const Complex probe = std::polar(r, ray - off);
      try {
        mirror_gap = std::max(mirror_gap,
                              std::abs(phi_at(inst, probe) -
                                       phi_at(inst, reflect_across_ray(probe, ray))));
      } catch (const std::domain_error&) {
      }
    }
  }

  // Branch seams (sector center rays with a genuine deviation): phi is a
  // maximum of two harmonic branches, so only the one-sided inequality.
  double seam_excess = -std::numeric_limits<double>::infinity();
  bool any_seam = false;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p.deviations[k] < 1e-12) continue;
    for (double r : admissible_radii(inst, p.arcs[k].center, per_ray, margin)) {
      const Complex z = std::polar(r, p.arcs[k].center);
      try {
        seam_excess = std::max(seam_excess,
                               phi_at(inst, z) - circle_average(inst, z, delta));
        any_seam = true;
      } catch (const std::domain_error&) {
      }
    }
  }
  if (!any_seam) seam_excess = 0.0;

  rep.margin = threshold - ray_dev;
  rep.passed = ctrl_used > 0 && ray_used > 0 && ray_dev <= threshold &&
               mirror_gap <= 1e-12 && seam_excess <= threshold;
  rep.quantities = {
      {"control_deviation", ctrl_dev, 0.0},
      {"ray_deviation", ray_dev, 0.0},
      {"threshold", threshold, 0.0},
      {"mirror_gap", mirror_gap, 0.0},
      {"seam_excess", seam_excess, 0.0},
      {"control_probes", static_cast<double>(ctrl_used), 0.0},
      {"ray_probes", static_cast<double>(ray_used), 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

CheckReport check_comparison(const VellingInstance& inst, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "comparison";
  rep.fingerprint = opts.fingerprint();
  if (!inst.green_Omega || !inst.green_Dcirc)
    throw std::logic_error("check_comparison: ensure_fields was not called");

  double max_u = -std::numeric_limits<double>::infinity();
  double max_abs_u = 0.0;
  int used = 0;
  for (int j = 0; j < 4 * opts.probe_angular; ++j) {
    const double t = -kPi + kTwoPi * (j + 0.5) / (4 * opts.probe_angular);
    const double rmax = inst.Dcirc.boundary_radius(t);
    for (int i = 0; i < opts.probe_radial; ++i) {
      const Complex z = std::polar(std::max(rmax * (i + 0.5) / opts.probe_radial, 1e-3), t);
      if (inst.Dcirc.boundary_proximity(z).first < opts.boundary_margin) continue;
      if (!inst.green_Dcirc->can_eval(z)) continue;
      try {
        const double u = u_at(inst, z);
        max_u = std::max(max_u, u);
        max_abs_u = std::max(max_abs_u, std::abs(u));
        ++used;
      } catch (const std::domain_error&) {
      }
    }
  }

  // Near-origin scan: the log singularities of phi and g cancel, so
  // phi(z) + log|z| stays within the max-principle bound for the regular
  // part of the Omega Green function.
  double scan_max = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double t = -kPi + kTwoPi * (j + 0.5) / 8;
    for (int i = 0; i < 16; ++i) {
      const double r = 1e-3 * std::pow(100.0, i / 15.0);  // [1e-3, 1e-1]
      const Complex z = std::polar(r, t);
      scan_max = std::max(scan_max, std::abs(phi_lenient(inst, z) + std::log(r)));
    }
  }
  const double scan_bound = std::abs(std::log(inst.basic.rho0)) + 0.1;

  const double tol = 1e-2;
  rep.margin = tol - max_u;
  rep.passed = used > 0 && max_u <= tol && scan_max <= scan_bound &&
               (!inst.equal_arcs() || max_abs_u <= tol);
  rep.quantities = {
      {"max_u", max_u, 0.0},
      {"max_abs_u", max_abs_u, 0.0},
      {"probes", static_cast<double>(used), 0.0},
      {"near_origin_max", scan_max, 0.0},
      {"near_origin_bound", scan_bound, 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

CheckReport check_corollary(const ArcPartition& p, const SolverOptions& opts) {
  const auto t0 = Clock::now();
  CheckReport rep;
  rep.name = "corollary";
  rep.fingerprint = opts.fingerprint();

  const StarDomain poly = polygon_domain(p);
  const double omega0 = omega0_of(p);
  const Estimate wos = wos_harmonic_measure(poly, Complex(0, 0), {0}, opts.wos());
  const double tol = 3.0 * wos.std_error + opts.fd_tol;
  rep.margin = wos.value - omega0;
  rep.passed = rep.margin >= -tol;
  rep.quantities = {
      {"omega0", omega0, 0.0},
      {"side_measure_wos", wos.value, wos.std_error},
      {"tolerance", tol, 0.0},
  };
  rep.runtime_s = seconds_since(t0);
  return rep;
}

}  // namespace velling
