#pragma once

// Proof objects for the extremal arc-length problem: the exponent omega_0,
// the power-mapped domain Omega, the comparison function phi assembled from
// rotated/reflected copies of phi_0, the deficiency u = phi - g(., 0, Dcirc),
// and the verification checks over a model-domain instance.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "velling/geometry.hpp"
#include "velling/solver.hpp"

namespace velling {

struct SolverOptions {
  double eps = 1e-4;
  long long n = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 1;
  double h = 1.0 / 256;
  double dt = 1e-2;          // angular step for derivative probes
  double spacing = 5e-3;     // arc-length step for flux integrals
  double offset = 1e-2;      // inward offset for normal derivatives
  int probe_radial = 20;
  int probe_angular = 20;
  double fd_tol = 5e-3;      // absolute tolerance granted to the FD backend
  double boundary_margin = 0.05;

  std::string fingerprint() const;
  WosParams wos() const;
};

/// omega_0 = harmonic measure of the longest arc at the origin, alpha_0 / pi.
double omega0_of(const ArcPartition& p);

/// A model-domain instance: the partition, its Velling domain D, basic
/// domain Dcirc, power-mapped domain Omega, and (once ensure_fields ran)
/// the FD Green fields at pole 0. Immutable after ensure_fields; checks
/// only read it.
struct VellingInstance {
  ArcPartition partition;
  PolarArc basic;
  double omega0 = 0.0;
  StarDomain D;
  StarDomain Dcirc;
  StarDomain Omega;
  std::vector<double> sector_begins;  // cumulative spans, sector 0 first

  std::optional<ScalarField> green_Omega;
  std::optional<ScalarField> green_Dcirc;
  // Regular part of g(., 0, Omega) at the origin (WoS estimate); used when a
  // mapped point sits in the sub-grid throat of Omega near 0.
  std::optional<double> u_origin;

  static VellingInstance make(const ArcPartition& p, const PolarArc& basic);
  void ensure_fields(double h);
  bool equal_arcs(double tol = 1e-12) const { return partition.length_spread() <= tol; }
  /// Index of the sector containing angle theta (boundary rays go to the
  /// lower-index side by the span lookup convention).
  std::size_t sector_of(double theta) const;
};

/// phi_0(z) = omega_0 * g(z^{1/omega_0}, 0, Omega) on the closed sector 0.
/// The log singularity at 0 is carried analytically and the Omega field is
/// read at (Re w, |Im w|), realizing the conjugation symmetry of g exactly.
double phi0_at(const VellingInstance& inst, const Complex& z);

/// The comparison function phi on Dcirc \ {0}: in sector k the deviation
/// rotation e^{+- i d_k} (sign of Im) pulls the point into sector 0.
double phi_at(const VellingInstance& inst, const Complex& z);

/// u(z) = phi(z) - g(z, 0, Dcirc); finite through the origin.
double u_at(const VellingInstance& inst, const Complex& z);

// ---------------------------------------------------------------------------
// Check reports

struct Quantity {
  std::string name;
  double value = 0.0;
  double err = 0.0;  // 0 when not applicable
};

struct CheckReport {
  std::string name;
  std::vector<Quantity> quantities;
  double margin = 0.0;  // signed slack; >= -tolerance means pass
  bool passed = false;
  double runtime_s = 0.0;
  std::string fingerprint;

  const Quantity* find(const std::string& qname) const;
};

/// Theorem: omega(0, I0circ, Dcirc) >= omega_0, strict unless all arcs are
/// equal. WoS is the primary estimate, FD the cross-check.
CheckReport check_theorem(const VellingInstance& inst, const SolverOptions& opts);

/// Conjecture chain: omega(0, I0, D) >= omega(0, I0, Dcirc) >= omega_0;
/// reports the implied conformal-image length 2*pi*omega(0, I0, D).
CheckReport check_conjecture(const VellingInstance& inst, const SolverOptions& opts);

/// Lemma on Omega: conjugation symmetry of g(., 0, Omega) and positivity of
/// its angular derivative on an upper-half probe grid.
CheckReport check_lemma(const VellingInstance& inst, const SolverOptions& opts);

/// Flux identity: (1/2pi) * flux of phi_0 through I0circ equals omega_0;
/// cross-check of the Green-flux representation of omega(0, I0circ, Dcirc).
CheckReport check_flux(const VellingInstance& inst, const SolverOptions& opts);

/// Regularity of phi: mirrored values across each sector ray agree to
/// machine precision, the mean-value property holds across rays at the
/// interior-harmonic noise level, and phi is subharmonic at branch seams.
CheckReport check_phi_regularity(const VellingInstance& inst, const SolverOptions& opts);

/// Deficiency bound: max u <= tolerance on a probe grid, |u| small in the
/// equal-arc case, and the log singularity of phi cancels near the origin.
CheckReport check_comparison(const VellingInstance& inst, const SolverOptions& opts);

/// Corollary: harmonic measure of the longest polygon side dominates omega_0.
CheckReport check_corollary(const ArcPartition& p, const SolverOptions& opts);

}  // namespace velling
