#pragma once

// Harmonic measure and Green function solvers on StarDomains: a walk-on-
// spheres Monte Carlo backend and a finite-difference Laplace backend with
// Shortley-Weller stencils, plus boundary flux and angular derivative
// queries on the resulting fields.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "velling/geometry.hpp"

namespace velling {

// ---------------------------------------------------------------------------
// Monte Carlo

/// Monte Carlo result. std_error is the sample standard deviation divided by
/// sqrt(samples); bias_bound collects the eps-shell and polyline-delta
/// contributions.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  std::uint64_t seed = 0;
  double bias_bound = 0.0;
};

struct WosParams {
  double eps = 1e-4;
  long long n = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 1;             // <= 0: hardware concurrency
  double bias_constant = 1.0;  // C in bias_bound = C * (eps + delta)
  long long max_steps = 200'000;
};

/// Harmonic measure omega(start, target pieces, d) by walk on spheres:
/// jump uniformly on the largest safe circle until within eps of the
/// boundary, then score 1 iff the nearest piece label is in `target`.
/// Results are bit-identical for fixed (domain, params, seed) regardless
/// of thread count.
Estimate wos_harmonic_measure(const StarDomain& d, const Complex& start,
                              const std::set<int>& target, const WosParams& params);

/// Green function g(z, pole, d) = -log|z - pole| + E[log|Z_exit - pole|],
/// with Z_exit the nearest boundary point at walk termination.
Estimate wos_green(const StarDomain& d, const Complex& pole, const Complex& z,
                   const WosParams& params);

// ---------------------------------------------------------------------------
// Finite differences

/// Grid-sampled harmonic function over a domain. Nodes live at
/// (i - m, j - m) * h for i, j in [0, 2m]. When `log_pole` is set the field
/// represents -log|z - pole| + u(z) with only the regular part u stored on
/// the grid.
struct ScalarField {
  double h = 0.0;
  int m = 0;                       // index offset; grid is (2m+1)^2
  std::vector<double> u;           // regular part, row-major (j * width + i)
  std::vector<std::uint8_t> mask;  // 1 = interior node
  std::optional<Complex> log_pole;
  double max_residual = 0.0;       // diagonally scaled residual at exit
  long long sweeps = 0;
  double boundary_delta = 0.0;     // polyline error of the domain

  int width() const { return 2 * m + 1; }
  double coord(int i) const { return (i - m) * h; }

  bool can_eval(const Complex& z) const;
  /// Bilinear interpolation of the full field value (pole term included).
  /// Throws std::domain_error if a surrounding node is exterior.
  double value(const Complex& z) const;
  /// Regular part only (the harmonic correction for Green fields).
  double regular(const Complex& z) const;

  /// Write "x,y,value" rows for all interior nodes.
  void write_csv(const std::string& path) const;
};

struct FdParams {
  double tol = 1e-10;              // scaled-residual target
  long long max_sweeps = 1'000'000;
  double relax = 0.0;              // 0: 2 / (1 + sin(pi * h / 2))
};

/// Dirichlet solve of the 5-point Laplace equation with Shortley-Weller
/// unequal-arm stencils at boundary-adjacent nodes, SOR iteration.
/// boundary_data receives the nearest piece label and the boundary point.
/// Throws std::runtime_error with a residual report on non-convergence.
ScalarField fd_solve(const StarDomain& d,
                     const std::function<double(int, Complex)>& boundary_data,
                     double h, const FdParams& params = {});

/// Green function with the pole carried analytically: solves for the
/// harmonic correction with data log|xi - pole| and marks the field.
ScalarField fd_green(const StarDomain& d, const Complex& pole, double h,
                     const FdParams& params = {});

// ---------------------------------------------------------------------------
// Field queries

/// (1/2pi) * integral over the pieces with `label` of the inward normal
/// derivative, midpoint rule in angle with arc-length weights. `deriv` gets
/// each boundary sample and its inward unit normal; samples where it throws
/// std::domain_error are skipped.
double normal_flux(const std::function<double(const Complex&, const Complex&)>& deriv,
                   const StarDomain& d, int label, double spacing);

/// Same with the derivative at each sample taken as the boundary slope of a
/// quadratic through `eval` at offsets t, 2t, 3t along the inward normal.
double normal_flux(const std::function<double(const Complex&)>& eval,
                   const StarDomain& d, int label, double spacing, double offset);

/// Same on a ScalarField; requires offset >= 2h.
double normal_flux(const ScalarField& field, const StarDomain& d, int label,
                   double spacing, double offset);

/// Central difference of the field along the angular direction at z.
double angular_derivative(const ScalarField& field, const Complex& z, double dt);

}  // namespace velling
