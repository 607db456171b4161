#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "velling/solver.hpp"

namespace velling {

namespace {

// Directions: E, W, N, S.
constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

struct Irregular {
  int idx = 0;
  std::array<double, 4> arm{1.0, 1.0, 1.0, 1.0};   // in units of h
  std::array<double, 4> bval{0.0, 0.0, 0.0, 0.0};  // boundary value if arm < 1
  std::array<bool, 4> cut{false, false, false, false};
};

// Boundary crossing on the segment from an interior node toward an exterior
// neighbor, by bisection of the membership predicate.
Complex find_crossing(const StarDomain& d, const Complex& in, const Complex& out) {
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 48; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (d.contains(in + mid * (out - in))) lo = mid; else hi = mid;
  }
  return in + 0.5 * (lo + hi) * (out - in);
}

}  // namespace

bool ScalarField::can_eval(const Complex& z) const {
  const double x = z.real() / h + m;
  const double y = z.imag() / h + m;
  const int i = static_cast<int>(std::floor(x));
  const int j = static_cast<int>(std::floor(y));
  if (i < 0 || j < 0 || i + 1 >= width() || j + 1 >= width()) return false;
  const int w = width();
  return mask[j * w + i] && mask[j * w + i + 1] && mask[(j + 1) * w + i] &&
         mask[(j + 1) * w + i + 1];
}

double ScalarField::regular(const Complex& z) const {
  const double x = z.real() / h + m;
  const double y = z.imag() / h + m;
  const int i = static_cast<int>(std::floor(x));
  const int j = static_cast<int>(std::floor(y));
  const int w = width();
  if (i < 0 || j < 0 || i + 1 >= w || j + 1 >= w ||
      !(mask[j * w + i] && mask[j * w + i + 1] && mask[(j + 1) * w + i] &&
        mask[(j + 1) * w + i + 1]))
    throw std::domain_error("ScalarField: interpolation cell is not interior");
  const double fx = x - i, fy = y - j;
  return (1 - fx) * (1 - fy) * u[j * w + i] + fx * (1 - fy) * u[j * w + i + 1] +
         (1 - fx) * fy * u[(j + 1) * w + i] + fx * fy * u[(j + 1) * w + i + 1];
}

double ScalarField::value(const Complex& z) const {
  double v = regular(z);
  if (log_pole) v += -std::log(std::abs(z - *log_pole));
  return v;
}

void ScalarField::write_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("ScalarField: cannot open " + path);
  std::fprintf(f, "x,y,value\n");
  const int w = width();
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i)
      if (mask[j * w + i]) {
        const Complex z(coord(i), coord(j));
        double v = u[j * w + i];
        if (log_pole) v += -std::log(std::abs(z - *log_pole));
        std::fprintf(f, "%.17g,%.17g,%.17g\n", z.real(), z.imag(), v);
      }
  std::fclose(f);
}

ScalarField fd_solve(const StarDomain& d,
                     const std::function<double(int, Complex)>& boundary_data,
                     double h, const FdParams& params) {
  if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("fd_solve: bad spacing");
  ScalarField f;
  f.h = h;
  f.m = static_cast<int>(std::ceil(1.0 / h)) + 2;
  f.boundary_delta = d.max_delta();
  const int w = f.width();
  f.u.assign(static_cast<std::size_t>(w) * w, 0.0);
  f.mask.assign(static_cast<std::size_t>(w) * w, 0);

  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i)
      if (std::norm(Complex(f.coord(i), f.coord(j))) < 1.0 &&
          d.contains(Complex(f.coord(i), f.coord(j))))
        f.mask[j * w + i] = 1;

  // type: 0 exterior, 1 regular interior, 2 irregular (some arm cut).
  std::vector<std::uint8_t> type(f.mask.begin(), f.mask.end());
  std::vector<int> irr_of(static_cast<std::size_t>(w) * w, -1);
  std::vector<Irregular> irr;
  for (int j = 0; j < w; ++j)
    for (int i = 0; i < w; ++i) {
      const int idx = j * w + i;
      if (!f.mask[idx]) continue;
      Irregular node;
      node.idx = idx;
      bool any = false;
      const Complex z(f.coord(i), f.coord(j));
      for (int s = 0; s < 4; ++s) {
        const int ni = i + kDi[s], nj = j + kDj[s];
        if (f.mask[nj * w + ni]) continue;
        any = true;
        node.cut[s] = true;
        const Complex nb(f.coord(ni), f.coord(nj));
        const Complex b = find_crossing(d, z, nb);
        node.arm[s] = std::max(std::abs(b - z) / h, 1e-7);
        node.bval[s] = boundary_data(d.nearest_boundary(b).second, b);
      }
      if (any) {
        type[idx] = 2;
        irr_of[idx] = static_cast<int>(irr.size());
        irr.push_back(node);
      }
    }

  const double relax = params.relax > 0.0 ? params.relax
                                          : 2.0 / (1.0 + std::sin(kPi * h / 2.0));

  auto stencil = [&](int idx, int i, int j) -> double {
    if (type[idx] == 1)
      return 0.25 * (f.u[idx + 1] + f.u[idx - 1] + f.u[idx + w] + f.u[idx - w]);
    const Irregular& nd = irr[irr_of[idx]];
    const double aE = nd.arm[0], aW = nd.arm[1], aN = nd.arm[2], aS = nd.arm[3];
    const double uE = nd.cut[0] ? nd.bval[0] : f.u[idx + 1];
    const double uW = nd.cut[1] ? nd.bval[1] : f.u[idx - 1];
    const double uN = nd.cut[2] ? nd.bval[2] : f.u[idx + w];
    const double uS = nd.cut[3] ? nd.bval[3] : f.u[idx - w];
    const double num = uE / (aE * (aE + aW)) + uW / (aW * (aE + aW)) +
                       uN / (aN * (aN + aS)) + uS / (aS * (aN + aS));
    const double den = 1.0 / (aE * aW) + 1.0 / (aN * aS);
    return num / den;
  };

  long long sweep = 0;
  double residual = std::numeric_limits<double>::infinity();
  while (sweep < params.max_sweeps) {
    for (int j = 1; j + 1 < w; ++j)
      for (int i = 1; i + 1 < w; ++i) {
        const int idx = j * w + i;
        if (!type[idx]) continue;
        const double target = stencil(idx, i, j);
        // Plain Gauss-Seidel at cut nodes keeps the strongly weighted
        // boundary coupling stable.
        const double wloc = type[idx] == 1 ? relax : 1.0;
        f.u[idx] += wloc * (target - f.u[idx]);
      }
    ++sweep;
    if (sweep % 32 == 0 || sweep == params.max_sweeps) {
      residual = 0.0;
      for (int j = 1; j + 1 < w; ++j)
        for (int i = 1; i + 1 < w; ++i) {
          const int idx = j * w + i;
          if (!type[idx]) continue;
          residual = std::max(residual, std::abs(stencil(idx, i, j) - f.u[idx]));
        }
      if (residual < params.tol) break;
    }
  }
  f.max_residual = residual;
  f.sweeps = sweep;
  if (residual >= params.tol) {
    char msg[160];
    std::snprintf(msg, sizeof msg,
                  "fd_solve: no convergence after %lld sweeps, residual %.3e (tol %.3e)",
                  sweep, residual, params.tol);
    throw std::runtime_error(msg);
  }
  return f;
}

ScalarField fd_green(const StarDomain& d, const Complex& pole, double h,
                     const FdParams& params) {
  if (!d.contains(pole)) throw std::domain_error("fd_green: pole is not interior");
  ScalarField f = fd_solve(
      d, [pole](int, Complex xi) { return std::log(std::abs(xi - pole)); }, h, params);
  f.log_pole = pole;
  return f;
}

double normal_flux(const std::function<double(const Complex&, const Complex&)>& deriv,
                   const StarDomain& d, int label, double spacing) {
  double total = 0.0;
  for (const auto& piece : d.pieces) {
    if (piece.label != label) continue;
    auto point = [&](double th) { return std::polar(piece.radius_at(th), th); };
    const double b = piece.span_begin, e = piece.span_end;
    // Arc length estimate for the sample count.
    double len = 0.0;
    {
      const int n0 = 256;
      Complex prev = point(b);
      for (int i = 1; i <= n0; ++i) {
        const Complex q = point(b + (e - b) * i / n0);
        len += std::abs(q - prev);
        prev = q;
      }
    }
    const int n = std::max(8, static_cast<int>(std::ceil(len / spacing)));
    const double dth = (e - b) / n;
    for (int i = 0; i < n; ++i) {
      const double th = b + (i + 0.5) * dth;
      const Complex p = point(th);
      const double dq = 1e-5;
      Complex tangent = (point(th + dq) - point(th - dq)) / (2.0 * dq);
      const double tlen = std::abs(tangent);
      Complex nrm = Complex(0, 1) * tangent / tlen;
      if (!d.contains(p + 1e-3 * nrm)) nrm = -nrm;
      // Samples whose offset stations leave the interpolable region (cusp
      // neighborhoods at piece junctions, where the measure density
      // vanishes) are skipped.
      try {
        total += deriv(p, nrm) * tlen * dth;
      } catch (const std::domain_error&) {
        continue;
      }
    }
  }
  return total / kTwoPi;
}

double normal_flux(const std::function<double(const Complex&)>& eval,
                   const StarDomain& d, int label, double spacing, double offset) {
  if (!(offset > 0.0)) throw std::invalid_argument("normal_flux: offset must be > 0");
  return normal_flux(
      [&eval, offset](const Complex& p, const Complex& nrm) {
        const double t = offset;
        const double f1 = eval(p + t * nrm);
        const double f2 = eval(p + 2.0 * t * nrm);
        const double f3 = eval(p + 3.0 * t * nrm);
        return (8.0 * f2 - 5.0 * f1 - 3.0 * f3) / (2.0 * t);
      },
      d, label, spacing);
}

double normal_flux(const ScalarField& field, const StarDomain& d, int label,
                   double spacing, double offset) {
  if (offset < 2.0 * field.h)
    throw std::invalid_argument("normal_flux: offset must be at least 2h");
  return normal_flux([&field](const Complex& z) { return field.value(z); }, d, label,
                     spacing, offset);
}

double angular_derivative(const ScalarField& field, const Complex& z, double dt) {
  const double rho = std::abs(z);
  const double t = std::arg(z);
  const double fp = field.value(std::polar(rho, t + dt));
  const double fm = field.value(std::polar(rho, t - dt));
  return (fp - fm) / (2.0 * dt);
}

}  // namespace velling
