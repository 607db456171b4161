#include "velling/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace velling {

double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

double wrap_from(double a, double base) {
  double w = std::fmod(a - base, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

namespace {

double cross(const Complex& a, const Complex& b) {
  return a.real() * b.imag() - a.imag() * b.real();
}

double dot(const Complex& a, const Complex& b) {
  return a.real() * b.real() + a.imag() * b.imag();
}

double point_segment_distance(const Complex& z, const Complex& a, const Complex& b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return std::abs(z - a);
  double t = dot(z - a, d) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * d));
}

Complex point_segment_nearest(const Complex& z, const Complex& a, const Complex& b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return a;
  double t = std::clamp(dot(z - a, d) / len2, 0.0, 1.0);
  return a + t * d;
}

}  // namespace

// ---------------------------------------------------------------------------
// UnitArc / ArcPartition

UnitArc::UnitArc(double center_, double half_opening_)
    : center(wrap_angle(center_)), half_opening(half_opening_) {
  if (!(half_opening > 0.0 && half_opening < kPi / 2.0))
    throw std::invalid_argument("UnitArc: half opening must be in (0, pi/2)");
}

bool UnitArc::contains_angle(double a, double tol) const {
  return std::abs(wrap_angle(a - center)) <= half_opening + tol;
}

double ArcPartition::length_spread() const {
  double amin = arcs[0].half_opening;
  for (const auto& a : arcs) amin = std::min(amin, a.half_opening);
  return 2.0 * (alpha0() - amin);
}

ArcPartition make_partition(const std::vector<double>& openings, double rotation) {
  if (openings.size() < 3)
    throw std::invalid_argument("make_partition: need at least 3 arcs");
  double sum = 0.0;
  for (double a : openings) {
    if (!(a > 0.0) || a > kMaxHalfOpening)
      throw std::invalid_argument("make_partition: opening out of (0, pi/2 - 1e-3]");
    sum += a;
  }
  if (std::abs(sum - kPi) > 1e-12)
    throw std::invalid_argument("make_partition: openings must sum to pi");

  const std::size_t n = openings.size();
  // Consecutive layout: center_j = rotation + alpha_j + 2 * sum_{i<j} alpha_i.
  std::vector<double> centers(n);
  double acc = rotation;
  for (std::size_t j = 0; j < n; ++j) {
    centers[j] = acc + openings[j];
    acc += 2.0 * openings[j];
  }
  std::size_t longest = 0;
  for (std::size_t j = 1; j < n; ++j)
    if (openings[j] > openings[longest]) longest = j;

  ArcPartition p;
  p.arcs.reserve(n);
  p.deviations.reserve(n);
  const double shift = centers[longest];
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (longest + j) % n;
    double c = (j == 0) ? 0.0 : wrap_angle(centers[k] - shift);
    p.arcs.emplace_back(c, openings[k]);
  }
  const double a0 = p.arcs[0].half_opening;
  for (const auto& a : p.arcs) p.deviations.push_back(a0 - a.half_opening);
  return p;
}

// ---------------------------------------------------------------------------
// Geodesics

GeodesicArc geodesic_of(const UnitArc& arc) {
  GeodesicArc g;
  g.arc = arc;
  const double a = arc.half_opening;
  g.circle_center = std::polar(1.0 / std::cos(a), arc.center);
  g.circle_radius = std::tan(a);
  g.min_radius = (1.0 - std::sin(a)) / std::cos(a);
  return g;
}

double geodesic_radius_at(const GeodesicArc& g, double t) {
  if (std::abs(t) > g.arc.half_opening + 1e-12)
    throw std::invalid_argument("geodesic_radius_at: |t| exceeds the half opening");
  const double b = std::abs(g.circle_center) * std::cos(t);
  const double disc = std::max(b * b - 1.0, 0.0);
  return b - std::sqrt(disc);
}

// ---------------------------------------------------------------------------
// PolarArc

PolarArc PolarArc::geodesic_graph(double alpha0) {
  const GeodesicArc g = geodesic_of(UnitArc(0.0, alpha0));
  PolarArc p;
  p.half_opening = alpha0;
  p.radius = [g](double t) { return geodesic_radius_at(g, t); };
  p.rho0 = g.min_radius;
  p.geodesic = g;
  return p;
}

PolarArc PolarArc::from_function(double alpha0, std::function<double(double)> radius) {
  if (!(alpha0 > 0.0 && alpha0 < kPi / 2.0))
    throw std::invalid_argument("PolarArc: half opening must be in (0, pi/2)");
  const double r0 = radius(0.0);
  if (!(r0 > 0.0 && r0 < 1.0))
    throw std::invalid_argument("PolarArc: radius(0) must be in (0, 1)");
  if (std::abs(radius(alpha0) - 1.0) > 1e-9 || std::abs(radius(-alpha0) - 1.0) > 1e-9)
    throw std::invalid_argument("PolarArc: radius(+-alpha0) must equal 1");
  double prev = r0;
  const int samples = 256;
  for (int i = 1; i <= samples; ++i) {
    const double t = alpha0 * i / samples;
    const double r = radius(t);
    if (std::abs(r - radius(-t)) > 1e-9)
      throw std::invalid_argument("PolarArc: radius must be even");
    if (r <= prev)
      throw std::invalid_argument("PolarArc: radius must be strictly increasing on [0, alpha0]");
    prev = r;
  }
  PolarArc p;
  p.half_opening = alpha0;
  p.radius = std::move(radius);
  p.rho0 = r0;
  return p;
}

// ---------------------------------------------------------------------------
// Piece

Piece Piece::circle_arc(int label, double span_begin, double span_end,
                        Complex center, double radius,
                        Complex q0, Complex q1, Complex q_mid) {
  Piece p;
  p.kind = PieceKind::CircleArc;
  p.label = label;
  p.span_begin = span_begin;
  p.span_end = span_end;
  p.center = center;
  p.radius = radius;
  p.p0 = q0;
  p.p1 = q1;
  const double a0 = std::arg(q0 - center);
  const double a1 = std::arg(q1 - center);
  if (std::abs(q0 - q1) < 1e-12) {
    // Full circle.
    p.phi_lo = a0;
    p.phi_hi = a0 + kTwoPi;
    return p;
  }
  const double am = std::arg(q_mid - center);
  const double d01 = wrap_from(a1, a0);
  if (wrap_from(am, a0) <= d01) {
    p.phi_lo = a0;
    p.phi_hi = a0 + d01;
  } else {
    p.phi_lo = a1;
    p.phi_hi = a1 + wrap_from(a0, a1);
  }
  return p;
}

Piece Piece::chord(int label, double span_begin, double span_end,
                   Complex p0, Complex p1) {
  Piece p;
  p.kind = PieceKind::Chord;
  p.label = label;
  p.span_begin = span_begin;
  p.span_end = span_end;
  p.p0 = p0;
  p.p1 = p1;
  return p;
}

Piece Piece::polar_graph(int label, double graph_center, double half_span,
                         std::function<double(double)> radius_rel,
                         double target_delta) {
  Piece p;
  p.kind = PieceKind::PolarGraph;
  p.label = label;
  p.span_begin = graph_center - half_span;
  p.span_end = graph_center + half_span;
  p.graph_center = graph_center;
  p.half_span = half_span;
  p.radius_rel = std::move(radius_rel);

  auto at = [&](double s) {
    return std::polar(p.radius_rel(s), graph_center + s);
  };
  int n = std::max(8, 2 * static_cast<int>(std::ceil(half_span / 2e-3)));
  for (int attempt = 0; attempt < 5; ++attempt) {
    p.polyline.clear();
    p.polyline.reserve(n + 1);
    for (int i = 0; i <= n; ++i)
      p.polyline.push_back(at(-half_span + 2.0 * half_span * i / n));
    // Empirical deviation of the curve from its inscribed polyline.
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s0 = -half_span + 2.0 * half_span * i / n;
      const double s1 = -half_span + 2.0 * half_span * (i + 1) / n;
      for (int j = 1; j <= 5; ++j) {
        const Complex q = at(s0 + (s1 - s0) * j / 6.0);
        dev = std::max(dev, point_segment_distance(q, p.polyline[i], p.polyline[i + 1]));
      }
    }
    p.delta = 1.5 * dev + 1e-9;
    if (p.delta <= target_delta) break;
    n *= 2;
  }
  constexpr std::size_t kRun = 64;
  for (std::size_t b = 0; b + 1 < p.polyline.size(); b += kRun) {
    VertexRun run;
    run.begin = b;
    run.end = std::min(b + kRun, p.polyline.size() - 1);
    Complex lo = p.polyline[b], hi = p.polyline[b];
    for (std::size_t i = b; i <= run.end; ++i) {
      lo = {std::min(lo.real(), p.polyline[i].real()),
            std::min(lo.imag(), p.polyline[i].imag())};
      hi = {std::max(hi.real(), p.polyline[i].real()),
            std::max(hi.imag(), p.polyline[i].imag())};
    }
    run.center = 0.5 * (lo + hi);
    for (std::size_t i = b; i <= run.end; ++i)
      run.radius = std::max(run.radius, std::abs(p.polyline[i] - run.center));
    p.runs.push_back(run);
  }
  return p;
}

double Piece::radius_at(double theta) const {
  switch (kind) {
    case PieceKind::CircleArc: {
      const Complex u = std::polar(1.0, theta);
      const double b = dot(center, u);
      const double cc = std::norm(center) - radius * radius;
      const double disc = std::max(b * b - cc, 0.0);
      return cc < 0.0 ? b + std::sqrt(disc) : b - std::sqrt(disc);
    }
    case PieceKind::Chord: {
      const Complex u = std::polar(1.0, theta);
      const Complex d = p1 - p0;
      return cross(p0, d) / cross(u, d);
    }
    case PieceKind::PolarGraph: {
      double s = wrap_angle(theta - graph_center);
      s = std::clamp(s, -half_span, half_span);
      return radius_rel(s);
    }
  }
  return 0.0;
}

double Piece::distance(const Complex& z) const {
  switch (kind) {
    case PieceKind::CircleArc: {
      const double dc = std::abs(z - center);
      const double phi = std::arg(z - center);
      if (wrap_from(phi, phi_lo) <= phi_hi - phi_lo)
        return std::abs(dc - radius);
      return std::min(std::abs(z - p0), std::abs(z - p1));
    }
    case PieceKind::Chord:
      return point_segment_distance(z, p0, p1);
    case PieceKind::PolarGraph: {
      // Seed the bound from the run with the smallest lower bound, then
      // prune the rest against it.
      std::size_t seed = 0;
      double seed_lb = std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < runs.size(); ++g) {
        const double lb = std::abs(z - runs[g].center) - runs[g].radius;
        if (lb < seed_lb) { seed_lb = lb; seed = g; }
      }
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = runs[seed].begin; i < runs[seed].end; ++i)
        best = std::min(best, point_segment_distance(z, polyline[i], polyline[i + 1]));
      for (std::size_t g = 0; g < runs.size(); ++g) {
        if (g == seed) continue;
        if (std::abs(z - runs[g].center) - runs[g].radius >= best) continue;
        for (std::size_t i = runs[g].begin; i < runs[g].end; ++i)
          best = std::min(best, point_segment_distance(z, polyline[i], polyline[i + 1]));
      }
      return std::max(best - delta, 0.0);
    }
  }
  return 0.0;
}

Complex Piece::nearest(const Complex& z) const {
  switch (kind) {
    case PieceKind::CircleArc: {
      const Complex v = z - center;
      const double phi = std::arg(v);
      if (wrap_from(phi, phi_lo) <= phi_hi - phi_lo) {
        const double dc = std::abs(v);
        if (dc == 0.0) return center + Complex(radius, 0.0);
        return center + v * (radius / dc);
      }
      return std::abs(z - p0) <= std::abs(z - p1) ? p0 : p1;
    }
    case PieceKind::Chord:
      return point_segment_nearest(z, p0, p1);
    case PieceKind::PolarGraph: {
      std::size_t seed = 0;
      double seed_lb = std::numeric_limits<double>::infinity();
      for (std::size_t g = 0; g < runs.size(); ++g) {
        const double lb = std::abs(z - runs[g].center) - runs[g].radius;
        if (lb < seed_lb) { seed_lb = lb; seed = g; }
      }
      Complex best = polyline[runs[seed].begin];
      double bd = std::abs(z - best);
      auto scan = [&](const VertexRun& run) {
        for (std::size_t i = run.begin; i < run.end; ++i) {
          const Complex q = point_segment_nearest(z, polyline[i], polyline[i + 1]);
          const double d = std::abs(z - q);
          if (d < bd) { bd = d; best = q; }
        }
      };
      scan(runs[seed]);
      for (std::size_t g = 0; g < runs.size(); ++g) {
        if (g == seed) continue;
        if (std::abs(z - runs[g].center) - runs[g].radius >= bd) continue;
        scan(runs[g]);
      }
      return best;
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// StarDomain

StarDomain StarDomain::from_pieces(std::vector<Piece> pieces) {
  if (pieces.empty()) throw std::invalid_argument("StarDomain: no pieces");
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.span_begin < b.span_begin; });
  double total = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double end = pieces[i].span_end;
    const double next = (i + 1 < pieces.size()) ? pieces[i + 1].span_begin
                                                : pieces[0].span_begin + kTwoPi;
    if (std::abs(end - next) > 1e-9)
      throw std::invalid_argument("StarDomain: piece spans must tile a full turn");
    total += end - pieces[i].span_begin;
  }
  if (std::abs(total - kTwoPi) > 1e-9)
    throw std::invalid_argument("StarDomain: spans must cover 2*pi");
  StarDomain d;
  d.span_start = pieces[0].span_begin;
  d.pieces = std::move(pieces);
  return d;
}

const Piece& StarDomain::piece_at(double theta) const {
  const double t = span_start + wrap_from(theta, span_start);
  std::size_t lo = 0, hi = pieces.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (pieces[mid].span_begin <= t) lo = mid; else hi = mid;
  }
  return pieces[lo];
}

double StarDomain::boundary_radius(double theta) const {
  return piece_at(theta).radius_at(theta);
}

bool StarDomain::contains(const Complex& z) const {
  const double r = std::abs(z);
  if (r == 0.0) return true;
  return r < boundary_radius(std::arg(z));
}

std::pair<double, int> StarDomain::boundary_proximity(const Complex& z) const {
  double best = std::numeric_limits<double>::infinity();
  int label = pieces.front().label;
  for (const auto& p : pieces) {
    const double d = p.distance(z);
    if (d < best) { best = d; label = p.label; }
  }
  return {best, label};
}

std::pair<double, int> StarDomain::distance_to_boundary(const Complex& z) const {
  if (!contains(z))
    throw std::domain_error("distance_to_boundary: point is not interior");
  return boundary_proximity(z);
}

std::pair<Complex, int> StarDomain::nearest_boundary(const Complex& z) const {
  double best = std::numeric_limits<double>::infinity();
  Complex q{};
  int label = pieces.front().label;
  for (const auto& p : pieces) {
    const Complex c = p.nearest(z);
    const double d = std::abs(z - c);
    if (d < best) { best = d; q = c; label = p.label; }
  }
  return {q, label};
}

double StarDomain::max_delta() const {
  double d = 0.0;
  for (const auto& p : pieces) d = std::max(d, p.delta);
  return d;
}

std::vector<double> partition_spans(const ArcPartition& p) {
  std::vector<double> begins(p.size());
  double acc = -p.alpha0();
  for (std::size_t k = 0; k < p.size(); ++k) {
    begins[k] = acc;
    acc += 2.0 * p.arcs[k].half_opening;
    if (std::abs(wrap_angle(begins[k] + p.arcs[k].half_opening - p.arcs[k].center)) > 1e-9)
      throw std::logic_error("partition arcs are not consecutive");
  }
  return begins;
}

StarDomain StarDomain::arc_labeled_disk(const ArcPartition& p) {
  const auto begins = partition_spans(p);
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double b = begins[k], e = b + 2.0 * p.arcs[k].half_opening;
    const double c = b + p.arcs[k].half_opening;
    pieces.push_back(Piece::circle_arc(static_cast<int>(k), b, e, Complex(0, 0), 1.0,
                                       std::polar(1.0, b), std::polar(1.0, e),
                                       std::polar(1.0, c)));
  }
  return from_pieces(std::move(pieces));
}

StarDomain StarDomain::unit_disk() {
  std::vector<Piece> pieces;
  pieces.push_back(Piece::circle_arc(0, -kPi, kPi, Complex(0, 0), 1.0,
                                     Complex(-1, 0), Complex(-1, 0), Complex(1, 0)));
  return from_pieces(std::move(pieces));
}

StarDomain StarDomain::single_lens(const UnitArc& arc) {
  const GeodesicArc g = geodesic_of(arc);
  const double c = arc.center, a = arc.half_opening;
  std::vector<Piece> pieces;
  pieces.push_back(Piece::circle_arc(0, c - a, c + a, g.circle_center, g.circle_radius,
                                     std::polar(1.0, c - a), std::polar(1.0, c + a),
                                     std::polar(g.min_radius, c)));
  pieces.push_back(Piece::circle_arc(1, c + a, c - a + kTwoPi, Complex(0, 0), 1.0,
                                     std::polar(1.0, c + a), std::polar(1.0, c - a),
                                     std::polar(1.0, c + kPi)));
  return from_pieces(std::move(pieces));
}

StarDomain velling_domain(const ArcPartition& p) {
  const auto begins = partition_spans(p);
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = p.arcs[k].half_opening;
    const double b = begins[k], e = b + 2.0 * a, c = b + a;
    const GeodesicArc g = geodesic_of(UnitArc(c, a));
    pieces.push_back(Piece::circle_arc(static_cast<int>(k), b, e,
                                       g.circle_center, g.circle_radius,
                                       std::polar(1.0, b), std::polar(1.0, e),
                                       std::polar(g.min_radius, c)));
  }
  return StarDomain::from_pieces(std::move(pieces));
}

StarDomain basic_domain(const ArcPartition& p, const PolarArc& basic) {
  const double a0 = p.alpha0();
  if (std::abs(basic.half_opening - a0) > 1e-12)
    throw std::invalid_argument("basic_domain: basic arc half opening must equal alpha_0");
  const auto begins = partition_spans(p);
  std::vector<Piece> pieces;

  for (std::size_t k = 0; k < p.size(); ++k) {
    const double ak = p.arcs[k].half_opening;
    const double dk = p.deviations[k];
    const double b = begins[k], e = b + 2.0 * ak, c = b + ak;
    const int label = static_cast<int>(k);

    if (basic.geodesic) {
      const double r = basic.geodesic->circle_radius;
      const double cc = std::abs(basic.geodesic->circle_center);
      auto R = [&](double t) { return geodesic_radius_at(*basic.geodesic, t); };
      if (dk < 1e-15) {
        const GeodesicArc g = geodesic_of(UnitArc(c, a0));
        pieces.push_back(Piece::circle_arc(label, b, e, g.circle_center, g.circle_radius,
                                           std::polar(1.0, b), std::polar(1.0, e),
                                           std::polar(g.min_radius, c)));
      } else {
        // Two sub-arcs of the alpha_0 geodesic circle, rotated to meet at the
        // radial kink on the arc's center ray.
        const Complex kink = std::polar(R(dk), c);
        pieces.push_back(Piece::circle_arc(
            label, b, c, std::polar(cc, c + dk), r,
            std::polar(1.0, b), kink, std::polar(R(dk + ak / 2.0), c - ak / 2.0)));
        pieces.push_back(Piece::circle_arc(
            label, c, e, std::polar(cc, c - dk), r,
            kink, std::polar(1.0, e), std::polar(R(dk + ak / 2.0), c + ak / 2.0)));
      }
    } else {
      auto radius = basic.radius;
      pieces.push_back(Piece::polar_graph(
          label, c, ak, [radius, dk](double s) { return radius(std::abs(s) + dk); }));
    }
  }
  return StarDomain::from_pieces(std::move(pieces));
}

StarDomain polygon_domain(const ArcPartition& p) {
  const auto begins = partition_spans(p);
  std::vector<Piece> pieces;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double b = begins[k], e = b + 2.0 * p.arcs[k].half_opening;
    pieces.push_back(Piece::chord(static_cast<int>(k), b, e,
                                  std::polar(1.0, b), std::polar(1.0, e)));
  }
  return StarDomain::from_pieces(std::move(pieces));
}

StarDomain omega_domain(const PolarArc& basic, double omega0) {
  if (!(omega0 > 0.0 && omega0 < 0.5))
    throw std::invalid_argument("omega_domain: omega0 must be in (0, 1/2)");
  if (std::abs(omega0 - basic.half_opening / kPi) > 1e-12)
    throw std::invalid_argument("omega_domain: omega0 must equal alpha_0 / pi");
  auto radius = basic.radius;
  const double inv = 1.0 / omega0;
  std::vector<Piece> pieces;
  pieces.push_back(Piece::polar_graph(
      0, 0.0, kPi,
      [radius, omega0, inv](double s) { return std::pow(radius(s * omega0), inv); }));
  return StarDomain::from_pieces(std::move(pieces));
}

// ---------------------------------------------------------------------------
// Maps

Complex power_map(const Complex& z, double omega0, MapDirection dir) {
  if (z == Complex(0.0, 0.0)) return z;  // 0 maps to 0 by continuity
  const double r = std::abs(z);
  const double a = std::arg(z);
  if (dir == MapDirection::Forward) {
    if (std::abs(a) > omega0 * kPi + 1e-9)
      throw std::invalid_argument("power_map: point outside the sector |arg z| <= alpha_0");
    return std::polar(std::pow(r, 1.0 / omega0), a / omega0);
  }
  return std::polar(std::pow(r, omega0), a * omega0);
}

Complex reflect_across_ray(const Complex& z, double ray_angle) {
  return std::polar(1.0, 2.0 * ray_angle) * std::conj(z);
}

}  // namespace velling
