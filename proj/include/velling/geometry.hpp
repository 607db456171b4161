#pragma once

// Planar geometry for model domains on the unit disk: circle arcs, hyperbolic
// geodesics, star-shaped domains assembled from labeled boundary pieces, and
// the power map used to unfold a sector onto the full disk.

#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace velling {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
// Geodesic radius tan(alpha) blows up as alpha -> pi/2; openings are capped.
inline constexpr double kMaxHalfOpening = kPi / 2.0 - 1e-3;

/// Reduce an angle to the canonical representative in (-pi, pi].
double wrap_angle(double a);

/// Reduce a - base into [0, 2*pi).
double wrap_from(double a, double base);

// ---------------------------------------------------------------------------
// Arcs of the unit circle

/// Closed arc of the unit circle: position of its midpoint and half-opening.
/// Arc length is 2 * half_opening.
struct UnitArc {
  double center = 0.0;        // angle of the arc midpoint, radians
  double half_opening = 0.0;  // alpha, 0 < alpha < pi/2

  UnitArc() = default;
  UnitArc(double center_, double half_opening_);

  Complex endpoint_ccw() const { return std::polar(1.0, center + half_opening); }
  Complex endpoint_cw() const { return std::polar(1.0, center - half_opening); }

  /// True if the circle point at angle `a` lies on the (closed) arc.
  bool contains_angle(double a, double tol = 0.0) const;
};

/// Ordered partition of the unit circle into arcs with disjoint interiors.
/// Index 0 is a longest arc and is centered at angle 0; deviations
/// d_k = alpha_0 - alpha_k express each arc as an intersection of rotated
/// copies of arc 0.
struct ArcPartition {
  std::vector<UnitArc> arcs;
  std::vector<double> deviations;  // d_k >= 0, d_0 = 0

  std::size_t size() const { return arcs.size(); }
  double alpha0() const { return arcs[0].half_opening; }
  /// Max difference of arc lengths, 2*(alpha_0 - min alpha).
  double length_spread() const;
};

/// Cumulative (unwrapped) span starts of the partition arcs beginning at
/// -alpha_0; begins[k] + alpha_k is arc k's center modulo 2*pi.
std::vector<double> partition_spans(const ArcPartition& p);

/// Lay the given half-openings consecutively around the circle starting at
/// `rotation`, then normalize so that a longest arc sits at index 0 with
/// center 0. Ties for longest go to the smallest original index.
/// Throws std::invalid_argument if any opening is out of (0, pi/2 - 1e-3],
/// fewer than 3 arcs are given, or the openings do not sum to pi (tol 1e-12).
ArcPartition make_partition(const std::vector<double>& openings, double rotation = 0.0);

// ---------------------------------------------------------------------------
// Geodesic arcs (circular arcs orthogonal to the unit circle)

/// The hyperbolic geodesic of the Poincare disk joining the endpoints of a
/// unit-circle arc: an arc of the circle |z - c| = r with |c|^2 = r^2 + 1.
struct GeodesicArc {
  UnitArc arc;
  Complex circle_center;  // c = e^{i center} / cos(alpha)
  double circle_radius;   // r = tan(alpha)
  double min_radius;      // rho_min = (1 - sin(alpha)) / cos(alpha) = |c| - r
};

GeodesicArc geodesic_of(const UnitArc& arc);

/// Polar radius of the geodesic at angular offset t from the arc center,
/// |t| <= alpha: the unique intersection of the ray with the geodesic.
double geodesic_radius_at(const GeodesicArc& g, double t);

// ---------------------------------------------------------------------------
// Basic arcs (polar graphs)

/// A basic arc given as an even polar graph over [-alpha0, alpha0]:
/// rho = radius(t), with radius(0) = rho0 < 1 the unique minimum,
/// radius strictly increasing on [0, alpha0], and radius(alpha0) = 1.
struct PolarArc {
  double half_opening = 0.0;
  std::function<double(double)> radius;  // even, continuous, (0, 1]
  double rho0 = 0.0;
  // Set when the graph is exactly the geodesic of the length-2*alpha0 arc;
  // lets domain assembly emit exact circular-arc pieces.
  std::optional<GeodesicArc> geodesic;

  /// Basic arc equal to the geodesic polar graph of the arc of half-opening
  /// alpha0 centered at 0 (the arc I_0 itself).
  static PolarArc geodesic_graph(double alpha0);

  /// General polar-graph basic arc; validates the shape properties by
  /// sampling (evenness, monotonicity, endpoint value 1).
  static PolarArc from_function(double alpha0, std::function<double(double)> radius);
};

// ---------------------------------------------------------------------------
// Star domains

enum class PieceKind { CircleArc, Chord, PolarGraph };

/// One labeled boundary piece of a star-shaped domain. Pieces are polar
/// graphs over their angular span [span_begin, span_end] (seen from the
/// origin); CircleArc and Chord pieces answer distance queries exactly,
/// PolarGraph pieces via an inscribed polyline with recorded Hausdorff
/// error `delta`.
struct Piece {
  PieceKind kind = PieceKind::CircleArc;
  int label = 0;
  double span_begin = 0.0;
  double span_end = 0.0;

  // CircleArc: sub-arc of |z - center| = radius between phi0 and phi1
  // (angles about `center`, phi0 < phi1 after unwrapping).
  Complex center{0.0, 0.0};
  double radius = 1.0;
  double phi_lo = -kPi;
  double phi_hi = kPi;

  // Chord: segment p0 -> p1.
  Complex p0{0.0, 0.0};
  Complex p1{0.0, 0.0};

  // PolarGraph: rho = radius_rel(s) for s = angle - graph_center in
  // [-half_span, half_span]; polyline vertices in ccw order.
  std::function<double(double)> radius_rel;
  double graph_center = 0.0;
  double half_span = 0.0;
  std::vector<Complex> polyline;
  double delta = 0.0;  // Hausdorff distance from polyline to the true curve
  // Bounding circles over runs of polyline vertices; prunes distance queries
  // from O(vertices) to a few runs.
  struct VertexRun {
    Complex center;
    double radius = 0.0;
    std::size_t begin = 0;  // vertex range [begin, end], segments begin..end-1
    std::size_t end = 0;
  };
  std::vector<VertexRun> runs;

  /// Polar radius of the piece at absolute angle `theta` within the span.
  double radius_at(double theta) const;
  /// Distance from z to the piece; exact for CircleArc/Chord, a conservative
  /// lower bound (polyline distance minus delta, clamped at 0) for
  /// PolarGraph.
  double distance(const Complex& z) const;
  /// Closest boundary point on the piece (polyline point for PolarGraph).
  Complex nearest(const Complex& z) const;

  static Piece circle_arc(int label, double span_begin, double span_end,
                          Complex center, double radius,
                          Complex q0, Complex q1, Complex q_mid);
  static Piece chord(int label, double span_begin, double span_end,
                     Complex p0, Complex p1);
  static Piece polar_graph(int label, double graph_center, double half_span,
                           std::function<double(double)> radius_rel,
                           double target_delta = 1e-5);
};

/// Star-shaped domain about the origin: boundary pieces whose angular spans
/// tile a full turn. Membership is |z| < boundary_radius(arg z). Immutable
/// after construction; safe to query concurrently.
struct StarDomain {
  std::vector<Piece> pieces;   // sorted by span_begin, spans contiguous
  double span_start = -kPi;    // span_begin of pieces.front()

  bool contains(const Complex& z) const;
  double boundary_radius(double theta) const;
  const Piece& piece_at(double theta) const;
  /// Conservative distance to the boundary and the label of the nearest
  /// piece. Throws std::domain_error if z is not interior.
  std::pair<double, int> distance_to_boundary(const Complex& z) const;
  /// Same minimum without the membership requirement; usable for points on
  /// or just outside the boundary.
  std::pair<double, int> boundary_proximity(const Complex& z) const;
  /// Nearest boundary point and its label (no membership requirement).
  std::pair<Complex, int> nearest_boundary(const Complex& z) const;
  /// Max polyline error over pieces (0 when all pieces are exact).
  double max_delta() const;

  static StarDomain from_pieces(std::vector<Piece> pieces);

  /// Unit disk with its circle split into the arcs of `p`, piece k labeled k.
  /// Degenerate one-arc version: unit_disk().
  static StarDomain arc_labeled_disk(const ArcPartition& p);
  static StarDomain unit_disk();
  /// Unit disk minus the single lens of `arc`: the geodesic piece is labeled
  /// 0, the remaining circle arc 1.
  static StarDomain single_lens(const UnitArc& arc);
};

/// Velling model domain D: the disk minus all lenses; piece k is the
/// geodesic arc of L_k.
StarDomain velling_domain(const ArcPartition& p);

/// Basic model domain D-circle: piece k is the polar graph
/// s |-> R(|s| + d_k) over [-alpha_k, alpha_k] about arc k's center, the
/// radial realization of the intersection of the two rotated copies of the
/// sector-0 part. Exact circular sub-arcs when `basic` is a geodesic graph.
StarDomain basic_domain(const ArcPartition& p, const PolarArc& basic);

/// Inscribed polygon P_n: piece k is the chord of L_k.
StarDomain polygon_domain(const ArcPartition& p);

/// Image of the sector-0 domain under the power map z^{1/omega0} fixing 1,
/// with the origin adjoined: a single polar-graph piece over [-pi, pi].
StarDomain omega_domain(const PolarArc& basic, double omega0);

// ---------------------------------------------------------------------------
// Maps

enum class MapDirection { Forward, Inverse };

/// Branch of z^{1/omega0} (forward) fixing 1, defined on the sector
/// |arg z| <= omega0 * pi; inverse is z^{omega0} on |arg z| <= pi.
/// 0 maps to 0 by continuity.
Complex power_map(const Complex& z, double omega0, MapDirection dir);

/// Reflection across the ray through the origin at `ray_angle`:
/// z -> e^{2 i ray_angle} * conj(z). An involution fixing the ray.
Complex reflect_across_ray(const Complex& z, double ray_angle);

}  // namespace velling
