#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "velling/svg.hpp"

namespace velling {

namespace {

constexpr double kView = 1.25;   // world half-extent
constexpr int kHalf = 300;       // pixel half-extent of the drawing square
constexpr int kLegendW = 70;

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  out += buf;
}

// World coordinates -> pixel coordinates (y flipped), fixed precision so the
// output is byte-stable.
double px(double x) { return kHalf + x * (kHalf / kView); }
double py(double y) { return kHalf - y * (kHalf / kView); }

std::string hue(std::size_t k, std::size_t n, int sat, int light) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "hsl(%d,%d%%,%d%%)",
                static_cast<int>(k * 360 / (n ? n : 1)), sat, light);
  return buf;
}

// Arc of the circle |z - c| = r from q0 to q1; ccw selects the positive
// angular direction around c.
void arc_path(std::string& out, const Complex& q0, const Complex& q1, double r,
              bool ccw, bool large) {
  appendf(out, "M %.3f %.3f A %.3f %.3f 0 %d %d %.3f %.3f",
          px(q0.real()), py(q0.imag()), r * (kHalf / kView), r * (kHalf / kView),
          large ? 1 : 0, ccw ? 0 : 1, px(q1.real()), py(q1.imag()));
}

void draw_piece(std::string& out, const Piece& pc, const std::string& stroke,
                double width) {
  std::string d;
  switch (pc.kind) {
    case PieceKind::CircleArc: {
      const Complex q0 = std::polar(pc.radius_at(pc.span_begin), pc.span_begin);
      const Complex q1 = std::polar(pc.radius_at(pc.span_end), pc.span_end);
      const double mid = 0.5 * (pc.span_begin + pc.span_end);
      const Complex qm = std::polar(pc.radius_at(mid), mid);
      const double a0 = std::arg(q0 - pc.center);
      const double span = wrap_from(std::arg(q1 - pc.center), a0);
      const double to_mid = wrap_from(std::arg(qm - pc.center), a0);
      const bool ccw = to_mid <= span;
      const double extent = ccw ? span : kTwoPi - span;
      arc_path(d, q0, q1, pc.radius, ccw, extent > kPi);
      break;
    }
    case PieceKind::Chord:
      appendf(d, "M %.3f %.3f L %.3f %.3f", px(pc.p0.real()), py(pc.p0.imag()),
              px(pc.p1.real()), py(pc.p1.imag()));
      break;
    case PieceKind::PolarGraph: {
      const std::size_t n = pc.polyline.size();
      const std::size_t step = std::max<std::size_t>(1, n / 400);
      for (std::size_t i = 0; i < n; i += step)
        appendf(d, "%s%.3f %.3f", i == 0 ? "M " : " L ", px(pc.polyline[i].real()),
                py(pc.polyline[i].imag()));
      if ((n - 1) % step != 0)
        appendf(d, " L %.3f %.3f", px(pc.polyline[n - 1].real()),
                py(pc.polyline[n - 1].imag()));
      break;
    }
  }
  appendf(out, "<path d=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"%.2f\"/>\n",
          d.c_str(), stroke.c_str(), width);
}

void draw_partition(std::string& out, const ArcPartition& p, bool lenses) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    const UnitArc& a = p.arcs[k];
    const Complex q0 = a.endpoint_cw(), q1 = a.endpoint_ccw();
    if (lenses) {
      const GeodesicArc g = geodesic_of(a);
      std::string d;
      arc_path(d, q0, q1, 1.0, true, a.half_opening > kPi / 2);
      // back along the geodesic circle, positive direction around its center
      appendf(d, " A %.3f %.3f 0 0 0 %.3f %.3f Z",
              g.circle_radius * (kHalf / kView), g.circle_radius * (kHalf / kView),
              px(q0.real()), py(q0.imag()));
      appendf(out, "<path d=\"%s\" fill=\"%s\" fill-opacity=\"0.22\" stroke=\"none\"/>\n",
              d.c_str(), hue(k, p.size(), 62, 45).c_str());
    }
    std::string d;
    arc_path(d, q0, q1, 1.0, true, a.half_opening > kPi / 2);
    appendf(out, "<path d=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"3.00\"/>\n",
            d.c_str(), hue(k, p.size(), 62, 45).c_str());
  }
}

void heat_color(double t, int& r, int& g, int& b) {
  // two-segment blue -> green -> yellow ramp
  t = std::min(std::max(t, 0.0), 1.0);
  if (t < 0.5) {
    const double s = 2.0 * t;
    r = static_cast<int>(40 + 20 * s);
    g = static_cast<int>(60 + 130 * s);
    b = static_cast<int>(170 - 90 * s);
  } else {
    const double s = 2.0 * (t - 0.5);
    r = static_cast<int>(60 + 180 * s);
    g = static_cast<int>(190 + 40 * s);
    b = static_cast<int>(80 - 50 * s);
  }
}

void draw_field(std::string& out, const ScalarField& f) {
  const int w = f.width();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int idx = 0; idx < w * w; ++idx)
    if (f.mask[idx]) {
      lo = std::min(lo, f.u[idx]);
      hi = std::max(hi, f.u[idx]);
    }
  if (!(hi > lo)) hi = lo + 1.0;
  const int step = std::max(1, w / 96);
  const double cell = f.h * step * (kHalf / kView) + 0.5;
  for (int j = 0; j < w; j += step)
    for (int i = 0; i < w; i += step) {
      if (!f.mask[j * w + i]) continue;
      int r, g, b;
      heat_color((f.u[j * w + i] - lo) / (hi - lo), r, g, b);
      appendf(out, "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" fill=\"rgb(%d,%d,%d)\"/>\n",
              px(f.coord(i)) - 0.5 * cell, py(f.coord(j)) - 0.5 * cell, cell, cell,
              r, g, b);
    }
  // legend: vertical ramp with min/max labels
  const int bx = 2 * kHalf + 10, by = 40, bh = 2 * kHalf - 80, bw = 16;
  for (int s = 0; s < 32; ++s) {
    int r, g, b;
    heat_color(1.0 - (s + 0.5) / 32, r, g, b);
    appendf(out, "<rect x=\"%d\" y=\"%.3f\" width=\"%d\" height=\"%.3f\" fill=\"rgb(%d,%d,%d)\"/>\n",
            bx, by + s * (bh / 32.0), bw, bh / 32.0 + 0.5, r, g, b);
  }
  appendf(out, "<text x=\"%d\" y=\"%d\" font-size=\"13\">%.3g</text>\n", bx + bw + 4,
          by + 5, hi);
  appendf(out, "<text x=\"%d\" y=\"%d\" font-size=\"13\">%.3g</text>\n", bx + bw + 4,
          by + bh + 5, lo);
}

std::string compose(const StarDomain* a, const StarDomain* b,
                    const ArcPartition* partition, const ScalarField* field) {
  std::string out;
  const int width = 2 * kHalf + (field ? kLegendW : 0);
  appendf(out,
          "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
          "viewBox=\"0 0 %d %d\">\n<rect width=\"%d\" height=\"%d\" fill=\"white\"/>\n",
          width, 2 * kHalf, width, 2 * kHalf, width, 2 * kHalf);
  if (field) draw_field(out, *field);
  appendf(out, "<circle cx=\"%d\" cy=\"%d\" r=\"%.3f\" fill=\"none\" stroke=\"#999\" stroke-width=\"1.00\"/>\n",
          kHalf, kHalf, 1.0 * (kHalf / kView));
  if (partition) draw_partition(out, *partition, true);
  if (a)
    for (std::size_t k = 0; k < a->pieces.size(); ++k)
      draw_piece(out, a->pieces[k], hue(k, a->pieces.size(), 70, 32), 2.0);
  if (b)
    for (const Piece& pc : b->pieces) draw_piece(out, pc, "#222222", 1.2);
  out += "</svg>\n";
  return out;
}

}  // namespace

std::string render_svg(const StarDomain& d, const ArcPartition* partition,
                       const ScalarField* field) {
  return compose(&d, nullptr, partition, field);
}

std::string render_svg(const VellingInstance& inst, const ScalarField* field) {
  return compose(&inst.D, &inst.Dcirc, &inst.partition, field);
}

void write_svg(const std::string& svg, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_svg: cannot open " + path);
  std::fwrite(svg.data(), 1, svg.size(), f);
  std::fclose(f);
}

}  // namespace velling
