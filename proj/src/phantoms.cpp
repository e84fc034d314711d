#include "ringct/phantoms.hpp"

#include "ringct/errors.hpp"
#include "ringct/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace ringct {

namespace {

constexpr double kTangentDiscriminant = 1e-14;

double deg(double d) { return d * std::numbers::pi / 180.0; }

} // namespace

Image three_squares(std::size_t grid_n) {
  if (grid_n < 8) throw InvalidArgument("three_squares needs grid_n >= 8");
  constexpr double side = 1.0;
  constexpr double middle_half = 0.30;
  constexpr double inner_half = 0.15;
  Image img = Image::zeros(grid_n, side / static_cast<double>(grid_n));
  for (std::size_t r = 0; r < grid_n; ++r) {
    const double y = std::abs(img.center(r));
    for (std::size_t c = 0; c < grid_n; ++c) {
      const double m = std::max(std::abs(img.center(c)), y);
      if (m <= inner_half)
        img.at(r, c) = 0.5;
      else if (m <= middle_half)
        img.at(r, c) = 0.25;
    }
  }
  return img;
}

Image grains(const GrainsSpec& spec, std::size_t grid_n, double domain_side) {
  if (spec.num_grains < 1) throw InvalidArgument("grains needs at least one cell");
  if (spec.low < 0.0 || spec.high < spec.low) throw InvalidArgument("grains value range invalid");
  if (!(spec.mask_radius > 0.0)) throw InvalidArgument("grains mask radius must be positive");

  struct Site {
    double x, y, value;
  };
  std::vector<Site> sites;
  sites.reserve(spec.num_grains);
  CounterRng rng(spec.seed, StreamDomain::phantom);
  const double rad = spec.mask_radius;
  while (sites.size() < spec.num_grains) {
    const double x = (2.0 * rng.uniform() - 1.0) * rad;
    const double y = (2.0 * rng.uniform() - 1.0) * rad;
    if (x * x + y * y > rad * rad) continue;
    const double value = spec.low + (spec.high - spec.low) * rng.uniform();
    sites.push_back({x, y, value});
  }

  Image img = Image::zeros(grid_n, domain_side / static_cast<double>(grid_n));
  for (std::size_t r = 0; r < grid_n; ++r) {
    const double y = img.center(r);
    for (std::size_t c = 0; c < grid_n; ++c) {
      const double x = img.center(c);
      if (x * x + y * y > rad * rad) continue;
      double best = std::numeric_limits<double>::infinity();
      double value = 0.0;
      for (const Site& s : sites) {
        const double d2 = (x - s.x) * (x - s.x) + (y - s.y) * (y - s.y);
        if (d2 < best) {
          best = d2;
          value = s.value;
        }
      }
      img.at(r, c) = value;
    }
  }
  return img;
}

EllipsePhantom shepp_logan() {
  // value, a, b, x0, y0, phi (degrees)
  constexpr double table[10][6] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},         {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0}, {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},  {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  };
  EllipsePhantom ph;
  for (const auto& row : table)
    ph.ellipses.push_back({row[3], row[4], row[1], row[2], deg(row[5]), row[0]});
  return ph;
}

Image rasterize(const EllipsePhantom& ph, std::size_t grid_n, double domain_side) {
  Image img = Image::zeros(grid_n, domain_side / static_cast<double>(grid_n));
  const double scale = 0.5 * domain_side;
  for (const Ellipse& e : ph.ellipses) {
    const double c = std::cos(e.phi);
    const double s = std::sin(e.phi);
    for (std::size_t r = 0; r < grid_n; ++r) {
      const double y = img.center(r) / scale - e.cy;
      for (std::size_t col = 0; col < grid_n; ++col) {
        const double x = img.center(col) / scale - e.cx;
        const double xr = c * x + s * y;
        const double yr = -s * x + c * y;
        if ((xr * xr) / (e.a * e.a) + (yr * yr) / (e.b * e.b) <= 1.0) img.at(r, col) += e.value;
      }
    }
  }
  return img;
}

double ellipse_chord(const Ellipse& e, double scale, double angle, double t) {
  // Work in unit-domain coordinates, rescale the chord at the end.
  const double tn = t / scale;
  const double px = tn * std::cos(angle) - e.cx;
  const double py = tn * std::sin(angle) - e.cy;
  const double dx = -std::sin(angle);
  const double dy = std::cos(angle);
  const double c = std::cos(e.phi);
  const double s = std::sin(e.phi);
  const double pxr = c * px + s * py;
  const double pyr = -s * px + c * py;
  const double dxr = c * dx + s * dy;
  const double dyr = -s * dx + c * dy;
  const double ia2 = 1.0 / (e.a * e.a);
  const double ib2 = 1.0 / (e.b * e.b);
  const double qa = dxr * dxr * ia2 + dyr * dyr * ib2;
  const double qb = 2.0 * (pxr * dxr * ia2 + pyr * dyr * ib2);
  const double qc = pxr * pxr * ia2 + pyr * pyr * ib2 - 1.0;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < kTangentDiscriminant) return 0.0;
  return scale * std::sqrt(disc) / qa;
}

Sinogram analytic_sinogram(const EllipsePhantom& ph, const Geometry& geom) {
  Sinogram out = Sinogram::zeros_like(geom, SinogramKind::line_integrals);
  const double scale = 0.5 * geom.domain_side;
  for (std::size_t i = 0; i < geom.detectors; ++i) {
    const double t = geom.detector_offset(i);
    for (std::size_t j = 0; j < geom.projections; ++j) {
      double acc = 0.0;
      for (const Ellipse& e : ph.ellipses) acc += e.value * ellipse_chord(e, scale, geom.angles[j], t);
      out.at(i, j) = acc;
    }
  }
  return out;
}

} // namespace ringct
