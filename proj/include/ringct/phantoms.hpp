#pragma once

#include "ringct/geometry.hpp"

#include <cstdint>
#include <vector>

namespace ringct {

struct Ellipse {
  double cx = 0.0;
  double cy = 0.0;
  double a = 1.0;     // semi-axis along the rotated x direction
  double b = 1.0;     // semi-axis along the rotated y direction
  double phi = 0.0;   // rotation, radians
  double value = 0.0; // additive attenuation
};

/// Sum of constant-valued ellipses. Coordinates are in units of the domain
/// half-side: (x, y) in [-1, 1]^2 maps onto the square reconstruction domain.
struct EllipsePhantom {
  std::vector<Ellipse> ellipses;
};

/// Seeded Voronoi "grains" inside a disk.
struct GrainsSpec {
  std::uint64_t seed = 1;
  std::size_t num_grains = 100;
  double low = 0.0;  // cm^-1
  double high = 1.2; // cm^-1
  double mask_radius = 0.8; // cm
};

/// Nested centered squares on a 1 cm domain: inner 0.5, middle 0.25, outer 0.
Image three_squares(std::size_t grid_n);

/// Voronoi partition of the disk of spec.mask_radius; each cell gets a value
/// drawn uniformly from [low, high]. domain_side is in cm.
Image grains(const GrainsSpec& spec, std::size_t grid_n, double domain_side);

/// Modified (Toft) Shepp-Logan table, ten ellipses.
EllipsePhantom shepp_logan();

/// Pixel-center sampling of the ellipse sum on an n x n grid covering a
/// square of side domain_side.
Image rasterize(const EllipsePhantom& ph, std::size_t grid_n, double domain_side);

/// Exact line integrals of the ellipse sum along every ray of geom.
Sinogram analytic_sinogram(const EllipsePhantom& ph, const Geometry& geom);

/// Chord length of the line {x : <x, (cos a, sin a)> = t} through one
/// ellipse, all lengths in physical units (scale = domain half-side).
double ellipse_chord(const Ellipse& e, double scale, double angle, double t);

} // namespace ringct
