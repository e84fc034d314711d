#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ringct {

enum class AngleSpan { half, full };

/// 2D parallel-beam scan: r detector elements, p projection angles, square
/// reconstruction domain centered on the rotation axis.
///
/// Detector element i sits at signed offset
///   t_i = -detector_width/2 + (i + 1/2) * detector_width / r
/// and the ray (i, j) is the line { x : <x, (cos a_j, sin a_j)> = t_i }.
struct Geometry {
  std::size_t detectors = 0;   // r
  std::size_t projections = 0; // p
  double detector_width = 0.0; // cm
  std::vector<double> angles;  // radians, strictly increasing in [0, 2pi)
  double domain_side = 0.0;    // cm
  std::size_t grid_n = 0;      // reconstruction grid is grid_n x grid_n
  std::size_t forward_grid_n = 0;

  double detector_spacing() const { return detector_width / static_cast<double>(detectors); }
  double detector_offset(std::size_t i) const;
  double pixel_size() const { return domain_side / static_cast<double>(grid_n); }
  std::size_t rays() const { return detectors * projections; }

  /// Copy of this geometry whose reconstruction grid has side n.
  Geometry with_grid(std::size_t n) const;
  /// Copy on the (finer) simulation grid.
  Geometry fine() const { return with_grid(forward_grid_n); }

  /// Throws InvalidArgument when an invariant does not hold.
  void validate() const;
};

/// Equispaced angles over [0, pi) or [0, 2pi). forward_grid_n == 0 selects
/// the default simulation grid 2 * grid_n.
Geometry build_parallel_geometry(std::size_t detectors, std::size_t projections,
                                 double detector_width, double domain_side, std::size_t grid_n,
                                 AngleSpan span, std::size_t forward_grid_n = 0);

/// Pixel-basis attenuation image, row-major with row index increasing in +y
/// and column index increasing in +x.
struct Image {
  std::size_t n = 0;
  double pixel_size = 0.0;
  std::vector<double> values;

  static Image zeros(std::size_t n, double pixel_size);
  static Image zeros_like(const Geometry& geom) { return zeros(geom.grid_n, geom.pixel_size()); }

  double& at(std::size_t row, std::size_t col) { return values[row * n + col]; }
  double at(std::size_t row, std::size_t col) const { return values[row * n + col]; }
  /// Physical coordinate of the center of pixel column/row k.
  double center(std::size_t k) const;
};

enum class SinogramKind { counts, line_integrals, log_ratio };

/// r x p array stored detector-major: value(i, j) = values[i * p + j], so
/// that the p measurements of one detector element are contiguous.
struct Sinogram {
  std::size_t detectors = 0;
  std::size_t projections = 0;
  SinogramKind kind = SinogramKind::line_integrals;
  std::vector<double> values;

  static Sinogram zeros(std::size_t r, std::size_t p, SinogramKind kind);
  static Sinogram zeros_like(const Geometry& geom, SinogramKind kind) {
    return zeros(geom.detectors, geom.projections, kind);
  }

  double& at(std::size_t i, std::size_t j) { return values[i * projections + j]; }
  double at(std::size_t i, std::size_t j) const { return values[i * projections + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * projections, projections};
  }
};

struct RayWeight {
  std::uint32_t pixel;
  double length;
};

/// Exact intersection lengths of ray (i, j) with the pixels of the
/// geom.grid_n grid, ordered along the ray. Empty when the ray misses the
/// domain.
std::vector<RayWeight> operator_row(const Geometry& geom, std::size_t i, std::size_t j);

/// Length of the chord cut by ray (i, j) from the square domain.
double chord_length(const Geometry& geom, std::size_t i, std::size_t j);

/// The system matrix A (rows = rays in sinogram order, columns = pixels)
/// together with its exact transpose. In cached mode the ray weights are
/// traced once and kept in compressed-row form; in on-the-fly mode each
/// apply retraces the rays. Both modes use identical weights.
class Projector {
public:
  enum class Storage { on_the_fly, cached };

  explicit Projector(Geometry geom, Storage storage = Storage::cached);

  const Geometry& geometry() const { return geom_; }
  std::size_t image_size() const { return geom_.grid_n * geom_.grid_n; }
  std::size_t sinogram_size() const { return geom_.rays(); }

  /// out = A x
  void forward(std::span<const double> image, std::span<double> sino) const;
  /// out = A^T y
  void adjoint(std::span<const double> sino, std::span<double> image) const;

  std::vector<double> forward(std::span<const double> image) const;
  std::vector<double> adjoint(std::span<const double> sino) const;

private:
  Geometry geom_;
  Storage storage_;
  std::vector<std::size_t> row_start_;
  std::vector<std::uint32_t> pixels_;
  std::vector<double> lengths_;
};

/// Line integrals of img along every ray (matrix-free).
Sinogram forward_project(const Geometry& geom, const Image& img);
/// A^T applied to a sinogram with the same weights as forward_project.
Image back_project(const Geometry& geom, const Sinogram& sino);

} // namespace ringct
