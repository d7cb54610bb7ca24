#pragma once

#include <cstddef>
#include <utility>

#include "rigidqmc/core.hpp"
#include "rigidqmc/unitcube.hpp"

namespace rigidqmc {

using S2PointSet = PointSet<S2Point>;

// Lambert equal-area map from the unit square onto S2:
//   (2 sqrt(y - y^2) cos 2 pi x, 2 sqrt(y - y^2) sin 2 pi x, 1 - 2y).
// Axis-aligned rectangles go to latitude rectangles of the same area fraction.
S2Point lambert(double x, double y);

// Chart coordinates (x, y) in [0,1) x [0,1]; x = 0 at the poles.
std::pair<double, double> lambert_inverse(const S2Point& p);

// Pre-image rectangle of a sphere patch in chart coordinates.
struct ChartRect {
  double x_lo, x_hi, y_lo, y_hi;
  double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }
};
ChartRect chart_rect(const SphereRange& range);

// Lambert image of hammersley_2d(N).
S2PointSet s2_sample(std::size_t n);

// Hammersley points scaled into the chart pre-image of the patch, then mapped.
S2PointSet s2_sample_bounded(std::size_t n, const SphereRange& range);

// Region bounded by two latitudes and two meridians. The longitude arc
// starts at `lon_start` and runs counterclockwise for `lon_length` radians,
// so it may wrap through 2 pi.
struct LatitudeRectangle {
  double z_lo = -1.0;
  double z_hi = 1.0;
  double lon_start = 0.0;
  double lon_length = kTwoPi;

  // ((z_hi - z_lo)/2) * (lon_length / 2 pi).
  double measure_fraction() const;
  // Closed membership, evaluated in chart coordinates (the pole has longitude 0).
  bool contains(const S2Point& p) const;
};

}  // namespace rigidqmc
