#include "rigidqmc/sphere.hpp"

#include <cmath>

namespace rigidqmc {

S2Point lambert(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw ParameterError("lambert expects (x, y) in [0,1]^2");
  }
  const double r = 2.0 * std::sqrt(y - y * y);
  const double angle = kTwoPi * x;
  return S2Point::from_unit(r * std::cos(angle), r * std::sin(angle), 1.0 - 2.0 * y);
}

std::pair<double, double> lambert_inverse(const S2Point& p) {
  const double y = 0.5 * (1.0 - p.z());
  if (std::abs(p.z()) >= 1.0) return {0.0, y};
  double x = std::atan2(p.y(), p.x()) / kTwoPi;
  if (x < 0.0) x += 1.0;
  if (x >= 1.0) x = 0.0;
  return {x, y};
}

ChartRect chart_rect(const SphereRange& range) {
  validate_sphere_range(range);
  return {range.phi.lo / kTwoPi, range.phi.hi / kTwoPi, 0.5 * (1.0 - std::cos(range.theta.lo)),
          0.5 * (1.0 - std::cos(range.theta.hi))};
}

S2PointSet s2_sample(std::size_t n) {
  if (n == 0) throw ParameterError("s2_sample needs N >= 1");
  return s2_sample_bounded(n, SphereRange{});
}

S2PointSet s2_sample_bounded(std::size_t n, const SphereRange& range) {
  if (n == 0) throw ParameterError("s2_sample_bounded needs N >= 1");
  const ChartRect rect = chart_rect(range);
  const CubePointSet source = hammersley_2d(n);
  S2PointSet set;
  set.measure = SpaceMeasure::of(Space::S2);
  set.range.sphere = range;
  set.elements.reserve(n);
  const double wx = rect.x_hi - rect.x_lo;
  const double wy = rect.y_hi - rect.y_lo;
  for (const CubePoint& p : source.elements) {
    set.elements.push_back(lambert(rect.x_lo + p[0] * wx, rect.y_lo + p[1] * wy));
  }
  set.provenance.generator = "lambert-hammersley";
  set.provenance.set("n", std::uint64_t{n});
  set.provenance.set("source", "hammersley");
  if (!range.is_full()) {
    set.provenance.set("theta_lo", range.theta.lo);
    set.provenance.set("theta_hi", range.theta.hi);
    set.provenance.set("phi_lo", range.phi.lo);
    set.provenance.set("phi_hi", range.phi.hi);
  }
  return set;
}

double LatitudeRectangle::measure_fraction() const {
  return 0.5 * (z_hi - z_lo) * (lon_length / kTwoPi);
}

bool LatitudeRectangle::contains(const S2Point& p) const {
  if (p.z() < z_lo || p.z() > z_hi) return false;
  const auto [x, y] = lambert_inverse(p);
  double offset = kTwoPi * x - lon_start;
  if (offset < 0.0) offset += kTwoPi;
  if (offset >= kTwoPi) offset -= kTwoPi;
  return offset <= lon_length;
}

}  // namespace rigidqmc
