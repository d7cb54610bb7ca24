#include "rigidqmc/motion.hpp"

#include <algorithm>
#include <cmath>

namespace rigidqmc {

namespace {

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

std::size_t round_size(double v) { return static_cast<std::size_t>(std::max(1.0, std::round(v))); }

HopfCoordinates base_coordinates(const S2Point& p) {
  HopfCoordinates h;
  h.theta = std::acos(std::clamp(p.z(), -1.0, 1.0));
  h.phi = (p.x() == 0.0 && p.y() == 0.0) ? 0.0 : wrap_angle(std::atan2(p.y(), p.x()));
  return h;
}

}  // namespace

UnitQuaternion hopf_to_quaternion(const HopfCoordinates& h) {
  if (!(h.psi >= 0.0 && h.psi <= kTwoPi) || !(h.theta >= 0.0 && h.theta <= kPi) ||
      !(h.phi >= 0.0 && h.phi <= kTwoPi)) {
    throw ParameterError("Hopf coordinates out of range: psi, phi in [0, 2pi], theta in [0, pi]");
  }
  const double ct = std::cos(0.5 * h.theta);
  const double st = std::sin(0.5 * h.theta);
  const double half_psi = 0.5 * h.psi;
  return canonicalize_quaternion({ct * std::cos(half_psi), ct * std::sin(half_psi),
                                  st * std::cos(h.phi + half_psi), st * std::sin(h.phi + half_psi)});
}

HopfCoordinates quaternion_to_hopf(const UnitQuaternion& q) {
  const double fiber_norm = std::hypot(q.w(), q.x());
  const double base_norm = std::hypot(q.y(), q.z());
  HopfCoordinates h;
  h.theta = 2.0 * std::atan2(base_norm, fiber_norm);
  const double psi_raw = fiber_norm > 0.0 ? 2.0 * std::atan2(q.x(), q.w()) : 0.0;
  h.psi = wrap_angle(psi_raw);
  h.phi = base_norm > 0.0 ? wrap_angle(std::atan2(q.z(), q.y()) - 0.5 * psi_raw) : 0.0;
  return h;
}

S2Point hopf_base_point(const HopfCoordinates& h) { return S2Point::spherical(h.theta, h.phi); }

Fibration<double, S2Point, UnitQuaternion> hopf_fibration() {
  return {Space::S1, Space::S2, Space::SO3,
          [](const double& psi, const S2Point& base) {
            HopfCoordinates h = base_coordinates(base);
            h.psi = psi;
            return hopf_to_quaternion(h);
          },
          0.125};
}

So3Split so3_split(std::size_t n) {
  if (n < 2) throw ParameterError("SO(3) sampling needs N >= 2");
  const double dn = static_cast<double>(n);
  So3Split s;
  s.base = round_size(std::pow(dn * std::log(dn), 2.0 / 3.0));
  s.fiber = round_size(dn / static_cast<double>(s.base));
  return s;
}

So3PointSet so3_sample(std::size_t n) { return so3_sample_bounded(n, BoundedRange{}); }

So3PointSet so3_sample_bounded(std::size_t n, const BoundedRange& range) {
  validate_bounded_range(range);
  const So3Split split = so3_split(n);
  So3PointSet set = local_cartesian_product(circle_points(split.fiber, range.circle),
                                            s2_sample_bounded(split.base, range.sphere),
                                            hopf_fibration());
  set.provenance.generator = "hopf(circle-midpoint, lambert-hammersley)";
  set.provenance.set("requested_n", std::uint64_t{n});
  set.provenance.set("emitted_n", std::uint64_t{set.size()});
  set.provenance.set("fiber_size", std::uint64_t{split.fiber});
  set.provenance.set("base_size", std::uint64_t{split.base});
  if (!range.is_full()) {
    set.provenance.set("psi_lo", range.circle.lo);
    set.provenance.set("psi_hi", range.circle.hi);
    set.provenance.set("theta_lo", range.sphere.theta.lo);
    set.provenance.set("theta_hi", range.sphere.theta.hi);
    set.provenance.set("phi_lo", range.sphere.phi.lo);
    set.provenance.set("phi_hi", range.sphere.phi.hi);
  }
  return set;
}

Se2Split se2_split(std::size_t n) {
  if (n < 2) throw ParameterError("SE(2) sampling needs N >= 2");
  const double dn = static_cast<double>(n);
  Se2Split s;
  s.rotation = round_size(std::sqrt(dn));
  s.translation = round_size(dn / static_cast<double>(s.rotation));
  return s;
}

Se2PointSet se2_sample(std::size_t n, const AngleInterval& angle_range) {
  const Se2Split split = se2_split(n);
  const CirclePointSet rotations = circle_points(split.rotation, angle_range);
  const CubePointSet translations = halton_kd(split.translation, 2);
  Se2PointSet set;
  set.measure = SpaceMeasure::of(Space::SE2);
  set.range.circle = angle_range;
  set.elements.reserve(rotations.size() * translations.size());
  for (double a : rotations.elements) {
    for (const CubePoint& t : translations.elements) set.elements.push_back({a, {t[0], t[1]}});
  }
  set.factor_sizes = {rotations.size(), translations.size()};
  set.provenance.generator = "circle-midpoint x halton2";
  set.provenance.set("requested_n", std::uint64_t{n});
  set.provenance.set("emitted_n", std::uint64_t{set.size()});
  set.provenance.set("rotation_size", std::uint64_t{split.rotation});
  set.provenance.set("translation_size", std::uint64_t{split.translation});
  if (!angle_range.is_full_circle()) {
    set.provenance.set("angle_lo", angle_range.lo);
    set.provenance.set("angle_hi", angle_range.hi);
  }
  return set;
}

Se3Split se3_split(std::size_t n) {
  if (n < 4) throw ParameterError("SE(3) sampling needs N >= 4");
  const double dn = static_cast<double>(n);
  Se3Split s;
  s.rotation = round_size(std::pow(dn, 0.75));
  s.translation = round_size(dn / static_cast<double>(s.rotation));
  return s;
}

Se3PointSet se3_sample(std::size_t n, const BoundedRange& rotation_range) {
  const Se3Split split = se3_split(n);
  const So3PointSet rotations = so3_sample_bounded(split.rotation, rotation_range);
  const CubePointSet translations = halton_kd(split.translation, 3);
  Se3PointSet set;
  set.measure = SpaceMeasure::of(Space::SE3);
  set.range = rotation_range;
  set.elements.reserve(rotations.size() * translations.size());
  for (const UnitQuaternion& q : rotations.elements) {
    for (const CubePoint& t : translations.elements) set.elements.push_back({q, t});
  }
  set.factor_sizes = {rotations.size(), translations.size()};
  set.provenance.generator = "so3-hopf x halton3";
  set.provenance.set("requested_n", std::uint64_t{n});
  set.provenance.set("emitted_n", std::uint64_t{set.size()});
  set.provenance.set("rotation_requested", std::uint64_t{split.rotation});
  set.provenance.set("rotation_size", std::uint64_t{rotations.size()});
  set.provenance.set("translation_size", std::uint64_t{split.translation});
  for (const auto& [k, v] : rotations.provenance.params) {
    if (k.ends_with("_lo") || k.ends_with("_hi")) set.provenance.set(k, v);
  }
  return set;
}

}  // namespace rigidqmc
