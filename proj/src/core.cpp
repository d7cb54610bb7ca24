#include "rigidqmc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rigidqmc {

S2Point S2Point::from_unit(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw InvalidElementError("S2 point is not unit norm (|p| = " + format_double(norm) + ")");
  }
  return {x, y, z};
}

S2Point S2Point::normalized(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(norm) || norm == 0.0) {
    throw InvalidElementError("cannot normalize a zero or non-finite vector onto S2");
  }
  return {x / norm, y / norm, z / norm};
}

S2Point S2Point::spherical(double theta, double phi) {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

double dot(const S2Point& a, const S2Point& b) {
  return a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
}

std::array<double, 3> cross(const S2Point& a, const S2Point& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
          a.x() * b.y() - a.y() * b.x()};
}

std::array<double, 3> UnitQuaternion::rotate(const std::array<double, 3>& v) const {
  // v' = v + 2 r x (r x v + w v), r = (x, y, z)
  const std::array<double, 3> r{x_, y_, z_};
  const auto cr = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::array<double, 3>{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                 a[0] * b[1] - a[1] * b[0]};
  };
  auto t = cr(r, v);
  for (int i = 0; i < 3; ++i) t[i] += w_ * v[i];
  const auto u = cr(r, t);
  return {v[0] + 2.0 * u[0], v[1] + 2.0 * u[1], v[2] + 2.0 * u[2]};
}

UnitQuaternion canonicalize_quaternion(const std::array<double, 4>& q) {
  const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  if (!std::isfinite(norm) || norm == 0.0) {
    throw InvalidElementError("quaternion has zero or non-finite norm");
  }
  // Inputs already unit to a few ulps are not rescaled, so f(f(q)) == f(q).
  const double scale = std::abs(norm - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon() ? 1.0 : norm;
  std::array<double, 4> u{q[0] / scale, q[1] / scale, q[2] / scale, q[3] / scale};
  bool negate = false;
  if (u[0] != 0.0) {
    negate = u[0] < 0.0;
  } else {
    for (int i = 1; i < 4; ++i) {
      if (u[i] != 0.0) {
        negate = u[i] < 0.0;
        break;
      }
    }
  }
  if (negate) {
    for (double& c : u) c = -c;
  }
  // -0.0 would break bitwise reproducibility of the canonical form.
  for (double& c : u) c += 0.0;
  return {u[0], u[1], u[2], u[3]};
}

double s2_geodesic_distance(const S2Point& p, const S2Point& q) {
  return std::acos(std::clamp(dot(p, q), -1.0, 1.0));
}

double so3_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  if (a == b) return 0.0;
  const double ip = a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
  return std::acos(std::min(1.0, std::abs(ip)));
}

std::string_view space_name(Space s) {
  switch (s) {
    case Space::T1: return "t1";
    case Space::T2: return "t2";
    case Space::T3: return "t3";
    case Space::S1: return "s1";
    case Space::S2: return "s2";
    case Space::SO3: return "so3";
    case Space::SE2: return "se2";
    case Space::SE3: return "se3";
    case Space::Product: return "product";
  }
  return "unknown";
}

Space parse_space(std::string_view name) {
  for (Space s : {Space::T1, Space::T2, Space::T3, Space::S1, Space::S2, Space::SO3, Space::SE2,
                  Space::SE3, Space::Product}) {
    if (space_name(s) == name) return s;
  }
  throw ParameterError("unknown space '" + std::string(name) + "'");
}

SpaceMeasure SpaceMeasure::of(Space s) {
  switch (s) {
    case Space::T1:
    case Space::T2:
    case Space::T3:
      return {s, 1.0, 1.0};
    case Space::S1:
      return {s, kTwoPi, 1.0};
    case Space::S2:
      return {s, 4.0 * kPi, 1.0};
    case Space::SO3:
      // (1/8) * 2 pi * 4 pi = pi^2, the Haar volume of the unit quaternions mod sign.
      return {s, 0.125 * kTwoPi * 4.0 * kPi, 0.125};
    case Space::SE2:
      return {s, kTwoPi, 1.0};
    case Space::SE3:
      return {s, 0.125 * kTwoPi * 4.0 * kPi, 0.125};
    case Space::Product:
      return {s, 1.0, 1.0};
  }
  return {s, 1.0, 1.0};
}

void validate_circle_range(const AngleInterval& range) {
  if (!(range.lo >= 0.0 && range.lo < range.hi && range.hi <= kTwoPi)) {
    throw ParameterError("circle range must satisfy 0 <= lo < hi <= 2pi, got [" +
                         format_double(range.lo) + ", " + format_double(range.hi) + "]");
  }
}

void validate_sphere_range(const SphereRange& range) {
  if (!(range.theta.lo >= 0.0 && range.theta.lo < range.theta.hi && range.theta.hi <= kPi)) {
    throw ParameterError("theta range must satisfy 0 <= theta1 < theta2 <= pi");
  }
  if (!(range.phi.lo >= 0.0 && range.phi.lo < range.phi.hi && range.phi.hi <= kTwoPi)) {
    throw ParameterError("phi range must satisfy 0 <= phi1 < phi2 <= 2pi");
  }
}

void validate_bounded_range(const BoundedRange& range) {
  validate_circle_range(range.circle);
  validate_sphere_range(range.sphere);
}

void Provenance::set(std::string key, std::string value) {
  for (auto& [k, v] : params) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  params.emplace_back(std::move(key), std::move(value));
}

void Provenance::set(std::string key, double value) { set(std::move(key), format_double(value)); }

void Provenance::set(std::string key, std::uint64_t value) {
  set(std::move(key), std::to_string(value));
}

const std::string* Provenance::find(std::string_view key) const {
  for (const auto& [k, v] : params) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
  return buf;
}

}  // namespace rigidqmc
