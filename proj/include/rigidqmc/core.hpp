#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rigidqmc/errors.hpp"

namespace rigidqmc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Unit-norm checks on S2 points and quaternions.
inline constexpr double kUnitNormTolerance = 1e-12;
// Equality of measure fractions and discrepancy values.
inline constexpr double kMeasureTolerance = 1e-9;

inline constexpr std::string_view kVersion = "0.1.0";

// A point of the unit sphere in R^3.
class S2Point {
 public:
  S2Point() = default;

  // Throws InvalidElementError unless |(x,y,z)| = 1 within kUnitNormTolerance.
  static S2Point from_unit(double x, double y, double z);
  // Scales (x,y,z) onto the sphere; throws InvalidElementError for zero input.
  static S2Point normalized(double x, double y, double z);
  // (sin theta cos phi, sin theta sin phi, cos theta).
  static S2Point spherical(double theta, double phi);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  std::array<double, 3> coords() const { return {x_, y_, z_}; }

  friend auto operator<=>(const S2Point&, const S2Point&) = default;

 private:
  S2Point(double x, double y, double z) : x_(x), y_(y), z_(z) {}
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 1.0;
};

double dot(const S2Point& a, const S2Point& b);
std::array<double, 3> cross(const S2Point& a, const S2Point& b);

// An SO(3) element as a canonical unit quaternion: w > 0, or w = 0 and the
// first nonzero of (x, y, z) positive. q and -q are the same rotation and
// canonicalize to the same value.
class UnitQuaternion {
 public:
  UnitQuaternion() = default;

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  std::array<double, 4> coords() const { return {w_, x_, y_, z_}; }

  // Rotates v by this quaternion.
  std::array<double, 3> rotate(const std::array<double, 3>& v) const;

  friend auto operator<=>(const UnitQuaternion&, const UnitQuaternion&) = default;
  friend UnitQuaternion canonicalize_quaternion(const std::array<double, 4>& q);

 private:
  UnitQuaternion(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}
  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

// Normalizes q and applies the sign convention. Throws InvalidElementError on
// zero or non-finite input.
UnitQuaternion canonicalize_quaternion(const std::array<double, 4>& q);

// Great-circle distance in [0, pi].
double s2_geodesic_distance(const S2Point& p, const S2Point& q);
// arccos |<a,b>| in [0, pi/2]; zero exactly for the same rotation.
double so3_distance(const UnitQuaternion& a, const UnitQuaternion& b);

enum class Space { T1, T2, T3, S1, S2, SO3, SE2, SE3, Product };

std::string_view space_name(Space s);
Space parse_space(std::string_view name);

// Measure convention of a sampled space. Discrepancy is always reported as
// a fraction of `total`.
struct SpaceMeasure {
  Space space = Space::T1;
  double total = 1.0;
  // c in d mu(E) = c d mu(F) d mu(B) for fibered spaces, 1 otherwise.
  double separability = 1.0;

  static SpaceMeasure of(Space s);
};

// Closed angle interval [lo, hi], radians.
struct AngleInterval {
  double lo = 0.0;
  double hi = kTwoPi;

  double length() const { return hi - lo; }
  bool is_full_circle() const { return lo == 0.0 && hi == kTwoPi; }
  friend bool operator==(const AngleInterval&, const AngleInterval&) = default;
};

// Requires 0 <= lo < hi <= 2 pi.
void validate_circle_range(const AngleInterval& range);

// Patch S2_{[theta1,theta2],[phi1,phi2]} in colatitude/longitude.
struct SphereRange {
  AngleInterval theta{0.0, kPi};
  AngleInterval phi{0.0, kTwoPi};

  bool is_full() const { return theta.lo == 0.0 && theta.hi == kPi && phi.is_full_circle(); }
  friend bool operator==(const SphereRange&, const SphereRange&) = default;
};

// Requires 0 <= theta1 < theta2 <= pi and 0 <= phi1 < phi2 <= 2 pi.
void validate_sphere_range(const SphereRange& range);

// Per-coordinate angle intervals of a bounded sampling domain. S1 sets use
// `circle`, S2 sets use `sphere`, SO(3) sets use both (fiber angle psi and
// base patch).
struct BoundedRange {
  AngleInterval circle{0.0, kTwoPi};
  SphereRange sphere{};

  bool is_full() const { return circle.is_full_circle() && sphere.is_full(); }
  friend bool operator==(const BoundedRange&, const BoundedRange&) = default;
};

void validate_bounded_range(const BoundedRange& range);

// Generator name plus ordered key/value parameters; enough to regenerate a set.
struct Provenance {
  std::string generator;
  std::vector<std::pair<std::string, std::string>> params;

  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::uint64_t value);
  const std::string* find(std::string_view key) const;
};

// Ordered deterministic collection of elements of one space.
template <class Element>
struct PointSet {
  SpaceMeasure measure;
  std::vector<Element> elements;
  BoundedRange range{};
  Provenance provenance;
  // Sizes of the factors a composite set was built from; empty otherwise.
  std::vector<std::size_t> factor_sizes;

  std::size_t size() const { return elements.size(); }
  bool empty() const { return elements.empty(); }
  const Element& operator[](std::size_t i) const { return elements[i]; }
};

// Formats a double so that it parses back to the same value.
std::string format_double(double v);

}  // namespace rigidqmc
