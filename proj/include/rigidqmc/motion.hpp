#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <variant>

#include "rigidqmc/core.hpp"
#include "rigidqmc/sphere.hpp"
#include "rigidqmc/unitcube.hpp"

namespace rigidqmc {

// SE(2) element: rotation angle in [0, 2pi) and translation in [0,1]^2.
struct Se2Element {
  double angle = 0.0;
  std::array<double, 2> translation{};
  friend auto operator<=>(const Se2Element&, const Se2Element&) = default;
};

// SE(3) element: rotation and translation in [0,1]^3.
struct Se3Element {
  UnitQuaternion rotation;
  std::array<double, 3> translation{};
  friend auto operator<=>(const Se3Element&, const Se3Element&) = default;
};

using So3PointSet = PointSet<UnitQuaternion>;
using Se2PointSet = PointSet<Se2Element>;
using Se3PointSet = PointSet<Se3Element>;

// Factor of a product of motion groups.
using MotionElement = std::variant<UnitQuaternion, Se2Element, Se3Element>;

// Fiber angle psi in [0, 2pi) and base point (theta, phi) in spherical
// coordinates, theta in [0, pi], phi in [0, 2pi).
struct HopfCoordinates {
  double psi = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

// q = (cos(theta/2) cos(psi/2), cos(theta/2) sin(psi/2),
//      sin(theta/2) cos(phi + psi/2), sin(theta/2) sin(phi + psi/2)), canonicalized.
UnitQuaternion hopf_to_quaternion(const HopfCoordinates& h);

// Inverse chart. psi and phi are reduced into [0, 2pi); phi is 0 at theta = 0
// and psi is 0 at theta = pi, where the chart degenerates.
HopfCoordinates quaternion_to_hopf(const UnitQuaternion& q);

// Base point of the Hopf chart as an S2 point.
S2Point hopf_base_point(const HopfCoordinates& h);

// E = F x~ B with an explicit attachment map and separable volume element
// d mu(E) = c d mu(F) d mu(B).
template <class Fiber, class Base, class Total>
struct Fibration {
  Space fiber_space;
  Space base_space;
  Space total_space;
  std::function<Total(const Fiber&, const Base&)> attach;
  double distortion = 1.0;
};

// SO(3) = S1 x~ S2 with c = 1/8.
Fibration<double, S2Point, UnitQuaternion> hopf_fibration();

// Trivial bundle: the attachment map just pairs the coordinates.
template <class Fiber, class Base>
Fibration<Fiber, Base, std::pair<Fiber, Base>> trivial_fibration(Space fiber, Space base) {
  return {fiber, base, Space::Product,
          [](const Fiber& f, const Base& b) { return std::pair<Fiber, Base>(f, b); }, 1.0};
}

// Q x~ R: one copy of the fiber set attached over every base point,
// base-major order. Throws CompositionError if a space tag disagrees with
// the fibration.
template <class Fiber, class Base, class Total>
PointSet<Total> local_cartesian_product(const PointSet<Fiber>& fiber_points,
                                        const PointSet<Base>& base_points,
                                        const Fibration<Fiber, Base, Total>& fib) {
  if (fiber_points.measure.space != fib.fiber_space) {
    throw CompositionError("fiber point set lives in " +
                           std::string(space_name(fiber_points.measure.space)) + ", fibration expects " +
                           std::string(space_name(fib.fiber_space)));
  }
  if (base_points.measure.space != fib.base_space) {
    throw CompositionError("base point set lives in " +
                           std::string(space_name(base_points.measure.space)) + ", fibration expects " +
                           std::string(space_name(fib.base_space)));
  }
  PointSet<Total> out;
  out.measure = SpaceMeasure::of(fib.total_space);
  out.measure.separability = fib.distortion;
  out.elements.reserve(fiber_points.size() * base_points.size());
  for (const Base& b : base_points.elements) {
    for (const Fiber& f : fiber_points.elements) out.elements.push_back(fib.attach(f, b));
  }
  out.range.circle = fiber_points.range.circle;
  out.range.sphere = base_points.range.sphere;
  out.factor_sizes = {fiber_points.size(), base_points.size()};
  return out;
}

// Split of a requested SO(3) size into fiber and base sizes:
// N2 = max(1, round((N ln N)^(2/3))), N1 = max(1, round(N / N2)).
struct So3Split {
  std::size_t fiber = 1;
  std::size_t base = 1;
};
So3Split so3_split(std::size_t n);

So3PointSet so3_sample(std::size_t n);
// psi range in `range.circle`, base patch in `range.sphere`.
So3PointSet so3_sample_bounded(std::size_t n, const BoundedRange& range);

// circle_points(Na) x halton(Nb, 2), Na = round(sqrt N), Nb = round(N / Na).
struct Se2Split {
  std::size_t rotation = 1;
  std::size_t translation = 1;
};
Se2Split se2_split(std::size_t n);
Se2PointSet se2_sample(std::size_t n, const AngleInterval& angle_range = {});

// so3_sample(Nrot) x halton(Ntr, 3), Nrot = round(N^(3/4)), Ntr = round(N / Nrot).
struct Se3Split {
  std::size_t rotation = 1;
  std::size_t translation = 1;
};
Se3Split se3_split(std::size_t n);
Se3PointSet se3_sample(std::size_t n, const BoundedRange& rotation_range = {});

}  // namespace rigidqmc
