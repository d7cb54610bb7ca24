#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "rigidqmc/core.hpp"
#include "rigidqmc/motion.hpp"
#include "rigidqmc/rng.hpp"
#include "rigidqmc/sphere.hpp"
#include "rigidqmc/unitcube.hpp"

// Test regions for every discrepancy family. Each region answers membership
// and its measure as a fraction of the sampled domain, and serializes to the
// JSON witness carried by a DiscrepancyReport. Membership only reads the
// stored parameters, so a region parsed back from JSON classifies every
// point exactly as the original did.

namespace rigidqmc {

// Arc of a circle range. On a full circle the arc runs counterclockwise from
// `start` for `length` radians and may wrap; on a bounded range it is the
// interval [start, start + length] and never wraps.
struct Arc {
  double start = 0.0;
  double length = 0.0;
  bool closed = true;

  bool contains(double angle, const AngleInterval& range) const;
  double fraction(const AngleInterval& range) const;
};

// Box in [0,1]^k (k = `dim`). Faces are closed or open per side.
struct Box {
  int dim = 2;
  CubePoint lower{};
  CubePoint upper{1.0, 1.0, 1.0};
  bool lower_closed = true;
  bool upper_closed = true;

  bool contains(const CubePoint& p) const;
  double fraction() const;
};

// Latitude rectangle expressed in normalized patch chart coordinates
// (u, v) in [0,1]^2, u along longitude and v along y = (1 - z)/2. When the
// patch spans all longitudes u is periodic and the u-interval may wrap.
struct ChartBox {
  double u_start = 0.0;
  double u_length = 1.0;
  double v_lo = 0.0;
  double v_hi = 1.0;
  bool closed = true;
  bool periodic = true;

  bool contains(double u, double v) const;
  double fraction() const { return u_length * (v_hi - v_lo); }
  // The same region as a latitude rectangle on the sphere (closed regions only).
  LatitudeRectangle to_sphere(const SphereRange& patch) const;
};

// Normalized patch chart coordinates of an S2 point.
std::pair<double, double> patch_chart(const S2Point& p, const SphereRange& patch);

// Closed spherical cap {p : <p, center> >= cos_radius}.
struct Cap {
  S2Point center;
  double cos_radius = 1.0;

  bool contains(const S2Point& p) const { return dot(p, center) >= cos_radius; }
  double fraction() const { return 0.5 * (1.0 - cos_radius); }
};

// Closed convex spherical polygon strictly inside a hemisphere; vertices
// counterclockwise seen from outside the sphere.
class SphericalPolygon {
 public:
  SphericalPolygon() = default;
  // Throws InvalidElementError for fewer than three vertices.
  explicit SphericalPolygon(std::vector<S2Point> vertices);

  const std::vector<S2Point>& vertices() const { return vertices_; }
  bool contains(const S2Point& p) const;
  // Spherical excess (sum of interior angles - (k - 2) pi), radians.
  double area() const;
  double fraction() const { return area() / (4.0 * kPi); }

 private:
  std::vector<S2Point> vertices_;
  std::vector<std::array<double, 3>> edge_normals_;
};

// Spherical convex hull of points lying in the open hemisphere around
// `center`, via the gnomonic projection. Returns nullopt when the hull has
// fewer than three vertices.
std::optional<SphericalPolygon> spherical_convex_hull(const std::vector<S2Point>& points,
                                                      const S2Point& center);

// Precomputed Hopf chart of an SO(3) element.
struct HopfPoint {
  double psi = 0.0;
  S2Point base;
};
HopfPoint hopf_point(const UnitQuaternion& q);

// Arc on the fiber circle attached over a convex polygon of the base.
struct LocalCartesianRegion {
  Arc fiber;
  SphericalPolygon base;

  bool contains(const HopfPoint& h, const AngleInterval& psi_range) const;
  // Fraction of the (possibly bounded) SO(3) domain.
  double fraction(const BoundedRange& range) const;
};

// Measure of a sphere patch as a fraction of the sphere.
double patch_fraction(const SphereRange& patch);

// Subsets I_1 x ... x I_n of [m_1] x ... x [m_n], as inclusion flags.
struct CombRect {
  std::vector<std::vector<bool>> sets;

  double fraction() const;
};

// Samplers used by the randomized estimators.
Arc random_arc(SplitMix64& rng, const AngleInterval& range);
Box random_box(SplitMix64& rng, int dim, bool anchored);
S2Point random_s2_point(SplitMix64& rng);
Cap random_cap(SplitMix64& rng);
// Container cap of angular radius at most `max_radius` inside the patch.
// Returns nullopt if none was found within the attempt budget.
std::optional<Cap> random_container_cap(SplitMix64& rng, const SphereRange& patch,
                                        double max_radius);
// k uniform points in the cap, convex hull taken. nullopt for degenerate hulls.
std::optional<SphericalPolygon> random_polygon_in_cap(SplitMix64& rng, const Cap& cap, int k);

// Largest container-cap radius used for polygon sampling: keeps polygons
// strictly inside a hemisphere.
inline constexpr double kPolygonCapRadius = 0.49 * kPi;

nlohmann::json to_json(const Arc& a);
nlohmann::json to_json(const Box& b);
nlohmann::json to_json(const ChartBox& b, const SphereRange& patch);
nlohmann::json to_json(const Cap& c);
nlohmann::json to_json(const SphericalPolygon& p);
nlohmann::json to_json(const LocalCartesianRegion& r);
nlohmann::json to_json(const CombRect& r);

Arc arc_from_json(const nlohmann::json& j);
Box box_from_json(const nlohmann::json& j);
ChartBox chart_box_from_json(const nlohmann::json& j);
Cap cap_from_json(const nlohmann::json& j);
SphericalPolygon polygon_from_json(const nlohmann::json& j);
LocalCartesianRegion local_cartesian_from_json(const nlohmann::json& j);
CombRect comb_rect_from_json(const nlohmann::json& j);

}  // namespace rigidqmc
