#include "rigidqmc/regions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rigidqmc {

namespace {

using Vec3 = std::array<double, 3>;

Vec3 vcross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double vdot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double vnorm(const Vec3& a) { return std::sqrt(vdot(a, a)); }

// Orthonormal (e1, e2) with e1 x e2 = c.
std::pair<Vec3, Vec3> tangent_frame(const S2Point& c) {
  const Vec3 cv = c.coords();
  const Vec3 helper = std::abs(cv[2]) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  Vec3 e1 = vcross(helper, cv);
  const double n1 = vnorm(e1);
  for (double& x : e1) x /= n1;
  const Vec3 e2 = vcross(cv, e1);
  return {e1, e2};
}

// Slack for closed polygon membership: a vertex lies on its own edges'
// great circles only up to rounding.
constexpr double kEdgeSlack = 1e-13;

nlohmann::json point_json(const S2Point& p) { return nlohmann::json::array({p.x(), p.y(), p.z()}); }

S2Point point_from_json(const nlohmann::json& j) {
  return S2Point::from_unit(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>());
}

}  // namespace

bool Arc::contains(double angle, const AngleInterval& range) const {
  double offset = angle - start;
  if (range.is_full_circle() && offset < 0.0) offset += kTwoPi;
  if (closed) return offset >= 0.0 && offset <= length;
  return offset > 0.0 && offset < length;
}

double Arc::fraction(const AngleInterval& range) const { return length / range.length(); }

bool Box::contains(const CubePoint& p) const {
  for (int d = 0; d < dim; ++d) {
    if (lower_closed ? p[d] < lower[d] : p[d] <= lower[d]) return false;
    if (upper_closed ? p[d] > upper[d] : p[d] >= upper[d]) return false;
  }
  return true;
}

double Box::fraction() const {
  double f = 1.0;
  for (int d = 0; d < dim; ++d) f *= upper[d] - lower[d];
  return f;
}

bool ChartBox::contains(double u, double v) const {
  double offset = u - u_start;
  if (periodic && offset < 0.0) offset += 1.0;
  if (closed) return offset >= 0.0 && offset <= u_length && v >= v_lo && v <= v_hi;
  return offset > 0.0 && offset < u_length && v > v_lo && v < v_hi;
}

LatitudeRectangle ChartBox::to_sphere(const SphereRange& patch) const {
  const ChartRect rect = chart_rect(patch);
  const double wy = rect.y_hi - rect.y_lo;
  const double wx = rect.x_hi - rect.x_lo;
  LatitudeRectangle r;
  r.z_hi = 1.0 - 2.0 * (rect.y_lo + v_lo * wy);
  r.z_lo = 1.0 - 2.0 * (rect.y_lo + v_hi * wy);
  r.lon_start = kTwoPi * (rect.x_lo + u_start * wx);
  r.lon_length = kTwoPi * u_length * wx;
  return r;
}

std::pair<double, double> patch_chart(const S2Point& p, const SphereRange& patch) {
  const auto [x, y] = lambert_inverse(p);
  if (patch.is_full()) return {x, y};
  const ChartRect rect = chart_rect(patch);
  double u = (x - rect.x_lo) / (rect.x_hi - rect.x_lo);
  double v = (y - rect.y_lo) / (rect.y_hi - rect.y_lo);
  u = std::clamp(u, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  if (patch.phi.is_full_circle() && u >= 1.0) u = 0.0;
  return {u, v};
}

SphericalPolygon::SphericalPolygon(std::vector<S2Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) throw InvalidElementError("spherical polygon needs at least 3 vertices");
  Vec3 centroid{0.0, 0.0, 0.0};
  for (const S2Point& v : vertices_) {
    for (int i = 0; i < 3; ++i) centroid[i] += v.coords()[i];
  }
  if (vdot(cross(vertices_[0], vertices_[1]), centroid) < 0.0) {
    std::reverse(vertices_.begin(), vertices_.end());
  }
  const std::size_t k = vertices_.size();
  edge_normals_.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Vec3 n = cross(vertices_[i], vertices_[(i + 1) % k]);
    const double len = vnorm(n);
    if (len == 0.0) throw InvalidElementError("spherical polygon has a degenerate edge");
    for (double& x : n) x /= len;
    edge_normals_.push_back(n);
  }
}

bool SphericalPolygon::contains(const S2Point& p) const {
  const Vec3 pv = p.coords();
  for (const Vec3& n : edge_normals_) {
    if (vdot(n, pv) < -kEdgeSlack) return false;
  }
  return true;
}

double SphericalPolygon::area() const {
  const std::size_t k = vertices_.size();
  double angle_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const Vec3 b = vertices_[i].coords();
    const Vec3 a = vertices_[(i + k - 1) % k].coords();
    const Vec3 c = vertices_[(i + 1) % k].coords();
    Vec3 ta, tc;
    const double ab = vdot(a, b);
    const double cb = vdot(c, b);
    for (int d = 0; d < 3; ++d) {
      ta[d] = a[d] - ab * b[d];
      tc[d] = c[d] - cb * b[d];
    }
    angle_sum += std::atan2(vnorm(vcross(ta, tc)), vdot(ta, tc));
  }
  return angle_sum - static_cast<double>(k - 2) * kPi;
}

std::optional<SphericalPolygon> spherical_convex_hull(const std::vector<S2Point>& points,
                                                      const S2Point& center) {
  const auto [e1, e2] = tangent_frame(center);
  struct Projected {
    double u, v;
    std::size_t index;
  };
  std::vector<Projected> proj;
  proj.reserve(points.size());
  const Vec3 cv = center.coords();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3 p = points[i].coords();
    const double d = vdot(p, cv);
    if (d <= 0.0) throw ParameterError("hull points must lie in the open hemisphere of the center");
    proj.push_back({vdot(p, e1) / d, vdot(p, e2) / d, i});
  }
  std::sort(proj.begin(), proj.end(), [](const Projected& a, const Projected& b) {
    return a.u < b.u || (a.u == b.u && a.v < b.v);
  });
  const auto turn = [](const Projected& o, const Projected& a, const Projected& b) {
    return (a.u - o.u) * (b.v - o.v) - (a.v - o.v) * (b.u - o.u);
  };
  // Andrew's monotone chain, counterclockwise, collinear points dropped.
  std::vector<Projected> hull(2 * proj.size());
  std::size_t h = 0;
  for (const Projected& p : proj) {
    while (h >= 2 && turn(hull[h - 2], hull[h - 1], p) <= 0.0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = proj.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && turn(hull[h - 2], hull[h - 1], proj[i]) <= 0.0) --h;
    hull[h++] = proj[i];
  }
  if (h > 0) --h;
  if (h < 3) return std::nullopt;
  std::vector<S2Point> vertices;
  vertices.reserve(h);
  for (std::size_t i = 0; i < h; ++i) vertices.push_back(points[hull[i].index]);
  try {
    return SphericalPolygon(std::move(vertices));
  } catch (const InvalidElementError&) {
    return std::nullopt;
  }
}

HopfPoint hopf_point(const UnitQuaternion& q) {
  const HopfCoordinates h = quaternion_to_hopf(q);
  return {h.psi, hopf_base_point(h)};
}

bool LocalCartesianRegion::contains(const HopfPoint& h, const AngleInterval& psi_range) const {
  return fiber.contains(h.psi, psi_range) && base.contains(h.base);
}

double LocalCartesianRegion::fraction(const BoundedRange& range) const {
  return fiber.fraction(range.circle) * (base.fraction() / patch_fraction(range.sphere));
}

double patch_fraction(const SphereRange& patch) {
  if (patch.is_full()) return 1.0;
  return chart_rect(patch).area();
}

double CombRect::fraction() const {
  double f = 1.0;
  for (const auto& s : sets) {
    f *= static_cast<double>(std::count(s.begin(), s.end(), true)) / static_cast<double>(s.size());
  }
  return f;
}

Arc random_arc(SplitMix64& rng, const AngleInterval& range) {
  if (range.is_full_circle()) {
    const double start = rng.uniform(0.0, kTwoPi);
    return {start, rng.uniform(0.0, kTwoPi), true};
  }
  double a = rng.uniform(range.lo, range.hi);
  double b = rng.uniform(range.lo, range.hi);
  if (b < a) std::swap(a, b);
  return {a, b - a, true};
}

Box random_box(SplitMix64& rng, int dim, bool anchored) {
  Box box;
  box.dim = dim;
  for (int d = 0; d < dim; ++d) {
    if (anchored) {
      box.lower[d] = 0.0;
      box.upper[d] = rng.uniform();
    } else {
      double a = rng.uniform();
      double b = rng.uniform();
      if (b < a) std::swap(a, b);
      box.lower[d] = a;
      box.upper[d] = b;
    }
  }
  for (int d = dim; d < 3; ++d) box.upper[d] = 1.0;
  return box;
}

S2Point random_s2_point(SplitMix64& rng) {
  const double z = rng.uniform(-1.0, 1.0);
  const double phi = rng.uniform(0.0, kTwoPi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return S2Point::normalized(r * std::cos(phi), r * std::sin(phi), z);
}

Cap random_cap(SplitMix64& rng) {
  const S2Point center = random_s2_point(rng);
  // Measure fraction u uniform in [0,1]: cos r = 1 - 2u.
  return {center, 1.0 - 2.0 * rng.uniform()};
}

std::optional<Cap> random_container_cap(SplitMix64& rng, const SphereRange& patch,
                                        double max_radius) {
  if (patch.is_full()) {
    const S2Point center = random_s2_point(rng);
    return Cap{center, std::cos(rng.uniform(0.0, max_radius))};
  }
  const ChartRect rect = chart_rect(patch);
  const double x = rng.uniform(rect.x_lo, rect.x_hi);
  const double y = rng.uniform(rect.y_lo, rect.y_hi);
  const S2Point center = lambert(x, y);
  const double theta = std::acos(std::clamp(center.z(), -1.0, 1.0));
  double limit = std::min({max_radius, theta - patch.theta.lo, patch.theta.hi - theta});
  if (!patch.phi.is_full_circle()) {
    const double phi = kTwoPi * x;
    const double room = std::min(phi - patch.phi.lo, patch.phi.hi - phi);
    if (room < 0.5 * kPi) {
      // A cap of radius r spans asin(sin r / sin theta) of longitude.
      limit = std::min(limit, std::asin(std::clamp(std::sin(theta) * std::sin(room), 0.0, 1.0)));
    }
  }
  limit *= 1.0 - 1e-9;
  if (!(limit > 1e-12)) return std::nullopt;
  return Cap{center, std::cos(rng.uniform(0.0, limit))};
}

std::optional<SphericalPolygon> random_polygon_in_cap(SplitMix64& rng, const Cap& cap, int k) {
  const auto [e1, e2] = tangent_frame(cap.center);
  const Vec3 c = cap.center.coords();
  std::vector<S2Point> pts;
  pts.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double h = rng.uniform(cap.cos_radius, 1.0);
    const double a = rng.uniform(0.0, kTwoPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - h * h));
    const double ca = r * std::cos(a);
    const double sa = r * std::sin(a);
    pts.push_back(S2Point::normalized(h * c[0] + ca * e1[0] + sa * e2[0],
                                      h * c[1] + ca * e1[1] + sa * e2[1],
                                      h * c[2] + ca * e1[2] + sa * e2[2]));
  }
  return spherical_convex_hull(pts, cap.center);
}

nlohmann::json to_json(const Arc& a) {
  return {{"type", "arc"}, {"start", a.start}, {"length", a.length}, {"closed", a.closed}};
}

nlohmann::json to_json(const Box& b) {
  nlohmann::json lower = nlohmann::json::array();
  nlohmann::json upper = nlohmann::json::array();
  for (int d = 0; d < b.dim; ++d) {
    lower.push_back(b.lower[d]);
    upper.push_back(b.upper[d]);
  }
  return {{"type", "box"},         {"dim", b.dim},
          {"lower", lower},        {"upper", upper},
          {"lower_closed", b.lower_closed}, {"upper_closed", b.upper_closed}};
}

nlohmann::json to_json(const ChartBox& b, const SphereRange& patch) {
  const LatitudeRectangle r = b.to_sphere(patch);
  return {{"type", "latitude-rect"},
          {"u_start", b.u_start},
          {"u_length", b.u_length},
          {"v_lo", b.v_lo},
          {"v_hi", b.v_hi},
          {"closed", b.closed},
          {"periodic", b.periodic},
          {"sphere",
           {{"z_lo", r.z_lo}, {"z_hi", r.z_hi}, {"lon_start", r.lon_start}, {"lon_length", r.lon_length}}}};
}

nlohmann::json to_json(const Cap& c) {
  return {{"type", "cap"},
          {"center", point_json(c.center)},
          {"cos_radius", c.cos_radius},
          {"radius", std::acos(std::clamp(c.cos_radius, -1.0, 1.0))}};
}

nlohmann::json to_json(const SphericalPolygon& p) {
  nlohmann::json verts = nlohmann::json::array();
  for (const S2Point& v : p.vertices()) verts.push_back(point_json(v));
  return {{"type", "spherical-polygon"}, {"vertices", verts}};
}

nlohmann::json to_json(const LocalCartesianRegion& r) {
  return {{"type", "local-cartesian"}, {"fiber", to_json(r.fiber)}, {"base", to_json(r.base)}};
}

nlohmann::json to_json(const CombRect& r) {
  nlohmann::json sets = nlohmann::json::array();
  nlohmann::json alphabet = nlohmann::json::array();
  for (const auto& s : r.sets) {
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t a = 0; a < s.size(); ++a) {
      if (s[a]) members.push_back(a);
    }
    sets.push_back(members);
    alphabet.push_back(s.size());
  }
  return {{"type", "comb-rect"}, {"alphabet", alphabet}, {"sets", sets}};
}

Arc arc_from_json(const nlohmann::json& j) {
  return {j.at("start").get<double>(), j.at("length").get<double>(), j.at("closed").get<bool>()};
}

Box box_from_json(const nlohmann::json& j) {
  Box b;
  b.dim = j.at("dim").get<int>();
  for (int d = 0; d < b.dim; ++d) {
    b.lower[d] = j.at("lower").at(d).get<double>();
    b.upper[d] = j.at("upper").at(d).get<double>();
  }
  b.lower_closed = j.at("lower_closed").get<bool>();
  b.upper_closed = j.at("upper_closed").get<bool>();
  return b;
}

ChartBox chart_box_from_json(const nlohmann::json& j) {
  ChartBox b;
  b.u_start = j.at("u_start").get<double>();
  b.u_length = j.at("u_length").get<double>();
  b.v_lo = j.at("v_lo").get<double>();
  b.v_hi = j.at("v_hi").get<double>();
  b.closed = j.at("closed").get<bool>();
  b.periodic = j.at("periodic").get<bool>();
  return b;
}

Cap cap_from_json(const nlohmann::json& j) {
  return {point_from_json(j.at("center")), j.at("cos_radius").get<double>()};
}

SphericalPolygon polygon_from_json(const nlohmann::json& j) {
  std::vector<S2Point> verts;
  for (const auto& v : j.at("vertices")) verts.push_back(point_from_json(v));
  return SphericalPolygon(std::move(verts));
}

LocalCartesianRegion local_cartesian_from_json(const nlohmann::json& j) {
  return {arc_from_json(j.at("fiber")), polygon_from_json(j.at("base"))};
}

CombRect comb_rect_from_json(const nlohmann::json& j) {
  CombRect r;
  const auto& alphabet = j.at("alphabet");
  const auto& sets = j.at("sets");
  for (std::size_t i = 0; i < alphabet.size(); ++i) {
    std::vector<bool> s(alphabet.at(i).get<std::size_t>(), false);
    for (const auto& a : sets.at(i)) s.at(a.get<std::size_t>()) = true;
    r.sets.push_back(std::move(s));
  }
  return r;
}

}  // namespace rigidqmc
