#include <doctest.h>

#include <cmath>

#include "rigidqmc/core.hpp"
#include "rigidqmc/errors.hpp"
#include "rigidqmc/rng.hpp"

using namespace rigidqmc;

namespace {

void check_quat(const UnitQuaternion& q, double w, double x, double y, double z) {
  CHECK(q.w() == doctest::Approx(w).epsilon(1e-15));
  CHECK(q.x() == doctest::Approx(x).epsilon(1e-15));
  CHECK(q.y() == doctest::Approx(y).epsilon(1e-15));
  CHECK(q.z() == doctest::Approx(z).epsilon(1e-15));
}

}  // namespace

TEST_CASE("canonicalize flips antipodes to w > 0") {
  check_quat(canonicalize_quaternion({-1, 0, 0, 0}), 1, 0, 0, 0);
  check_quat(canonicalize_quaternion({0.5, 0.5, 0.5, 0.5}), 0.5, 0.5, 0.5, 0.5);
  check_quat(canonicalize_quaternion({0, -0.6, 0.8, 0}), 0, 0.6, -0.8, 0);
  check_quat(canonicalize_quaternion({0, 0, 0, -2}), 0, 0, 0, 1);
  CHECK_THROWS_AS(canonicalize_quaternion({0, 0, 0, 0}), InvalidElementError);
}

TEST_CASE("canonicalize is idempotent and keeps unit norm") {
  SplitMix64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const std::array<double, 4> raw{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                                    rng.uniform(-1, 1)};
    const UnitQuaternion q = canonicalize_quaternion(raw);
    const auto c = q.coords();
    CHECK(std::abs(std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]) - 1.0) < 1e-12);
    CHECK(canonicalize_quaternion(c) == q);
    CHECK(q.w() >= 0.0);
  }
}

TEST_CASE("geodesic distance on S2") {
  const S2Point n = S2Point::from_unit(0, 0, 1);
  CHECK(s2_geodesic_distance(n, n) == 0.0);
  CHECK(s2_geodesic_distance(n, S2Point::from_unit(1, 0, 0)) == doctest::Approx(kPi / 2));
  CHECK(s2_geodesic_distance(n, S2Point::from_unit(0, 0, -1)) == doctest::Approx(kPi));
  CHECK_THROWS_AS(S2Point::from_unit(1, 1, 0), InvalidElementError);
}

TEST_CASE("so3 distance") {
  const UnitQuaternion id = canonicalize_quaternion({1, 0, 0, 0});
  const UnitQuaternion qx = canonicalize_quaternion({0, 1, 0, 0});
  CHECK(so3_distance(id, id) == 0.0);
  CHECK(so3_distance(id, qx) == doctest::Approx(kPi / 2));
  CHECK(so3_distance(id, canonicalize_quaternion({-1, 0, 0, 0})) == 0.0);
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = canonicalize_quaternion({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), 0.1});
    const auto b = canonicalize_quaternion({rng.uniform(-1, 1), rng.uniform(-1, 1), 0.3, rng.uniform(-1, 1)});
    CHECK(so3_distance(a, b) == so3_distance(b, a));
    CHECK(so3_distance(a, b) > 0.0);
    CHECK(so3_distance(a, b) <= kPi / 2);
  }
}

TEST_CASE("space measures") {
  CHECK(SpaceMeasure::of(Space::T2).total == 1.0);
  CHECK(SpaceMeasure::of(Space::S1).total == doctest::Approx(kTwoPi));
  CHECK(SpaceMeasure::of(Space::S2).total == doctest::Approx(4 * kPi));
  CHECK(SpaceMeasure::of(Space::SO3).separability == 0.125);
  CHECK(SpaceMeasure::of(Space::SO3).total == doctest::Approx(kPi * kPi));
  for (auto s : {Space::T1, Space::T2, Space::T3, Space::S1, Space::S2, Space::SO3, Space::SE2, Space::SE3}) {
    CHECK(parse_space(space_name(s)) == s);
  }
  CHECK_THROWS_AS(parse_space("so4"), ParameterError);
}

TEST_CASE("range validation") {
  CHECK_NOTHROW(validate_circle_range({0.5, 1.0}));
  CHECK_THROWS_AS(validate_circle_range({1.0, 1.0}), ParameterError);
  CHECK_THROWS_AS(validate_circle_range({-0.1, 1.0}), ParameterError);
  CHECK_THROWS_AS(validate_circle_range({0.0, 7.0}), ParameterError);
  CHECK_THROWS_AS(validate_sphere_range({{0.0, 4.0}, {0.0, 1.0}}), ParameterError);
}

TEST_CASE("format_double round-trips") {
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-10, 10);
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("splitmix substreams are deterministic") {
  auto a = SplitMix64::substream(5, 9);
  auto b = SplitMix64::substream(5, 9);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
  CHECK(SplitMix64::substream(5, 9)() != SplitMix64::substream(5, 10)());
}
