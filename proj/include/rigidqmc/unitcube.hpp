#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "rigidqmc/core.hpp"

namespace rigidqmc {

// Point of [0,1]^k for k <= 3; unused trailing coordinates are zero.
using CubePoint = std::array<double, 3>;

using CubePointSet = PointSet<CubePoint>;
// Angles in radians inside the set's circle range.
using CirclePointSet = PointSet<double>;

// Number of meaningful coordinates of a T(k) point set.
int cube_dimension(const CubePointSet& set);

// Radical inverse of `index` in `base`: digits of the index mirrored about
// the radix point. Throws ParameterError for base < 2.
double van_der_corput(std::uint64_t index, unsigned base);

// {(i/N, phi_2(i)) : i = 0..N-1}.
CubePointSet hammersley_2d(std::size_t n);

// Halton points (phi_2(i), phi_3(i), phi_5(i)) truncated to k coordinates,
// i = 0..N-1.
CubePointSet halton_kd(std::size_t n, int k);

// Midpoint placement: theta_i = lo + (i + 1/2)(hi - lo)/N.
CirclePointSet circle_points(std::size_t n, const AngleInterval& range = {});

}  // namespace rigidqmc
