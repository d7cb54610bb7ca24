#include "rigidqmc/unitcube.hpp"

#include <string>

namespace rigidqmc {

int cube_dimension(const CubePointSet& set) {
  switch (set.measure.space) {
    case Space::T1: return 1;
    case Space::T2: return 2;
    case Space::T3: return 3;
    default: throw ParameterError("point set is not a T(k) set");
  }
}

double van_der_corput(std::uint64_t index, unsigned base) {
  if (base < 2) throw ParameterError("van der Corput base must be >= 2");
  // Reversed digits over base^digits, both exact in 128 bits.
  unsigned __int128 reversed = 0;
  unsigned __int128 denominator = 1;
  while (index > 0) {
    reversed = reversed * base + index % base;
    denominator *= base;
    index /= base;
  }
  return static_cast<double>(static_cast<long double>(reversed) /
                             static_cast<long double>(denominator));
}

CubePointSet hammersley_2d(std::size_t n) {
  if (n == 0) throw ParameterError("hammersley_2d needs N >= 1");
  CubePointSet set;
  set.measure = SpaceMeasure::of(Space::T2);
  set.elements.reserve(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.elements.push_back({static_cast<double>(i) / dn, van_der_corput(i, 2), 0.0});
  }
  set.provenance.generator = "hammersley";
  set.provenance.set("n", std::uint64_t{n});
  set.provenance.set("bases", "i/N,2");
  return set;
}

CubePointSet halton_kd(std::size_t n, int k) {
  if (k < 1 || k > 3) throw ParameterError("halton_kd supports k in {1,2,3}, got " + std::to_string(k));
  if (n == 0) throw ParameterError("halton_kd needs N >= 1");
  static constexpr unsigned kBases[3] = {2, 3, 5};
  CubePointSet set;
  set.measure = SpaceMeasure::of(k == 1 ? Space::T1 : k == 2 ? Space::T2 : Space::T3);
  set.elements.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CubePoint p{0.0, 0.0, 0.0};
    for (int d = 0; d < k; ++d) p[d] = van_der_corput(i, kBases[d]);
    set.elements.push_back(p);
  }
  set.provenance.generator = "halton";
  set.provenance.set("n", std::uint64_t{n});
  set.provenance.set("k", std::uint64_t(k));
  set.provenance.set("bases", k == 1 ? "2" : k == 2 ? "2,3" : "2,3,5");
  return set;
}

CirclePointSet circle_points(std::size_t n, const AngleInterval& range) {
  if (n == 0) throw ParameterError("circle_points needs N >= 1");
  validate_circle_range(range);
  CirclePointSet set;
  set.measure = SpaceMeasure::of(Space::S1);
  set.elements.reserve(n);
  const double step = range.length() / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.elements.push_back(range.lo + (static_cast<double>(i) + 0.5) * step);
  }
  set.range.circle = range;
  set.provenance.generator = "circle-midpoint";
  set.provenance.set("n", std::uint64_t{n});
  set.provenance.set("range_lo", range.lo);
  set.provenance.set("range_hi", range.hi);
  return set;
}

}  // namespace rigidqmc
