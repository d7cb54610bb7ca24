#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigidqmc/core.hpp"
#include "rigidqmc/index_points.hpp"
#include "rigidqmc/motion.hpp"
#include "rigidqmc/regions.hpp"
#include "rigidqmc/rng.hpp"
#include "rigidqmc/sphere.hpp"
#include "rigidqmc/unitcube.hpp"

// Discrepancy of a point set P against a family X:
//   sup_{X in X} | |P n X| / |P| - mu(X) / mu(total) |.
// Exact oracles enumerate the finitely many critical regions: the over-count
// side is attained by closed regions whose faces pass through points, the
// under-count side is approached by open regions whose faces pass through
// points or the domain boundary. Estimators take the best of seeded random
// regions and only ever report a lower bound.

namespace rigidqmc {

enum class ReportMode { Exact, EstimatedLowerBound };

std::string_view report_mode_name(ReportMode m);

struct DiscrepancyReport {
  std::string family;
  double value = 0.0;
  ReportMode mode = ReportMode::Exact;
  nlohmann::json witness;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct SearchOptions {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  // 0 means all hardware threads. Results never depend on this value.
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

// Exact-mode work limits. Exceeding one raises BudgetRefusal.
struct ExactBudget {
  static constexpr std::size_t kArcs = std::size_t{1} << 20;
  static constexpr std::size_t kBoxes1 = std::size_t{1} << 20;
  static constexpr std::size_t kBoxes2 = 256;
  static constexpr std::size_t kBoxes3 = 32;
  static constexpr std::size_t kAnchored2 = 4096;
  static constexpr std::size_t kAnchored3 = 256;
  static constexpr std::size_t kLatitudeRects = 256;
  static constexpr std::size_t kCombRectBits = 24;
  static constexpr std::size_t kProfileBoxes = 64;
};

// ---- exact oracles ----

// Closed arcs of the set's circle range (wrapping on a full circle).
DiscrepancyReport arc_discrepancy_exact(const CirclePointSet& points, unsigned threads = 0);

// Boxes in [0,1]^k, k = cube_dimension(points). Anchored boxes have their
// lower corner at the origin.
DiscrepancyReport box_discrepancy_exact(const CubePointSet& points, bool anchored,
                                        unsigned threads = 0);

// Latitude rectangles of the set's sphere patch, evaluated on the Lambert
// pull-back. Longitude intervals wrap when the patch spans all longitudes.
DiscrepancyReport latitude_rect_discrepancy_exact(const S2PointSet& points, unsigned threads = 0);

// ---- estimators (lower bounds) ----

DiscrepancyReport arc_discrepancy_estimate(const CirclePointSet& points, const SearchOptions& opts);
DiscrepancyReport box_discrepancy_estimate(const CubePointSet& points, bool anchored,
                                           const SearchOptions& opts);
DiscrepancyReport latitude_rect_discrepancy_estimate(const S2PointSet& points,
                                                     const SearchOptions& opts);
// Full sphere only.
DiscrepancyReport cap_discrepancy_estimate(const S2PointSet& points, const SearchOptions& opts);
// Convex hulls of k random points in a random container cap inside the patch.
DiscrepancyReport spherical_convex_discrepancy_estimate(const S2PointSet& points, int k,
                                                        const SearchOptions& opts);
// Arc on the Hopf fiber attached over a spherical convex polygon of the base.
DiscrepancyReport local_cartesian_convex_discrepancy_estimate(const So3PointSet& points, int k,
                                                              const SearchOptions& opts);
// Arc x rectangle sets on SE(2).
DiscrepancyReport se2_discrepancy_estimate(const Se2PointSet& points, const SearchOptions& opts);
// Local Cartesian convex set x box on SE(3).
DiscrepancyReport se3_discrepancy_estimate(const Se3PointSet& points, int k,
                                           const SearchOptions& opts);

// ---- combinatorial rectangles ----

enum class CombRectMode { Exact, MonteCarlo };

// Exact mode needs sum_j m_j <= ExactBudget::kCombRectBits, i.e.
// (2^m)^n <= 2^24 for equal alphabets.
DiscrepancyReport comb_rect_discrepancy(const IndexPoints& points, CombRectMode mode,
                                        const SearchOptions& opts);

// ---- products of factor families ----

// Membership of every factor element in one sampled factor region.
struct FactorProbe {
  std::vector<char> member;
  double fraction = 0.0;
  nlohmann::json witness;
};

// A test family on one factor of a product, expressed over that factor's
// element list.
struct FactorFamily {
  std::string name;
  std::size_t size = 0;
  // nullopt when the drawn region is degenerate; the trial is still counted.
  std::function<std::optional<FactorProbe>(SplitMix64&)> sample;
  std::function<FactorProbe(const nlohmann::json&)> replay;
};

FactorFamily full_space_factor(std::size_t size);
FactorFamily arc_factor(std::vector<double> angles, const AngleInterval& range);
FactorFamily box_factor(std::vector<CubePoint> points, int dim, bool anchored);
FactorFamily cap_factor(std::vector<S2Point> points);
FactorFamily polygon_factor(std::vector<S2Point> points, const SphereRange& patch, int k);
FactorFamily local_cartesian_factor(const std::vector<UnitQuaternion>& points,
                                    const BoundedRange& range, int k);
FactorFamily se2_factor(const std::vector<Se2Element>& points, const AngleInterval& range);
FactorFamily se3_factor(const std::vector<Se3Element>& points, const BoundedRange& range, int k);
// The natural family of a motion group factor: local Cartesian convex sets on
// SO(3), arc x rectangle on SE(2), local Cartesian convex x box on SE(3).
FactorFamily motion_factor(const std::vector<MotionElement>& points, Space space,
                           const BoundedRange& range, int k);

// Rows pick one element index per factor. Each trial draws one region per
// factor; membership is the conjunction and measure the product of fractions.
// A single factor reports that factor's witness directly.
DiscrepancyReport product_family_discrepancy(const IndexPoints& rows,
                                             std::span<const FactorFamily> families,
                                             const SearchOptions& opts);

// ---- witnesses ----

// |count / N - fraction| of the witness region recorded in a report.
double witness_deviation(const CirclePointSet& points, const nlohmann::json& witness);
double witness_deviation(const CubePointSet& points, const nlohmann::json& witness);
double witness_deviation(const S2PointSet& points, const nlohmann::json& witness);
double witness_deviation(const So3PointSet& points, const nlohmann::json& witness);
double witness_deviation(const IndexPoints& points, const nlohmann::json& witness);
double witness_deviation(const IndexPoints& rows, std::span<const FactorFamily> families,
                         const nlohmann::json& witness);

// ---- exact product check ----

// For every count c, the least measure of a closed region holding exactly c
// points and the largest measure of an open region holding exactly c
// points (NaN where no critical region has that count). Includes the empty
// region and the whole space.
struct CriticalProfile {
  std::size_t n = 0;
  std::vector<double> min_closed;
  std::vector<double> max_open;
};

CriticalProfile arc_critical_profile(const CirclePointSet& points);
// All boxes, k <= 2, N <= ExactBudget::kProfileBoxes.
CriticalProfile box_critical_profile(const CubePointSet& points);

// Exact discrepancy of Q x R against products of the two families whose
// profiles are given: regions X1 x X2 hold c1 * c2 of the N1 * N2 points.
double product_discrepancy_exact(const CriticalProfile& a, const CriticalProfile& b);

// ---- integration ----

template <class Element, class F>
double qmc_integrate(const PointSet<Element>& points, F&& f) {
  if (points.empty()) throw ParameterError("qmc_integrate needs a nonempty point set");
  double sum = 0.0;
  for (const Element& e : points.elements) sum += f(e);
  return sum / static_cast<double>(points.size());
}

}  // namespace rigidqmc
