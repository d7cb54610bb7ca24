#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "rigidqmc/discrepancy.hpp"
#include "rigidqmc/motion.hpp"
#include "rigidqmc/product.hpp"

namespace rigidqmc {

// SO(3)^n, SE(3)^n, SE(2) x SO(3) x SE(2) x ... and bounded-range SO(3)^n.
enum class ProductPreset { So3Power, Se3Power, MixedSe2So3, BoundedSo3Power };

std::string_view preset_name(ProductPreset p);
// "so3", "se3", "mixed", "so3-bounded".
ProductPreset parse_preset(std::string_view name);

using MotionPointSet = PointSet<MotionElement>;
using MotionProductSet = ProductPointSet<MotionElement>;

struct PresetConfig {
  ProductPreset preset = ProductPreset::So3Power;
  std::size_t factors = 2;
  // Requested size of each factor set; emitted sizes follow the factor's split.
  std::size_t m = 64;
  double eps_r = 0.2;
  RectPrgBackend backend;
  // Sampling domain of the SO(3) factors of the bounded preset.
  BoundedRange range;
  // Vertex count of the convex polygons used to measure factor eps_i.
  int polygon_k = 6;
  // Estimator trials per distinct factor when measuring eps_i.
  std::uint64_t factor_trials = 2000;
};

std::vector<Space> preset_factor_spaces(ProductPreset p, std::size_t n);

// Motion group sample of the requested size as a generic factor set.
MotionPointSet motion_factor_set(Space space, std::size_t m, const BoundedRange& range = {});

// Builds each factor, measures its eps_i with the factor's natural family
// (seeded by the backend seed), and applies derandomized_product.
MotionProductSet product_space_preset(const PresetConfig& config);

// Natural factor families of a motion product, for product_family_discrepancy.
std::vector<FactorFamily> motion_product_families(const MotionProductSet& set, int k);

}  // namespace rigidqmc
