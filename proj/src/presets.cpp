#include "rigidqmc/presets.hpp"

#include <map>

namespace rigidqmc {

namespace {

template <class T>
MotionPointSet widen(const PointSet<T>& set) {
  MotionPointSet out;
  out.measure = set.measure;
  out.range = set.range;
  out.provenance = set.provenance;
  out.factor_sizes = set.factor_sizes;
  out.elements.reserve(set.size());
  for (const T& e : set.elements) out.elements.emplace_back(e);
  return out;
}

}  // namespace

std::string_view preset_name(ProductPreset p) {
  switch (p) {
    case ProductPreset::So3Power: return "so3";
    case ProductPreset::Se3Power: return "se3";
    case ProductPreset::MixedSe2So3: return "mixed";
    case ProductPreset::BoundedSo3Power: return "so3-bounded";
  }
  return "so3";
}

ProductPreset parse_preset(std::string_view name) {
  if (name == "so3") return ProductPreset::So3Power;
  if (name == "se3") return ProductPreset::Se3Power;
  if (name == "mixed") return ProductPreset::MixedSe2So3;
  if (name == "so3-bounded") return ProductPreset::BoundedSo3Power;
  throw ParameterError("unknown product preset '" + std::string(name) + "' (so3 | se3 | mixed | so3-bounded)");
}

std::vector<Space> preset_factor_spaces(ProductPreset p, std::size_t n) {
  std::vector<Space> out;
  for (std::size_t j = 0; j < n; ++j) {
    switch (p) {
      case ProductPreset::So3Power:
      case ProductPreset::BoundedSo3Power: out.push_back(Space::SO3); break;
      case ProductPreset::Se3Power: out.push_back(Space::SE3); break;
      case ProductPreset::MixedSe2So3: out.push_back(j % 2 == 0 ? Space::SE2 : Space::SO3); break;
    }
  }
  return out;
}

MotionPointSet motion_factor_set(Space space, std::size_t m, const BoundedRange& range) {
  switch (space) {
    case Space::SO3: return widen(so3_sample_bounded(m, range));
    case Space::SE2: return widen(se2_sample(m, range.circle));
    case Space::SE3: return widen(se3_sample(m, range));
    default:
      throw ParameterError("no motion factor sampler for space " + std::string(space_name(space)));
  }
}

MotionProductSet product_space_preset(const PresetConfig& config) {
  if (config.factors == 0) throw ParameterError("product presets need n >= 1 factors");
  if (config.factor_trials == 0) throw ParameterError("factor_trials must be >= 1");
  const BoundedRange range =
      config.preset == ProductPreset::BoundedSo3Power ? config.range : BoundedRange{};
  validate_bounded_range(range);
  const std::vector<Space> spaces = preset_factor_spaces(config.preset, config.factors);
  // Factors of the same space are identical, so each is built and measured once.
  std::map<Space, std::pair<MotionPointSet, double>> cache;
  std::vector<MotionPointSet> factors;
  std::vector<double> eps;
  for (Space s : spaces) {
    auto it = cache.find(s);
    if (it == cache.end()) {
      MotionPointSet set = motion_factor_set(s, config.m, range);
      SearchOptions opts;
      opts.trials = config.factor_trials;
      opts.seed = config.backend.seed;
      opts.threads = config.backend.threads;
      const IndexPoints rows = IndexPoints::identity(set.size());
      const FactorFamily family = motion_factor(set.elements, s, set.range, config.polygon_k);
      const double e = product_family_discrepancy(rows, std::span<const FactorFamily>(&family, 1), opts).value;
      it = cache.emplace(s, std::make_pair(std::move(set), e)).first;
    }
    factors.push_back(it->second.first);
    eps.push_back(it->second.second);
  }
  MotionProductSet out = derandomized_product(std::move(factors), std::move(eps), config.eps_r, config.backend);
  out.provenance.generator = "product:" + std::string(preset_name(config.preset));
  out.provenance.set("m_requested", std::uint64_t{config.m});
  out.provenance.set("factor_trials", config.factor_trials);
  out.provenance.set("polygon_k", std::uint64_t(config.polygon_k));
  std::string names;
  for (std::size_t j = 0; j < spaces.size(); ++j) names += (j ? "," : "") + std::string(space_name(spaces[j]));
  out.provenance.set("factor_spaces", names);
  if (!range.is_full()) {
    out.provenance.set("psi_lo", range.circle.lo);
    out.provenance.set("psi_hi", range.circle.hi);
    out.provenance.set("theta_lo", range.sphere.theta.lo);
    out.provenance.set("theta_hi", range.sphere.theta.hi);
    out.provenance.set("phi_lo", range.sphere.phi.lo);
    out.provenance.set("phi_hi", range.sphere.phi.hi);
  }
  return out;
}

std::vector<FactorFamily> motion_product_families(const MotionProductSet& set, int k) {
  std::vector<FactorFamily> out;
  for (const MotionPointSet& f : set.factors) {
    out.push_back(motion_factor(f.elements, f.measure.space, f.range, k));
  }
  return out;
}

}  // namespace rigidqmc
