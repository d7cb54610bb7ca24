#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "rigidqmc/discrepancy.hpp"
#include "rigidqmc/presets.hpp"
#include "rigidqmc/product.hpp"

using namespace rigidqmc;

namespace {

SearchOptions opts(std::uint64_t trials, std::uint64_t seed = 0) {
  SearchOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

RectPrgBackend backend(PrgKind kind, std::uint64_t prime = 0) {
  RectPrgBackend b;
  b.kind = kind;
  b.prime = prime;
  return b;
}

}  // namespace

TEST_CASE("backend names") {
  CHECK(parse_prg_kind("kwise") == PrgKind::KWise);
  CHECK(parse_prg_kind("verified-random") == PrgKind::VerifiedRandom);
  CHECK(prg_kind_name(PrgKind::KWise) == "kwise");
  CHECK_THROWS_AS(parse_prg_kind("gmrz"), ParameterError);
}

TEST_CASE("primes") {
  CHECK(is_prime(2));
  CHECK(is_prime(65537));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(65535));
  CHECK(smallest_prime_at_least(65536) == 65537);
  CHECK(smallest_prime_at_least(8) == 11);
  CHECK(kwise_default_prime(64, 4) == 65537);
}

TEST_CASE("kwise degree 0 gives constant tuples") {
  for (std::uint64_t s = 0; s < 11; ++s) {
    const auto p = kwise_index_generator(1, 5, 4, s, 11);
    for (auto v : p) CHECK(v == (s % 11) % 4);
  }
}

TEST_CASE("kwise degree 1 evaluation rule") {
  const std::uint64_t P = 13;
  for (std::uint64_t c0 = 0; c0 < P; ++c0) {
    for (std::uint64_t c1 = 0; c1 < P; ++c1) {
      const auto p = kwise_index_generator(2, 6, 5, c0 + P * c1, P);
      for (std::uint64_t j = 0; j < 6; ++j) CHECK(p[j] == ((c0 + c1 * j) % P) % 5);
    }
  }
}

TEST_CASE("kwise pairs are uniform up to the mod-m bias") {
  // P = 7 folds onto m = 3 as residues {0,3,6}, {1,4}, {2,5}.
  const std::uint64_t P = 7;
  const int weight[3] = {3, 2, 2};
  std::map<std::pair<int, int>, int> freq;
  for (std::uint64_t s = 0; s < P * P; ++s) {
    const auto p = kwise_index_generator(2, 2, 3, s, P);
    ++freq[{int(p[0]), int(p[1])}];
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) CHECK(freq[{a, b}] == weight[a] * weight[b]);
  }
}

TEST_CASE("kwise parameter errors") {
  CHECK_THROWS_AS(kwise_index_generator(0, 2, 3, 0, 7), ParameterError);
  CHECK_THROWS_AS(kwise_index_generator(2, 2, 3, 49, 7), ParameterError);
  CHECK_THROWS_AS(kwise_index_generator(2, 2, 3, 0, 8), ParameterError);
  CHECK_THROWS_AS(kwise_index_generator(2, 2, 9, 0, 7), ParameterError);
}

TEST_CASE("kwise sizes") {
  CHECK(kwise_independence(0.25) == 4);
  CHECK(kwise_independence(0.1) == 6);
  CHECK(kwise_independence(0.2) == 5);
  CHECK(kwise_family_size(11, 6) == std::optional<std::uint64_t>(1771561));
  CHECK_FALSE(kwise_family_size(65537, 6).has_value());
  // m = 8, n = 8, eps = 0.1: t = 6 and P = 65537, far beyond the 2^24 budget.
  CHECK_THROWS_AS(rect_prg_points(8, 8, 0.1, backend(PrgKind::KWise)), BudgetRefusal);
  const auto out = rect_prg_points(4, 3, 0.25, backend(PrgKind::KWise, 5));
  CHECK(out.points.size() == 625);
  CHECK(out.independence == 4);
  CHECK(out.prime == 5);
  CHECK(out.certification == ReportMode::Exact);
  CHECK(out.certified == doctest::Approx(oracle::comb_rect_brute(out.points)).epsilon(1e-12));
  CHECK(out.certified <= 0.25);
}

TEST_CASE("verified random size") {
  // ceil(8 (3 ln 4 + ln 16) / 0.0625)
  CHECK(verified_random_size({4, 4, 4}, 0.25) == 888);
  CHECK(verified_random_size({2}, 0.5) == static_cast<std::size_t>(std::ceil(8 * (std::log(2.0) + std::log(8.0)) / 0.25)));
}

TEST_CASE("tiny rectangle generators") {
  for (PrgKind k : {PrgKind::KWise, PrgKind::VerifiedRandom}) {
    const auto out = rect_prg_points(2, 1, 0.5, backend(k, k == PrgKind::KWise ? 3 : 0));
    CHECK(out.certified == doctest::Approx(oracle::comb_rect_brute(out.points)).epsilon(1e-12));
    CHECK(out.certified <= 0.5);
  }
}

TEST_CASE("verified random certifies against every rectangle") {
  for (std::size_t m : {2u, 3u, 4u}) {
    for (std::size_t n : {1u, 2u, 3u}) {
      const auto out = rect_prg_points(m, n, 0.25, backend(PrgKind::VerifiedRandom));
      CHECK(out.certification == ReportMode::Exact);
      const double brute = oracle::comb_rect_brute(out.points);
      CHECK(brute <= 0.25);
      CHECK(out.certified == doctest::Approx(brute).epsilon(1e-12));
      CHECK(comb_rect_discrepancy(out.points, CombRectMode::Exact, opts(1)).value ==
            doctest::Approx(brute).epsilon(1e-12));
    }
  }
}

TEST_CASE("verified random output is reproducible") {
  const auto a = rect_prg_points(16, 3, 0.2, backend(PrgKind::VerifiedRandom));
  const auto b = rect_prg_points(16, 3, 0.2, backend(PrgKind::VerifiedRandom));
  CHECK(a.points.coords == b.points.coords);
  CHECK(a.certification == ReportMode::EstimatedLowerBound);
  CHECK(a.certified <= 0.2);
}

TEST_CASE("comb rectangles") {
  IndexPoints one;
  one.alphabet = {2};
  one.push_back({1});
  CHECK(comb_rect_discrepancy(one, CombRectMode::Exact, opts(1)).value == 0.5);
  CHECK(oracle::comb_rect_brute(one) == 0.5);
  CombRect full{{{true, true}, {true, true, true}}};
  CHECK(full.fraction() == 1.0);
  IndexPoints big;
  big.alphabet = {13, 12};
  big.push_back({0, 0});
  CHECK_THROWS_AS(comb_rect_discrepancy(big, CombRectMode::Exact, opts(1)), BudgetRefusal);
  const auto mc = comb_rect_discrepancy(big, CombRectMode::MonteCarlo, opts(1000));
  CHECK(mc.mode == ReportMode::EstimatedLowerBound);
  CHECK(witness_deviation(big, mc.witness) == doctest::Approx(mc.value).epsilon(1e-12));
  CHECK_THROWS_AS(big.push_back({13, 0}), ParameterError);
}

TEST_CASE("derandomized product checks its factors") {
  auto dup = circle_points(4);
  dup.elements[1] = dup.elements[0];
  CHECK_THROWS_AS(derandomized_product<double>({dup, circle_points(4)}, {0.25, 0.25}, 0.25, {}),
                  CompositionError);
  CHECK_THROWS_AS(derandomized_product<double>({circle_points(4)}, {0.25, 0.25}, 0.25, {}), CompositionError);
}

TEST_CASE("single factor product reproduces the factor") {
  const auto q = circle_points(8);
  const auto p = derandomized_product<double>({q}, {1.0 / 8}, 0.1, {});
  std::vector<int> hit(8, 0);
  for (std::size_t r = 0; r < p.size(); ++r) ++hit[p.rows.at(r, 0)];
  for (int h : hit) CHECK(h > 0);
  CHECK(comb_rect_discrepancy(p.rows, CombRectMode::Exact, opts(1)).value <= 0.1);
}

TEST_CASE("arc triple products stay under the budget") {
  const auto q = circle_points(16);
  const double e = arc_discrepancy_exact(q).value;
  const auto p = derandomized_product<double>({q, q, q}, {e, e, e}, 0.1, {});
  std::vector<FactorFamily> fams(3, arc_factor(q.elements, {}));
  const auto report = product_family_discrepancy(p.rows, fams, opts(10000));
  CHECK(report.value <= 0.1 + 3.0 / 16);
  CHECK(report.value <= p.budget());
  CHECK(witness_deviation(p.rows, fams, report.witness) == doctest::Approx(report.value).epsilon(1e-12));
}

TEST_CASE("toy product matches the full product on every rectangle") {
  const auto q = circle_points(4);
  const auto p = derandomized_product<double>({q, q}, {0.25, 0.25}, 0.2, {});
  // Rectangle fractions of the rows versus the full 4 x 4 product.
  double worst = 0.0;
  for (unsigned m1 = 0; m1 < 16; ++m1) {
    for (unsigned m2 = 0; m2 < 16; ++m2) {
      std::size_t in = 0;
      for (std::size_t r = 0; r < p.size(); ++r) in += ((m1 >> p.rows.at(r, 0)) & 1u) && ((m2 >> p.rows.at(r, 1)) & 1u);
      const double full = std::popcount(m1) * std::popcount(m2) / 16.0;
      worst = std::max(worst, std::abs(double(in) / p.size() - full));
    }
  }
  CHECK(worst <= 0.2);
  CHECK(worst == doctest::Approx(p.certified_eps_r).epsilon(1e-12));
}

TEST_CASE("product gap is bounded by the factor gaps") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 100000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const double m = 1 + static_cast<double>(rng.below(64));
    const double k = 1 + static_cast<double>(rng.below(64));
    double pa = 1.0, pb = 1.0, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(rng.below(static_cast<std::uint64_t>(m) + 1));
      const double b = static_cast<double>(rng.below(static_cast<std::uint64_t>(k) + 1));
      pa *= a / m;
      pb *= b / k;
      sum += std::abs(a / m - b / k);
    }
    CHECK(std::abs(pa - pb) <= sum + 1e-12);
  }
}

TEST_CASE("presets") {
  CHECK(parse_preset("mixed") == ProductPreset::MixedSe2So3);
  CHECK(preset_factor_spaces(ProductPreset::MixedSe2So3, 3) == std::vector<Space>{Space::SE2, Space::SO3, Space::SE2});

  PresetConfig cfg;
  cfg.factors = 1;
  cfg.m = 64;
  const auto one = product_space_preset(cfg);
  const auto so3 = so3_sample(64);
  REQUIRE(one.factors.size() == 1);
  REQUIRE(one.factors[0].size() == so3.size());
  for (std::size_t i = 0; i < so3.size(); ++i) CHECK(std::get<UnitQuaternion>(one.factors[0][i]) == so3[i]);

  cfg.factors = 3;
  cfg.m = 16;
  const auto three = product_space_preset(cfg);
  CHECK(three.size() < 16u * 16u * 16u);
  CHECK(*three.provenance.find("rows") == std::to_string(three.size()));

  cfg.factors = 4;
  cfg.m = 64;
  const auto four = product_space_preset(cfg);
  CHECK(four.size() == verified_random_size({82, 82, 82, 82}, 0.2));
  CHECK(four.size() < 64u * 64u * 64u * 64u);

  cfg.preset = ProductPreset::MixedSe2So3;
  cfg.factors = 2;
  const auto mixed = product_space_preset(cfg);
  const auto t = mixed.tuple(0);
  CHECK(std::holds_alternative<Se2Element>(t[0]));
  CHECK(std::holds_alternative<UnitQuaternion>(t[1]));
}
