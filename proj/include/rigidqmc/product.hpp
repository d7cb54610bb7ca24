#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rigidqmc/core.hpp"
#include "rigidqmc/discrepancy.hpp"
#include "rigidqmc/index_points.hpp"

// Derandomized products: a short list of points in [m_1] x ... x [m_n] that
// fools combinatorial rectangles is pushed through the factor orderings
// sigma_i : [m_i] -> Q_i, giving a subset of Q_1 x ... x Q_n whose
// discrepancy against products of factor regions is at most
// eps_R + sum_i eps_i.

namespace rigidqmc {

enum class PrgKind { KWise, VerifiedRandom };

std::string_view prg_kind_name(PrgKind k);
PrgKind parse_prg_kind(std::string_view name);

struct RectPrgBackend {
  PrgKind kind = PrgKind::VerifiedRandom;
  std::uint64_t seed = 0;
  // kwise: field size; 0 selects the smallest prime >= max(m, n, 2^16).
  std::uint64_t prime = 0;
  // kwise: independence t; 0 selects ceil(log2(1/eps)) + 2.
  unsigned independence = 0;
  // Random rectangles used when exact certification is out of budget.
  std::uint64_t certify_trials = 100000;
  unsigned max_attempts = 16;
  unsigned threads = 0;
};

struct RectPrgOutput {
  IndexPoints points;
  double eps_r = 0.0;
  // Measured rectangle discrepancy of `points`.
  double certified = 0.0;
  ReportMode certification = ReportMode::Exact;
  // verified-random: stream offset that passed. kwise: 0.
  std::uint64_t stream_offset = 0;
  // kwise parameters actually used.
  unsigned independence = 0;
  std::uint64_t prime = 0;
};

bool is_prime(std::uint64_t v);
std::uint64_t smallest_prime_at_least(std::uint64_t v);

// t = ceil(log2(1/eps)) + 2.
unsigned kwise_independence(double eps);
// P^t, or nullopt if it does not fit in 64 bits.
std::optional<std::uint64_t> kwise_family_size(std::uint64_t prime, unsigned t);
// Default field size for alphabet size m and n coordinates.
std::uint64_t kwise_default_prime(std::size_t m, std::size_t n);

// Seed s < P^t encodes coefficients c_d = floor(s / P^d) mod P; coordinate
// j gets (sum_{d<t} c_d j^d mod P) mod m_j. prime = 0 selects the default.
std::vector<std::uint32_t> kwise_index_generator(unsigned t, const std::vector<std::size_t>& alphabet,
                                                 std::uint64_t seed, std::uint64_t prime = 0);
std::vector<std::uint32_t> kwise_index_generator(unsigned t, std::size_t n, std::size_t m,
                                                 std::uint64_t seed, std::uint64_t prime = 0);

// s = ceil(8 (sum_j ln m_j + ln(4/eps)) / eps^2).
std::size_t verified_random_size(const std::vector<std::size_t>& alphabet, double eps);

// Points in [m_1] x ... x [m_n] with rectangle discrepancy <= eps, certified
// exactly when sum_j m_j <= 24 and by random rectangles otherwise. Throws
// BudgetRefusal when a kwise family exceeds 2^24 points and BackendFailure
// when certification fails.
RectPrgOutput rect_prg_points(const std::vector<std::size_t>& alphabet, double eps,
                              const RectPrgBackend& backend);
RectPrgOutput rect_prg_points(std::size_t m, std::size_t n, double eps, const RectPrgBackend& backend);

template <class Element>
struct ProductPointSet {
  std::vector<PointSet<Element>> factors;
  std::vector<double> factor_eps;
  // Backend points; row r selects factors[j].elements[rows.at(r, j)].
  IndexPoints rows;
  double eps_r = 0.0;
  double certified_eps_r = 0.0;
  Provenance provenance;

  std::size_t size() const { return rows.size(); }
  std::vector<Element> tuple(std::size_t r) const {
    std::vector<Element> out;
    out.reserve(factors.size());
    for (std::size_t j = 0; j < factors.size(); ++j) out.push_back(factors[j].elements[rows.at(r, j)]);
    return out;
  }
  // eps_R + sum_i eps_i.
  double budget() const {
    double b = eps_r;
    for (double e : factor_eps) b += e;
    return b;
  }
};

Provenance product_provenance(const std::vector<std::size_t>& alphabet, const std::vector<double>& factor_eps,
                              const RectPrgOutput& prg, const RectPrgBackend& backend);

// Throws CompositionError when a factor repeats an element (sigma_i must be
// injective) or the eps list does not match the factors.
template <class Element>
ProductPointSet<Element> derandomized_product(std::vector<PointSet<Element>> factors,
                                              std::vector<double> factor_eps, double eps_r,
                                              const RectPrgBackend& backend) {
  if (factors.empty()) throw ParameterError("derandomized_product needs n >= 1 factors");
  if (factor_eps.size() != factors.size()) {
    throw CompositionError("one declared eps is needed per factor");
  }
  std::vector<std::size_t> alphabet;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    std::vector<Element> sorted = factors[j].elements;
    if (sorted.empty()) throw CompositionError("factor " + std::to_string(j) + " is empty");
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw CompositionError("factor " + std::to_string(j) + " repeats an element; its index map is not injective");
    }
    alphabet.push_back(factors[j].size());
  }
  const RectPrgOutput prg = rect_prg_points(alphabet, eps_r, backend);
  ProductPointSet<Element> out;
  out.provenance = product_provenance(alphabet, factor_eps, prg, backend);
  out.factors = std::move(factors);
  out.factor_eps = std::move(factor_eps);
  out.rows = prg.points;
  out.eps_r = eps_r;
  out.certified_eps_r = prg.certified;
  return out;
}

}  // namespace rigidqmc
