#include "rigidqmc/product.hpp"

#include <cmath>

namespace rigidqmc {

namespace {

constexpr std::uint64_t kKwiseMaterializeLimit = std::uint64_t{1} << 24;

void validate_alphabet(const std::vector<std::size_t>& alphabet) {
  if (alphabet.empty()) throw ParameterError("the PRG needs n >= 1 coordinates");
  for (std::size_t m : alphabet) {
    if (m == 0 || m > 0xFFFFFFFFu) throw ParameterError("alphabet sizes must be in [1, 2^32)");
  }
}

void validate_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ParameterError("eps_R must lie in (0, 1)");
}

std::uint64_t resolve_prime(const std::vector<std::size_t>& alphabet, std::uint64_t prime) {
  const std::size_t m = *std::max_element(alphabet.begin(), alphabet.end());
  if (prime == 0) return kwise_default_prime(m, alphabet.size());
  if (!is_prime(prime)) throw ParameterError("kwise field size " + std::to_string(prime) + " is not prime");
  if (prime < m || prime < alphabet.size()) {
    throw ParameterError("kwise field size must be >= max(m, n)");
  }
  return prime;
}

std::vector<std::uint32_t> kwise_point(unsigned t, const std::vector<std::size_t>& alphabet,
                                       std::uint64_t seed, std::uint64_t prime) {
  std::vector<std::uint64_t> coeff(t);
  std::uint64_t rest = seed;
  for (unsigned d = 0; d < t; ++d) {
    coeff[d] = rest % prime;
    rest /= prime;
  }
  std::vector<std::uint32_t> point(alphabet.size());
  for (std::size_t j = 0; j < alphabet.size(); ++j) {
    unsigned __int128 acc = 0;
    for (unsigned d = t; d-- > 0;) acc = (acc * j + coeff[d]) % prime;
    point[j] = static_cast<std::uint32_t>(static_cast<std::uint64_t>(acc) % alphabet[j]);
  }
  return point;
}

std::size_t alphabet_bits(const std::vector<std::size_t>& alphabet) {
  std::size_t bits = 0;
  for (std::size_t m : alphabet) bits += m;
  return bits;
}

DiscrepancyReport certify(const IndexPoints& points, const RectPrgBackend& backend, std::uint64_t offset) {
  if (alphabet_bits(points.alphabet) <= ExactBudget::kCombRectBits) {
    return comb_rect_discrepancy(points, CombRectMode::Exact, {});
  }
  SearchOptions opts;
  opts.trials = backend.certify_trials;
  opts.seed = mix64(backend.seed ^ 0xC3A5C85C97CB3127ULL) + offset;
  opts.threads = backend.threads;
  return comb_rect_discrepancy(points, CombRectMode::MonteCarlo, opts);
}

}  // namespace

std::string_view prg_kind_name(PrgKind k) { return k == PrgKind::KWise ? "kwise" : "verified-random"; }

PrgKind parse_prg_kind(std::string_view name) {
  if (name == "kwise") return PrgKind::KWise;
  if (name == "verified-random") return PrgKind::VerifiedRandom;
  throw ParameterError("unknown backend '" + std::string(name) + "' (kwise | verified-random)");
}

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL}) {
    if (v % p == 0) return v == p;
  }
  for (std::uint64_t d = 17; d * d <= v; d += 2) {
    if (v % d == 0) return false;
  }
  return true;
}

std::uint64_t smallest_prime_at_least(std::uint64_t v) {
  while (!is_prime(v)) ++v;
  return v;
}

unsigned kwise_independence(double eps) {
  validate_eps(eps);
  return static_cast<unsigned>(std::ceil(std::log2(1.0 / eps))) + 2;
}

std::optional<std::uint64_t> kwise_family_size(std::uint64_t prime, unsigned t) {
  unsigned __int128 size = 1;
  for (unsigned d = 0; d < t; ++d) {
    size *= prime;
    if (size > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(size);
}

std::uint64_t kwise_default_prime(std::size_t m, std::size_t n) {
  return smallest_prime_at_least(std::max<std::uint64_t>({m, n, std::uint64_t{1} << 16}));
}

std::vector<std::uint32_t> kwise_index_generator(unsigned t, const std::vector<std::size_t>& alphabet,
                                                 std::uint64_t seed, std::uint64_t prime) {
  if (t == 0) throw ParameterError("kwise independence t must be >= 1");
  validate_alphabet(alphabet);
  const std::uint64_t p = resolve_prime(alphabet, prime);
  const auto size = kwise_family_size(p, t);
  if (size && seed >= *size) {
    throw ParameterError("kwise seed " + std::to_string(seed) + " is outside [0, P^t)");
  }
  return kwise_point(t, alphabet, seed, p);
}

std::vector<std::uint32_t> kwise_index_generator(unsigned t, std::size_t n, std::size_t m,
                                                 std::uint64_t seed, std::uint64_t prime) {
  return kwise_index_generator(t, std::vector<std::size_t>(n, m), seed, prime);
}

std::size_t verified_random_size(const std::vector<std::size_t>& alphabet, double eps) {
  validate_alphabet(alphabet);
  validate_eps(eps);
  double log_sum = 0.0;
  for (std::size_t m : alphabet) log_sum += std::log(static_cast<double>(m));
  return static_cast<std::size_t>(std::ceil(8.0 * (log_sum + std::log(4.0 / eps)) / (eps * eps)));
}

RectPrgOutput rect_prg_points(const std::vector<std::size_t>& alphabet, double eps,
                              const RectPrgBackend& backend) {
  validate_alphabet(alphabet);
  validate_eps(eps);
  RectPrgOutput out;
  out.eps_r = eps;
  if (backend.kind == PrgKind::KWise) {
    const unsigned t = backend.independence ? backend.independence : kwise_independence(eps);
    const std::uint64_t p = resolve_prime(alphabet, backend.prime);
    const auto size = kwise_family_size(p, t);
    if (!size || *size > kKwiseMaterializeLimit) {
      throw BudgetRefusal("kwise family P^t = " + std::to_string(p) + "^" + std::to_string(t) +
                              " exceeds the 2^24 point budget",
                          "use --backend verified-random, or a smaller prime via --prime");
    }
    out.points.alphabet = alphabet;
    out.points.coords.reserve(*size * alphabet.size());
    for (std::uint64_t s = 0; s < *size; ++s) {
      const auto row = kwise_point(t, alphabet, s, p);
      out.points.coords.insert(out.points.coords.end(), row.begin(), row.end());
    }
    const DiscrepancyReport cert = certify(out.points, backend, 0);
    out.certified = cert.value;
    out.certification = cert.mode;
    out.independence = t;
    out.prime = p;
    if (cert.value > eps) {
      throw BackendFailure("kwise family with P = " + std::to_string(p) + ", t = " + std::to_string(t) +
                           " has rectangle discrepancy " + format_double(cert.value) + " > eps_R = " +
                           format_double(eps));
    }
    return out;
  }
  const std::size_t s = verified_random_size(alphabet, eps);
  double worst = 0.0;
  for (unsigned attempt = 0; attempt < backend.max_attempts; ++attempt) {
    SplitMix64 rng = SplitMix64::substream(backend.seed, attempt);
    IndexPoints pts;
    pts.alphabet = alphabet;
    pts.coords.resize(s * alphabet.size());
    for (std::size_t r = 0; r < s; ++r) {
      for (std::size_t j = 0; j < alphabet.size(); ++j) {
        pts.coords[r * alphabet.size() + j] = static_cast<std::uint32_t>(rng.below(alphabet[j]));
      }
    }
    const DiscrepancyReport cert = certify(pts, backend, attempt);
    worst = std::max(worst, cert.value);
    if (cert.value <= eps) {
      out.points = std::move(pts);
      out.certified = cert.value;
      out.certification = cert.mode;
      out.stream_offset = attempt;
      return out;
    }
  }
  throw BackendFailure("verified-random backend failed certification at eps_R = " + format_double(eps) +
                       " after " + std::to_string(backend.max_attempts) + " attempts (best failing value " +
                       format_double(worst) + ")");
}

RectPrgOutput rect_prg_points(std::size_t m, std::size_t n, double eps, const RectPrgBackend& backend) {
  return rect_prg_points(std::vector<std::size_t>(n, m), eps, backend);
}

Provenance product_provenance(const std::vector<std::size_t>& alphabet, const std::vector<double>& factor_eps,
                              const RectPrgOutput& prg, const RectPrgBackend& backend) {
  Provenance p;
  p.generator = "derandomized-product";
  p.set("factors", std::uint64_t{alphabet.size()});
  std::string sizes;
  for (std::size_t j = 0; j < alphabet.size(); ++j) sizes += (j ? "," : "") + std::to_string(alphabet[j]);
  p.set("factor_sizes", sizes);
  p.set("backend", std::string(prg_kind_name(backend.kind)));
  p.set("seed", backend.seed);
  p.set("eps_r", prg.eps_r);
  p.set("eps_r_certified", prg.certified);
  p.set("certification", std::string(report_mode_name(prg.certification)));
  if (backend.kind == PrgKind::KWise) {
    p.set("prime", prg.prime);
    p.set("independence", std::uint64_t{prg.independence});
  } else {
    p.set("stream_offset", prg.stream_offset);
  }
  double budget = prg.eps_r;
  for (std::size_t j = 0; j < factor_eps.size(); ++j) {
    p.set("factor_eps_" + std::to_string(j), factor_eps[j]);
    budget += factor_eps[j];
  }
  p.set("discrepancy_budget", budget);
  p.set("rows", std::uint64_t{prg.points.size()});
  return p;
}

}  // namespace rigidqmc
