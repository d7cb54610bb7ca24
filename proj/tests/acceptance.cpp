// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rigidqmc/discrepancy.hpp"
#include "rigidqmc/motion.hpp"
#include "rigidqmc/presets.hpp"
#include "rigidqmc/product.hpp"
#include "rigidqmc/sphere.hpp"

using namespace rigidqmc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

SearchOptions opts(std::uint64_t trials, std::uint64_t seed = 0) {
  SearchOptions o;
  o.trials = trials;
  o.seed = seed;
  return o;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome lambert_correctness() {
  SplitMix64 rng(2024);
  double worst_norm = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const S2Point p = lambert(rng.uniform(), rng.uniform());
    worst_norm = std::max(worst_norm, std::abs(std::sqrt(dot(p, p)) - 1.0));
  }
  double worst_measure = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double x1 = rng.uniform(), x2 = rng.uniform(), y1 = rng.uniform(), y2 = rng.uniform();
    if (x1 > x2) std::swap(x1, x2);
    if (y1 > y2) std::swap(y1, y2);
    const S2Point top = lambert(x1, y1);
    const S2Point bottom = lambert(x2, y2);
    // zone between the two latitudes times the longitude share
    const double fraction = 0.5 * (top.z() - bottom.z()) * (x2 - x1);
    worst_measure = std::max(worst_measure, std::abs(fraction - (x2 - x1) * (y2 - y1)));
  }
  return {worst_norm <= 1e-12 && worst_measure <= 1e-12,
          "max |norm-1| " + fmt("%.2e", worst_norm) + ", max measure gap " + fmt("%.2e", worst_measure)};
}

Outcome pullback_identity() {
  Outcome o;
  for (std::size_t n : {16u, 64u, 256u}) {
    const double lat = latitude_rect_discrepancy_exact(s2_sample(n)).value;
    const double box = box_discrepancy_exact(hammersley_2d(n), false).value;
    const double gap = std::abs(lat - box);
    o.pass = o.pass && gap <= 1e-12;
    o.detail += "N=" + std::to_string(n) + " gap " + fmt("%.1e", gap) + "  ";
  }
  return o;
}

Outcome rectangle_rate() {
  const double d64 = box_discrepancy_exact(hammersley_2d(64), false).value;
  const double d256 = box_discrepancy_exact(hammersley_2d(256), false).value;
  const double d4096 = box_discrepancy_exact(hammersley_2d(4096), true).value;
  const bool ok = d4096 <= 0.25 * d256 && d64 <= 10 * std::log(64.0) / 64 && d256 <= 10 * std::log(256.0) / 256;
  return {ok, "D(64)=" + fmt("%.6f", d64) + " D(256)=" + fmt("%.6f", d256) + " D*(4096)=" + fmt("%.6f", d4096)};
}

Outcome circle_rate() {
  Outcome o;
  for (std::size_t n : {4u, 16u, 256u, 4096u}) {
    const double d = arc_discrepancy_exact(circle_points(n)).value;
    o.pass = o.pass && d <= 1.0 / n + kMeasureTolerance;
    o.detail += "N=" + std::to_string(n) + " N*D=" + fmt("%.12f", d * n) + "  ";
  }
  return o;
}

Outcome cap_convex_decay() {
  const double e4096 = cap_discrepancy_estimate(s2_sample(4096), opts(100000)).value;
  const double e1024 = cap_discrepancy_estimate(s2_sample(1024), opts(100000)).value;
  const double e16384 = cap_discrepancy_estimate(s2_sample(16384), opts(100000)).value;
  const double bound = 4 * std::sqrt(std::log(4096.0) / 4096);
  const double c256 = spherical_convex_discrepancy_estimate(s2_sample(256), 6, opts(10000)).value;
  const double c4096 = spherical_convex_discrepancy_estimate(s2_sample(4096), 6, opts(10000)).value;
  const bool ok = e4096 <= bound && e16384 < e1024 && c4096 < c256;
  return {ok, "cap E(4096)=" + fmt("%.5f", e4096) + " (bound " + fmt("%.4f", bound) + ") E(1024)=" +
                  fmt("%.5f", e1024) + " E(16384)=" + fmt("%.5f", e16384) + "; convex " + fmt("%.5f", c256) +
                  " -> " + fmt("%.5f", c4096)};
}

Outcome cartesian_product() {
  SplitMix64 rng(6);
  double worst_slack = -1.0;
  bool ok = true;
  for (int pair = 0; pair < 20; ++pair) {
    CirclePointSet a, b;
    a.measure = b.measure = SpaceMeasure::of(Space::S1);
    a.elements.resize(1 + rng.below(64));
    b.elements.resize(1 + rng.below(64));
    for (auto& v : a.elements) v = rng.uniform(0, kTwoPi);
    for (auto& v : b.elements) v = rng.uniform(0, kTwoPi);
    const double d = product_discrepancy_exact(arc_critical_profile(a), arc_critical_profile(b));
    const double sum = arc_discrepancy_exact(a).value + arc_discrepancy_exact(b).value;
    ok = ok && d <= sum + 1e-9;
    worst_slack = std::max(worst_slack, d - sum);
  }
  return {ok, "max (D - eps1 - eps2) = " + fmt("%.4f", worst_slack)};
}

Outcome so3_decay() {
  const auto small = so3_sample(256);
  const auto large = so3_sample(4096);
  bool canonical = true;
  for (const auto* set : {&small, &large}) {
    for (const auto& q : set->elements) {
      const auto c = q.coords();
      const double norm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
      canonical = canonical && std::abs(norm - 1.0) <= 1e-12 && canonicalize_quaternion(c) == q &&
                  (c[0] > 0 || (c[0] == 0 && (c[1] > 0 || (c[1] == 0 && (c[2] > 0 || (c[2] == 0 && c[3] > 0))))));
    }
  }
  const double e_small = local_cartesian_convex_discrepancy_estimate(small, 6, opts(10000)).value;
  const double e_large = local_cartesian_convex_discrepancy_estimate(large, 6, opts(10000)).value;
  return {canonical && e_large < e_small,
          "E(" + std::to_string(small.size()) + ")=" + fmt("%.5f", e_small) + " E(" + std::to_string(large.size()) +
              ")=" + fmt("%.5f", e_large) + (canonical ? ", all canonical" : ", NON-CANONICAL output")};
}

Outcome prg_certification() {
  RectPrgBackend b;
  b.kind = PrgKind::VerifiedRandom;
  const auto out = rect_prg_points(4, 3, 0.25, b);
  const double brute = oracle::comb_rect_brute(out.points);
  return {brute <= 0.25, std::to_string(out.points.size()) + " points, sup over 16^3 rectangles = " + fmt("%.5f", brute)};
}

Outcome derandomized_product_check() {
  PresetConfig cfg;
  cfg.preset = ProductPreset::So3Power;
  cfg.factors = 2;
  cfg.m = 64;
  cfg.eps_r = 0.2;
  const auto set = product_space_preset(cfg);
  double factor_sum = 0.0;
  for (const auto& f : set.factors) {
    So3PointSet q;
    q.measure = SpaceMeasure::of(Space::SO3);
    for (const auto& e : f.elements) q.elements.push_back(std::get<UnitQuaternion>(e));
    factor_sum += local_cartesian_convex_discrepancy_estimate(q, 6, opts(10000)).value;
  }
  const auto families = motion_product_families(set, 6);
  const double est = product_family_discrepancy(set.rows, families, opts(10000)).value;

  SplitMix64 rng(77);
  bool claim = true;
  for (int trial = 0; trial < 100000; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(8));
    const std::uint64_t m = 1 + rng.below(64), k = 1 + rng.below(64);
    double pa = 1.0, pb = 1.0, sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = static_cast<double>(rng.below(m + 1)) / m;
      const double b = static_cast<double>(rng.below(k + 1)) / k;
      pa *= a;
      pb *= b;
      sum += std::abs(a - b);
    }
    claim = claim && std::abs(pa - pb) <= sum + 1e-12;
  }
  const bool ok = set.size() < 4096 && est <= 0.2 + factor_sum + 0.05 && claim;
  return {ok, "|set|=" + std::to_string(set.size()) + " estimate " + fmt("%.5f", est) + " <= " +
                  fmt("%.5f", 0.2 + factor_sum + 0.05) + (claim ? ", product-gap property holds" : ", product-gap property FAILS")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "rigidqmc_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<std::string> commands = {
      "gen --space t2 --source hammersley --n 100",
      "gen --space s2 --n 500 --format json",
      "gen --space so3 --n 300",
      "gen --space se3 --n 200 --theta-hi 1.5",
      "gen --space product:mixed --factors 3 --m 16",
      "disc --space s2 --n 128",
      "disc --space so3 --n 512 --trials 3000",
      "disc --space se2 --n 256 --trials 3000",
      "disc --space product:so3 --m 32 --trials 2000",
      "integrate --space so3 --n 1000 --fn smooth-zonal",
      "integrate --space s2 --n 1024 --fn hemisphere-indicator",
  };
  Outcome o;
  int index = 0;
  for (const auto& c : commands) {
    std::string first;
    for (int run = 0; run < 4; ++run) {
      const std::filesystem::path out = dir / ("out_" + std::to_string(index) + "_" + std::to_string(run));
      const std::string threads = run % 2 == 0 ? "1" : "0";
      const std::string cmd = std::string(RIGIDQMC_CLI) + " " + c + " --threads " + threads + " --out " + out.string();
      if (std::system(cmd.c_str()) != 0) {
        o.pass = false;
        o.detail += "[exit!=0: " + c + "] ";
        break;
      }
      const std::string bytes = slurp(out);
      if (run == 0) {
        first = bytes;
      } else if (bytes != first) {
        o.pass = false;
        o.detail += "[differs: " + c + "] ";
      }
    }
    ++index;
  }
  std::filesystem::remove_all(dir);
  if (o.pass) o.detail = std::to_string(commands.size()) + " commands byte-identical over 2 runs x threads {1, max}";
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Lambert unit norm and measure preservation", 5, lambert_correctness},
      {2, "latitude/rectangle pullback identity", 60, pullback_identity},
      {3, "Hammersley rectangle rate", 60, rectangle_rate},
      {4, "circle arc rate <= 1/N", 10, circle_rate},
      {5, "cap and convex decay on S2", 600, cap_convex_decay},
      {6, "Cartesian product bound, exact", 300, cartesian_product},
      {7, "SO(3) local Cartesian convex decay", 600, so3_decay},
      {8, "rectangle generator certification", 60, prg_certification},
      {9, "derandomized SO(3)^2 product", 600, derandomized_product_check},
      {10, "CLI golden-file determinism", 300, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s  %s: %s (%.1f s / %.0f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
