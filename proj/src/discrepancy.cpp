#include "rigidqmc/discrepancy.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>
#include <type_traits>

namespace rigidqmc {

namespace {

constexpr double kNone = -std::numeric_limits<double>::infinity();

// Runs fn(i) for i in [0, count) on a pool and keeps the candidate with the
// largest `dev`, ties to the lowest index, so the result does not depend on
// scheduling.
template <class Candidate, class Fn>
std::pair<Candidate, std::size_t> parallel_best(std::size_t count, unsigned threads, std::size_t chunk,
                                                Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(resolve_threads(threads), (count + chunk - 1) / chunk));
  std::vector<Candidate> best(workers);
  std::vector<std::size_t> best_index(workers, std::numeric_limits<std::size_t>::max());
  std::vector<std::exception_ptr> errors(workers);
  std::atomic<std::size_t> next{0};
  const auto work = [&](std::size_t w) {
    try {
      for (;;) {
        const std::size_t begin = next.fetch_add(chunk);
        if (begin >= count) break;
        const std::size_t end = std::min(count, begin + chunk);
        for (std::size_t i = begin; i < end; ++i) {
          Candidate c = fn(i);
          if (c.dev > best[w].dev || (c.dev == best[w].dev && i < best_index[w])) {
            best[w] = std::move(c);
            best_index[w] = i;
          }
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::size_t pick = 0;
  for (std::size_t w = 1; w < workers; ++w) {
    if (best[w].dev > best[pick].dev ||
        (best[w].dev == best[pick].dev && best_index[w] < best_index[pick])) {
      pick = w;
    }
  }
  return {std::move(best[pick]), best_index[pick]};
}

double signed_gap(std::size_t count, std::size_t n, double fraction) {
  return static_cast<double>(count) / static_cast<double>(n) - fraction;
}

std::vector<double> distinct_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

void require_nonempty(std::size_t n, const char* what) {
  if (n == 0) throw ParameterError(std::string(what) + " needs a nonempty point set");
}

void require_trials(const SearchOptions& opts) {
  if (opts.trials == 0) throw ParameterError("trials must be >= 1");
}

// ---- arcs ----

struct ArcCandidate {
  double dev = kNone;
  Arc arc;
};

ArcCandidate arc_scan(const std::vector<double>& angles, const AngleInterval& range, double start,
                      bool over, bool under) {
  const bool full = range.is_full_circle();
  const double len = range.length();
  const std::size_t n = angles.size();
  std::vector<double> offsets;
  offsets.reserve(n);
  for (double a : angles) {
    double off = a - start;
    if (full && off < 0.0) off += kTwoPi;
    if (off >= 0.0) offsets.push_back(off);
  }
  std::sort(offsets.begin(), offsets.end());
  ArcCandidate best;
  if (over) {
    for (std::size_t i = 0; i < offsets.size();) {
      std::size_t j = i;
      while (j + 1 < offsets.size() && offsets[j + 1] == offsets[i]) ++j;
      const double dev = signed_gap(j + 1, n, offsets[i] / len);
      if (dev > best.dev) best = {dev, Arc{start, offsets[i], true}};
      i = j + 1;
    }
  }
  if (under) {
    const double end = full ? kTwoPi : range.hi - start;
    std::size_t zeros = 0;
    while (zeros < offsets.size() && offsets[zeros] == 0.0) ++zeros;
    // Open arc (start, start + L) for L at each positive offset, then at the end.
    std::size_t i = zeros;
    while (i < offsets.size() && offsets[i] < end) {
      const double L = offsets[i];
      const double dev = L / len - static_cast<double>(i - zeros) / static_cast<double>(n);
      if (dev > best.dev) best = {dev, Arc{start, L, false}};
      while (i < offsets.size() && offsets[i] == L) ++i;
    }
    if (end > 0.0) {
      const double dev = end / len - static_cast<double>(i - zeros) / static_cast<double>(n);
      if (dev > best.dev) best = {dev, Arc{start, end, false}};
    }
  }
  return best;
}

void validate_angles(const CirclePointSet& points) {
  const AngleInterval& r = points.range.circle;
  for (double a : points.elements) {
    if (!(a >= r.lo && a <= r.hi) || (r.is_full_circle() && a >= kTwoPi)) {
      throw ParameterError("circle point outside its range");
    }
  }
}

// ---- boxes ----

enum class Axis0 { Linear, Offset, OffsetPeriodic };

struct BoxCandidate {
  double dev = kNone;
  bool over = true;
  // For offset axes dim 0 stores (start, length).
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};
};

struct Span1 {
  double dev = kNone;
  double lo = 0.0;
  double hi = 0.0;
};

// Best interval in the last dimension for points with sorted coordinates v
// and measure factor A from the other dimensions.
Span1 sweep_last(const std::vector<double>& v, double A, bool over, bool anchored, double n) {
  Span1 best;
  const std::size_t s = v.size();
  if (over) {
    double left_best = kNone;
    double left_val = 0.0;
    std::size_t before = 0;
    for (std::size_t i = 0; i < s;) {
      std::size_t j = i;
      while (j + 1 < s && v[j + 1] == v[i]) ++j;
      const double u = v[i];
      const double C = static_cast<double>(j + 1);
      if (anchored) {
        const double dev = C / n - A * u;
        if (dev > best.dev) best = {dev, 0.0, u};
      } else {
        const double cand = A * u - static_cast<double>(before) / n;
        if (cand > left_best) {
          left_best = cand;
          left_val = u;
        }
        const double dev = C / n - A * u + left_best;
        if (dev > best.dev) best = {dev, left_val, u};
      }
      before = j + 1;
      i = j + 1;
    }
    return best;
  }
  std::vector<double> ends;
  ends.reserve(s + 2);
  if (!anchored) ends.push_back(0.0);
  ends.insert(ends.end(), v.begin(), v.end());
  ends.push_back(1.0);
  ends = distinct_sorted(std::move(ends));
  std::size_t lt = 0;
  double left_best = kNone;
  double left_val = 0.0;
  for (double e : ends) {
    while (lt < s && v[lt] < e) ++lt;
    std::size_t le = lt;
    while (le < s && v[le] == e) ++le;
    if (anchored) {
      const double dev = A * e - static_cast<double>(lt) / n;
      if (dev > best.dev) best = {dev, 0.0, e};
    } else {
      if (left_best > kNone) {
        const double dev = A * e - static_cast<double>(lt) / n + left_best;
        if (dev > best.dev) best = {dev, left_val, e};
      }
      const double cand = static_cast<double>(le) / n - A * e;
      if (cand > left_best) {
        left_best = cand;
        left_val = e;
      }
    }
  }
  return best;
}

class BoxSearch {
 public:
  BoxSearch(std::vector<CubePoint> points, int k, bool anchored, Axis0 axis0)
      : pts_(std::move(points)), k_(k), anchored_(anchored), axis0_(axis0), n_(static_cast<double>(pts_.size())) {
    const auto& pts = pts_;
    order_.resize(pts.size());
    for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
    const int last = k - 1;
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return pts[a][last] < pts[b][last]; });
    std::vector<double> v0;
    v0.reserve(pts.size());
    for (const CubePoint& p : pts) v0.push_back(p[0]);
    values0_ = distinct_sorted(std::move(v0));
  }

  BoxCandidate run(unsigned threads) {
    if (k_ == 1) {
      std::vector<double> v;
      for (std::uint32_t i : order_) v.push_back(pts_[i][0]);
      BoxCandidate best;
      for (bool over : {true, false}) {
        const Span1 s = sweep_last(v, 1.0, over, anchored_, n_);
        if (s.dev > best.dev) {
          best = {};
          best.dev = s.dev;
          best.over = over;
          best.lo[0] = s.lo;
          best.hi[0] = s.hi;
        }
      }
      return best;
    }
    build_tasks();
    return parallel_best<BoxCandidate>(tasks_.size(), threads, 1,
                                       [&](std::size_t t) { return run_task(tasks_[t]); })
        .first;
  }

 private:
  struct Task {
    bool over;
    double a;
  };

  void build_tasks() {
    for (bool over : {true, false}) {
      std::vector<double> starts = values0_;
      if (!over) {
        if (anchored_ || axis0_ == Axis0::Linear || axis0_ == Axis0::Offset) {
          if (anchored_) starts.push_back(1.0);
          else starts.push_back(0.0);
          starts = distinct_sorted(std::move(starts));
        }
      }
      for (double a : starts) tasks_.push_back({over, a});
    }
  }

  // Candidate dim-0 intervals for a task: (lo, hi) or (start, length).
  std::vector<std::pair<double, double>> dim0_intervals(const Task& t) const {
    std::vector<std::pair<double, double>> out;
    if (anchored_) {
      out.emplace_back(0.0, t.a);
      return out;
    }
    if (axis0_ == Axis0::Linear) {
      for (double e : values0_) {
        if (t.over ? e >= t.a : e > t.a) out.emplace_back(t.a, e);
      }
      if (!t.over && 1.0 > t.a && values0_.back() != 1.0) out.emplace_back(t.a, 1.0);
      return out;
    }
    const bool periodic = axis0_ == Axis0::OffsetPeriodic;
    std::vector<double> lengths;
    for (double e : values0_) {
      double off = e - t.a;
      if (periodic && off < 0.0) off += 1.0;
      if (t.over ? off >= 0.0 : off > 0.0) lengths.push_back(off);
    }
    lengths.push_back(periodic ? 1.0 : 1.0 - t.a);
    for (double L : distinct_sorted(std::move(lengths))) {
      if (L > 0.0 || t.over) out.emplace_back(t.a, L);
    }
    return out;
  }

  bool in_dim0(double c, const Task& t, double lo, double hi) const {
    if (anchored_) return t.over ? c <= hi : c < hi;
    if (axis0_ == Axis0::Linear) return t.over ? (c >= lo && c <= hi) : (c > lo && c < hi);
    double off = c - lo;
    if (axis0_ == Axis0::OffsetPeriodic && off < 0.0) off += 1.0;
    return t.over ? (off >= 0.0 && off <= hi) : (off > 0.0 && off < hi);
  }

  BoxCandidate run_task(const Task& t) const {
    BoxCandidate best;
    std::vector<std::uint32_t> subset;
    subset.reserve(order_.size());
    for (const auto& [lo, hi] : dim0_intervals(t)) {
      subset.clear();
      for (std::uint32_t i : order_) {
        if (in_dim0(pts_[i][0], t, lo, hi)) subset.push_back(i);
      }
      const double width = axis0_ == Axis0::Linear ? hi - lo : hi;
      BoxCandidate c = solve(1, subset, width, t.over);
      if (c.dev > best.dev) {
        c.lo[0] = lo;
        c.hi[0] = hi;
        c.over = t.over;
        best = c;
      }
    }
    return best;
  }

  // Best completion for dims d..k-1 of points `subset` (sorted by the last
  // coordinate) given measure factor A.
  BoxCandidate solve(int d, const std::vector<std::uint32_t>& subset, double A, bool over) const {
    BoxCandidate best;
    if (d == k_ - 1) {
      std::vector<double> v;
      v.reserve(subset.size());
      for (std::uint32_t i : subset) v.push_back(pts_[i][d]);
      const Span1 s = sweep_last(v, A, over, anchored_, n_);
      best.dev = s.dev;
      best.lo[d] = s.lo;
      best.hi[d] = s.hi;
      return best;
    }
    std::vector<double> vals;
    for (std::uint32_t i : subset) vals.push_back(pts_[i][d]);
    if (!over) {
      vals.push_back(1.0);
      if (!anchored_) vals.push_back(0.0);
    }
    vals = distinct_sorted(std::move(vals));
    std::vector<std::uint32_t> next;
    next.reserve(subset.size());
    const auto consider = [&](double lo, double hi) {
      next.clear();
      for (std::uint32_t i : subset) {
        const double c = pts_[i][d];
        const bool in = anchored_ ? (over ? c <= hi : c < hi)
                                  : (over ? (c >= lo && c <= hi) : (c > lo && c < hi));
        if (in) next.push_back(i);
      }
      BoxCandidate c = solve(d + 1, next, A * (hi - lo), over);
      if (c.dev > best.dev) {
        c.lo[d] = lo;
        c.hi[d] = hi;
        best = c;
      }
    };
    if (anchored_) {
      for (double hi : vals) consider(0.0, hi);
    } else {
      for (std::size_t i = 0; i < vals.size(); ++i) {
        for (std::size_t j = over ? i : i + 1; j < vals.size(); ++j) consider(vals[i], vals[j]);
      }
    }
    return best;
  }

  std::vector<CubePoint> pts_;
  int k_;
  bool anchored_;
  Axis0 axis0_;
  double n_;
  std::vector<std::uint32_t> order_;
  std::vector<double> values0_;
  std::vector<Task> tasks_;
};

Box to_box(const BoxCandidate& c, int k, bool anchored) {
  Box b;
  b.dim = k;
  for (int d = 0; d < k; ++d) {
    b.lower[d] = c.lo[d];
    b.upper[d] = c.hi[d];
  }
  b.lower_closed = c.over || anchored;
  b.upper_closed = c.over;
  return b;
}

ChartBox to_chart_box(const BoxCandidate& c, bool periodic) {
  ChartBox b;
  b.u_start = c.lo[0];
  b.u_length = c.hi[0];
  b.v_lo = c.lo[1];
  b.v_hi = c.hi[1];
  b.closed = c.over;
  b.periodic = periodic;
  return b;
}

std::vector<CubePoint> chart_points(const S2PointSet& points) {
  std::vector<CubePoint> out;
  out.reserve(points.size());
  for (const S2Point& p : points.elements) {
    const auto [u, v] = patch_chart(p, points.range.sphere);
    out.push_back({u, v, 0.0});
  }
  return out;
}

template <class Contains>
double region_deviation(std::size_t n, double fraction, Contains&& contains) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += contains(i) ? 1 : 0;
  return std::abs(signed_gap(count, n, fraction));
}

// ---- factor families ----

FactorProbe probe_from(std::size_t n, double fraction, nlohmann::json witness,
                       const std::function<bool(std::size_t)>& contains) {
  FactorProbe p;
  p.member.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.member[i] = contains(i) ? 1 : 0;
  p.fraction = fraction;
  p.witness = std::move(witness);
  return p;
}

struct TrialCandidate {
  double dev = kNone;
};

double product_gap(const IndexPoints& rows, const std::vector<FactorProbe>& probes) {
  const std::size_t n = rows.size();
  const std::size_t dim = rows.dim();
  std::size_t count = 0;
  for (std::size_t r = 0; r < n; ++r) {
    bool in = true;
    for (std::size_t j = 0; j < dim && in; ++j) in = probes[j].member[rows.at(r, j)] != 0;
    count += in ? 1 : 0;
  }
  double fraction = 1.0;
  for (const FactorProbe& p : probes) fraction *= p.fraction;
  return std::abs(signed_gap(count, n, fraction));
}

std::optional<std::vector<FactorProbe>> draw_probes(std::span<const FactorFamily> families,
                                                    std::uint64_t seed, std::uint64_t trial) {
  SplitMix64 rng = SplitMix64::substream(seed, trial);
  std::vector<FactorProbe> probes;
  probes.reserve(families.size());
  for (const FactorFamily& f : families) {
    auto p = f.sample(rng);
    if (!p) return std::nullopt;
    probes.push_back(std::move(*p));
  }
  return probes;
}

std::string product_name(std::span<const FactorFamily> families) {
  if (families.size() == 1) return families[0].name;
  std::string name = "product(";
  for (std::size_t j = 0; j < families.size(); ++j) {
    if (j > 0) name += ",";
    name += families[j].name;
  }
  return name + ")";
}

DiscrepancyReport estimate(const IndexPoints& rows, std::span<const FactorFamily> families,
                           const SearchOptions& opts, std::string family) {
  require_trials(opts);
  require_nonempty(rows.size(), "discrepancy estimation");
  if (families.size() != rows.dim()) {
    throw CompositionError("product rows have " + std::to_string(rows.dim()) + " coordinates but " +
                           std::to_string(families.size()) + " factor families were given");
  }
  for (std::size_t j = 0; j < families.size(); ++j) {
    if (families[j].size != rows.alphabet[j]) {
      throw CompositionError("factor family " + families[j].name + " covers " +
                             std::to_string(families[j].size) + " elements, rows index " +
                             std::to_string(rows.alphabet[j]));
    }
  }
  const auto [best, index] = parallel_best<TrialCandidate>(
      opts.trials, opts.threads, 64, [&](std::size_t t) {
        TrialCandidate c;
        if (auto probes = draw_probes(families, opts.seed, t)) c.dev = product_gap(rows, *probes);
        return c;
      });
  DiscrepancyReport r;
  r.family = std::move(family);
  r.mode = ReportMode::EstimatedLowerBound;
  r.trials = opts.trials;
  r.seed = opts.seed;
  if (best.dev == kNone) {
    r.value = 0.0;
    r.witness = nullptr;
    return r;
  }
  r.value = best.dev;
  const auto probes = draw_probes(families, opts.seed, index);
  if (families.size() == 1) {
    r.witness = (*probes)[0].witness;
  } else {
    nlohmann::json factors = nlohmann::json::array();
    for (const FactorProbe& p : *probes) factors.push_back(p.witness);
    r.witness = {{"type", "product"}, {"factors", factors}};
  }
  r.witness["trial"] = index;
  return r;
}

DiscrepancyReport estimate_single(const FactorFamily& family, const SearchOptions& opts) {
  const IndexPoints rows = IndexPoints::identity(family.size);
  return estimate(rows, std::span<const FactorFamily>(&family, 1), opts, family.name);
}

FactorFamily chart_box_factor(std::vector<CubePoint> uv, const SphereRange& patch) {
  const bool periodic = patch.phi.is_full_circle();
  FactorFamily f;
  f.name = "latitude-rects";
  f.size = uv.size();
  const auto pts = std::make_shared<std::vector<CubePoint>>(std::move(uv));
  const auto probe = [pts, patch](const ChartBox& b) {
    return probe_from(pts->size(), b.fraction(), to_json(b, patch),
                      [&](std::size_t i) { return b.contains((*pts)[i][0], (*pts)[i][1]); });
  };
  f.sample = [probe, periodic](SplitMix64& rng) -> std::optional<FactorProbe> {
    ChartBox b;
    b.periodic = periodic;
    if (periodic) {
      b.u_start = rng.uniform();
      b.u_length = rng.uniform();
    } else {
      double a = rng.uniform();
      double c = rng.uniform();
      if (c < a) std::swap(a, c);
      b.u_start = a;
      b.u_length = c - a;
    }
    double a = rng.uniform();
    double c = rng.uniform();
    if (c < a) std::swap(a, c);
    b.v_lo = a;
    b.v_hi = c;
    return probe(b);
  };
  f.replay = [probe](const nlohmann::json& j) { return probe(chart_box_from_json(j)); };
  return f;
}

std::vector<HopfPoint> hopf_points(const std::vector<UnitQuaternion>& qs) {
  std::vector<HopfPoint> out;
  out.reserve(qs.size());
  for (const UnitQuaternion& q : qs) out.push_back(hopf_point(q));
  return out;
}

std::optional<LocalCartesianRegion> random_local_cartesian(SplitMix64& rng, const BoundedRange& range,
                                                           int k) {
  const Arc arc = random_arc(rng, range.circle);
  const auto cap = random_container_cap(rng, range.sphere, kPolygonCapRadius);
  if (!cap) return std::nullopt;
  auto poly = random_polygon_in_cap(rng, *cap, k);
  if (!poly) return std::nullopt;
  return LocalCartesianRegion{arc, std::move(*poly)};
}

void require_vertices(int k) {
  if (k < 3) throw ParameterError("convex polygon families need k >= 3 vertices");
}

}  // namespace

std::string_view report_mode_name(ReportMode m) {
  return m == ReportMode::Exact ? "exact" : "estimated-lower-bound";
}

nlohmann::json DiscrepancyReport::to_json() const {
  return {{"family", family},
          {"value", value},
          {"mode", std::string(report_mode_name(mode))},
          {"witness", witness},
          {"trials", trials},
          {"seed", seed}};
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

DiscrepancyReport arc_discrepancy_exact(const CirclePointSet& points, unsigned threads) {
  require_nonempty(points.size(), "arc discrepancy");
  if (points.size() > ExactBudget::kArcs) {
    throw BudgetRefusal("exact arc discrepancy is limited to N <= 2^20", "use arc_discrepancy_estimate (CLI: --mode estimate)");
  }
  validate_angles(points);
  const AngleInterval range = points.range.circle;
  const std::vector<double> distinct = distinct_sorted(points.elements);
  struct Start {
    double at;
    bool over;
    bool under;
  };
  std::vector<Start> starts;
  for (double a : distinct) starts.push_back({a, true, true});
  if (!range.is_full_circle() && distinct.front() != range.lo) {
    starts.insert(starts.begin(), Start{range.lo, false, true});
  }
  const ArcCandidate best =
      parallel_best<ArcCandidate>(starts.size(), threads, 1, [&](std::size_t i) {
        return arc_scan(points.elements, range, starts[i].at, starts[i].over, starts[i].under);
      }).first;
  DiscrepancyReport r;
  r.family = "arcs";
  r.mode = ReportMode::Exact;
  r.witness = to_json(best.arc);
  r.value = witness_deviation(points, r.witness);
  return r;
}

DiscrepancyReport box_discrepancy_exact(const CubePointSet& points, bool anchored, unsigned threads) {
  require_nonempty(points.size(), "box discrepancy");
  const int k = cube_dimension(points);
  const std::size_t n = points.size();
  const std::size_t limit = k == 1   ? ExactBudget::kBoxes1
                            : k == 2 ? (anchored ? ExactBudget::kAnchored2 : ExactBudget::kBoxes2)
                                     : (anchored ? ExactBudget::kAnchored3 : ExactBudget::kBoxes3);
  if (n > limit) {
    throw BudgetRefusal("exact " + std::string(anchored ? "anchored" : "all-box") + " discrepancy in " +
                            std::to_string(k) + "D is limited to N <= " + std::to_string(limit),
                        "use box_discrepancy_estimate (CLI: --mode estimate --trials T)");
  }
  for (const CubePoint& p : points.elements) {
    for (int d = 0; d < k; ++d) {
      if (!(p[d] >= 0.0 && p[d] <= 1.0)) throw ParameterError("box discrepancy needs points in [0,1]^k");
    }
  }
  BoxSearch search(points.elements, k, anchored, Axis0::Linear);
  const BoxCandidate best = search.run(threads);
  DiscrepancyReport r;
  r.family = anchored ? "boxes-anchored" : "boxes-all";
  r.mode = ReportMode::Exact;
  r.witness = to_json(to_box(best, k, anchored));
  r.value = witness_deviation(points, r.witness);
  return r;
}

DiscrepancyReport latitude_rect_discrepancy_exact(const S2PointSet& points, unsigned threads) {
  require_nonempty(points.size(), "latitude rectangle discrepancy");
  if (points.size() > ExactBudget::kLatitudeRects) {
    throw BudgetRefusal("exact latitude-rectangle discrepancy is limited to N <= 256",
                        "use latitude_rect_discrepancy_estimate (CLI: --mode estimate --trials T)");
  }
  const bool periodic = points.range.sphere.phi.is_full_circle();
  BoxSearch search(chart_points(points), 2, false, periodic ? Axis0::OffsetPeriodic : Axis0::Offset);
  const BoxCandidate best = search.run(threads);
  DiscrepancyReport r;
  r.family = "latitude-rects";
  r.mode = ReportMode::Exact;
  r.witness = to_json(to_chart_box(best, periodic), points.range.sphere);
  r.value = witness_deviation(points, r.witness);
  return r;
}

DiscrepancyReport arc_discrepancy_estimate(const CirclePointSet& points, const SearchOptions& opts) {
  validate_angles(points);
  return estimate_single(arc_factor(points.elements, points.range.circle), opts);
}

DiscrepancyReport box_discrepancy_estimate(const CubePointSet& points, bool anchored,
                                           const SearchOptions& opts) {
  return estimate_single(box_factor(points.elements, cube_dimension(points), anchored), opts);
}

DiscrepancyReport latitude_rect_discrepancy_estimate(const S2PointSet& points,
                                                     const SearchOptions& opts) {
  return estimate_single(chart_box_factor(chart_points(points), points.range.sphere), opts);
}

DiscrepancyReport cap_discrepancy_estimate(const S2PointSet& points, const SearchOptions& opts) {
  if (!points.range.sphere.is_full()) {
    throw ParameterError("the cap family is defined on the full sphere only");
  }
  return estimate_single(cap_factor(points.elements), opts);
}

DiscrepancyReport spherical_convex_discrepancy_estimate(const S2PointSet& points, int k,
                                                        const SearchOptions& opts) {
  return estimate_single(polygon_factor(points.elements, points.range.sphere, k), opts);
}

DiscrepancyReport local_cartesian_convex_discrepancy_estimate(const So3PointSet& points, int k,
                                                              const SearchOptions& opts) {
  return estimate_single(local_cartesian_factor(points.elements, points.range, k), opts);
}

DiscrepancyReport se2_discrepancy_estimate(const Se2PointSet& points, const SearchOptions& opts) {
  return estimate_single(se2_factor(points.elements, points.range.circle), opts);
}

DiscrepancyReport se3_discrepancy_estimate(const Se3PointSet& points, int k, const SearchOptions& opts) {
  return estimate_single(se3_factor(points.elements, points.range, k), opts);
}

DiscrepancyReport comb_rect_discrepancy(const IndexPoints& points, CombRectMode mode,
                                        const SearchOptions& opts) {
  require_nonempty(points.size(), "combinatorial rectangle discrepancy");
  const std::size_t n = points.size();
  const std::size_t dim = points.dim();
  std::size_t bits = 0;
  for (std::size_t m : points.alphabet) {
    if (m == 0) throw ParameterError("alphabet sizes must be >= 1");
    bits += m;
  }
  DiscrepancyReport r;
  r.family = "comb-rects";
  if (mode == CombRectMode::MonteCarlo) {
    require_trials(opts);
    std::vector<FactorFamily> families;
    for (std::size_t j = 0; j < dim; ++j) {
      FactorFamily f;
      f.name = "subsets";
      f.size = points.alphabet[j];
      const std::size_t m = points.alphabet[j];
      f.sample = [m](SplitMix64& rng) -> std::optional<FactorProbe> {
        FactorProbe p;
        p.member.resize(m);
        std::size_t in = 0;
        for (std::size_t a = 0; a < m; ++a) {
          p.member[a] = static_cast<char>(rng() >> 63);
          in += p.member[a] ? 1 : 0;
        }
        p.fraction = static_cast<double>(in) / static_cast<double>(m);
        return p;
      };
      families.push_back(std::move(f));
    }
    const auto [best, index] = parallel_best<TrialCandidate>(
        opts.trials, opts.threads, 64, [&](std::size_t t) {
          TrialCandidate c;
          c.dev = product_gap(points, *draw_probes(families, opts.seed, t));
          return c;
        });
    const auto probes = *draw_probes(families, opts.seed, index);
    CombRect rect;
    for (const FactorProbe& p : probes) {
      rect.sets.emplace_back(p.member.begin(), p.member.end());
    }
    r.value = best.dev;
    r.mode = ReportMode::EstimatedLowerBound;
    r.witness = to_json(rect);
    r.witness["trial"] = index;
    r.trials = opts.trials;
    r.seed = opts.seed;
    return r;
  }
  if (bits > ExactBudget::kCombRectBits) {
    throw BudgetRefusal("exact combinatorial-rectangle discrepancy needs sum of alphabet sizes <= 24 (got " +
                            std::to_string(bits) + ")",
                        "use monte-carlo mode (CLI: --mode estimate)");
  }
  std::vector<std::size_t> offset(dim);
  for (std::size_t j = 0, o = 0; j < dim; o += points.alphabet[j], ++j) offset[j] = o;
  // F[I] = number of points whose coordinates all lie in I after a
  // subset-sum transform over the concatenated coordinate masks.
  std::vector<std::uint32_t> F(std::size_t{1} << bits, 0);
  for (std::size_t row = 0; row < n; ++row) {
    std::size_t mask = 0;
    for (std::size_t j = 0; j < dim; ++j) mask |= std::size_t{1} << (offset[j] + points.at(row, j));
    ++F[mask];
  }
  for (std::size_t b = 0; b < bits; ++b) {
    const std::size_t bit = std::size_t{1} << b;
    for (std::size_t mask = 0; mask < F.size(); ++mask) {
      if (mask & bit) F[mask] += F[mask ^ bit];
    }
  }
  double best = kNone;
  std::size_t best_mask = 0;
  for (std::size_t mask = 0; mask < F.size(); ++mask) {
    double fraction = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      const std::size_t m = points.alphabet[j];
      const std::size_t part = (mask >> offset[j]) & ((std::size_t{1} << m) - 1);
      fraction *= static_cast<double>(std::popcount(part)) / static_cast<double>(m);
    }
    const double dev = std::abs(signed_gap(F[mask], n, fraction));
    if (dev > best) {
      best = dev;
      best_mask = mask;
    }
  }
  CombRect rect;
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<bool> s(points.alphabet[j]);
    for (std::size_t a = 0; a < s.size(); ++a) s[a] = (best_mask >> (offset[j] + a)) & 1;
    rect.sets.push_back(std::move(s));
  }
  r.value = best;
  r.mode = ReportMode::Exact;
  r.witness = to_json(rect);
  return r;
}

FactorFamily full_space_factor(std::size_t size) {
  FactorFamily f;
  f.name = "full-space";
  f.size = size;
  const auto probe = [size]() {
    FactorProbe p;
    p.member.assign(size, 1);
    p.fraction = 1.0;
    p.witness = {{"type", "full-space"}};
    return p;
  };
  f.sample = [probe](SplitMix64&) -> std::optional<FactorProbe> { return probe(); };
  f.replay = [probe](const nlohmann::json&) { return probe(); };
  return f;
}

FactorFamily arc_factor(std::vector<double> angles, const AngleInterval& range) {
  validate_circle_range(range);
  FactorFamily f;
  f.name = "arcs";
  f.size = angles.size();
  const auto pts = std::make_shared<std::vector<double>>(std::move(angles));
  const auto probe = [pts, range](const Arc& a) {
    return probe_from(pts->size(), a.fraction(range), to_json(a),
                      [&](std::size_t i) { return a.contains((*pts)[i], range); });
  };
  f.sample = [probe, range](SplitMix64& rng) -> std::optional<FactorProbe> {
    return probe(random_arc(rng, range));
  };
  f.replay = [probe](const nlohmann::json& j) { return probe(arc_from_json(j)); };
  return f;
}

FactorFamily box_factor(std::vector<CubePoint> points, int dim, bool anchored) {
  if (dim < 1 || dim > 3) throw ParameterError("box families need dimension 1..3");
  FactorFamily f;
  f.name = anchored ? "boxes-anchored" : "boxes-all";
  f.size = points.size();
  const auto pts = std::make_shared<std::vector<CubePoint>>(std::move(points));
  const auto probe = [pts](const Box& b) {
    return probe_from(pts->size(), b.fraction(), to_json(b),
                      [&](std::size_t i) { return b.contains((*pts)[i]); });
  };
  f.sample = [probe, dim, anchored](SplitMix64& rng) -> std::optional<FactorProbe> {
    return probe(random_box(rng, dim, anchored));
  };
  f.replay = [probe](const nlohmann::json& j) { return probe(box_from_json(j)); };
  return f;
}

FactorFamily cap_factor(std::vector<S2Point> points) {
  FactorFamily f;
  f.name = "caps";
  f.size = points.size();
  const auto pts = std::make_shared<std::vector<S2Point>>(std::move(points));
  const auto probe = [pts](const Cap& c) {
    return probe_from(pts->size(), c.fraction(), to_json(c),
                      [&](std::size_t i) { return c.contains((*pts)[i]); });
  };
  f.sample = [probe](SplitMix64& rng) -> std::optional<FactorProbe> { return probe(random_cap(rng)); };
  f.replay = [probe](const nlohmann::json& j) { return probe(cap_from_json(j)); };
  return f;
}

FactorFamily polygon_factor(std::vector<S2Point> points, const SphereRange& patch, int k) {
  require_vertices(k);
  validate_sphere_range(patch);
  FactorFamily f;
  f.name = "spherical-convex-polygons";
  f.size = points.size();
  const auto pts = std::make_shared<std::vector<S2Point>>(std::move(points));
  const double patch_measure = patch_fraction(patch);
  const auto probe = [pts, patch_measure](const SphericalPolygon& poly) {
    return probe_from(pts->size(), poly.fraction() / patch_measure, to_json(poly),
                      [&](std::size_t i) { return poly.contains((*pts)[i]); });
  };
  f.sample = [probe, patch, k](SplitMix64& rng) -> std::optional<FactorProbe> {
    const auto cap = random_container_cap(rng, patch, kPolygonCapRadius);
    if (!cap) return std::nullopt;
    const auto poly = random_polygon_in_cap(rng, *cap, k);
    if (!poly) return std::nullopt;
    return probe(*poly);
  };
  f.replay = [probe](const nlohmann::json& j) { return probe(polygon_from_json(j)); };
  return f;
}

FactorFamily local_cartesian_factor(const std::vector<UnitQuaternion>& points,
                                    const BoundedRange& range, int k) {
  require_vertices(k);
  validate_bounded_range(range);
  FactorFamily f;
  f.name = "local-cartesian-convex";
  f.size = points.size();
  const auto pts = std::make_shared<std::vector<HopfPoint>>(hopf_points(points));
  const auto probe = [pts, range](const LocalCartesianRegion& reg) {
    return probe_from(pts->size(), reg.fraction(range), to_json(reg),
                      [&](std::size_t i) { return reg.contains((*pts)[i], range.circle); });
  };
  f.sample = [probe, range, k](SplitMix64& rng) -> std::optional<FactorProbe> {
    const auto reg = random_local_cartesian(rng, range, k);
    if (!reg) return std::nullopt;
    return probe(*reg);
  };
  f.replay = [probe](const nlohmann::json& j) { return probe(local_cartesian_from_json(j)); };
  return f;
}

FactorFamily se2_factor(const std::vector<Se2Element>& points, const AngleInterval& range) {
  validate_circle_range(range);
  FactorFamily f;
  f.name = "product(arcs,boxes-all)";
  f.size = points.size();
  const auto pts = std::make_shared<std::vector<Se2Element>>(points);
  const auto probe = [pts, range](const Arc& a, const Box& b) {
    nlohmann::json w = {{"type", "se2-region"}, {"rotation", to_json(a)}, {"translation", to_json(b)}};
    return probe_from(pts->size(), a.fraction(range) * b.fraction(), std::move(w), [&](std::size_t i) {
      const Se2Element& e = (*pts)[i];
      return a.contains(e.angle, range) && b.contains({e.translation[0], e.translation[1], 0.0});
    });
  };
  f.sample = [probe, range](SplitMix64& rng) -> std::optional<FactorProbe> {
    const Arc a = random_arc(rng, range);
    return probe(a, random_box(rng, 2, false));
  };
  f.replay = [probe](const nlohmann::json& j) {
    return probe(arc_from_json(j.at("rotation")), box_from_json(j.at("translation")));
  };
  return f;
}

FactorFamily se3_factor(const std::vector<Se3Element>& points, const BoundedRange& range, int k) {
  require_vertices(k);
  validate_bounded_range(range);
  FactorFamily f;
  f.name = "product(local-cartesian-convex,boxes-all)";
  f.size = points.size();
  std::vector<UnitQuaternion> rotations;
  rotations.reserve(points.size());
  for (const Se3Element& e : points) rotations.push_back(e.rotation);
  const auto hopf = std::make_shared<std::vector<HopfPoint>>(hopf_points(rotations));
  const auto pts = std::make_shared<std::vector<Se3Element>>(points);
  const auto probe = [pts, hopf, range](const LocalCartesianRegion& reg, const Box& b) {
    nlohmann::json w = {{"type", "se3-region"}, {"rotation", to_json(reg)}, {"translation", to_json(b)}};
    return probe_from(pts->size(), reg.fraction(range) * b.fraction(), std::move(w), [&](std::size_t i) {
      return reg.contains((*hopf)[i], range.circle) && b.contains((*pts)[i].translation);
    });
  };
  f.sample = [probe, range, k](SplitMix64& rng) -> std::optional<FactorProbe> {
    const auto reg = random_local_cartesian(rng, range, k);
    if (!reg) return std::nullopt;
    return probe(*reg, random_box(rng, 3, false));
  };
  f.replay = [probe](const nlohmann::json& j) {
    return probe(local_cartesian_from_json(j.at("rotation")), box_from_json(j.at("translation")));
  };
  return f;
}

FactorFamily motion_factor(const std::vector<MotionElement>& points, Space space,
                           const BoundedRange& range, int k) {
  const auto extract = [&]<class T>(std::type_identity<T>) {
    std::vector<T> out;
    out.reserve(points.size());
    for (const MotionElement& e : points) {
      const T* v = std::get_if<T>(&e);
      if (!v) {
        throw CompositionError("factor elements do not match the factor space " +
                               std::string(space_name(space)));
      }
      out.push_back(*v);
    }
    return out;
  };
  switch (space) {
    case Space::SO3:
      return local_cartesian_factor(extract(std::type_identity<UnitQuaternion>{}), range, k);
    case Space::SE2:
      return se2_factor(extract(std::type_identity<Se2Element>{}), range.circle);
    case Space::SE3:
      return se3_factor(extract(std::type_identity<Se3Element>{}), range, k);
    default:
      throw CompositionError("no motion factor family for space " + std::string(space_name(space)));
  }
}

DiscrepancyReport product_family_discrepancy(const IndexPoints& rows,
                                             std::span<const FactorFamily> families,
                                             const SearchOptions& opts) {
  if (families.empty()) throw ParameterError("product families need at least one factor");
  return estimate(rows, families, opts, product_name(families));
}

double witness_deviation(const CirclePointSet& points, const nlohmann::json& witness) {
  const Arc a = arc_from_json(witness);
  const AngleInterval& range = points.range.circle;
  return region_deviation(points.size(), a.fraction(range),
                               [&](std::size_t i) { return a.contains(points[i], range); });
}

double witness_deviation(const CubePointSet& points, const nlohmann::json& witness) {
  const Box b = box_from_json(witness);
  return region_deviation(points.size(), b.fraction(),
                               [&](std::size_t i) { return b.contains(points[i]); });
}

double witness_deviation(const S2PointSet& points, const nlohmann::json& witness) {
  const std::string type = witness.at("type").get<std::string>();
  if (type == "latitude-rect") {
    const ChartBox b = chart_box_from_json(witness);
    const std::vector<CubePoint> uv = chart_points(points);
    return region_deviation(points.size(), b.fraction(),
                                      [&](std::size_t i) { return b.contains(uv[i][0], uv[i][1]); });
  }
  if (type == "cap") {
    const Cap c = cap_from_json(witness);
    return region_deviation(points.size(), c.fraction(),
                                 [&](std::size_t i) { return c.contains(points[i]); });
  }
  if (type == "spherical-polygon") {
    const SphericalPolygon p = polygon_from_json(witness);
    return region_deviation(points.size(),
                                              p.fraction() / patch_fraction(points.range.sphere),
                                              [&](std::size_t i) { return p.contains(points[i]); });
  }
  throw ParameterError("witness type " + type + " does not apply to S2 point sets");
}

double witness_deviation(const So3PointSet& points, const nlohmann::json& witness) {
  const LocalCartesianRegion reg = local_cartesian_from_json(witness);
  const std::vector<HopfPoint> h = hopf_points(points.elements);
  return region_deviation(
      points.size(), reg.fraction(points.range),
      [&](std::size_t i) { return reg.contains(h[i], points.range.circle); });
}

double witness_deviation(const IndexPoints& points, const nlohmann::json& witness) {
  const CombRect rect = comb_rect_from_json(witness);
  if (rect.sets.size() != points.dim()) throw ParameterError("witness dimension mismatch");
  std::vector<FactorProbe> probes;
  for (const auto& s : rect.sets) {
    FactorProbe p;
    p.member.assign(s.begin(), s.end());
    probes.push_back(std::move(p));
  }
  const std::size_t n = points.size();
  std::size_t count = 0;
  for (std::size_t r = 0; r < n; ++r) {
    bool in = true;
    for (std::size_t j = 0; j < points.dim() && in; ++j) in = probes[j].member[points.at(r, j)] != 0;
    count += in ? 1 : 0;
  }
  return std::abs(signed_gap(count, n, rect.fraction()));
}

double witness_deviation(const IndexPoints& rows, std::span<const FactorFamily> families,
                         const nlohmann::json& witness) {
  std::vector<FactorProbe> probes;
  if (families.size() == 1) {
    probes.push_back(families[0].replay(witness));
  } else {
    const auto& factors = witness.at("factors");
    if (factors.size() != families.size()) throw ParameterError("witness factor count mismatch");
    for (std::size_t j = 0; j < families.size(); ++j) probes.push_back(families[j].replay(factors.at(j)));
  }
  return product_gap(rows, probes);
}

namespace {

void profile_record(CriticalProfile& p, std::size_t count, double fraction, bool closed) {
  double& slot = closed ? p.min_closed[count] : p.max_open[count];
  if (std::isnan(slot) || (closed ? fraction < slot : fraction > slot)) slot = fraction;
}

CriticalProfile empty_profile(std::size_t n) {
  CriticalProfile p;
  p.n = n;
  p.min_closed.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
  p.max_open.assign(n + 1, std::numeric_limits<double>::quiet_NaN());
  profile_record(p, 0, 0.0, true);
  profile_record(p, 0, 0.0, false);
  profile_record(p, n, 1.0, true);
  profile_record(p, n, 1.0, false);
  return p;
}

// Calls fn(lo, hi, count) for every critical interval of sorted values v:
// closed [a, b] with a, b in v, or open (a, b) with a, b in v U {0, 1}.
template <class Fn>
void critical_intervals(const std::vector<double>& v, bool closed, Fn&& fn) {
  std::vector<double> ends = v;
  if (!closed) {
    ends.push_back(0.0);
    ends.push_back(1.0);
  }
  ends = distinct_sorted(std::move(ends));
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = closed ? i : i + 1; j < ends.size(); ++j) {
      const double lo = ends[i];
      const double hi = ends[j];
      std::size_t count = 0;
      for (double x : v) count += (closed ? (x >= lo && x <= hi) : (x > lo && x < hi)) ? 1 : 0;
      fn(lo, hi, count);
    }
  }
}

}  // namespace

CriticalProfile arc_critical_profile(const CirclePointSet& points) {
  require_nonempty(points.size(), "arc profile");
  validate_angles(points);
  const std::size_t n = points.size();
  const AngleInterval range = points.range.circle;
  CriticalProfile p = empty_profile(n);
  std::vector<double> starts = distinct_sorted(points.elements);
  if (!range.is_full_circle()) starts.push_back(range.lo);
  for (double s : distinct_sorted(starts)) {
    std::vector<double> offsets;
    for (double a : points.elements) {
      double off = a - s;
      if (range.is_full_circle() && off < 0.0) off += kTwoPi;
      if (off >= 0.0) offsets.push_back(off);
    }
    std::vector<double> lengths = offsets;
    lengths.push_back(range.is_full_circle() ? kTwoPi : range.hi - s);
    for (double L : distinct_sorted(lengths)) {
      std::size_t closed = 0;
      std::size_t open = 0;
      for (double off : offsets) {
        closed += off <= L ? 1 : 0;
        open += (off > 0.0 && off < L) ? 1 : 0;
      }
      const double fraction = L / range.length();
      profile_record(p, closed, fraction, true);
      if (L > 0.0) profile_record(p, open, fraction, false);
    }
  }
  return p;
}

CriticalProfile box_critical_profile(const CubePointSet& points) {
  require_nonempty(points.size(), "box profile");
  const int k = cube_dimension(points);
  if (k > 2) throw ParameterError("box profiles support k <= 2");
  const std::size_t n = points.size();
  if (n > ExactBudget::kProfileBoxes) {
    throw BudgetRefusal("box profiles are limited to N <= 64", "use box_discrepancy_estimate");
  }
  CriticalProfile p = empty_profile(n);
  std::vector<double> xs;
  for (const CubePoint& q : points.elements) xs.push_back(q[0]);
  for (bool closed : {true, false}) {
    if (k == 1) {
      critical_intervals(xs, closed, [&](double lo, double hi, std::size_t count) {
        profile_record(p, count, hi - lo, closed);
      });
      continue;
    }
    critical_intervals(xs, closed, [&](double lo, double hi, std::size_t) {
      std::vector<double> ys;
      for (const CubePoint& q : points.elements) {
        if (closed ? (q[0] >= lo && q[0] <= hi) : (q[0] > lo && q[0] < hi)) ys.push_back(q[1]);
      }
      critical_intervals(ys, closed, [&](double lo2, double hi2, std::size_t count) {
        profile_record(p, count, (hi - lo) * (hi2 - lo2), closed);
      });
    });
  }
  return p;
}

double product_discrepancy_exact(const CriticalProfile& a, const CriticalProfile& b) {
  const double total = static_cast<double>(a.n) * static_cast<double>(b.n);
  double best = 0.0;
  for (std::size_t c1 = 0; c1 <= a.n; ++c1) {
    for (std::size_t c2 = 0; c2 <= b.n; ++c2) {
      const double share = static_cast<double>(c1) * static_cast<double>(c2) / total;
      if (!std::isnan(a.min_closed[c1]) && !std::isnan(b.min_closed[c2])) {
        best = std::max(best, share - a.min_closed[c1] * b.min_closed[c2]);
      }
      if (!std::isnan(a.max_open[c1]) && !std::isnan(b.max_open[c2])) {
        best = std::max(best, a.max_open[c1] * b.max_open[c2] - share);
      }
    }
  }
  return best;
}

}  // namespace rigidqmc
