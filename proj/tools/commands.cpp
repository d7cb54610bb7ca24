#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "rigidqmc/discrepancy.hpp"

namespace rigidqmc::cli {

namespace {

PrgKind backend_kind(const RunConfig& c) { return parse_prg_kind(c.backend); }

PresetConfig preset_config(const RunConfig& c) {
  PresetConfig p;
  p.preset = parse_preset(std::string_view(c.space).substr(std::string_view("product:").size()));
  p.factors = c.factors;
  p.m = c.m;
  p.eps_r = c.eps_r;
  p.backend.kind = backend_kind(c);
  p.backend.seed = c.seed;
  p.backend.prime = c.prime;
  p.backend.threads = c.threads;
  p.range = c.bounded_range();
  p.polygon_k = c.k;
  p.factor_trials = c.factor_trials;
  return p;
}

// ---- element layout ----

std::vector<std::string> element_columns(Space s) {
  switch (s) {
    case Space::T1: return {"x"};
    case Space::T2: return {"x", "y"};
    case Space::T3: return {"x", "y", "z"};
    case Space::S1: return {"theta"};
    case Space::S2: return {"x", "y", "z"};
    case Space::SO3: return {"w", "x", "y", "z"};
    case Space::SE2: return {"angle", "t1", "t2"};
    case Space::SE3: return {"w", "x", "y", "z", "t1", "t2", "t3"};
    case Space::Product: break;
  }
  throw ParameterError("no column layout for a product space");
}

void append(std::vector<double>& row, const CubePoint& p, int k) {
  for (int d = 0; d < k; ++d) row.push_back(p[d]);
}
void append(std::vector<double>& row, double angle) { row.push_back(angle); }
void append(std::vector<double>& row, const S2Point& p) {
  row.insert(row.end(), {p.x(), p.y(), p.z()});
}
void append(std::vector<double>& row, const UnitQuaternion& q) {
  row.insert(row.end(), {q.w(), q.x(), q.y(), q.z()});
}
void append(std::vector<double>& row, const Se2Element& e) {
  row.insert(row.end(), {e.angle, e.translation[0], e.translation[1]});
}
void append(std::vector<double>& row, const Se3Element& e) {
  append(row, e.rotation);
  row.insert(row.end(), {e.translation[0], e.translation[1], e.translation[2]});
}
void append(std::vector<double>& row, const MotionElement& e) {
  std::visit([&](const auto& v) { append(row, v); }, e);
}

struct Table {
  std::string space;
  Provenance provenance;
  std::vector<std::pair<std::string, std::string>> extra;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

template <class Element, class Fn>
Table table_of(const PointSet<Element>& set, Fn&& fill) {
  Table t;
  t.space = std::string(space_name(set.measure.space));
  t.provenance = set.provenance;
  t.columns = element_columns(set.measure.space);
  t.rows.reserve(set.size());
  for (const Element& e : set.elements) {
    std::vector<double> row;
    fill(row, e);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table make_table(const AnySet& any, const RunConfig& config) {
  return std::visit(
      [&](const auto& set) -> Table {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, MotionProductSet>) {
          Table t;
          t.space = config.space;
          t.provenance = set.provenance;
          for (std::size_t j = 0; j < set.factors.size(); ++j) {
            const auto& f = set.factors[j];
            t.extra.emplace_back("factor_" + std::to_string(j), std::string(space_name(f.measure.space)) + " " +
                                                                    f.provenance.generator + " size " +
                                                                    std::to_string(f.size()));
            for (const std::string& c : element_columns(f.measure.space)) {
              t.columns.push_back("f" + std::to_string(j) + "_" + c);
            }
          }
          for (std::size_t r = 0; r < set.size(); ++r) {
            std::vector<double> row;
            for (const MotionElement& e : set.tuple(r)) append(row, e);
            t.rows.push_back(std::move(row));
          }
          return t;
        } else if constexpr (std::is_same_v<T, CubePointSet>) {
          const int k = cube_dimension(set);
          return table_of(set, [k](std::vector<double>& row, const CubePoint& p) { append(row, p, k); });
        } else {
          return table_of(set, [](std::vector<double>& row, const auto& e) { append(row, e); });
        }
      },
      any);
}

void write_table(const Table& t, const RunConfig& config, std::ostream& out) {
  nlohmann::json cfg = config.to_json();
  if (config.format == "json") {
    nlohmann::json prov = {{"generator", t.provenance.generator}};
    for (const auto& [k, v] : t.provenance.params) prov[k] = v;
    for (const auto& [k, v] : t.extra) prov[k] = v;
    nlohmann::json doc = {{"version", std::string(kVersion)},
                          {"space", t.space},
                          {"provenance", prov},
                          {"config", cfg},
                          {"columns", t.columns},
                          {"points", t.rows}};
    out << doc.dump(1) << "\n";
    return;
  }
  out << "# rigidqmc " << kVersion << "\n";
  out << "# space: " << t.space << "\n";
  out << "# generator: " << t.provenance.generator << "\n";
  for (const auto& [k, v] : t.provenance.params) out << "# " << k << ": " << v << "\n";
  for (const auto& [k, v] : t.extra) out << "# " << k << ": " << v << "\n";
  out << "# points: " << t.rows.size() << "\n";
  out << "# config: " << cfg.dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

// ---- reading ----

struct ParsedFile {
  std::map<std::string, std::string> header;
  std::vector<std::vector<double>> rows;
};

double parse_number(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParameterError("bad number '" + std::string(s) + "' in point file");
  }
  return v;
}

ParsedFile parse_point_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read point file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  ParsedFile out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
      out.header["space"] = doc.at("space").get<std::string>();
      for (const auto& [k, v] : doc.at("provenance").items()) out.header[k] = v.get<std::string>();
      out.header["config"] = doc.at("config").dump();
      out.rows = doc.at("points").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError("point file " + path + " is not a valid point document: " + e.what());
    }
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  bool seen_columns = false;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("#")) {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) out.header.emplace(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (!seen_columns) {
      seen_columns = true;
      continue;
    }
    std::vector<double> row;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      row.push_back(parse_number(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    out.rows.push_back(std::move(row));
  }
  if (!out.header.contains("space")) throw ParameterError("point file " + path + " has no '# space:' header");
  return out;
}

double header_double(const ParsedFile& f, const std::string& key, double fallback) {
  const auto it = f.header.find(key);
  return it == f.header.end() ? fallback : parse_number(it->second);
}

AngleInterval header_interval(const ParsedFile& f, const std::string& prefix, AngleInterval fallback) {
  return {header_double(f, prefix + "_lo", fallback.lo), header_double(f, prefix + "_hi", fallback.hi)};
}

void require_width(const std::vector<double>& row, std::size_t width) {
  if (row.size() != width) throw ParameterError("point file row has the wrong number of columns");
}

template <class Element, class Fn>
PointSet<Element> build_set(const ParsedFile& f, Space space, std::size_t width, Fn&& make) {
  PointSet<Element> set;
  set.measure = SpaceMeasure::of(space);
  set.provenance.generator = "file";
  for (const auto& row : f.rows) {
    require_width(row, width);
    set.elements.push_back(make(row));
  }
  return set;
}

UnitQuaternion quaternion_of(const std::vector<double>& r) {
  const double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
  if (std::abs(norm - 1.0) > kUnitNormTolerance) throw InvalidElementError("quaternion row is not unit norm");
  return canonicalize_quaternion({r[0], r[1], r[2], r[3]});
}

// ---- integration ----

double zonal(const CubePoint& p) { return 2.0 * p[0] - 1.0; }
double zonal(double angle) { return std::cos(angle); }
double zonal(const S2Point& p) { return p.z(); }
double zonal(const UnitQuaternion& q) { return 1.0 - 2.0 * (q.x() * q.x() + q.y() * q.y()); }
double zonal(const Se2Element& e) { return std::cos(e.angle); }
double zonal(const Se3Element& e) { return zonal(e.rotation); }
double zonal(const MotionElement& e) {
  return std::visit([](const auto& v) { return zonal(v); }, e);
}

// Mean of u^2 under the uniform measure: 1/2 for u = cos(angle), 1/3 otherwise.
double smooth_zonal_mean(Space s) { return (s == Space::S1 || s == Space::SE2) ? 0.5 : 1.0 / 3.0; }

void write_json(const nlohmann::json& doc, std::ostream& out) { out << doc.dump(2) << "\n"; }

}  // namespace

AnySet generate(const RunConfig& c) {
  c.validate();
  if (c.is_product()) return product_space_preset(preset_config(c));
  const Space space = parse_space(c.space);
  switch (space) {
    case Space::T1: return halton_kd(c.n, 1);
    case Space::T2: return c.source == "hammersley" ? hammersley_2d(c.n) : halton_kd(c.n, 2);
    case Space::T3: return halton_kd(c.n, 3);
    case Space::S1: return circle_points(c.n, c.angle);
    case Space::S2: return s2_sample_bounded(c.n, c.bounded_range().sphere);
    case Space::SO3: return so3_sample_bounded(c.n, c.bounded_range());
    case Space::SE2: return se2_sample(c.n, c.angle);
    case Space::SE3: return se3_sample(c.n, c.bounded_range());
    case Space::Product: break;
  }
  throw ParameterError("unknown space " + c.space);
}

AnySet read_point_file(const std::string& path, unsigned threads) {
  const ParsedFile f = parse_point_file(path);
  const std::string space_text = f.header.at("space");
  if (space_text.starts_with("product:")) {
    if (!f.header.contains("config")) throw ParameterError("product point file has no embedded config");
    RunConfig c;
    c.merge_json(nlohmann::json::parse(f.header.at("config")));
    c.space = space_text;
    c.threads = threads;
    c.command = "gen";
    AnySet set = generate(c);
    const Table t = make_table(set, c);
    if (t.rows != f.rows) throw ParameterError("product point file does not match its embedded config");
    return set;
  }
  const Space space = parse_space(space_text);
  switch (space) {
    case Space::T1:
    case Space::T2:
    case Space::T3: {
      const std::size_t k = space == Space::T1 ? 1 : space == Space::T2 ? 2 : 3;
      return build_set<CubePoint>(f, space, k, [k](const std::vector<double>& r) {
        CubePoint p{};
        for (std::size_t d = 0; d < k; ++d) p[d] = r[d];
        return p;
      });
    }
    case Space::S1: {
      auto set = build_set<double>(f, space, 1, [](const std::vector<double>& r) { return r[0]; });
      set.range.circle = header_interval(f, "range", {0.0, kTwoPi});
      validate_circle_range(set.range.circle);
      return set;
    }
    case Space::S2: {
      auto set = build_set<S2Point>(f, space, 3, [](const std::vector<double>& r) {
        return S2Point::from_unit(r[0], r[1], r[2]);
      });
      set.range.sphere = {header_interval(f, "theta", {0.0, kPi}), header_interval(f, "phi", {0.0, kTwoPi})};
      validate_sphere_range(set.range.sphere);
      return set;
    }
    case Space::SO3:
    case Space::SE3: {
      BoundedRange range;
      range.circle = header_interval(f, "psi", {0.0, kTwoPi});
      range.sphere = {header_interval(f, "theta", {0.0, kPi}), header_interval(f, "phi", {0.0, kTwoPi})};
      validate_bounded_range(range);
      if (space == Space::SO3) {
        auto set = build_set<UnitQuaternion>(f, space, 4, quaternion_of);
        set.range = range;
        return set;
      }
      auto set = build_set<Se3Element>(f, space, 7, [](const std::vector<double>& r) {
        return Se3Element{quaternion_of(r), {r[4], r[5], r[6]}};
      });
      set.range = range;
      return set;
    }
    case Space::SE2: {
      auto set = build_set<Se2Element>(f, space, 3, [](const std::vector<double>& r) {
        return Se2Element{r[0], {r[1], r[2]}};
      });
      set.range.circle = header_interval(f, "angle", {0.0, kTwoPi});
      validate_circle_range(set.range.circle);
      return set;
    }
    case Space::Product: break;
  }
  throw ParameterError("unsupported space in point file: " + space_text);
}

void cmd_gen(const RunConfig& config, std::ostream& out) {
  const AnySet set = generate(config);
  write_table(make_table(set, config), config, out);
}

void cmd_disc(const RunConfig& config, std::ostream& out) {
  config.validate();
  const AnySet any = config.in.empty() ? generate(config) : read_point_file(config.in, config.threads);
  SearchOptions opts;
  opts.trials = config.trials;
  opts.seed = config.seed;
  opts.threads = config.threads;
  const bool want_exact = config.mode != "estimate";
  const auto reject = [&](const std::string& allowed) -> DiscrepancyReport {
    throw ParameterError("family '" + config.family + "' does not apply to this space (use " + allowed + ")");
  };
  const auto no_exact = [&](const std::string& family) {
    if (config.mode == "exact") throw ParameterError("family " + family + " has no exact oracle; use --mode estimate");
  };
  std::size_t n = 0;
  const DiscrepancyReport report = std::visit(
      [&](const auto& set) -> DiscrepancyReport {
        using T = std::decay_t<decltype(set)>;
        n = set.size();
        const std::string& fam = config.family;
        if constexpr (std::is_same_v<T, CubePointSet>) {
          if (fam.empty() || fam == "boxes-all" || fam == "boxes-anchored") {
            const bool anchored = fam == "boxes-anchored";
            return want_exact ? box_discrepancy_exact(set, anchored, config.threads)
                              : box_discrepancy_estimate(set, anchored, opts);
          }
          return reject("boxes-all | boxes-anchored");
        } else if constexpr (std::is_same_v<T, CirclePointSet>) {
          if (fam.empty() || fam == "arcs") {
            return want_exact ? arc_discrepancy_exact(set, config.threads) : arc_discrepancy_estimate(set, opts);
          }
          return reject("arcs");
        } else if constexpr (std::is_same_v<T, S2PointSet>) {
          if (fam.empty() || fam == "latitude-rects") {
            return want_exact ? latitude_rect_discrepancy_exact(set, config.threads)
                              : latitude_rect_discrepancy_estimate(set, opts);
          }
          if (fam == "caps") {
            no_exact(fam);
            return cap_discrepancy_estimate(set, opts);
          }
          if (fam == "spherical-convex-polygons") {
            no_exact(fam);
            return spherical_convex_discrepancy_estimate(set, config.k, opts);
          }
          return reject("latitude-rects | caps | spherical-convex-polygons");
        } else if constexpr (std::is_same_v<T, So3PointSet>) {
          if (fam.empty() || fam == "local-cartesian-convex") {
            no_exact("local-cartesian-convex");
            return local_cartesian_convex_discrepancy_estimate(set, config.k, opts);
          }
          return reject("local-cartesian-convex");
        } else if constexpr (std::is_same_v<T, Se2PointSet>) {
          if (fam.empty() || fam == "product-of-families") {
            no_exact("product-of-families");
            return se2_discrepancy_estimate(set, opts);
          }
          return reject("product-of-families");
        } else if constexpr (std::is_same_v<T, Se3PointSet>) {
          if (fam.empty() || fam == "product-of-families") {
            no_exact("product-of-families");
            return se3_discrepancy_estimate(set, config.k, opts);
          }
          return reject("product-of-families");
        } else {
          if (fam.empty() || fam == "product-of-families") {
            no_exact("product-of-families");
            const auto families = motion_product_families(set, config.k);
            return product_family_discrepancy(set.rows, families, opts);
          }
          if (fam == "comb-rects") {
            return comb_rect_discrepancy(set.rows, want_exact ? CombRectMode::Exact : CombRectMode::MonteCarlo,
                                         opts);
          }
          return reject("product-of-families | comb-rects");
        }
      },
      any);
  nlohmann::json doc = report.to_json();
  doc["n"] = n;
  doc["space"] = config.space;
  doc["version"] = std::string(kVersion);
  doc["config"] = config.to_json();
  write_json(doc, out);
}

void cmd_integrate(const RunConfig& config, std::ostream& out) {
  if (config.fn != "constant" && config.fn != "hemisphere-indicator" && config.fn != "smooth-zonal") {
    throw ParameterError("unknown function '" + config.fn + "' (constant | hemisphere-indicator | smooth-zonal)");
  }
  config.validate();
  const AnySet any = config.in.empty() ? generate(config) : read_point_file(config.in, config.threads);
  const auto f = [&](double u) {
    if (config.fn == "constant") return 1.0;
    if (config.fn == "hemisphere-indicator") return u > 0.0 ? 1.0 : 0.0;
    return u * u;
  };
  std::size_t n = 0;
  Space first_space = Space::T1;
  bool full_range = true;
  const double estimate = std::visit(
      [&](const auto& set) -> double {
        using T = std::decay_t<decltype(set)>;
        n = set.size();
        if constexpr (std::is_same_v<T, MotionProductSet>) {
          first_space = set.factors.front().measure.space;
          full_range = set.factors.front().range.is_full();
          if (set.size() == 0) throw ParameterError("qmc_integrate needs a nonempty point set");
          double sum = 0.0;
          for (std::size_t r = 0; r < set.size(); ++r) {
            sum += f(zonal(set.factors.front().elements[set.rows.at(r, 0)]));
          }
          return sum / static_cast<double>(set.size());
        } else {
          first_space = set.measure.space;
          full_range = set.range.is_full();
          return qmc_integrate(set, [&](const auto& e) { return f(zonal(e)); });
        }
      },
      any);
  nlohmann::json exact = nullptr;
  if (config.fn == "constant") {
    exact = 1.0;
  } else if (full_range) {
    exact = config.fn == "hemisphere-indicator" ? 0.5 : smooth_zonal_mean(first_space);
  }
  nlohmann::json doc = {{"estimate", estimate}, {"N", n},       {"function", config.fn},
                        {"seed", config.seed},  {"exact", exact}, {"space", config.space},
                        {"version", std::string(kVersion)},     {"config", config.to_json()}};
  if (!exact.is_null()) doc["error"] = std::abs(estimate - exact.get<double>());
  write_json(doc, out);
}

}  // namespace rigidqmc::cli
