#include "run_config.hpp"

#include <fstream>
#include <sstream>

namespace rigidqmc::cli {

namespace {

nlohmann::json interval_json(const AngleInterval& a) { return nlohmann::json::array({a.lo, a.hi}); }

void read_interval(const nlohmann::json& j, const char* key, AngleInterval& a) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) {
    throw ParameterError(std::string("config field '") + key + "' must be [lo, hi]");
  }
  a.lo = v.at(0).get<double>();
  a.hi = v.at(1).get<double>();
}

template <class T>
void read_field(const nlohmann::json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

}  // namespace

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = {{"command", command}, {"space", space}, {"n", n}, {"seed", seed}};
  if (space == "t2") j["source"] = source;
  if (is_product()) {
    j["factors"] = factors;
    j["m"] = m;
    j["eps_r"] = eps_r;
    j["backend"] = backend;
    j["prime"] = prime;
    j["factor_trials"] = factor_trials;
  }
  if (command == "disc") {
    j["family"] = family;
    j["mode"] = mode;
    j["k"] = k;
    j["trials"] = trials;
    if (!in.empty()) j["in"] = in;
  }
  if (command == "integrate") j["fn"] = fn;
  j["angle"] = interval_json(angle);
  j["psi"] = interval_json(psi);
  j["theta"] = interval_json(theta);
  j["phi"] = interval_json(phi);
  j["format"] = format;
  return j;
}

void RunConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParameterError("config file must hold a JSON object");
  try {
    read_field(j, "command", command);
    read_field(j, "space", space);
    read_field(j, "n", n);
    read_field(j, "source", source);
    read_field(j, "factors", factors);
    read_field(j, "m", m);
    read_field(j, "eps_r", eps_r);
    read_field(j, "backend", backend);
    read_field(j, "prime", prime);
    read_field(j, "factor_trials", factor_trials);
    read_field(j, "family", family);
    read_field(j, "mode", mode);
    read_field(j, "k", k);
    read_field(j, "trials", trials);
    read_field(j, "seed", seed);
    read_field(j, "fn", fn);
    read_field(j, "format", format);
    read_field(j, "in", in);
    read_field(j, "out", out);
    read_field(j, "threads", threads);
    read_interval(j, "angle", angle);
    read_interval(j, "psi", psi);
    read_interval(j, "theta", theta);
    read_interval(j, "phi", phi);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("bad config field: ") + e.what());
  }
}

void RunConfig::validate() const {
  if (command != "gen" && command != "disc" && command != "integrate") {
    throw ParameterError("command must be gen, disc or integrate");
  }
  if (format != "csv" && format != "json") throw ParameterError("format must be csv or json");
  if (trials == 0) throw ParameterError("trials must be >= 1");
  if (mode != "auto" && mode != "exact" && mode != "estimate") {
    throw ParameterError("mode must be auto, exact or estimate");
  }
  if (source != "halton" && source != "hammersley") throw ParameterError("source must be halton or hammersley");
  if (in.empty() && !is_product() && n == 0) throw ParameterError("--n must be >= 1");
  validate_circle_range(angle);
  validate_bounded_range(bounded_range());
}

BoundedRange RunConfig::bounded_range() const {
  BoundedRange r;
  r.circle = psi;
  r.sphere.theta = theta;
  r.sphere.phi = phi;
  return r;
}

void bind_options(CLI::App& app, RunConfig& c) {
  app.add_option("command", c.command, "gen | disc | integrate")->required();
  app.add_option("--config", "JSON run config; flags given here override it");
  app.add_option("--space", c.space,
                 "t1|t2|t3|s1|s2|so3|se2|se3|product:so3|product:se3|product:mixed|product:so3-bounded");
  app.add_option("--n", c.n, "requested number of points");
  app.add_option("--source", c.source, "T(2) base set: halton | hammersley");
  app.add_option("--factors", c.factors, "number of product factors");
  app.add_option("--m", c.m, "requested size of each product factor");
  app.add_option("--eps-r", c.eps_r, "combinatorial-rectangle error of the product backend");
  app.add_option("--backend", c.backend, "kwise | verified-random");
  app.add_option("--prime", c.prime, "kwise field size (0 = default)");
  app.add_option("--factor-trials", c.factor_trials, "estimator trials used to measure factor eps");
  app.add_option("--family", c.family, "test family (default depends on the space)");
  app.add_option("--mode", c.mode, "auto | exact | estimate");
  app.add_option("--k", c.k, "polygon vertex count for convex families");
  app.add_option("--trials", c.trials, "estimator trials");
  app.add_option("--seed", c.seed, "seed for every randomized step");
  app.add_option("--threads", c.threads, "worker threads (0 = all)");
  app.add_option("--format", c.format, "csv | json");
  app.add_option("--in", c.in, "point file written by gen");
  app.add_option("--out", c.out, "output path (default standard output)");
  app.add_option("--fn", c.fn, "constant | hemisphere-indicator | smooth-zonal");
  app.add_option("--angle-lo", c.angle.lo, "S1 / SE(2) angle range");
  app.add_option("--angle-hi", c.angle.hi);
  app.add_option("--psi-lo", c.psi.lo, "SO(3) fiber angle range");
  app.add_option("--psi-hi", c.psi.hi);
  app.add_option("--theta-lo", c.theta.lo, "colatitude range");
  app.add_option("--theta-hi", c.theta.hi);
  app.add_option("--phi-lo", c.phi.lo, "longitude range");
  app.add_option("--phi-hi", c.phi.hi);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParameterError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig c;
  c.merge_json(j);
  return c;
}

}  // namespace rigidqmc::cli
