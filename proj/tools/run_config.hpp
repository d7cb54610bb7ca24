#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rigidqmc/core.hpp"

namespace rigidqmc::cli {

// Reading or writing a file failed (exit status 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything a command needs. Two runs with equal configs (ignoring
// `threads` and `out`) write identical bytes.
struct RunConfig {
  std::string command;
  std::string space = "s2";
  std::size_t n = 0;
  // T(2) base set: halton | hammersley.
  std::string source = "halton";
  // Product presets.
  std::size_t factors = 2;
  std::size_t m = 64;
  double eps_r = 0.2;
  std::string backend = "verified-random";
  std::uint64_t prime = 0;
  std::uint64_t factor_trials = 2000;
  // Discrepancy.
  std::string family;
  std::string mode = "auto";
  int k = 6;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  // Integration.
  std::string fn;
  // Bounded ranges (radians).
  AngleInterval angle{0.0, kTwoPi};
  AngleInterval psi{0.0, kTwoPi};
  AngleInterval theta{0.0, kPi};
  AngleInterval phi{0.0, kTwoPi};
  // I/O and execution; not part of the serialized config.
  std::string format = "csv";
  std::string in;
  std::string out;
  unsigned threads = 0;

  // Serialized form embedded in every output. Omits threads and out.
  nlohmann::json to_json() const;
  // Fields absent from `j` keep their current values.
  void merge_json(const nlohmann::json& j);
  // Throws ParameterError on an inconsistent config.
  void validate() const;

  BoundedRange bounded_range() const;
  bool is_product() const { return space.starts_with("product:"); }
};

// Loads --config first so that flags given on the command line override it.
void bind_options(CLI::App& app, RunConfig& config);
RunConfig load_config_file(const std::string& path);

}  // namespace rigidqmc::cli
