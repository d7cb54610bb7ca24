#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "run_config.hpp"

namespace {

using rigidqmc::cli::RunConfig;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitBudget = 4;

// Default directory for relative --out paths.
constexpr const char* kOutDirVariable = "RIGIDQMC_OUT_DIR";

std::string config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.starts_with("--config=")) return arg.substr(9);
  }
  return {};
}

std::filesystem::path output_path(const RunConfig& config) {
  std::filesystem::path p = config.out;
  const char* dir = std::getenv(kOutDirVariable);
  if (dir && *dir && p.is_relative()) p = std::filesystem::path(dir) / p;
  return p;
}

void run(const RunConfig& config) {
  std::ostringstream buffer;
  if (config.command == "gen") {
    rigidqmc::cli::cmd_gen(config, buffer);
  } else if (config.command == "disc") {
    rigidqmc::cli::cmd_disc(config, buffer);
  } else if (config.command == "integrate") {
    rigidqmc::cli::cmd_integrate(config, buffer);
  } else {
    throw rigidqmc::ParameterError("command must be gen, disc or integrate");
  }
  if (config.out.empty()) {
    std::cout << buffer.str();
    std::cout.flush();
    if (!std::cout) throw rigidqmc::cli::IoError("cannot write to standard output");
    return;
  }
  const std::filesystem::path path = output_path(config);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw rigidqmc::cli::IoError("cannot open " + path.string() + " for writing");
  f << buffer.str();
  f.close();
  if (!f) throw rigidqmc::cli::IoError("failed writing " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  try {
    const std::string cfg = config_path(argc, argv);
    if (!cfg.empty()) config = rigidqmc::cli::load_config_file(cfg);
  } catch (const rigidqmc::cli::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const rigidqmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Deterministic low-discrepancy sampling on rigid-motion groups"};
  app.set_version_flag("--version", std::string(rigidqmc::kVersion));
  rigidqmc::cli::bind_options(app, config);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    run(config);
  } catch (const rigidqmc::BudgetRefusal& e) {
    std::cerr << "error: " << e.what() << "\nhint: " << e.hint() << "\n";
    return kExitBudget;
  } catch (const rigidqmc::BackendFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const rigidqmc::cli::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const rigidqmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
