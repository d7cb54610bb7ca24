#pragma once

#include <iosfwd>
#include <variant>

#include "rigidqmc/motion.hpp"
#include "rigidqmc/presets.hpp"
#include "rigidqmc/sphere.hpp"
#include "rigidqmc/unitcube.hpp"
#include "run_config.hpp"

namespace rigidqmc::cli {

using AnySet = std::variant<CubePointSet, CirclePointSet, S2PointSet, So3PointSet, Se2PointSet, Se3PointSet,
                            MotionProductSet>;

AnySet generate(const RunConfig& config);
// Reads a CSV or JSON point file written by `gen`. Product files are
// regenerated from their embedded config and checked against the file.
AnySet read_point_file(const std::string& path, unsigned threads);

void cmd_gen(const RunConfig& config, std::ostream& out);
void cmd_disc(const RunConfig& config, std::ostream& out);
void cmd_integrate(const RunConfig& config, std::ostream& out);

}  // namespace rigidqmc::cli
