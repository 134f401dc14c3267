#pragma once

// Command-line front end: audit, planar, annulus, poincare, sweep, model-map.
// Exit codes: 0 ok, 1 computation failure, 2 usage/config error.

#include "pann/io.hpp"

namespace pann::cli {

int cmd_audit(const io::RunConfig& cfg);
int cmd_planar(const io::RunConfig& cfg);
int cmd_annulus(const io::RunConfig& cfg);
int cmd_poincare(const io::RunConfig& cfg);
int cmd_sweep(const io::RunConfig& cfg);
int cmd_model_map(const io::RunConfig& cfg);

int run(int argc, const char* const* argv);

}  // namespace pann::cli
