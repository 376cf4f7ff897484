#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cht/config.hpp"

namespace cht::cli {

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kConfigError = 2 };

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cmd_classify(const RunConfig& cfg, bool quiet, std::ostream& out);
int cmd_simulate(const RunConfig& cfg, bool quiet, std::ostream& out);
int cmd_reduce(const RunConfig& cfg, bool quiet, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, bool quiet, std::ostream& out);
int cmd_validate(const RunConfig& cfg, bool quiet, std::ostream& out);

}  // namespace cht::cli
