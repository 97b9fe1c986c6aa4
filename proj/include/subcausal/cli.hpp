#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace subcausal {

struct CliResult {
  int exit_code = 0;  // 0 ok, 2 data error, 3 model incompatibility, 4 non-convergence
  nlohmann::ordered_json report;
};

// argv without the program name, e.g. {"gof", "--fixture", "icd_trial",
// "--mechanism", "2"}. Every analysis value in the report comes straight
// from a library call.
CliResult run_command(const std::vector<std::string>& argv);

// main() wrapper: runs the command, prints or writes the report.
int cli_main(int argc, char** argv);

}  // namespace subcausal
