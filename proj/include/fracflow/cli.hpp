#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fracflow {

enum ExitCode : int { kExitOk = 0, kExitValidationFailed = 1, kExitConfigError = 2, kExitNumericError = 3 };

int cmd_solve(const std::string& config_path, const std::string& out_path, std::ostream& out);
int cmd_sample(const std::string& config_path, const std::string& out_path, std::optional<std::uint64_t> seed,
               std::ostream& out);
// Report is written to report_path when it is non-empty.
int cmd_validate(const std::vector<std::string>& cases, bool all, const std::string& report_path,
                 std::optional<std::uint64_t> seed, std::ostream& out);
int cmd_apply_op(const std::string& config_path, const std::string& out_path, std::ostream& out);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace fracflow
