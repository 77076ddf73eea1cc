#pragma once

// Command implementations behind the CLI.  Each returns the process exit
// code and emits a machine-readable JSON report:
//   0 pass, 1 input error, 2 hypothesis violation, 3 conditioning failure,
//   4 verification failure.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace pencil {

inline constexpr const char* kToolName = "pencilform";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct CommandOptions {
  std::optional<int> grid;          // override every axis count
  std::optional<double> shift;      // force a constant shift
  std::optional<double> tol_rank;
  std::optional<double> tol_canon;
  std::uint64_t seed = 0;
  std::string out;                  // report/output path ("" = stdout only)
  std::string truth;                // ground-truth sidecar to compare
};

int run_analyze(const std::string& pencil_path, const CommandOptions& opt,
                std::ostream& report_out);
int run_canonize(const std::string& pencil_path, const CommandOptions& opt,
                 std::ostream& report_out);
int run_verify(const std::string& pencil_path,
               const std::string& transforms_path, const CommandOptions& opt,
               std::ostream& report_out);
int run_gen(const std::string& structure_path, const CommandOptions& opt,
            std::ostream& report_out);

}  // namespace pencil
