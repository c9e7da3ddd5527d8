#ifndef QVI_CLI_HPP
#define QVI_CLI_HPP

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qvi/cases.hpp"
#include "qvi/control.hpp"

namespace qvi::cli {

// Exit codes: 0 success, 1 mathematical failure, 2 usage/config error.
inline constexpr int kOk = 0;
inline constexpr int kMathFailure = 1;
inline constexpr int kConfigError = 2;

struct CliOptions {
  std::string command;
  std::string config_path;
  std::string out_dir;  // empty: report to stdout
  std::optional<uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> max_iter;
};

// Parsed problem block; owns the space so the QviProblem pointer stays valid.
struct ProblemHandle {
  std::shared_ptr<Space> space;
  QviProblem problem;
};

// Throws ConfigError on unknown keys, wrong types, or missing fields.
ProblemHandle parseProblem(const nlohmann::json& j);

nlohmann::json reportFromCase(const CaseReport& rep);

// Dispatch on opts.command; writes report.json (and CSV tables where the
// command produces one) into out_dir, or prints the report when out_dir is
// empty.  Returns the process exit code.
int runCommand(const CliOptions& opts);

// Individual commands; `config` is the parsed config file.  Each returns the
// exit code and fills `report`.
int cmdCheckConditions(const nlohmann::json& config, nlohmann::json& report);
int cmdSolve(const nlohmann::json& config, const CliOptions& opts, nlohmann::json& report);
int cmdDerivative(const nlohmann::json& config, const CliOptions& opts,
                  nlohmann::json& report, std::string& csv);
int cmdCounterexample(const nlohmann::json& config, nlohmann::json& report);
int cmdObstacleStudy(const nlohmann::json& config, nlohmann::json& report, std::string& csv);
int cmdControl(const nlohmann::json& config, const CliOptions& opts, nlohmann::json& report);
int cmdSweep(const nlohmann::json& config, const CliOptions& opts, nlohmann::json& report,
             std::string& csv);

}  // namespace qvi::cli

#endif
