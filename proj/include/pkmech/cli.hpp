#ifndef PKMECH_CLI_HPP
#define PKMECH_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace pkmech::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitDegenerate = 3,
    kExitIdentity = 4,
    kExitNumeric = 5,
};

/// Malformed or incomplete problem file.
class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MetricSpec {
    enum class Type { Model, Potential, Matrix };
    Type type = Type::Model;
    std::string potential;
    std::vector<std::vector<std::string>> matrix;
};

struct IntegratorConfig {
    std::string scheme = "rk4";
    double t0 = 0.0;
    double t1 = 1.0;
    double h = 1e-3;
};

/// Problem file schema (JSON):
///
///   {
///     "n": 1,
///     "kind": "lagrangian" | "hamiltonian" | "metric",
///     "function": "x1*y1",                      // L or H; not used for metric
///     "metric": {"type": "model"}
///             | {"type": "potential", "potential": "ln(1 + x1*y1)"}
///             | {"type": "matrix", "matrix": [["0", "1"], ["1", "0"]]},
///     "initial_conditions": [[1, 1], [0.5, 2]], // or a single state [1, 1]
///     "integrator": {"scheme": "rk4" | "symplectic_euler", "t0": 0, "t1": 5, "h": 0.001},
///     "outputs": {"trajectory": "trajectory.csv", "report": "report.json"},
///     "seed": 0,
///     "tolerance": 1e-9,
///     "trials": 20
///   }
struct ProblemFile {
    int n = 1;
    std::string kind;
    std::string function;
    MetricSpec metric;
    std::vector<std::vector<double>> initial_conditions;
    IntegratorConfig integrator;
    std::string trajectory_output = "trajectory.csv";
    std::string report_output;  ///< empty: "<command>.json"
    std::uint64_t seed = 0;
    double tolerance = 1e-9;
    int trials = 20;
};

ProblemFile parse_problem(const Json& doc);
ProblemFile load_problem(const std::filesystem::path& path);

struct Report {
    int exit_code = kExitOk;
    Json json;
    std::string text;
    /// Extra files (name relative to the output directory, contents).
    std::vector<std::pair<std::string, std::string>> files;
};

/// Library errors propagate; run() maps them to exit codes.
Report cmd_derive(const ProblemFile& problem);
Report cmd_check(const ProblemFile& problem);
Report cmd_integrate(const ProblemFile& problem);

/// Write to a sibling temporary file, then rename over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal form.
std::string format_real(double v);

/// Full command-line entry point.
int run(int argc, char** argv);

}  // namespace pkmech::cli

#endif  // PKMECH_CLI_HPP
