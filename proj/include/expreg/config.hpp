#pragma once

#include "expreg/experiments.hpp"
#include "expreg/io.hpp"
#include "expreg/regsolve.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace expreg {

// JSON config parsing. Every function throws Error(ConfigError) naming the
// offending field. The schema is documented in docs/config.md.

GridSpec parse_grid(const Json& j, const std::string& where = "grid");
CoefficientSpec parse_coefficient(const Json& j, const std::string& where = "coefficient");
SolutionSpec parse_solution(const Json& j, const std::string& where = "solution");
/// `solution` backs {"type": "from_solution"}; file paths resolve against base_dir.
SourceSpec parse_source(const Json& j, const std::optional<SolutionSpec>& solution, const std::filesystem::path& base_dir,
                        const std::string& where = "source");
SolverConfig parse_solver(const Json& j, const std::string& where = "solver");
ExpmConfig parse_expm(const Json& j, const std::string& where = "expm");

struct SolveConfig {
    SolveRequest request;
    /// Window used to fill a missing regularization time.
    double L = 0.0;
    bool T_from_rule = false;
};
/// {"solve": {...}}. A regularized method without T gets T = choose_T(R, L), L defaulting to 2R/3.
SolveConfig parse_solve(const Json& root, const std::filesystem::path& base_dir = {});

/// {"plan": {...}}.
ExperimentPlan parse_plan(const Json& root, const std::filesystem::path& base_dir = {});

struct ProbeConfig {
    enum class Kind { Elliptic, Heat, Ordering };
    Kind kind = Kind::Elliptic;
    GridSpec grid;
    CoefficientSpec coefficient;
    std::vector<double> y;
    double t = 0.0;
    double R_large = 0.0;
    std::optional<double> r_min, r_max;
    SolverConfig solver{1e-12, 0, Preconditioner::Jacobi};
    ExpmConfig expm;
};
/// {"probe": {...}}.
ProbeConfig parse_probe(const Json& root);

struct RhsConfig {
    GridSpec grid;
    CoefficientSpec coefficient;
    SourceSpec source;
    std::optional<double> band_filter;
    std::optional<int> remove_moments;
};
/// {"rhs": {...}}.
RhsConfig parse_rhs(const Json& root, const std::filesystem::path& base_dir = {});

/// Applies "path=value". A dotted path is followed from the root (objects are
/// created as needed); a bare key must occur exactly once anywhere in the
/// document. The value is parsed as JSON, falling back to a plain string.
void apply_override(Json& root, const std::string& assignment);

} // namespace expreg
