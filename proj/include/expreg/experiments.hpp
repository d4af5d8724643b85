#pragma once

#include "expreg/expm.hpp"
#include "expreg/field.hpp"
#include "expreg/linsolve.hpp"
#include "expreg/operator.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace expreg {

/// How the regularization time T is chosen per row.
struct TPolicy {
    enum class Kind {
        PerRowRule,     // T = choose_T(R, L) per row
        ReferenceRule, // T = choose_T(R_ref, L_ref), shared by every row
        Fixed,
        PerR,
    };
    Kind kind = Kind::PerRowRule;
    double fixed = 0.0;
    std::vector<double> per_r;
};

struct ReferencePolicy {
    enum class Kind { ClosedForm, RegularizedAtRmax };
    Kind kind = Kind::ClosedForm;
    /// Reference domain side for RegularizedAtRmax (0 means the largest R of the sweep).
    double R = 0.0;
    /// Naive rows are measured against the closed form instead of the regularized reference.
    bool naive_closed_form = false;
};

enum class MethodKind { Naive, Regularized, ExactDirichlet };

const char* to_string(MethodKind m) noexcept;

struct ExperimentPlan {
    std::string id;
    int dim = 2;
    std::vector<double> R_values;
    int nodes_per_unit = 40;
    double L_fraction = 2.0 / 3.0;
    /// Fixed window side, overriding L_fraction when set.
    std::optional<double> L_fixed;
    TPolicy T_policy;
    ReferencePolicy reference;
    std::vector<MethodKind> methods{MethodKind::Naive, MethodKind::Regularized};
    CoefficientSpec coefficient;
    std::optional<SolutionSpec> solution;
    SourceSpec source;
    SolverConfig solver;
    ExpmConfig expm;
    /// Row worker cap.
    int threads = 1;

    double window(double R) const;
};

/// Known plan ids.
bool is_known_experiment(const std::string& id);

/// Throws InvalidSpec / InvalidGeometry when a plan invariant fails.
void validate(const ExperimentPlan& plan);

struct ReportRow {
    std::string experiment_id;
    double R = 0.0;
    double L = 0.0;
    std::optional<double> T;
    std::string method;
    double error = 0.0;
    std::int64_t iterations = 0;
    double residual = 0.0;
    double seconds = 0.0;
    /// Row measured against itself; excluded from fits.
    bool is_reference = false;
};

enum class FitModel { PowerLaw, Exponential };

const char* to_string(FitModel m) noexcept;

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

struct FitEntry {
    std::string method;
    FitModel model = FitModel::PowerLaw;
    std::string against = "R"; // abscissa: "R" or "T"
    FitResult fit;
    std::int64_t points = 0;
};

/// Regularized vs naive row errors at the largest R, each against its plan reference.
struct Headline {
    double R = 0.0;
    double regularized = 0.0;
    double naive = 0.0;
    std::string reference;
};

struct ErrorReport {
    std::string experiment_id;
    std::vector<ReportRow> rows;
    std::vector<FitEntry> fits;
    std::optional<Headline> headline;

    /// Fit for a method / model / abscissa, if present.
    const FitEntry* find_fit(const std::string& method, FitModel model, const std::string& against = "R") const;
};

/// Least squares on (log xs, log errs) for PowerLaw, (xs, log errs) for Exponential.
/// Throws DegenerateFit for fewer than 4 points, nonpositive data, or constant xs.
FitResult fit_decay(std::span<const double> xs, std::span<const double> errs, FitModel model);

/// Runs every (R, method) row, then fits each method's errors against R.
/// Solver failures are rethrown with the offending R in the message.
ErrorReport run_plan(const ExperimentPlan& plan);

/// run_plan for plans with a shared T and a regularized reference.
ErrorReport boundary_error_isolate(const ExperimentPlan& plan);

/// run_plan for plans whose solution vanishes on every wall, with additional fits against T.
ErrorReport modelling_error_isolate(const ExperimentPlan& plan);

/// Dispatches on plan.id: E-boundary and E-modelling go through their isolating runners.
ErrorReport run_experiment(const ExperimentPlan& plan);

/// Modelling error ||u_T - u_inf||_h on a centred window of side L (L <= 0: whole grid)
/// for each T, computed as A^{-1} e^{-TA} g.
std::vector<double> modelling_sweep_T(const DiscreteOperator& op, std::span<const double> g, std::span<const double> Ts,
                                      double L = 0.0, const SolverConfig& solver = {1e-12, 0, Preconditioner::Jacobi},
                                      const ExpmConfig& expm = {});

} // namespace expreg
