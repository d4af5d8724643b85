#include "expreg/experiments.hpp"

#include "expreg/error.hpp"
#include "expreg/regsolve.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace expreg {

const char* to_string(MethodKind m) noexcept
{
    switch (m) {
    case MethodKind::Naive: return "naive";
    case MethodKind::Regularized: return "regularized";
    case MethodKind::ExactDirichlet: return "exact_dirichlet";
    }
    return "?";
}

const char* to_string(FitModel m) noexcept
{
    return m == FitModel::PowerLaw ? "powerlaw" : "exponential";
}

double ExperimentPlan::window(double R) const
{
    return L_fixed ? *L_fixed : L_fraction * R;
}

bool is_known_experiment(const std::string& id)
{
    return id == "E-total" || id == "E-boundary" || id == "E-modelling" || id == "E-quasi" || id == "E-naive-rate";
}

namespace {

std::optional<SolutionSpec> plan_solution(const ExperimentPlan& plan)
{
    if (plan.solution) return plan.solution;
    return plan.source.solution();
}

bool has_method(const ExperimentPlan& plan, MethodKind m)
{
    return std::find(plan.methods.begin(), plan.methods.end(), m) != plan.methods.end();
}

double reference_side(const ExperimentPlan& plan)
{
    return plan.reference.R > 0.0 ? plan.reference.R : plan.R_values.back();
}

double T_for(const ExperimentPlan& plan, double R)
{
    const double alpha = plan.coefficient.alpha(plan.dim);
    const double beta = plan.coefficient.beta(plan.dim);
    switch (plan.T_policy.kind) {
    case TPolicy::Kind::PerRowRule: return choose_T(R, plan.window(R), alpha, beta);
    case TPolicy::Kind::ReferenceRule: {
        const double Rr = reference_side(plan);
        return choose_T(Rr, plan.window(Rr), alpha, beta);
    }
    case TPolicy::Kind::Fixed: return plan.T_policy.fixed;
    case TPolicy::Kind::PerR:
        for (std::size_t i = 0; i < plan.R_values.size(); ++i) {
            if (std::abs(plan.R_values[i] - R) <= 1e-12 * R) return plan.T_policy.per_r[i];
        }
        break;
    }
    std::ostringstream os;
    os << "T_policy.per_r has no entry for R=" << R;
    throw Error(ErrorCode::InvalidSpec, os.str());
}

std::string with_R(double R, const std::string& what)
{
    std::ostringstream os;
    os << "R=" << R << ": " << what;
    return os.str();
}

} // namespace

void validate(const ExperimentPlan& plan)
{
    auto fail = [](ErrorCode c, const std::string& msg) { throw Error(c, msg); };
    if (!is_known_experiment(plan.id)) fail(ErrorCode::InvalidSpec, "unknown experiment id '" + plan.id + "'");
    if (plan.dim < 1 || plan.dim > 3) fail(ErrorCode::InvalidSpec, "plan.dim must be 1, 2 or 3");
    if (plan.R_values.empty()) fail(ErrorCode::InvalidSpec, "plan.R_values is empty");
    for (std::size_t i = 0; i < plan.R_values.size(); ++i) {
        if (!(plan.R_values[i] > 0.0)) fail(ErrorCode::InvalidSpec, "plan.R_values must be positive");
        if (i > 0 && !(plan.R_values[i] > plan.R_values[i - 1])) {
            fail(ErrorCode::InvalidSpec, "plan.R_values must be strictly ascending");
        }
    }
    if (plan.nodes_per_unit < 1) fail(ErrorCode::InvalidSpec, "plan.nodes_per_unit must be >= 1");
    if (!(plan.L_fraction > 0.0 && plan.L_fraction < 1.0)) fail(ErrorCode::InvalidGeometry, "plan.L_fraction must lie in (0, 1)");
    if (plan.L_fixed && !(*plan.L_fixed > 0.0 && *plan.L_fixed < plan.R_values.front())) {
        fail(ErrorCode::InvalidGeometry, "plan.L must lie in (0, min R)");
    }
    if (plan.methods.empty()) fail(ErrorCode::InvalidSpec, "plan.methods is empty");
    if (plan.threads < 1) fail(ErrorCode::InvalidSpec, "threads must be >= 1");
    validate(plan.solver);
    validate(plan.expm);

    if (plan.id == "E-modelling") {
        for (double R : plan.R_values) {
            const double k = R / 0.2;
            if (std::abs(k - std::round(k)) > 1e-9) fail(ErrorCode::InvalidSpec, "E-modelling needs every R to be a multiple of 0.2");
        }
    }
    if (plan.T_policy.kind == TPolicy::Kind::PerR && plan.T_policy.per_r.size() != plan.R_values.size()) {
        fail(ErrorCode::InvalidSpec, "plan.T_policy.per_r must have one entry per R");
    }
    if (plan.T_policy.kind == TPolicy::Kind::Fixed && !(plan.T_policy.fixed > 0.0)) {
        fail(ErrorCode::InvalidSpec, "plan.T_policy.fixed must be positive");
    }
    if (has_method(plan, MethodKind::Regularized)) {
        for (double R : plan.R_values) (void)T_for(plan, R);
    }

    const bool needs_closed_form = plan.reference.kind == ReferencePolicy::Kind::ClosedForm ||
                                   plan.reference.naive_closed_form || has_method(plan, MethodKind::ExactDirichlet);
    if (needs_closed_form && !plan_solution(plan)) {
        fail(ErrorCode::InvalidSpec, "plan needs a closed-form solution for its reference or exact_dirichlet rows");
    }
    if (plan.reference.kind == ReferencePolicy::Kind::RegularizedAtRmax) {
        const double Rr = reference_side(plan);
        if (Rr < plan.R_values.back()) fail(ErrorCode::InvalidGeometry, "plan.reference.R must be >= every R");
        const std::int64_t nref = nodes_per_axis({plan.dim, Rr, plan.nodes_per_unit});
        for (double R : plan.R_values) {
            if ((nref - nodes_per_axis({plan.dim, R, plan.nodes_per_unit})) % 2 != 0) {
                fail(ErrorCode::NotNested, with_R(R, "grid does not nest in the reference grid"));
            }
        }
        (void)T_for(plan, Rr);
    }
}

const FitEntry* ErrorReport::find_fit(const std::string& method, FitModel model, const std::string& against) const
{
    for (const auto& f : fits) {
        if (f.method == method && f.model == model && f.against == against) return &f;
    }
    return nullptr;
}

FitResult fit_decay(std::span<const double> xs, std::span<const double> errs, FitModel model)
{
    if (xs.size() != errs.size()) throw Error(ErrorCode::DimMismatch, "fit abscissae and errors differ in length");
    if (xs.size() < 4) throw Error(ErrorCode::DegenerateFit, "a fit needs at least 4 points");
    std::vector<double> x(xs.size()), y(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(errs[i] > 0.0) || !std::isfinite(errs[i])) throw Error(ErrorCode::DegenerateFit, "fit errors must be positive");
        if (model == FitModel::PowerLaw && !(xs[i] > 0.0)) throw Error(ErrorCode::DegenerateFit, "power-law abscissae must be positive");
        x[i] = model == FitModel::PowerLaw ? std::log(xs[i]) : xs[i];
        y[i] = std::log(errs[i]);
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 1e-300)) throw Error(ErrorCode::DegenerateFit, "fit abscissae are constant");
    FitResult f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Reference {
    std::optional<SolutionSpec> closed_form;
    std::optional<GridFunction> regularized;
    double T = 0.0;
};

double window_error(const GridFunction& u, const GridFunction& ref, double L)
{
    GridFunction diff(u.grid);
    for (std::size_t j = 0; j < diff.values.size(); ++j) diff.values[j] = u.values[j] - ref.values[j];
    return l2_norm(restrict_window(diff, L));
}

GridFunction reference_on(const Reference& ref, const Grid& grid, bool closed_form)
{
    if (closed_form || !ref.regularized) return sample(*ref.closed_form, grid);
    return align_onto(*ref.regularized, grid);
}

Reference build_reference(const ExperimentPlan& plan)
{
    Reference ref;
    ref.closed_form = plan_solution(plan);
    if (plan.reference.kind == ReferencePolicy::Kind::RegularizedAtRmax) {
        const double Rr = reference_side(plan);
        ref.T = T_for(plan, Rr);
        try {
            const Grid grid = build_grid({plan.dim, Rr, plan.nodes_per_unit});
            const DiscreteOperator op = assemble(grid, plan.coefficient);
            const GridFunction g = source_values(plan.source, plan.coefficient, grid);
            const auto b = apply_bc(op, bc::HomogeneousDirichlet{}, g);
            const RegularizedInterior reg = regularized_interior(op, b, ref.T, plan.solver, plan.expm);
            ref.regularized = from_interior(grid, reg.u);
        } catch (const Error& e) {
            throw Error(e.code(), with_R(Rr, std::string("reference solve: ") + e.what()));
        }
    }
    return ref;
}

ReportRow run_row(const ExperimentPlan& plan, const Reference& ref, double R, MethodKind m)
{
    const auto start = Clock::now();
    ReportRow row;
    row.experiment_id = plan.id;
    row.R = R;
    row.L = plan.window(R);
    row.method = to_string(m);

    const Grid grid = build_grid({plan.dim, R, plan.nodes_per_unit});
    GridFunction u(grid);
    if (m == MethodKind::ExactDirichlet) {
        SolveRequest req{grid.spec(), plan.coefficient, plan.source, method::ExactDirichlet{*ref.closed_form},
                         plan.solver, plan.expm};
        SolveResult res = exact_dirichlet_solve(req);
        u = std::move(res.u);
        row.iterations = res.stats.iterations;
        row.residual = res.stats.final_relative_residual;
    } else {
        const DiscreteOperator op = assemble(grid, plan.coefficient);
        const GridFunction g = source_values(plan.source, plan.coefficient, grid);
        const auto b = apply_bc(op, bc::HomogeneousDirichlet{}, g);
        if (m == MethodKind::Naive) {
            const LinearSolution sol = cg_solve(op, b, plan.solver);
            u = from_interior(grid, sol.x);
            row.iterations = sol.stats.iterations;
            row.residual = sol.stats.final_relative_residual;
        } else {
            row.T = T_for(plan, R);
            const RegularizedInterior reg = regularized_interior(op, b, *row.T, plan.solver, plan.expm);
            u = from_interior(grid, reg.u);
            row.iterations = reg.stats.iterations;
            row.residual = reg.stats.final_relative_residual;
        }
    }

    const bool closed = plan.reference.kind == ReferencePolicy::Kind::ClosedForm ||
                        (m == MethodKind::Naive && plan.reference.naive_closed_form) || m == MethodKind::ExactDirichlet;
    row.error = window_error(u, reference_on(ref, grid, closed), row.L);
    row.is_reference = !closed && plan.reference.kind == ReferencePolicy::Kind::RegularizedAtRmax &&
                       m == MethodKind::Regularized && std::abs(R - reference_side(plan)) <= 1e-12 * R &&
                       row.T && std::abs(*row.T - ref.T) <= 1e-15 * ref.T;
    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return row;
}

void add_fits(ErrorReport& rep, const std::string& method, const std::vector<double>& xs, const std::vector<double>& errs,
              const std::string& against)
{
    if (xs.size() < 4) return;
    for (FitModel model : {FitModel::PowerLaw, FitModel::Exponential}) {
        if (std::any_of(errs.begin(), errs.end(), [](double e) { return !(e > 0.0); })) return;
        rep.fits.push_back({method, model, against, fit_decay(xs, errs, model), static_cast<std::int64_t>(xs.size())});
    }
}

void fit_rows(ErrorReport& rep, const ExperimentPlan& plan, bool against_T)
{
    for (MethodKind m : plan.methods) {
        const std::string name = to_string(m);
        std::vector<double> Rs, Ts, errs;
        for (const auto& row : rep.rows) {
            if (row.method != name || row.is_reference) continue;
            Rs.push_back(row.R);
            if (row.T) Ts.push_back(*row.T);
            errs.push_back(row.error);
        }
        add_fits(rep, name, Rs, errs, "R");
        if (against_T && Ts.size() == errs.size()) add_fits(rep, name, Ts, errs, "T");
    }
}

ErrorReport run_plan_impl(const ExperimentPlan& plan, bool against_T)
{
    validate(plan);
    const Reference ref = build_reference(plan);

    struct Job {
        double R;
        MethodKind m;
    };
    std::vector<Job> jobs;
    for (double R : plan.R_values) {
        for (MethodKind m : plan.methods) jobs.push_back({R, m});
    }
    const double Rmax = plan.R_values.back();
    std::vector<std::optional<ReportRow>> results(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_row(plan, ref, jobs[i].R, jobs[i].m);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const auto nworkers = std::min<std::size_t>(static_cast<std::size_t>(plan.threads), jobs.size());
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < nworkers; ++t) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const Error& e) {
            throw Error(e.code(), with_R(jobs[i].R, std::string(to_string(jobs[i].m)) + ": " + e.what()));
        }
    }

    ErrorReport rep;
    rep.experiment_id = plan.id;
    for (auto& r : results) rep.rows.push_back(*r);
    fit_rows(rep, plan, against_T);

    const ReportRow* naive = nullptr;
    const ReportRow* regularized = nullptr;
    for (const auto& r : rep.rows) {
        if (r.R != Rmax) continue;
        if (r.method == to_string(MethodKind::Naive)) naive = &r;
        if (r.method == to_string(MethodKind::Regularized)) regularized = &r;
    }
    if (naive != nullptr && regularized != nullptr && !regularized->is_reference) {
        const bool regularized_ref = plan.reference.kind == ReferencePolicy::Kind::RegularizedAtRmax;
        std::string label = regularized_ref ? "regularized_at_rmax" : "closed_form";
        if (regularized_ref && plan.reference.naive_closed_form) label = "naive: closed_form, regularized: regularized_at_rmax";
        rep.headline = Headline{Rmax, regularized->error, naive->error, label};
    }
    return rep;
}

} // namespace

ErrorReport run_plan(const ExperimentPlan& plan)
{
    return run_plan_impl(plan, false);
}

ErrorReport boundary_error_isolate(const ExperimentPlan& plan)
{
    if (plan.T_policy.kind != TPolicy::Kind::Fixed && plan.T_policy.kind != TPolicy::Kind::ReferenceRule) {
        throw Error(ErrorCode::InvalidSpec, "boundary isolation needs one T shared by every row");
    }
    if (plan.reference.kind != ReferencePolicy::Kind::RegularizedAtRmax) {
        throw Error(ErrorCode::InvalidSpec, "boundary isolation needs a regularized reference");
    }
    return run_plan_impl(plan, false);
}

ErrorReport modelling_error_isolate(const ExperimentPlan& plan)
{
    if (plan.reference.kind != ReferencePolicy::Kind::ClosedForm) {
        throw Error(ErrorCode::InvalidSpec, "modelling isolation needs a closed-form reference");
    }
    const auto sol = plan_solution(plan);
    if (!sol) throw Error(ErrorCode::InvalidSpec, "modelling isolation needs a closed-form solution");
    // The solution must vanish on every wall of the sweep, so that the zero Dirichlet data is exact.
    for (double R : plan.R_values) {
        const Grid grid = build_grid({plan.dim, R, plan.nodes_per_unit});
        const GridFunction s = sample(*sol, grid);
        double wall = 0.0, peak = 0.0;
        for (std::int64_t j = 0; j < grid.num_nodes(); ++j) {
            const double v = std::abs(s.values[static_cast<std::size_t>(j)]);
            peak = std::max(peak, v);
            if (grid.is_boundary(j)) wall = std::max(wall, v);
        }
        if (wall > 1e-12 * std::max(peak, 1.0)) {
            throw Error(ErrorCode::InvalidSpec, with_R(R, "solution does not vanish on the walls"));
        }
    }
    return run_plan_impl(plan, true);
}

ErrorReport run_experiment(const ExperimentPlan& plan)
{
    if (plan.id == "E-boundary") return boundary_error_isolate(plan);
    if (plan.id == "E-modelling") return modelling_error_isolate(plan);
    return run_plan(plan);
}

std::vector<double> modelling_sweep_T(const DiscreteOperator& op, std::span<const double> g, std::span<const double> Ts,
                                      double L, const SolverConfig& solver, const ExpmConfig& expm)
{
    std::vector<double> out;
    out.reserve(Ts.size());
    for (double T : Ts) {
        const std::vector<double> w = expm_apply(op, g, T, expm);
        const LinearSolution e = cg_solve(op, w, solver);
        const GridFunction ef = from_interior(op.grid(), e.x);
        out.push_back(L > 0.0 ? l2_norm(restrict_window(ef, L)) : l2_norm(ef));
    }
    return out;
}

} // namespace expreg
