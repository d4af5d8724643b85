#include "expreg/verify.hpp"

#include "expreg/dense.hpp"
#include "expreg/expm.hpp"
#include "expreg/greens.hpp"
#include "expreg/regsolve.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>

namespace expreg {

bool VerifyReport::all_pass() const
{
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return !checks.empty();
}

namespace {

double rel_diff(std::span<const double> a, std::span<const double> b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

std::vector<double> random_vector(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    return v;
}

VerifyCheck guarded(const std::string& name, double tol, const std::function<double()>& measure)
{
    VerifyCheck c{name, false, 0.0, tol, {}};
    try {
        c.value = measure();
        c.pass = c.value <= tol;
    } catch (const std::exception& e) {
        c.detail = e.what();
        c.value = std::numeric_limits<double>::quiet_NaN();
    }
    return c;
}

} // namespace

VerifyReport run_verify(const VerifyOptions& opts)
{
    const auto start = std::chrono::steady_clock::now();
    VerifyReport rep;

    const Grid grid = build_grid({2, 1.0, 10});
    const CoefficientSpec bump = coeff::RadialBump{};
    DiscreteOperator op = assemble(grid, bump);
    if (opts.flip_offdiagonal) op = op.with_flipped_offdiagonal();
    const auto n = static_cast<std::size_t>(op.size());
    const std::vector<double> g = random_vector(n, 7);

    rep.checks.push_back(guarded("operator symmetry", 1e-13, [&] {
        const Eigen::MatrixXd A = to_dense(op);
        return (A - A.transpose()).cwiseAbs().maxCoeff() / A.cwiseAbs().maxCoeff();
    }));

    rep.checks.push_back(guarded("M-matrix sign pattern", 0.0, [&] {
        const Eigen::MatrixXd A = to_dense(op);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            if (!(A(i, i) > 0.0)) worst = std::max(worst, 1.0);
            for (Eigen::Index j = 0; j < A.cols(); ++j) {
                if (i != j) worst = std::max(worst, A(i, j));
            }
        }
        return worst;
    }));

    rep.checks.push_back(guarded("Green positivity", 1e-10, [&] {
        const GreensProbe p = elliptic_green(op, grid.flatten({0, grid.n() / 2, grid.n() / 2}));
        double peak = 0.0, low = 0.0;
        for (double v : p.values.values) {
            peak = std::max(peak, v);
            low = std::min(low, v);
        }
        return -low / peak;
    }));

    rep.checks.push_back(guarded("expm vs dense", 1e-8, [&] {
        double worst = 0.0;
        for (double T : {1e-3, 0.05, 0.5}) {
            const auto y = expm_apply(op, g, T, {40, 1e-11, 10000});
            worst = std::max(worst, rel_diff(y, expm_dense(op, g, T)));
        }
        return worst;
    }));

    const double T = 0.02;
    const std::vector<double> smooth = interior_values(source_values(source::Gaussian{0.15, 1.0}, bump, grid));
    const ParabolicTrace tr = parabolic_integrate(op, smooth, T, 400);

    rep.checks.push_back(guarded("elliptic vs parabolic identity", 1e-5, [&] {
        const RegularizedInterior reg = regularized_interior(op, smooth, T, {1e-12, 0, Preconditioner::Jacobi}, {40, 1e-11, 10000});
        return rel_diff(tr.u_T, reg.u);
    }));

    rep.checks.push_back(guarded("energy monotonicity", 0.0, [&] {
        double worst = 0.0;
        for (std::size_t k = 1; k < tr.energy_history.size(); ++k) {
            worst = std::max(worst, tr.energy_history[k] - tr.energy_history[k - 1]);
        }
        return worst;
    }));

    rep.checks.push_back(guarded("dissipation bound", 1.05, [&] {
        const double g2 = op.inner(smooth, smooth);
        return tr.dissipation / (0.5 * g2);
    }));

    rep.checks.push_back(guarded("Green ordering", 1e-8, [&] {
        const std::vector<double> y{0.0, 0.0};
        const OrderingReport o = ordering_check(2, bump, y, 1.0, 2.0, 10);
        return std::max(o.max_violation, 0.0);
    }));

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace expreg
