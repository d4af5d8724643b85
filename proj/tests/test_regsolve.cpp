#include "expreg/dense.hpp"
#include "expreg/error.hpp"
#include "expreg/regsolve.hpp"

#include <doctest.h>

#include <cmath>

using namespace expreg;

namespace {

double max_abs_diff(const GridFunction& a, const GridFunction& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

double rel_l2(std::span<const double> a, std::span<const double> b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

} // namespace

TEST_CASE("choose_T")
{
    CHECK(choose_T(15.0, 10.0, 1.0, 1.0) == doctest::Approx(5.0 / (2.0 * M_PI)).epsilon(1e-14));
    CHECK(choose_T(15.0, 10.0, 4.0, 4.0) == doctest::Approx(0.25 * choose_T(15.0, 10.0, 1.0, 1.0)));
    const double R = 6.0;
    CHECK(choose_T(R, 2.0 * R / 3.0, 2.0, 8.0) == doctest::Approx(R / (6.0 * M_PI * 4.0)));
    CHECK_THROWS_AS(choose_T(1.0, 1.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(choose_T(1.0, 0.0, 1.0, 1.0), Error);
    CHECK_THROWS_AS(choose_T(1.0, 0.5, 2.0, 1.0), Error);
    CHECK_THROWS_AS(choose_T(1.0, 0.5, 0.0, 1.0), Error);
}

TEST_CASE("zero source gives zero for every method")
{
    SolveRequest req{{2, 1.0, 8}, coeff::RadialBump{}, source::FromSolution{solution::Zero{}}, method::Naive{}, {}, {}};
    for (double v : solve(req).u.values) CHECK(v == 0.0);
    req.method = method::Regularized{0.1};
    for (double v : solve(req).u.values) CHECK(v == 0.0);
    req.method = method::ExactDirichlet{solution::Zero{}};
    for (double v : solve(req).u.values) CHECK(v == 0.0);
}

TEST_CASE("naive solve is exact when the solution vanishes on the walls")
{
    const SolutionSpec u = solution::Cosine{M_PI};
    SolveRequest req{{1, 1.0, 40}, CoefficientSpec{}, source::FromSolution{u}, method::Naive{}, {1e-13, 0}, {}};
    const SolveResult r = solve(req);
    CHECK(max_abs_diff(r.u, sample(u, r.u.grid)) < 1e-10);

    req.grid.side = 2.0;
    req.grid.nodes_per_unit = 20;
    const SolveResult r2 = solve(req);
    const GridFunction err_window = restrict_window(r2.u, 4.0 / 3.0);
    CHECK(max_abs_diff(err_window, restrict_window(sample(u, r2.u.grid), 4.0 / 3.0)) > 0.1);
}

TEST_CASE("exact Dirichlet reproduces catalog solutions")
{
    const double tol = 1e-12;
    for (const SolutionSpec& u : {SolutionSpec(solution::Sine2DBump{}), SolutionSpec(solution::HighFreq2DBump{}),
                                  SolutionSpec(solution::Bump{})}) {
        SolveRequest req{{2, 2.0, 12}, coeff::RadialBump{}, source::FromSolution{u}, method::ExactDirichlet{u},
                         {tol, 0}, {}};
        const SolveResult r = solve(req);
        CHECK(max_abs_diff(r.u, sample(u, r.u.grid)) <= 100.0 * tol);
    }
}

TEST_CASE("regularized solve of an eigenvector")
{
    const Grid g = build_grid({1, 1.0, 20});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    const int k = 2;
    const double lam = 4.0 / (g.h() * g.h()) * std::pow(std::sin(k * M_PI * g.h() / 2.0), 2);
    std::vector<double> v(static_cast<std::size_t>(op.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(k * M_PI * (g.coord(static_cast<std::int64_t>(i) + 1) + 0.5));
    const double T = 0.01;
    const RegularizedInterior r = regularized_interior(op, v, T, {1e-13, 0}, {30, 1e-12});
    auto expect = v;
    for (auto& e : expect) e *= (1.0 - std::exp(-T * lam)) / lam;
    CHECK(rel_l2(r.u, expect) < 1e-10);
}

TEST_CASE("regularized solve equals the dense time integral")
{
    const DiscreteOperator op = assemble(build_grid({2, 2.0, 10}), coeff::RadialBump{});
    const GridFunction g = stencil_source(solution::Sine2DBump{}, coeff::RadialBump{}, op.grid());
    const auto b = interior_values(g);
    for (double T : {1e-3, 0.1, 1.0}) {
        const RegularizedInterior r = regularized_interior(op, b, T, {1e-13, 0}, {40, 1e-12});
        CHECK(rel_l2(r.u, time_integral_dense(op, b, T)) < 1e-9);
    }
    CHECK_THROWS_AS(regularized_interior(op, b, 0.0), Error);
}

TEST_CASE("regularized solve agrees with the Crank-Nicolson trace")
{
    const GridSpec spec{2, 2.0, 20};
    const CoefficientSpec a = coeff::RadialBump{};
    const Grid grid = build_grid(spec);
    const DiscreteOperator op = assemble(grid, a);
    const SourceSpec src = source::Gaussian{0.2, 1.0};
    const double T = 0.05;
    SolveRequest req{spec, a, src, method::Regularized{T}, {1e-13, 0}, {40, 1e-12}};
    const SolveResult r = solve(req);
    const ParabolicTrace tr = parabolic_integrate(op, interior_values(source_values(src, a, grid)), T, 2000);
    CHECK(rel_l2(interior_values(r.u), tr.u_T) <= 1e-6);
    CHECK(r.T.has_value());
}

TEST_CASE("small T gives a small solution")
{
    SolveRequest req{{2, 2.0, 10}, CoefficientSpec{}, source::Gaussian{}, method::Regularized{1e-8}, {1e-12, 0}, {}};
    const SolveResult small = solve(req);
    req.method = method::Naive{};
    const SolveResult full = solve(req);
    CHECK(l2_norm(small.u) < 1e-6 * l2_norm(full.u));
}
