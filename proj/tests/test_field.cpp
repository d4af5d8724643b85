#include "expreg/error.hpp"
#include "expreg/field.hpp"
#include "expreg/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace expreg;

TEST_CASE("coefficient catalog values")
{
    const double o2[] = {0.0, 0.0};
    CHECK(CoefficientSpec(coeff::Constant{2.5})(o2) == 2.5);
    CHECK(CoefficientSpec(coeff::RadialBump{})(o2) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(CoefficientSpec(coeff::QuasiPeriodic{})(o2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(CoefficientSpec(coeff::Periodic{0.1})(o2) == doctest::Approx(3.0));

    const Grid g = build_grid({2, 2.0, 4});
    for (double v : sample(CoefficientSpec{}, g).values) CHECK(v == 1.0);
}

TEST_CASE("coefficient bounds from sampling stay inside the closed-form bounds")
{
    const Grid probe = build_grid({2, 20.0, 20});
    const CoefficientBounds c = coefficient_bounds(coeff::Constant{3.0}, probe);
    CHECK(c.alpha == 3.0);
    CHECK(c.beta == 3.0);

    const CoefficientSpec rb = coeff::RadialBump{};
    const CoefficientBounds b = coefficient_bounds(rb, probe);
    CHECK(b.beta == doctest::Approx(std::exp(1.0)).epsilon(0.01));
    CHECK(b.alpha == doctest::Approx(1.0).epsilon(0.01));
    CHECK(b.alpha >= rb.alpha(2));
    CHECK(b.beta <= rb.beta(2));

    const CoefficientSpec qp = coeff::QuasiPeriodic{};
    const CoefficientBounds q = coefficient_bounds(qp, probe);
    CHECK(q.alpha >= qp.alpha(2));
    CHECK(q.beta <= qp.beta(2));
    CHECK(q.alpha < 0.25 * std::exp(-3.0));
    CHECK(q.beta > 0.25 * std::exp(3.0));
}

TEST_CASE("solution catalog")
{
    const double o3[] = {0.0, 0.0, 0.0};
    CHECK(SolutionSpec(solution::Sine3DBump{})(o3) == 0.0);
    CHECK(SolutionSpec(solution::Bump{})(o3) == doctest::Approx(std::exp(1.0) - 1.0));
    const double p[] = {0.25, 0.05};
    CHECK(SolutionSpec(solution::HighFreq2DBump{})(p) ==
          doctest::Approx(std::sin(2.5 * M_PI) * std::sin(0.5 * M_PI) * (std::exp(1.0 / (1.0 + 0.065)) - 1.0)));
    const double far[] = {50.0, 0.3};
    CHECK(std::abs(SolutionSpec(solution::Sine2DBump{})(far)) < 1e-3);
}

TEST_CASE("stencil_source of zero is zero")
{
    const Grid g = build_grid({2, 2.0, 8});
    for (double v : stencil_source(solution::Zero{}, coeff::RadialBump{}, g).values) CHECK(v == 0.0);
}

TEST_CASE("stencil_source is the second difference for a = 1")
{
    const Grid g = build_grid({1, 1.0, 20});
    const double h = g.h();
    const SolutionSpec cosine = solution::Cosine{M_PI};
    const GridFunction s = stencil_source(cosine, CoefficientSpec{}, g);
    for (std::int64_t i = 0; i < g.n(); ++i) {
        const double x = g.coord(i);
        const double expect = (2.0 * std::cos(M_PI * x) - std::cos(M_PI * (x - h)) - std::cos(M_PI * (x + h))) / (h * h);
        CHECK(s.values[static_cast<std::size_t>(i)] == doctest::Approx(expect).epsilon(1e-10));
        CHECK(s.values[static_cast<std::size_t>(i)] == doctest::Approx(M_PI * M_PI * std::cos(M_PI * x)).epsilon(2e-3));
    }
}

TEST_CASE("stencil_source coincides on nested grids")
{
    const Grid small = build_grid({2, 2.0, 10});
    const Grid big = build_grid({2, 4.0, 10});
    const SolutionSpec u = solution::Sine2DBump{};
    const GridFunction gs = stencil_source(u, coeff::RadialBump{}, small);
    const GridFunction gb = align_onto(stencil_source(u, coeff::RadialBump{}, big), small);
    CHECK(gs.values == gb.values);
}

TEST_CASE("grid-valued sources are aligned")
{
    const Grid big = build_grid({1, 2.0, 4});
    const Grid small = build_grid({1, 1.0, 4});
    GridFunction v(big);
    for (std::int64_t i = 0; i < big.n(); ++i) v.values[static_cast<std::size_t>(i)] = big.coord(i);
    const GridFunction s = source_values(source::GridValues{v}, CoefficientSpec{}, small);
    for (std::int64_t i = 0; i < small.n(); ++i) CHECK(s.values[static_cast<std::size_t>(i)] == small.coord(i));
    CHECK_THROWS_AS(source_values(source::GridValues{GridFunction(small)}, CoefficientSpec{}, big), Error);
}
