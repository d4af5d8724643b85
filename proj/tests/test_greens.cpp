#include "expreg/dense.hpp"
#include "expreg/error.hpp"
#include "expreg/greens.hpp"

#include <doctest.h>

#include <cmath>

using namespace expreg;

TEST_CASE("1d discrete Green's function is exact at the nodes")
{
    const double R = 1.0;
    const Grid g = build_grid({1, R, 20});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    const double y[] = {0.2};
    const GreensProbe p = elliptic_green(op, interior_node_at(g, y), {1e-14, 0, Preconditioner::Jacobi});
    const double s = y[0] + R / 2;
    for (std::int64_t i = 0; i < g.n(); ++i) {
        const double t = g.coord(i) + R / 2;
        const double expect = t <= s ? t * (R - s) / R : s * (R - t) / R;
        CHECK(p.values.values[static_cast<std::size_t>(i)] == doctest::Approx(expect).scale(1.0).epsilon(1e-12));
    }
}

TEST_CASE("positivity and symmetry of the elliptic probe")
{
    const Grid g = build_grid({2, 2.0, 10});
    const DiscreteOperator op = assemble(g, coeff::RadialBump{});
    const double y1[] = {0.3, -0.2}, y2[] = {-0.5, 0.4};
    const std::int64_t j1 = interior_node_at(g, y1), j2 = interior_node_at(g, y2);
    const GreensProbe p1 = elliptic_green(op, j1), p2 = elliptic_green(op, j2);
    for (double v : p1.values.values) CHECK(v >= -1e-10);
    const double a = p1.values.values[static_cast<std::size_t>(j2)], b = p2.values.values[static_cast<std::size_t>(j1)];
    CHECK(std::abs(a - b) <= 1e-10 * std::abs(a));
}

TEST_CASE("source points must be interior nodes")
{
    const Grid g = build_grid({2, 2.0, 10});
    const double off[] = {0.05, 0.0}, wall[] = {1.0, 0.0}, wrong[] = {0.0};
    CHECK_THROWS_AS(interior_node_at(g, off), Error);
    CHECK_THROWS_AS(interior_node_at(g, wall), Error);
    CHECK_THROWS_AS(interior_node_at(g, wrong), Error);
}

TEST_CASE("domain monotonicity")
{
    const double y[] = {0.0, 0.0};
    const OrderingReport same = ordering_check(2, coeff::RadialBump{}, y, 2.0, 2.0, 10);
    CHECK(same.max_violation == doctest::Approx(0.0).scale(1e-12));
    const OrderingReport r24 = ordering_check(2, coeff::RadialBump{}, y, 2.0, 4.0, 10);
    CHECK(r24.max_violation <= 1e-8);
    CHECK(r24.pass);
    const OrderingReport r26 = ordering_check(2, coeff::RadialBump{}, y, 2.0, 6.0, 10);
    CHECK(r26.max_violation <= r24.max_violation + 1e-12);
    CHECK_THROWS_AS(ordering_check(2, CoefficientSpec{}, y, 4.0, 2.0, 10), Error);
}

TEST_CASE("heat probe against the dense eigen-sum")
{
    const Grid g = build_grid({1, 2.0, 20});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    const double y[] = {0.25};
    const std::int64_t j = interior_node_at(g, y);
    const double t = 0.03;
    const GreensProbe p = heat_kernel_probe(op, j, t, {30, 1e-12});
    const auto ref = expm_dense(op, discrete_delta(g, j), t);
    for (std::int64_t k = 0; k < g.num_interior(); ++k) {
        CHECK(p.values.values[static_cast<std::size_t>(g.interior_to_flat(k))] ==
              doctest::Approx(ref[static_cast<std::size_t>(k)]).scale(1e-9));
    }
}

TEST_CASE("heat probe mass is sub-Markov and nonincreasing")
{
    const Grid g = build_grid({2, 2.0, 12});
    const DiscreteOperator op = assemble(g, coeff::RadialBump{});
    const double y[] = {0.0, 0.0};
    const std::int64_t j = interior_node_at(g, y);
    double prev = 1.0 + 1e-8;
    for (double t : {0.001, 0.01, 0.05, 0.2}) {
        const double m = probe_mass(heat_kernel_probe(op, j, t));
        CHECK(m <= 1.0 + 1e-8);
        CHECK(m <= prev);
        prev = m;
    }
}

TEST_CASE("heat envelope slope for a constant coefficient")
{
    for (double c : {1.0, 2.0}) {
        const Grid g = build_grid({2, 4.0, 16});
        const DiscreteOperator op = assemble(g, coeff::Constant{c});
        const double y[] = {0.0, 0.0};
        const GreensProbe p = heat_kernel_probe(op, interior_node_at(g, y), 0.05, {40, 1e-10});
        const DecayFit f = heat_envelope_fit(p, 1e-6);
        CHECK(-f.exponent == doctest::Approx(1.0 / c).epsilon(0.2));
    }
}

TEST_CASE("decay fit needs enough points")
{
    const Grid g = build_grid({3, 1.0, 8});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    const double y[] = {0.0, 0.0, 0.0};
    const GreensProbe p = elliptic_green(op, interior_node_at(g, y));
    CHECK_THROWS_AS(elliptic_decay_fit(p), Error);
    CHECK_THROWS_AS(heat_envelope_fit(p), Error);
}

TEST_CASE("3d elliptic decay exponent is near -1")
{
    const Grid g = build_grid({3, 4.0, 10});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    const double y[] = {0.0, 0.0, 0.0};
    const GreensProbe p = elliptic_green(op, interior_node_at(g, y), {1e-10, 0, Preconditioner::Jacobi});
    const DecayFit f = elliptic_decay_fit(p, 3.0 * g.h(), 1.0);
    CHECK(f.exponent < -0.7);
    CHECK(f.exponent > -1.4);
}
