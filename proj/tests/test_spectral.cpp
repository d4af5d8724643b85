#include "expreg/error.hpp"
#include "expreg/field.hpp"
#include "expreg/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace expreg;

namespace {

GridFunction sampled(const Grid& g, const PointFn& f)
{
    return sample(f, g);
}

double max_abs_diff(const GridFunction& a, const GridFunction& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace

TEST_CASE("zero cutoff removes only the mean")
{
    const Grid g = build_grid({2, 2.0, 8});
    std::mt19937 rng(1);
    std::normal_distribution<double> d;
    GridFunction u(g);
    for (auto& v : u.values) v = d(rng);
    const GridFunction f = band_filter(u, 0.0);

    double mean = 0.0;
    std::int64_t count = 0;
    for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
        const Index3 idx = g.unflatten(j);
        if (idx[1] < g.n() - 1 && idx[2] < g.n() - 1) {
            mean += u.values[static_cast<std::size_t>(j)];
            ++count;
        }
    }
    mean /= static_cast<double>(count);
    for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
        const Index3 idx = g.unflatten(j);
        if (idx[1] < g.n() - 1 && idx[2] < g.n() - 1) {
            CHECK(f.values[static_cast<std::size_t>(j)] == doctest::Approx(u.values[static_cast<std::size_t>(j)] - mean));
        }
    }
}

TEST_CASE("modes above the cutoff pass unchanged")
{
    const double R = 2.0;
    const Grid g = build_grid({1, R, 16});
    const GridFunction u = sampled(g, [&](std::span<const double> x) { return std::sin(2.0 * M_PI * 3.0 * x[0] / R); });
    const GridFunction f = band_filter(u, 2.0 * M_PI * 2.0 / R);
    CHECK(max_abs_diff(f, u) < 1e-13);
    CHECK(band_energy(u, 2.0 * M_PI * 2.0 / R) < 1e-13);

    const GridFunction low = sampled(g, [&](std::span<const double> x) { return std::cos(2.0 * M_PI * 2.0 * x[0] / R); });
    const GridFunction fl = band_filter(low, 2.0 * M_PI * 2.0 / R);
    for (double v : fl.values) CHECK(std::abs(v) < 1e-13);
}

TEST_CASE("band_filter is idempotent and removes the band energy")
{
    const Grid g = build_grid({2, 3.0, 10});
    const GridFunction u = sample(solution::Sine2DBump{}, g);
    const double w0 = 2.0 * M_PI * 2.0 / 3.0;
    const GridFunction f = band_filter(u, w0);
    CHECK(max_abs_diff(band_filter(f, w0), f) < 1e-13);
    CHECK(band_energy(f, w0) < 1e-13);
    CHECK(band_energy(u, w0) > 1e-6);
}

TEST_CASE("cutoff at or above Nyquist is rejected")
{
    const Grid g = build_grid({1, 1.0, 8});
    GridFunction u(g);
    try {
        (void)band_filter(u, M_PI / g.h());
        FAIL("expected CutoffAboveNyquist");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CutoffAboveNyquist);
    }
}

TEST_CASE("multi-index enumeration")
{
    CHECK(multi_indices(1, 2).size() == 3u);
    CHECK(multi_indices(2, 1).size() == 3u);
    CHECK(multi_indices(2, 2).size() == 6u);
    CHECK(multi_indices(3, 2).size() == 10u);
    const auto m = multi_indices(2, 1);
    CHECK(m[0] == std::array<int, 3>{0, 0, 0});
}

TEST_CASE("moments by direct summation")
{
    const Grid g = build_grid({1, 2.0, 10});
    for (const auto& mo : moments(GridFunction(g), 2)) CHECK(mo.value == 0.0);
    const GridFunction one(g, std::vector<double>(static_cast<std::size_t>(g.num_nodes()), 1.0));
    CHECK(moments(one, 0)[0].value == doctest::Approx(2.0 + g.h()));

    const Grid g2 = build_grid({2, 2.0, 10});
    const GridFunction odd = sampled(g2, [](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); });
    const auto m = moments(odd, 1);
    CHECK(std::abs(m[0].value) < 1e-15);
    CHECK(m[1].value > 0.1);
}

TEST_CASE("remove_moments")
{
    SUBCASE("moment-free input is unchanged")
    {
        const Grid g = build_grid({1, 4.0, 20});
        const GridFunction odd = sampled(g, [](std::span<const double> x) { return x[0] * std::exp(-x[0] * x[0]); });
        CHECK(max_abs_diff(remove_moments(odd, 0), odd) < 1e-12);
    }
    SUBCASE("gaussian, k = 0, d = 1")
    {
        const Grid g = build_grid({1, 4.0, 20});
        const GridFunction gs = source_values(source::Gaussian{0.3, 1.0}, CoefficientSpec{}, g);
        CHECK(std::abs(moments(remove_moments(gs, 0), 0)[0].value) < 1e-12);
    }
    SUBCASE("every moment up to k = 2 vanishes in d = 1, 2")
    {
        for (int d : {1, 2}) {
            const Grid g = build_grid({d, 4.0, 12});
            const GridFunction u = sampled(g, [](std::span<const double> x) {
                double r2 = 0.0, s = 1.0;
                for (double c : x) {
                    r2 += (c - 0.3) * (c - 0.3);
                    s += 0.5 * c;
                }
                return s * std::exp(-r2);
            });
            for (int k = 0; k <= 2; ++k) {
                const GridFunction out = remove_moments(u, k);
                for (const auto& mo : moments(out, k)) CHECK(std::abs(mo.value) <= 1e-10 * l2_norm(u));
            }
        }
    }
}
