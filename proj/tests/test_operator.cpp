#include "expreg/dense.hpp"
#include "expreg/operator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace expreg;

namespace {

std::vector<double> random_vector(std::size_t n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

} // namespace

TEST_CASE("1d and 2d Laplacian stencils")
{
    const Grid g1 = build_grid({1, 1.0, 8});
    const Eigen::MatrixXd A1 = to_dense(assemble(g1, CoefficientSpec{}));
    const double s1 = 1.0 / (g1.h() * g1.h());
    for (Eigen::Index i = 0; i < A1.rows(); ++i) {
        CHECK(A1(i, i) == doctest::Approx(2.0 * s1));
        if (i + 1 < A1.rows()) CHECK(A1(i, i + 1) == doctest::Approx(-s1));
    }

    const Grid g2 = build_grid({2, 1.0, 8});
    const Eigen::MatrixXd A2 = to_dense(assemble(g2, CoefficientSpec{}));
    const double s2 = 1.0 / (g2.h() * g2.h());
    const Eigen::Index c = 3 * 7 + 3;
    CHECK(A2(c, c) == doctest::Approx(4.0 * s2));
    CHECK(A2(c, c + 1) == doctest::Approx(-s2));
    CHECK(A2(c, c - 1) == doctest::Approx(-s2));
    CHECK(A2(c, c + 7) == doctest::Approx(-s2));
    CHECK(A2(c, c - 7) == doctest::Approx(-s2));
    CHECK(A2.row(c).sum() == doctest::Approx(0.0).scale(s2));
}

TEST_CASE("edge-midpoint sampling by hand")
{
    const Grid g = build_grid({1, 1.0, 2});
    const coeff::Custom a{[](std::span<const double> x) { return x[0] + 2.0; }, 1.5, 2.5, "affine"};
    const DiscreteOperator op = assemble(g, a);
    REQUIRE(op.size() == 1);
    CHECK(op.diagonal()[0] == doctest::Approx(16.0));
}

TEST_CASE("FD eigenpairs")
{
    const double R = 1.0;
    const Grid g = build_grid({1, R, 32});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    const double h = g.h();
    for (int k : {1, 3, 7}) {
        std::vector<double> v(static_cast<std::size_t>(op.size()));
        for (std::int64_t i = 0; i < op.size(); ++i) {
            v[static_cast<std::size_t>(i)] = std::sin(k * M_PI * (g.coord(i + 1) + R / 2) / R);
        }
        const double lambda = 4.0 / (h * h) * std::pow(std::sin(k * M_PI * h / (2.0 * R)), 2);
        const std::vector<double> Av = op.apply(v);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(Av[i] == doctest::Approx(lambda * v[i]).scale(lambda));
    }
}

TEST_CASE("symmetry, sign pattern and positive definiteness")
{
    for (const CoefficientSpec& a : {CoefficientSpec{}, CoefficientSpec(coeff::RadialBump{}),
                                     CoefficientSpec(coeff::QuasiPeriodic{}), CoefficientSpec(coeff::Periodic{0.25})}) {
        const DiscreteOperator op = assemble(build_grid({2, 2.0, 8}), a);
        const auto u = random_vector(static_cast<std::size_t>(op.size()), 1);
        const auto v = random_vector(static_cast<std::size_t>(op.size()), 2);
        const double lhs = op.inner(op.apply(u), v);
        const double rhs = op.inner(u, op.apply(v));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));

        const Eigen::MatrixXd A = to_dense(op);
        CHECK((A - A.transpose()).norm() <= 1e-12 * A.norm());
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            CHECK(A(i, i) > 0.0);
            for (Eigen::Index j = 0; j < A.cols(); ++j) {
                if (i != j) CHECK(A(i, j) <= 0.0);
            }
        }
        const DenseSpectrum s = dense_spectrum(op);
        CHECK(s.eigenvalues[0] > 0.0);
        CHECK(s.eigenvalues[s.eigenvalues.size() - 1] <= op.gershgorin_bound() * (1.0 + 1e-12));
    }
}

TEST_CASE("3d operator matches its dense form")
{
    const DiscreteOperator op = assemble(build_grid({3, 1.0, 6}), coeff::RadialBump{});
    const auto u = random_vector(static_cast<std::size_t>(op.size()), 3);
    const Eigen::MatrixXd A = to_dense(op);
    const Eigen::VectorXd ref = A * Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
    const auto out = op.apply(u);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(out[i] == doctest::Approx(ref[static_cast<Eigen::Index>(i)]));
}

TEST_CASE("flipped off-diagonals break the M-matrix pattern")
{
    const DiscreteOperator op = assemble(build_grid({1, 1.0, 8}), CoefficientSpec{});
    const Eigen::MatrixXd A = to_dense(op.with_flipped_offdiagonal());
    CHECK(A(0, 1) > 0.0);
}

TEST_CASE("apply_bc")
{
    const Grid g = build_grid({1, 1.0, 2});
    const DiscreteOperator op = assemble(g, CoefficientSpec{});
    GridFunction rhs(g);
    rhs.values = {5.0, 7.0, 9.0};
    CHECK(apply_bc(op, bc::HomogeneousDirichlet{}, rhs) == std::vector<double>{7.0});
    GridFunction data(g, {1.0, 0.0, 1.0});
    CHECK(apply_bc(op, bc::DirichletData{data}, GridFunction(g)) == std::vector<double>{8.0});
}

TEST_CASE("Dirichlet data from an exact solution reproduces it")
{
    const Grid g = build_grid({2, 1.5, 10});
    const CoefficientSpec a = coeff::RadialBump{};
    const SolutionSpec u = solution::Sine2DBump{};
    const DiscreteOperator op = assemble(g, a);
    const GridFunction exact = sample(u, g);
    const auto b = apply_bc(op, bc::DirichletData{exact}, stencil_source(u, a, g));
    const auto x = dense_solve(op, b);
    const auto ref = interior_values(exact);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(ref[i]).scale(1.0).epsilon(1e-11));
}
