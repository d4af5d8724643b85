#include "expreg/field.hpp"

#include "expreg/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace expreg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double pi = std::numbers::pi;

double squared_norm(std::span<const double> x)
{
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return r2;
}

// exp(1/(|x|^2+1)) - 1, written with expm1 to keep the far field accurate.
double bump_minus_one(std::span<const double> x)
{
    return std::expm1(1.0 / (squared_norm(x) + 1.0));
}

} // namespace

CoefficientSpec::CoefficientSpec(Variant v) : v_(std::move(v))
{
    std::visit(overloaded{
                   [](const coeff::Constant& c) {
                       if (!(c.value > 0.0)) throw Error(ErrorCode::InvalidSpec, "constant coefficient must be positive");
                   },
                   [](const coeff::Periodic& p) {
                       if (!(p.epsilon > 0.0)) throw Error(ErrorCode::InvalidSpec, "periodic epsilon must be positive");
                   },
                   [](const coeff::Custom& c) {
                       if (!c.fn) throw Error(ErrorCode::InvalidSpec, "custom coefficient without a function");
                       if (!(c.alpha > 0.0) || c.beta < c.alpha) {
                           throw Error(ErrorCode::InvalidSpec, "custom coefficient needs 0 < alpha <= beta");
                       }
                   },
                   [](const auto&) {},
               },
               v_);
}

double CoefficientSpec::operator()(std::span<const double> x) const
{
    return std::visit(overloaded{
                          [](const coeff::Constant& c) { return c.value; },
                          [&](const coeff::RadialBump&) { return std::exp(1.0 / (squared_norm(x) + 1.0)); },
                          [&](const coeff::QuasiPeriodic&) {
                              double s = 0.0;
                              for (double xi : x) s += std::sin(2.0 * std::numbers::sqrt2 * pi * xi) + std::sin(2.0 * pi * xi);
                              return 0.25 * std::exp(s);
                          },
                          [&](const coeff::Periodic& p) {
                              double prod = 1.0;
                              for (double xi : x) prod *= std::cos(2.0 * pi * xi / p.epsilon);
                              return 2.0 + prod;
                          },
                          [&](const coeff::Custom& c) { return c.fn(x); },
                      },
                      v_);
}

double CoefficientSpec::alpha(int dim) const
{
    return std::visit(overloaded{
                          [](const coeff::Constant& c) { return c.value; },
                          [](const coeff::RadialBump&) { return 1.0; },
                          [&](const coeff::QuasiPeriodic&) { return 0.25 * std::exp(-2.0 * dim); },
                          [](const coeff::Periodic&) { return 1.0; },
                          [](const coeff::Custom& c) { return c.alpha; },
                      },
                      v_);
}

double CoefficientSpec::beta(int dim) const
{
    return std::visit(overloaded{
                          [](const coeff::Constant& c) { return c.value; },
                          [](const coeff::RadialBump&) { return std::numbers::e; },
                          [&](const coeff::QuasiPeriodic&) { return 0.25 * std::exp(2.0 * dim); },
                          [](const coeff::Periodic&) { return 3.0; },
                          [](const coeff::Custom& c) { return c.beta; },
                      },
                      v_);
}

std::string CoefficientSpec::name() const
{
    return std::visit(overloaded{
                          [](const coeff::Constant& c) {
                              std::ostringstream os;
                              os << "constant(" << c.value << ")";
                              return os.str();
                          },
                          [](const coeff::RadialBump&) { return std::string("radial_bump"); },
                          [](const coeff::QuasiPeriodic&) { return std::string("quasi_periodic"); },
                          [](const coeff::Periodic& p) {
                              std::ostringstream os;
                              os << "periodic(" << p.epsilon << ")";
                              return os.str();
                          },
                          [](const coeff::Custom& c) { return c.name; },
                      },
                      v_);
}

double SolutionSpec::operator()(std::span<const double> x) const
{
    return std::visit(overloaded{
                          [](const solution::Zero&) { return 0.0; },
                          [&](const solution::Sine3DBump&) {
                              double s = 0.0;
                              for (std::size_t i = 0; i < std::min<std::size_t>(x.size(), 3); ++i) s += std::sin(2.0 * pi * x[i]);
                              return s * bump_minus_one(x);
                          },
                          [&](const solution::Sine2DBump&) { return std::sin(2.0 * pi * x[0]) * bump_minus_one(x); },
                          [&](const solution::HighFreq2DBump&) {
                              double p = 1.0;
                              for (double xi : x) p *= std::sin(10.0 * pi * xi);
                              return p * bump_minus_one(x);
                          },
                          [&](const solution::Bump&) { return bump_minus_one(x); },
                          [&](const solution::Plummer& p) { return 1.0 / std::sqrt(squared_norm(x) + p.scale * p.scale); },
                          [&](const solution::Cosine& c) {
                              double p = 1.0;
                              for (double xi : x) p *= std::cos(c.freq * xi);
                              return p;
                          },
                          [&](const solution::Custom& c) { return c.fn(x); },
                      },
                      v_);
}

std::string SolutionSpec::name() const
{
    return std::visit(overloaded{
                          [](const solution::Zero&) { return std::string("zero"); },
                          [](const solution::Sine3DBump&) { return std::string("sine3d_bump"); },
                          [](const solution::Sine2DBump&) { return std::string("sine2d_bump"); },
                          [](const solution::HighFreq2DBump&) { return std::string("highfreq2d_bump"); },
                          [](const solution::Bump&) { return std::string("bump"); },
                          [](const solution::Plummer&) { return std::string("plummer"); },
                          [](const solution::Cosine&) { return std::string("cosine"); },
                          [](const solution::Custom& c) { return c.name; },
                      },
                      v_);
}

std::string SourceSpec::name() const
{
    return std::visit(overloaded{
                          [](const source::FromSolution& s) { return "from_solution(" + s.solution.name() + ")"; },
                          [](const source::QuasiSource&) { return std::string("quasi_source"); },
                          [](const source::Gaussian&) { return std::string("gaussian"); },
                          [](const source::ClosedForm& c) { return c.name; },
                          [](const source::GridValues&) { return std::string("grid_values"); },
                      },
                      v_);
}

std::optional<SolutionSpec> SourceSpec::solution() const
{
    if (const auto* s = std::get_if<source::FromSolution>(&v_)) return s->solution;
    return std::nullopt;
}

GridFunction sample(const PointFn& f, const Grid& grid)
{
    GridFunction out(grid);
    std::array<double, 3> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(grid.dim()));
    for (std::int64_t j = 0; j < grid.num_nodes(); ++j) {
        grid.node_coords(j, xs);
        out.values[static_cast<std::size_t>(j)] = f(xs);
    }
    return out;
}

GridFunction sample(const CoefficientSpec& a, const Grid& grid)
{
    return sample(PointFn([&a](std::span<const double> x) { return a(x); }), grid);
}

GridFunction sample(const SolutionSpec& u, const Grid& grid)
{
    return sample(PointFn([&u](std::span<const double> x) { return u(x); }), grid);
}

CoefficientBounds coefficient_bounds(const CoefficientSpec& a, const Grid& probe)
{
    const GridFunction s = sample(a, probe);
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    return {*lo, *hi};
}

GridFunction stencil_source(const SolutionSpec& u_exact, const CoefficientSpec& a, const Grid& grid)
{
    const int d = grid.dim();
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    GridFunction out(grid);
    std::array<double, 3> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(d));
    for (std::int64_t j = 0; j < grid.num_nodes(); ++j) {
        const Index3 idx = grid.unflatten(j);
        for (int ax = 0; ax < d; ++ax) x[static_cast<std::size_t>(ax)] = grid.coord(idx[static_cast<std::size_t>(3 - d + ax)]);
        const double uj = u_exact(xs);
        double acc = 0.0;
        for (int ax = 0; ax < d; ++ax) {
            const auto s = static_cast<std::size_t>(ax);
            const double i = static_cast<double>(idx[static_cast<std::size_t>(3 - d + ax)]);
            const double xc = x[s];
            x[s] = grid.coord_ext(i + 0.5);
            const double a_plus = a(xs);
            x[s] = grid.coord_ext(i + 1.0);
            const double u_plus = u_exact(xs);
            x[s] = grid.coord_ext(i - 0.5);
            const double a_minus = a(xs);
            x[s] = grid.coord_ext(i - 1.0);
            const double u_minus = u_exact(xs);
            x[s] = xc;
            acc += a_plus * (uj - u_plus) + a_minus * (uj - u_minus);
        }
        out.values[static_cast<std::size_t>(j)] = acc * inv_h2;
    }
    return out;
}

GridFunction source_values(const SourceSpec& g, const CoefficientSpec& a, const Grid& grid)
{
    return std::visit(overloaded{
                          [&](const source::FromSolution& s) { return stencil_source(s.solution, a, grid); },
                          [&](const source::QuasiSource&) {
                              return sample(PointFn([](std::span<const double> x) {
                                                double s = 0.0;
                                                for (std::size_t i = 0; i < std::min<std::size_t>(x.size(), 2); ++i) {
                                                    s += std::sin(10.0 * pi * x[i]);
                                                }
                                                return s * bump_minus_one(x);
                                            }),
                                            grid);
                          },
                          [&](const source::Gaussian& gs) {
                              const double inv = 1.0 / (2.0 * gs.sigma * gs.sigma);
                              return sample(PointFn([&](std::span<const double> x) {
                                                return gs.amplitude * std::exp(-squared_norm(x) * inv);
                                            }),
                                            grid);
                          },
                          [&](const source::ClosedForm& c) { return sample(c.fn, grid); },
                          [&](const source::GridValues& v) {
                              if (v.values.grid.same_lattice(grid)) return v.values;
                              return align_onto(v.values, grid);
                          },
                      },
                      g.variant());
}

} // namespace expreg
