#include "expreg/greens.hpp"

#include "expreg/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace expreg {

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y)
{
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
    if (sxx == 0.0) throw Error(ErrorCode::DegenerateFit, "abscissae are constant");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return f;
}

// Calls f(r, value) for every node on the 2d axis rays leaving y (y excluded).
template <class F>
void for_each_ray_node(const GreensProbe& probe, F&& f)
{
    const Grid& g = probe.values.grid;
    const int d = g.dim();
    const Index3 y = g.unflatten(probe.source);
    for (int a = 0; a < d; ++a) {
        const auto slot = static_cast<std::size_t>(3 - d + a);
        for (int dir : {-1, 1}) {
            Index3 idx = y;
            for (std::int64_t s = 1;; ++s) {
                idx[slot] = y[slot] + dir * s;
                if (idx[slot] < 0 || idx[slot] >= g.n()) break;
                f(static_cast<double>(s) * g.h(), probe.values.values[static_cast<std::size_t>(g.flatten(idx))]);
            }
        }
    }
}

} // namespace

std::int64_t interior_node_at(const Grid& grid, std::span<const double> y)
{
    if (static_cast<int>(y.size()) != grid.dim()) throw Error(ErrorCode::DimMismatch, "source point has the wrong dimension");
    Index3 idx{0, 0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
        const double fi = y[static_cast<std::size_t>(a)] / grid.h() + 0.5 * static_cast<double>(grid.n() - 1);
        const double ri = std::round(fi);
        if (std::abs(fi - ri) > 1e-9 || ri <= 0.0 || ri >= static_cast<double>(grid.n() - 1)) {
            std::ostringstream os;
            os << "source point is not an interior node (axis " << a << ", coordinate " << y[static_cast<std::size_t>(a)]
               << ")";
            throw Error(ErrorCode::InvalidGeometry, os.str());
        }
        idx[static_cast<std::size_t>(3 - grid.dim() + a)] = static_cast<std::int64_t>(ri);
    }
    return grid.flatten(idx);
}

std::vector<double> discrete_delta(const Grid& grid, std::int64_t y_flat)
{
    const std::int64_t k = grid.flat_to_interior(y_flat);
    if (k < 0) throw Error(ErrorCode::InvalidGeometry, "source node lies on the boundary");
    std::vector<double> e(static_cast<std::size_t>(grid.num_interior()), 0.0);
    e[static_cast<std::size_t>(k)] = 1.0 / grid.cell_volume();
    return e;
}

GreensProbe elliptic_green(const DiscreteOperator& op, std::int64_t y_flat, const SolverConfig& solver)
{
    const Grid& grid = op.grid();
    const LinearSolution sol = cg_solve(op, discrete_delta(grid, y_flat), solver);
    return {from_interior(grid, sol.x), y_flat, ProbeKind::Elliptic, 0.0};
}

OrderingReport ordering_check(int dim, const CoefficientSpec& a, std::span<const double> y, double R_small,
                              double R_large, int nodes_per_unit, const SolverConfig& solver)
{
    if (R_large < R_small) throw Error(ErrorCode::InvalidGeometry, "R_large must be >= R_small");
    const Grid small = build_grid({dim, R_small, nodes_per_unit});
    const Grid large = build_grid({dim, R_large, nodes_per_unit});
    const GreensProbe gs = elliptic_green(assemble(small, a), interior_node_at(small, y), solver);
    const GreensProbe gl = elliptic_green(assemble(large, a), interior_node_at(large, y), solver);
    const GridFunction gl_on_small = align_onto(gl.values, small);

    OrderingReport rep;
    rep.max_violation = -std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t j = 0; j < gs.values.values.size(); ++j) {
        rep.max_violation = std::max(rep.max_violation, gs.values.values[j] - gl_on_small.values[j]);
        scale = std::max(scale, std::abs(gs.values.values[j]));
    }
    rep.compared = static_cast<std::int64_t>(gs.values.values.size());
    rep.tolerance = 10.0 * solver.rel_tol * std::max(scale, 1.0);
    rep.pass = rep.max_violation <= rep.tolerance;
    return rep;
}

DecayFit elliptic_decay_fit(const GreensProbe& probe, double r_min, double r_max)
{
    std::vector<double> lx, ly;
    for_each_ray_node(probe, [&](double r, double v) {
        if (r >= r_min - 1e-12 && r <= r_max + 1e-12 && v > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(v));
        }
    });
    if (lx.size() < 8) {
        std::ostringstream os;
        os << "only " << lx.size() << " fit points in [" << r_min << ", " << r_max << "], need 8";
        throw Error(ErrorCode::InsufficientRange, os.str());
    }
    const LineFit f = least_squares(lx, ly);
    return {f.slope, f.intercept, f.r2, static_cast<std::int64_t>(lx.size())};
}

DecayFit elliptic_decay_fit(const GreensProbe& probe)
{
    const Grid& g = probe.values.grid;
    return elliptic_decay_fit(probe, 4.0 * g.h(), g.side() / 8.0);
}

GreensProbe heat_kernel_probe(const DiscreteOperator& op, std::int64_t y_flat, double t, const ExpmConfig& cfg)
{
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidSpec, "heat probe needs t > 0");
    const Grid& grid = op.grid();
    const std::vector<double> w = expm_apply(op, discrete_delta(grid, y_flat), t, cfg);
    return {from_interior(grid, w), y_flat, ProbeKind::Parabolic, t};
}

double probe_mass(const GreensProbe& probe)
{
    double s = 0.0;
    for (double v : probe.values.values) s += v;
    return s * probe.values.grid.cell_volume();
}

DecayFit heat_envelope_fit(const GreensProbe& probe, double rel_floor)
{
    if (probe.kind != ProbeKind::Parabolic) throw Error(ErrorCode::InvalidSpec, "envelope fit needs a parabolic probe");
    const double peak = *std::max_element(probe.values.values.begin(), probe.values.values.end());
    std::vector<double> x, y;
    for_each_ray_node(probe, [&](double r, double v) {
        if (v > rel_floor * peak) {
            x.push_back(r * r / (4.0 * probe.t));
            y.push_back(std::log(v));
        }
    });
    if (x.size() < 4) throw Error(ErrorCode::InsufficientRange, "too few envelope points above the floor");
    const LineFit f = least_squares(x, y);
    return {f.slope, f.intercept, f.r2, static_cast<std::int64_t>(x.size())};
}

std::vector<std::pair<double, double>> radial_profile(const GreensProbe& probe)
{
    const Grid& g = probe.values.grid;
    const int d = g.dim();
    std::array<double, 3> yc{}, xc{};
    g.node_coords(probe.source, std::span<double>(yc.data(), static_cast<std::size_t>(d)));
    std::vector<std::pair<double, double>> out;
    out.reserve(probe.values.values.size());
    for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
        g.node_coords(j, std::span<double>(xc.data(), static_cast<std::size_t>(d)));
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) r2 += (xc[static_cast<std::size_t>(a)] - yc[static_cast<std::size_t>(a)]) *
                                          (xc[static_cast<std::size_t>(a)] - yc[static_cast<std::size_t>(a)]);
        out.emplace_back(std::sqrt(r2), probe.values.values[static_cast<std::size_t>(j)]);
    }
    return out;
}

} // namespace expreg
