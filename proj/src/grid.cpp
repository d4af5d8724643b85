#include "expreg/grid.hpp"

#include "expreg/error.hpp"

#include <cmath>
#include <sstream>

namespace expreg {

std::int64_t nodes_per_axis(const GridSpec& spec)
{
    const double cells = static_cast<double>(spec.nodes_per_unit) * spec.side;
    return static_cast<std::int64_t>(std::floor(cells + 0.5)) + 1;
}

namespace {

std::int64_t ipow(std::int64_t base, int e)
{
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

// Spacing for a spec. When rho*R is integral the spacing is exactly 1/rho so
// that every grid of a sweep shares the same double.
double spacing_for(const GridSpec& spec, std::int64_t n)
{
    const double cells = static_cast<double>(spec.nodes_per_unit) * spec.side;
    const double m = static_cast<double>(n - 1);
    if (std::abs(cells - m) <= 1e-9 * std::max(1.0, cells)) {
        return 1.0 / static_cast<double>(spec.nodes_per_unit);
    }
    return spec.side / m;
}

void validate(const GridSpec& spec)
{
    std::ostringstream os;
    if (spec.dim < 1 || spec.dim > 3) {
        os << "dim must be 1, 2 or 3 (got " << spec.dim << ")";
        throw Error(ErrorCode::InvalidSpec, os.str());
    }
    if (!(spec.side > 0.0) || !std::isfinite(spec.side)) {
        os << "side must be positive (got " << spec.side << ")";
        throw Error(ErrorCode::InvalidSpec, os.str());
    }
    if (spec.nodes_per_unit < 1) {
        os << "nodes_per_unit must be positive (got " << spec.nodes_per_unit << ")";
        throw Error(ErrorCode::InvalidSpec, os.str());
    }
    if (nodes_per_axis(spec) < 3) {
        os << "grid needs at least 3 nodes per axis (got " << nodes_per_axis(spec) << ")";
        throw Error(ErrorCode::InvalidSpec, os.str());
    }
}

} // namespace

Grid::Grid(int dim, std::int64_t n, double h, int nodes_per_unit)
    : dim_(dim), n_(n), h_(h), nodes_per_unit_(nodes_per_unit),
      num_nodes_(ipow(n, dim)), num_interior_(ipow(std::max<std::int64_t>(n - 2, 0), dim)),
      coords_(static_cast<std::size_t>(n))
{
    for (std::int64_t i = 0; i < n; ++i) coords_[static_cast<std::size_t>(i)] = coord_ext(static_cast<double>(i));
}

Grid::Grid(const GridSpec& spec) : Grid(build_grid(spec)) {}

Grid Grid::lattice(int dim, std::int64_t n, double h, int nodes_per_unit)
{
    if (dim < 1 || dim > 3 || n < 1 || !(h > 0.0)) {
        throw Error(ErrorCode::InvalidSpec, "invalid lattice parameters");
    }
    return Grid(dim, n, h, nodes_per_unit);
}

Grid build_grid(const GridSpec& spec)
{
    validate(spec);
    const std::int64_t n = nodes_per_axis(spec);
    return Grid::lattice(spec.dim, n, spacing_for(spec, n), spec.nodes_per_unit);
}

double Grid::coord_ext(double i) const noexcept
{
    return (i - 0.5 * static_cast<double>(n_ - 1)) * h_;
}

double Grid::cell_volume() const noexcept
{
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= h_;
    return v;
}

Index3 Grid::unflatten(std::int64_t flat) const noexcept
{
    Index3 idx{0, 0, 0};
    for (int a = 2; a >= 3 - dim_; --a) {
        idx[static_cast<std::size_t>(a)] = flat % n_;
        flat /= n_;
    }
    return idx;
}

std::int64_t Grid::flatten(const Index3& idx) const noexcept
{
    std::int64_t flat = 0;
    for (int a = 3 - dim_; a < 3; ++a) flat = flat * n_ + idx[static_cast<std::size_t>(a)];
    return flat;
}

bool Grid::is_boundary(std::int64_t flat) const noexcept
{
    const Index3 idx = unflatten(flat);
    for (int a = 3 - dim_; a < 3; ++a) {
        const auto i = idx[static_cast<std::size_t>(a)];
        if (i == 0 || i == n_ - 1) return true;
    }
    return false;
}

std::int64_t Grid::interior_to_flat(std::int64_t k) const noexcept
{
    const std::int64_t m = n_ - 2;
    Index3 idx{0, 0, 0};
    for (int a = 2; a >= 3 - dim_; --a) {
        idx[static_cast<std::size_t>(a)] = k % m + 1;
        k /= m;
    }
    return flatten(idx);
}

std::int64_t Grid::flat_to_interior(std::int64_t flat) const noexcept
{
    const Index3 idx = unflatten(flat);
    const std::int64_t m = n_ - 2;
    std::int64_t k = 0;
    for (int a = 3 - dim_; a < 3; ++a) {
        const auto i = idx[static_cast<std::size_t>(a)];
        if (i == 0 || i == n_ - 1) return -1;
        k = k * m + (i - 1);
    }
    return k;
}

void Grid::node_coords(std::int64_t flat, std::span<double> x) const noexcept
{
    const Index3 idx = unflatten(flat);
    for (int a = 0; a < dim_; ++a) {
        x[static_cast<std::size_t>(a)] = coord(idx[static_cast<std::size_t>(3 - dim_ + a)]);
    }
}

bool Grid::same_lattice(const Grid& other) const noexcept
{
    return dim_ == other.dim_ && n_ == other.n_ && h_ == other.h_;
}

GridFunction::GridFunction(Grid g)
    : grid(std::move(g)), values(static_cast<std::size_t>(grid.num_nodes()), 0.0)
{
}

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v))
{
    if (static_cast<std::int64_t>(values.size()) != grid.num_nodes()) {
        throw Error(ErrorCode::DimMismatch, "grid function length does not match grid");
    }
}

namespace {

// Copies the centred block of `m` nodes per axis out of u.
GridFunction extract_centred(const GridFunction& u, const Grid& target)
{
    const Grid& g = u.grid;
    const std::int64_t offset = (g.n() - target.n()) / 2;
    GridFunction out(target);
    for (std::int64_t k = 0; k < target.num_nodes(); ++k) {
        Index3 idx = target.unflatten(k);
        for (int a = 3 - g.dim(); a < 3; ++a) idx[static_cast<std::size_t>(a)] += offset;
        out.values[static_cast<std::size_t>(k)] = u.values[static_cast<std::size_t>(g.flatten(idx))];
    }
    return out;
}

} // namespace

GridFunction restrict_window(const GridFunction& u, double L)
{
    const Grid& g = u.grid;
    if (L < 0.0 || L > g.side() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "window side L=" << L << " must lie in [0, R=" << g.side() << "]";
        throw Error(ErrorCode::InvalidGeometry, os.str());
    }
    const double half = 0.5 * L + 1e-9 * g.h();
    std::int64_t m = 0;
    for (double c : g.coords()) {
        if (std::abs(c) <= half) ++m;
    }
    if (m == 0) throw Error(ErrorCode::EmptyWindow, "no grid nodes inside the window");
    return extract_centred(u, Grid::lattice(g.dim(), m, g.h(), g.nodes_per_unit()));
}

double l2_norm(const GridFunction& u)
{
    double s = 0.0;
    for (double v : u.values) s += v * v;
    return std::sqrt(u.grid.cell_volume() * s);
}

GridFunction align_onto(const GridFunction& u_big, const Grid& target)
{
    const Grid& g = u_big.grid;
    const bool same_h = std::abs(g.h() - target.h()) <= 1e-12 * g.h();
    if (g.dim() != target.dim() || !same_h || target.n() > g.n() || (g.n() - target.n()) % 2 != 0) {
        std::ostringstream os;
        os << "grid with n=" << target.n() << ", h=" << target.h() << " does not nest in n=" << g.n()
           << ", h=" << g.h();
        throw Error(ErrorCode::NotNested, os.str());
    }
    return extract_centred(u_big, target);
}

std::vector<double> interior_values(const GridFunction& u)
{
    const Grid& g = u.grid;
    std::vector<double> out(static_cast<std::size_t>(g.num_interior()));
    for (std::int64_t k = 0; k < g.num_interior(); ++k) {
        out[static_cast<std::size_t>(k)] = u.values[static_cast<std::size_t>(g.interior_to_flat(k))];
    }
    return out;
}

GridFunction from_interior(const Grid& grid, std::span<const double> interior)
{
    if (static_cast<std::int64_t>(interior.size()) != grid.num_interior()) {
        throw Error(ErrorCode::DimMismatch, "interior vector length does not match grid");
    }
    GridFunction out(grid);
    for (std::int64_t k = 0; k < grid.num_interior(); ++k) {
        out.values[static_cast<std::size_t>(grid.interior_to_flat(k))] = interior[static_cast<std::size_t>(k)];
    }
    return out;
}

} // namespace expreg
