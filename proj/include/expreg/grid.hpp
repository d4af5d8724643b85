#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace expreg {

/// Tensor-product lattice on the cube K_R = (-R/2, R/2)^d.
///
/// `nodes_per_unit` is the grid density: an axis of length R carries
/// round(nodes_per_unit * R) + 1 nodes (round half up).
struct GridSpec {
    int dim = 1;
    double side = 1.0;
    int nodes_per_unit = 1;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Nodes per axis implied by a spec. Does not validate.
std::int64_t nodes_per_axis(const GridSpec& spec);

using Index3 = std::array<std::int64_t, 3>;

/// Immutable centred lattice. Node i on an axis sits at (i - (n-1)/2) * h, so
/// lattices sharing h coincide bitwise on their common nodes.
///
/// Flat node numbering is row-major with axis 0 slowest. Interior nodes (no
/// coordinate on the boundary) have their own row-major numbering over the
/// (n-2)^d interior block.
class Grid {
public:
    /// Equivalent to build_grid(spec).
    explicit Grid(const GridSpec& spec);

    /// Centred lattice of n nodes per axis at spacing h.
    static Grid lattice(int dim, std::int64_t n, double h, int nodes_per_unit);

    int dim() const noexcept { return dim_; }
    std::int64_t n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    double side() const noexcept { return h_ * static_cast<double>(n_ - 1); }
    int nodes_per_unit() const noexcept { return nodes_per_unit_; }
    GridSpec spec() const { return {dim_, side(), nodes_per_unit_}; }

    std::span<const double> coords() const noexcept { return coords_; }
    double coord(std::int64_t i) const noexcept { return coords_[static_cast<std::size_t>(i)]; }
    /// Coordinate of lattice index i, valid also for ghost indices outside [0, n).
    double coord_ext(double i) const noexcept;

    std::int64_t num_nodes() const noexcept { return num_nodes_; }
    std::int64_t num_interior() const noexcept { return num_interior_; }
    /// h^d, the lumped quadrature weight.
    double cell_volume() const noexcept;

    /// Index per axis, padded so unused leading slots are 0.
    Index3 unflatten(std::int64_t flat) const noexcept;
    std::int64_t flatten(const Index3& idx) const noexcept;
    bool is_boundary(std::int64_t flat) const noexcept;

    std::int64_t interior_to_flat(std::int64_t k) const noexcept;
    /// -1 for boundary nodes.
    std::int64_t flat_to_interior(std::int64_t flat) const noexcept;

    /// Writes dim() coordinates of node `flat` to x.
    void node_coords(std::int64_t flat, std::span<double> x) const noexcept;

    bool same_lattice(const Grid& other) const noexcept;

private:
    Grid(int dim, std::int64_t n, double h, int nodes_per_unit);

    int dim_;
    std::int64_t n_;
    double h_;
    int nodes_per_unit_;
    std::int64_t num_nodes_;
    std::int64_t num_interior_;
    std::vector<double> coords_;
};

/// Validates the spec and builds the lattice. Throws InvalidSpec.
Grid build_grid(const GridSpec& spec);

/// Nodal values over every node of a grid, boundary included.
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    explicit GridFunction(Grid g);
    GridFunction(Grid g, std::vector<double> v);
};

/// Values on the centred sub-lattice of nodes with all |x_i| <= L/2.
GridFunction restrict_window(const GridFunction& u, double L);

/// sqrt(h^d * sum u_j^2) over every node of u's grid.
double l2_norm(const GridFunction& u);

/// Copies u_big onto the nodes of `target`, which must nest inside u_big's grid.
GridFunction align_onto(const GridFunction& u_big, const Grid& target);

/// Interior block of u as an interior vector.
std::vector<double> interior_values(const GridFunction& u);

/// Grid function with the given interior values and zero boundary.
GridFunction from_interior(const Grid& grid, std::span<const double> interior);

} // namespace expreg
