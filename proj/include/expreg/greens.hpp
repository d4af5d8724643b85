#pragma once

#include "expreg/expm.hpp"
#include "expreg/field.hpp"
#include "expreg/grid.hpp"
#include "expreg/linsolve.hpp"
#include "expreg/operator.hpp"

#include <span>
#include <utility>
#include <vector>

namespace expreg {

enum class ProbeKind { Elliptic, Parabolic };

/// Discrete Green's function G(.; y) for a source node y.
struct GreensProbe {
    GridFunction values;
    std::int64_t source = 0; // flat node index of y
    ProbeKind kind = ProbeKind::Elliptic;
    double t = 0.0;          // parabolic time, 0 for elliptic probes
};

/// Flat index of the node at point y (within 1e-9 h). Throws InvalidGeometry
/// if y is not a node or is a boundary node.
std::int64_t interior_node_at(const Grid& grid, std::span<const double> y);

/// The discrete delta e_y / h^d as an interior vector.
std::vector<double> discrete_delta(const Grid& grid, std::int64_t y_flat);

/// Solves A G = e_y / h^d with zero Dirichlet walls.
GreensProbe elliptic_green(const DiscreteOperator& op, std::int64_t y_flat,
                           const SolverConfig& solver = {1e-12, 0, Preconditioner::Jacobi});

struct OrderingReport {
    double max_violation = 0.0; // max over common nodes of G_small - G_large
    std::int64_t compared = 0;
    double tolerance = 0.0;     // 10 * solver tolerance (relative to max G_small)
    bool pass = false;
};

/// Domain monotonicity G_{R_small} <= G_{R_large} on the common nodes.
OrderingReport ordering_check(int dim, const CoefficientSpec& a, std::span<const double> y, double R_small,
                              double R_large, int nodes_per_unit,
                              const SolverConfig& solver = {1e-12, 0, Preconditioner::Jacobi});

struct DecayFit {
    double exponent = 0.0;  // slope
    double intercept = 0.0;
    double r2 = 0.0;
    std::int64_t points = 0;
};

/// Power-law fit of log G against log |x - y| over the axis rays through y,
/// restricted to r_min <= |x - y| <= r_max. Throws InsufficientRange below 8 points.
DecayFit elliptic_decay_fit(const GreensProbe& probe, double r_min, double r_max);

/// Default window [4h, R/8] of elliptic_decay_fit.
DecayFit elliptic_decay_fit(const GreensProbe& probe);

/// e^{-tA} (e_y / h^d).
GreensProbe heat_kernel_probe(const DiscreteOperator& op, std::int64_t y_flat, double t, const ExpmConfig& cfg = {});

/// h^d * sum G.
double probe_mass(const GreensProbe& probe);

/// Least-squares slope of log G against |x - y|^2 / (4t) over the axis rays,
/// using values above rel_floor * max G. For a = c the slope is about -1/c.
DecayFit heat_envelope_fit(const GreensProbe& probe, double rel_floor = 1e-8);

/// (|x - y|, G) for every node.
std::vector<std::pair<double, double>> radial_profile(const GreensProbe& probe);

} // namespace expreg
