#include "expreg/operator.hpp"

#include "expreg/error.hpp"

#include <cmath>

namespace expreg {

DiscreteOperator::DiscreteOperator(Grid grid, const CoefficientSpec& coeff)
    : grid_(std::move(grid)), dim_(grid_.dim()), m_(grid_.n() - 2), shape_{1, 1, 1}, stride_{0, 0, 0},
      edges_(static_cast<std::size_t>(dim_))
{
    for (int a = 0; a < dim_; ++a) shape_[static_cast<std::size_t>(3 - dim_ + a)] = m_;
    std::int64_t s = 1;
    for (int slot = 2; slot >= 0; --slot) {
        stride_[static_cast<std::size_t>(slot)] = s;
        s *= shape_[static_cast<std::size_t>(slot)];
    }

    const auto n_int = static_cast<std::size_t>(size());
    for (auto& e : edges_) {
        e[0].resize(n_int);
        e[1].resize(n_int);
    }

    std::array<double, 3> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(dim_));
    for (std::int64_t k = 0; k < size(); ++k) {
        const std::int64_t flat = grid_.interior_to_flat(k);
        const Index3 idx = grid_.unflatten(flat);
        for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = grid_.coord(idx[static_cast<std::size_t>(3 - dim_ + a)]);
        for (int a = 0; a < dim_; ++a) {
            const auto sa = static_cast<std::size_t>(a);
            const double i = static_cast<double>(idx[static_cast<std::size_t>(3 - dim_ + a)]);
            const double xc = x[sa];
            x[sa] = grid_.coord_ext(i - 0.5);
            edges_[sa][0][static_cast<std::size_t>(k)] = coeff(xs);
            x[sa] = grid_.coord_ext(i + 0.5);
            edges_[sa][1][static_cast<std::size_t>(k)] = coeff(xs);
            x[sa] = xc;
        }
    }
    finish();
}

void DiscreteOperator::finish()
{
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    const auto n_int = static_cast<std::size_t>(size());
    diag_.assign(n_int, 0.0);
    gershgorin_ = 0.0;
    for (std::size_t k = 0; k < n_int; ++k) {
        double d = 0.0;
        double off = 0.0;
        std::int64_t rest = static_cast<std::int64_t>(k);
        std::array<std::int64_t, 3> idx{};
        for (int slot = 0; slot < 3; ++slot) {
            idx[static_cast<std::size_t>(slot)] = rest / stride_[static_cast<std::size_t>(slot)];
            rest %= stride_[static_cast<std::size_t>(slot)];
        }
        for (int a = 0; a < dim_; ++a) {
            const auto sa = static_cast<std::size_t>(a);
            const auto i = idx[static_cast<std::size_t>(3 - dim_ + a)];
            d += edges_[sa][0][k] + edges_[sa][1][k];
            if (i > 0) off += std::abs(edges_[sa][0][k]);
            if (i < m_ - 1) off += std::abs(edges_[sa][1][k]);
        }
        diag_[k] = d * inv_h2;
        gershgorin_ = std::max(gershgorin_, (d + off) * inv_h2);
    }
}

void DiscreteOperator::apply(std::span<const double> u, std::span<double> out) const
{
    if (static_cast<std::int64_t>(u.size()) != size() || static_cast<std::int64_t>(out.size()) != size()) {
        throw Error(ErrorCode::DimMismatch, "operator applied to a vector of the wrong length");
    }
    const double c = offdiag_sign_ / (grid_.h() * grid_.h());
    const std::int64_t s0 = stride_[0], s1 = stride_[1], s2 = stride_[2];
    const int first = 3 - dim_;
    // Slot-wise edge arrays; unused slots are never read.
    std::array<const double*, 3> lo{nullptr, nullptr, nullptr};
    std::array<const double*, 3> hi{nullptr, nullptr, nullptr};
    for (int a = 0; a < dim_; ++a) {
        lo[static_cast<std::size_t>(first + a)] = edges_[static_cast<std::size_t>(a)][0].data();
        hi[static_cast<std::size_t>(first + a)] = edges_[static_cast<std::size_t>(a)][1].data();
    }
    const double* ud = u.data();
    double* od = out.data();
    const double* dg = diag_.data();

    for (std::int64_t i0 = 0; i0 < shape_[0]; ++i0) {
        for (std::int64_t i1 = 0; i1 < shape_[1]; ++i1) {
            std::int64_t k = i0 * s0 + i1 * s1;
            for (std::int64_t i2 = 0; i2 < shape_[2]; ++i2, k += s2) {
                double nb = 0.0;
                if (first == 0) {
                    if (i0 > 0) nb += lo[0][k] * ud[k - s0];
                    if (i0 < m_ - 1) nb += hi[0][k] * ud[k + s0];
                }
                if (first <= 1) {
                    if (i1 > 0) nb += lo[1][k] * ud[k - s1];
                    if (i1 < m_ - 1) nb += hi[1][k] * ud[k + s1];
                }
                if (i2 > 0) nb += lo[2][k] * ud[k - s2];
                if (i2 < m_ - 1) nb += hi[2][k] * ud[k + s2];
                od[k] = dg[k] * ud[k] + c * nb;
            }
        }
    }
}

std::vector<double> DiscreteOperator::apply(std::span<const double> u) const
{
    std::vector<double> out(static_cast<std::size_t>(size()));
    apply(u, out);
    return out;
}

double DiscreteOperator::edge(int axis, std::int64_t k, bool upper) const noexcept
{
    return edges_[static_cast<std::size_t>(axis)][upper ? 1 : 0][static_cast<std::size_t>(k)];
}

double DiscreteOperator::inner(std::span<const double> u, std::span<const double> v) const noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return grid_.cell_volume() * s;
}

double DiscreteOperator::norm(std::span<const double> u) const noexcept
{
    return std::sqrt(inner(u, u));
}

DiscreteOperator DiscreteOperator::with_flipped_offdiagonal() const
{
    DiscreteOperator copy = *this;
    copy.offdiag_sign_ = -offdiag_sign_;
    return copy;
}

DiscreteOperator assemble(const Grid& grid, const CoefficientSpec& coeff)
{
    return DiscreteOperator(grid, coeff);
}

std::vector<double> apply_bc(const DiscreteOperator& op, const BoundaryCondition& bc, const GridFunction& rhs)
{
    const Grid& g = op.grid();
    if (!rhs.grid.same_lattice(g)) throw Error(ErrorCode::DimMismatch, "right-hand side lives on a different grid");
    std::vector<double> b = interior_values(rhs);
    const auto* data = std::get_if<bc::DirichletData>(&bc);
    if (data == nullptr) return b;
    if (!data->values.grid.same_lattice(g)) throw Error(ErrorCode::DimMismatch, "Dirichlet data lives on a different grid");

    const double inv_h2 = 1.0 / (g.h() * g.h());
    const int d = g.dim();
    for (std::int64_t k = 0; k < op.size(); ++k) {
        const std::int64_t flat = g.interior_to_flat(k);
        const Index3 idx = g.unflatten(flat);
        for (int a = 0; a < d; ++a) {
            const auto slot = static_cast<std::size_t>(3 - d + a);
            if (idx[slot] == 1) {
                Index3 nb = idx;
                nb[slot] = 0;
                b[static_cast<std::size_t>(k)] += op.edge(a, k, false) * data->values.values[static_cast<std::size_t>(g.flatten(nb))] * inv_h2;
            }
            if (idx[slot] == g.n() - 2) {
                Index3 nb = idx;
                nb[slot] = g.n() - 1;
                b[static_cast<std::size_t>(k)] += op.edge(a, k, true) * data->values.values[static_cast<std::size_t>(g.flatten(nb))] * inv_h2;
            }
        }
    }
    return b;
}

} // namespace expreg
