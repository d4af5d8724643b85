#include "expreg/spectral.hpp"

#include "expreg/error.hpp"

#include <Eigen/Dense>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace expreg {

namespace {

// FFTW's planner is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Periodic sample block (first n-1 nodes per axis) and its half-spectrum.
struct PeriodicSpectrum {
    int dim;
    int m;          // periods samples per axis
    int m_half;     // m/2 + 1
    double period;  // R
    std::vector<double> real;
    std::vector<std::complex<double>> spec;
    std::array<int, 3> dims{};

    explicit PeriodicSpectrum(const Grid& g)
        : dim(g.dim()), m(static_cast<int>(g.n() - 1)), m_half(m / 2 + 1), period(g.side())
    {
        std::size_t nr = 1, nc = 1;
        for (int a = 0; a < dim; ++a) {
            dims[static_cast<std::size_t>(a)] = m;
            nr *= static_cast<std::size_t>(m);
            nc *= static_cast<std::size_t>(a + 1 == dim ? m_half : m);
        }
        real.assign(nr, 0.0);
        spec.assign(nc, {0.0, 0.0});
    }

    void load(const GridFunction& u)
    {
        const Grid& g = u.grid;
        for (std::size_t p = 0; p < real.size(); ++p) {
            Index3 idx{0, 0, 0};
            std::size_t rest = p;
            for (int a = dim - 1; a >= 0; --a) {
                idx[static_cast<std::size_t>(3 - dim + a)] = static_cast<std::int64_t>(rest % static_cast<std::size_t>(m));
                rest /= static_cast<std::size_t>(m);
            }
            real[p] = u.values[static_cast<std::size_t>(g.flatten(idx))];
        }
    }

    void store(GridFunction& u) const
    {
        const Grid& g = u.grid;
        const double scale = 1.0 / static_cast<double>(real.size());
        for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
            Index3 idx = g.unflatten(j);
            std::size_t p = 0;
            for (int a = 0; a < dim; ++a) {
                auto& i = idx[static_cast<std::size_t>(3 - dim + a)];
                if (i == g.n() - 1) i = 0;
                p = p * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
            }
            u.values[static_cast<std::size_t>(j)] = real[p] * scale;
        }
    }

    void forward()
    {
        Plan plan;
        {
            std::lock_guard lock(planner_mutex());
            plan.reset(fftw_plan_dft_r2c(dim, dims.data(), real.data(), reinterpret_cast<fftw_complex*>(spec.data()),
                                         FFTW_ESTIMATE));
        }
        fftw_execute(plan.get());
    }

    void backward()
    {
        Plan plan;
        {
            std::lock_guard lock(planner_mutex());
            plan.reset(fftw_plan_dft_c2r(dim, dims.data(), reinterpret_cast<fftw_complex*>(spec.data()), real.data(),
                                         FFTW_ESTIMATE));
        }
        fftw_execute(plan.get());
    }

    // Squared integer wavenumber norm of half-spectrum entry q.
    double k2(std::size_t q) const
    {
        double s = 0.0;
        for (int a = dim - 1; a >= 0; --a) {
            const int len = (a == dim - 1) ? m_half : m;
            int i = static_cast<int>(q % static_cast<std::size_t>(len));
            q /= static_cast<std::size_t>(len);
            if (a != dim - 1 && i > m / 2) i -= m;
            s += static_cast<double>(i) * i;
        }
        return s;
    }

    // Modes with |omega| <= omega0 in the half spectrum.
    template <class F>
    void for_each_low_mode(double omega0, F&& f)
    {
        const double kc = omega0 * period / (2.0 * std::numbers::pi);
        const double kc2 = kc * kc * (1.0 + 1e-9) + 1e-12;
        for (std::size_t q = 0; q < spec.size(); ++q) {
            if (k2(q) <= kc2) f(q);
        }
    }
};

void check_cutoff(const Grid& g, double omega0)
{
    if (!(omega0 >= 0.0)) throw Error(ErrorCode::InvalidSpec, "cutoff must be nonnegative");
    if (omega0 >= std::numbers::pi / g.h()) {
        std::ostringstream os;
        os << "cutoff " << omega0 << " is at or above the grid Nyquist rate " << std::numbers::pi / g.h();
        throw Error(ErrorCode::CutoffAboveNyquist, os.str());
    }
}

} // namespace

GridFunction band_filter(const GridFunction& g, double omega0)
{
    check_cutoff(g.grid, omega0);
    PeriodicSpectrum ps(g.grid);
    ps.load(g);
    ps.forward();
    ps.for_each_low_mode(omega0, [&](std::size_t q) { ps.spec[q] = {0.0, 0.0}; });
    ps.backward();
    GridFunction out(g.grid);
    ps.store(out);
    return out;
}

double band_energy(const GridFunction& g, double omega0)
{
    check_cutoff(g.grid, omega0);
    PeriodicSpectrum ps(g.grid);
    ps.load(g);
    ps.forward();
    const double scale = 1.0 / static_cast<double>(ps.real.size());
    double s = 0.0;
    ps.for_each_low_mode(omega0, [&](std::size_t q) { s += std::norm(ps.spec[q] * scale); });
    return std::sqrt(s);
}

std::vector<std::array<int, 3>> multi_indices(int dim, int k)
{
    std::vector<std::array<int, 3>> out;
    for (int order = 0; order <= k; ++order) {
        if (dim == 1) {
            out.push_back({order, 0, 0});
        } else if (dim == 2) {
            for (int a = order; a >= 0; --a) out.push_back({a, order - a, 0});
        } else {
            for (int a = order; a >= 0; --a) {
                for (int b = order - a; b >= 0; --b) out.push_back({a, b, order - a - b});
            }
        }
    }
    return out;
}

namespace {

void check_order(int k)
{
    if (k < 0 || k > 4) throw Error(ErrorCode::InvalidSpec, "moment order must lie in [0, 4]");
}

double monomial(std::span<const double> x, const std::array<int, 3>& gamma)
{
    double p = 1.0;
    for (std::size_t a = 0; a < x.size(); ++a) p *= std::pow(x[a], gamma[a]);
    return p;
}

// Probabilists' Hermite polynomial He_n.
double hermite(int n, double x)
{
    double h0 = 1.0, h1 = x;
    if (n == 0) return h0;
    for (int i = 1; i < n; ++i) {
        const double h2 = x * h1 - i * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

} // namespace

std::vector<Moment> moments(const GridFunction& g, int k)
{
    check_order(k);
    const Grid& grid = g.grid;
    const auto gammas = multi_indices(grid.dim(), k);
    std::vector<Moment> out;
    for (const auto& gm : gammas) out.push_back({gm, 0.0});
    std::array<double, 3> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(grid.dim()));
    for (std::int64_t j = 0; j < grid.num_nodes(); ++j) {
        const double gj = g.values[static_cast<std::size_t>(j)];
        if (gj == 0.0) continue;
        grid.node_coords(j, xs);
        for (auto& mo : out) mo.value += gj * monomial(xs, mo.gamma);
    }
    for (auto& mo : out) mo.value *= grid.cell_volume();
    return out;
}

double moment_template_width(const GridFunction& g)
{
    const Grid& grid = g.grid;
    const int d = grid.dim();
    std::array<double, 3> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(d));
    double mass = 0.0, second = 0.0;
    for (std::int64_t j = 0; j < grid.num_nodes(); ++j) {
        grid.node_coords(j, xs);
        double r2 = 0.0;
        for (double c : xs) r2 += c * c;
        const double w = std::abs(g.values[static_cast<std::size_t>(j)]);
        mass += w;
        second += w * r2;
    }
    const double lo = 2.0 * grid.h(), hi = grid.side() / 10.0;
    if (!(mass > 0.0)) return hi;
    return std::clamp(std::sqrt(second / (mass * d)), std::min(lo, hi), hi);
}

GridFunction remove_moments(const GridFunction& g, int k, double width)
{
    check_order(k);
    const Grid& grid = g.grid;
    const int d = grid.dim();
    if (width < 0.0) throw Error(ErrorCode::InvalidSpec, "template width must be nonnegative");
    const double sigma = width > 0.0 ? width : moment_template_width(g);
    const auto gammas = multi_indices(d, k);
    const auto p = static_cast<Eigen::Index>(gammas.size());
    const auto nn = static_cast<Eigen::Index>(grid.num_nodes());

    // Templates psi_gamma(x) = prod_i He_{gamma_i}(x_i / sigma) exp(-|x|^2 / (2 sigma^2)),
    // and scaled monomials (x / sigma)^beta for the moment conditions.
    Eigen::MatrixXd templates(nn, p), monos(nn, p);
    std::array<double, 3> x{};
    const std::span<double> xs(x.data(), static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < nn; ++j) {
        grid.node_coords(j, xs);
        double r2 = 0.0;
        for (int a = 0; a < d; ++a) {
            x[static_cast<std::size_t>(a)] /= sigma;
            r2 += x[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)];
        }
        const double gauss = std::exp(-0.5 * r2);
        for (Eigen::Index c = 0; c < p; ++c) {
            const auto& gm = gammas[static_cast<std::size_t>(c)];
            double he = 1.0;
            for (int a = 0; a < d; ++a) he *= hermite(gm[static_cast<std::size_t>(a)], x[static_cast<std::size_t>(a)]);
            templates(j, c) = he * gauss;
            monos(j, c) = monomial(xs, gm);
        }
    }

    const Eigen::MatrixXd gram = monos.transpose() * templates;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
    const auto& sv = svd.singularValues();
    const double cond = sv[0] / sv[sv.size() - 1];
    if (!(cond <= 1e8)) {
        std::ostringstream os;
        os << "moment template system has condition " << cond << " (box too small for the template width)";
        throw Error(ErrorCode::IllConditionedMoments, os.str());
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    Eigen::VectorXd out = Eigen::Map<const Eigen::VectorXd>(g.values.data(), nn);
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd m = monos.transpose() * out;
        const Eigen::VectorXd c = qr.solve(m);
        out -= templates * c;
    }
    return GridFunction(grid, std::vector<double>(out.data(), out.data() + out.size()));
}

} // namespace expreg
