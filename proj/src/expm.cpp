#include "expreg/expm.hpp"

#include "expreg/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <sstream>

namespace expreg {

void validate(const ExpmConfig& cfg)
{
    if (cfg.krylov_dim < 2) throw Error(ErrorCode::InvalidSpec, "krylov_dim must be >= 2");
    if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) throw Error(ErrorCode::InvalidSpec, "expm rel_tol must lie in (0, 1)");
    if (cfg.max_substeps < 1) throw Error(ErrorCode::InvalidSpec, "max_substeps must be >= 1");
}

namespace {

using detail::dot;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> gl_x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                     -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                     0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl_w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};

// Eigen-decomposed tridiagonal Lanczos matrix.
struct Tridiagonal {
    Eigen::VectorXd theta;  // Ritz values
    Eigen::VectorXd first;  // S(0, i)
    Eigen::VectorXd last;   // S(m-1, i)
    Eigen::MatrixXd S;

    // e_m^T exp(-s T) e_1
    double last_coordinate(double s) const
    {
        double f = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i) f += last[i] * first[i] * std::exp(-s * theta[i]);
        return f;
    }

    // int_0^tau |e_m^T exp(-s T) e_1| ds on geometrically graded panels.
    double integrated_last(double tau) const
    {
        constexpr int panels = 48;
        double total = 0.0;
        double hi = tau;
        for (int p = 0; p < panels; ++p) {
            const double lo = (p == panels - 1) ? 0.0 : 0.5 * hi;
            const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
            double acc = 0.0;
            for (std::size_t q = 0; q < gl_x.size(); ++q) acc += gl_w[q] * std::abs(last_coordinate(mid + half * gl_x[q]));
            total += half * acc;
            hi = lo;
        }
        return total;
    }

    // exp(-tau T) e_1
    Eigen::VectorXd exp_e1(double tau) const
    {
        Eigen::VectorXd c(theta.size());
        for (Eigen::Index i = 0; i < theta.size(); ++i) c[i] = first[i] * std::exp(-tau * theta[i]);
        return S * c;
    }
};

} // namespace

std::vector<double> expm_apply(const DiscreteOperator& op, std::span<const double> g, double T, const ExpmConfig& cfg,
                               ExpmStats* stats)
{
    validate(cfg);
    if (!(T >= 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidSpec, "T must be a finite nonnegative time");
    if (static_cast<std::int64_t>(g.size()) != op.size()) throw Error(ErrorCode::DimMismatch, "vector has the wrong length");

    ExpmStats local;
    ExpmStats& st = stats != nullptr ? *stats : local;
    st = {};

    std::vector<double> v(g.begin(), g.end());
    const double gnorm = std::sqrt(dot(v, v));
    if (!std::isfinite(gnorm)) throw Error(ErrorCode::NonFiniteBreakdown, "non-finite input vector");
    if (T == 0.0 || gnorm == 0.0) return v;

    const std::size_t n = v.size();
    const int m_max = static_cast<int>(std::min<std::int64_t>(cfg.krylov_dim, op.size()));
    const double budget_rate = cfg.rel_tol * gnorm / T;
    const double anorm = op.gershgorin_bound();

    std::vector<std::vector<double>> basis(static_cast<std::size_t>(m_max) + 1, std::vector<double>(n));
    std::vector<double> w(n);

    double t = 0.0;
    double tau_next = T;
    while (t < T) {
        if (st.substeps >= cfg.max_substeps) {
            std::ostringstream os;
            os << "exceeded " << cfg.max_substeps << " substeps at t=" << t << " of T=" << T;
            throw Error(ErrorCode::SubstepLimit, os.str());
        }
        const double beta0 = std::sqrt(dot(v, v));
        if (beta0 == 0.0) break;

        // Lanczos with two passes of full reorthogonalization.
        for (std::size_t i = 0; i < n; ++i) basis[0][i] = v[i] / beta0;
        Eigen::VectorXd alpha(m_max), beta(m_max);
        int m = m_max;
        double h_next = 0.0;
        for (int j = 0; j < m_max; ++j) {
            op.apply(basis[static_cast<std::size_t>(j)], w);
            ++st.matvecs;
            alpha[j] = dot(w, basis[static_cast<std::size_t>(j)]);
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const auto& b = basis[static_cast<std::size_t>(i)];
                    const double c = dot(w, b);
                    for (std::size_t k = 0; k < n; ++k) w[k] -= c * b[k];
                }
            }
            const double bj = std::sqrt(dot(w, w));
            if (!std::isfinite(bj) || !std::isfinite(alpha[j])) {
                throw Error(ErrorCode::NonFiniteBreakdown, "non-finite value in Lanczos recurrence");
            }
            if (bj <= 1e-14 * anorm) {
                // Invariant subspace: the projection is exact.
                m = j + 1;
                h_next = 0.0;
                break;
            }
            beta[j] = bj;
            h_next = bj;
            if (j + 1 < m_max + 1) {
                auto& nb = basis[static_cast<std::size_t>(j) + 1];
                for (std::size_t k = 0; k < n; ++k) nb[k] = w[k] / bj;
            }
        }

        Tridiagonal tri;
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
            Eigen::VectorXd diag = alpha.head(m);
            Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(beta.head(m - 1)) : Eigen::VectorXd(0);
            es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
            if (es.info() != Eigen::Success) throw Error(ErrorCode::NonFiniteBreakdown, "tridiagonal eigensolve failed");
            tri.theta = es.eigenvalues();
            tri.S = es.eigenvectors();
            tri.first = tri.S.row(0).transpose();
            tri.last = tri.S.row(m - 1).transpose();
        }

        const double remaining = T - t;
        double tau = std::min(remaining, tau_next);
        double bound = 0.0;
        for (int halvings = 0;; ++halvings) {
            bound = h_next == 0.0 ? 0.0 : beta0 * h_next * tri.integrated_last(tau);
            if (!std::isfinite(bound)) throw Error(ErrorCode::NonFiniteBreakdown, "non-finite error estimate");
            if (bound <= budget_rate * tau) break;
            if (halvings > 200) throw Error(ErrorCode::SubstepLimit, "step size underflow in exponential action");
            tau *= 0.5;
            ++st.rejected;
        }

        const Eigen::VectorXd y = tri.exp_e1(tau);
        std::fill(v.begin(), v.end(), 0.0);
        for (int i = 0; i < m; ++i) {
            const double c = beta0 * y[i];
            const auto& b = basis[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < n; ++k) v[k] += c * b[k];
        }
        st.error_bound += bound;
        ++st.substeps;
        t = (tau == remaining) ? T : t + tau;
        tau_next = 2.0 * tau;
    }
    return v;
}

ParabolicTrace parabolic_integrate(const DiscreteOperator& op, std::span<const double> g, double T, std::int64_t steps,
                                   const SolverConfig& inner)
{
    if (steps < 2) throw Error(ErrorCode::InvalidSpec, "parabolic_integrate needs at least 2 steps");
    if (!(T > 0.0)) throw Error(ErrorCode::InvalidSpec, "T must be positive");
    if (static_cast<std::int64_t>(g.size()) != op.size()) throw Error(ErrorCode::DimMismatch, "vector has the wrong length");
    validate(inner);

    const std::size_t n = g.size();
    const double tau = T / static_cast<double>(steps);
    const double half = 0.5 * tau;

    std::vector<double> shifted_diag(n);
    const auto d = op.diagonal();
    for (std::size_t i = 0; i < n; ++i) shifted_diag[i] = 1.0 + half * d[i];
    auto shifted = [&](std::span<const double> in, std::span<double> out) {
        op.apply(in, out);
        for (std::size_t i = 0; i < n; ++i) out[i] = in[i] + half * out[i];
    };
    const std::int64_t cap = inner.max_iter > 0 ? inner.max_iter : default_iteration_cap(op);

    ParabolicTrace tr;
    tr.steps = steps;
    tr.u_T.assign(n, 0.0);
    tr.energy_history.reserve(static_cast<std::size_t>(steps) + 1);
    tr.times.reserve(static_cast<std::size_t>(steps) + 1);

    std::vector<double> w(g.begin(), g.end()), Aw(n), rhs(n), mid(n), Amid(n);
    tr.energy_history.push_back(op.norm(w));
    tr.times.push_back(0.0);
    for (std::int64_t k = 0; k < steps; ++k) {
        op.apply(w, Aw);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] - half * Aw[i];
        LinearSolution next = detail::pcg(shifted, shifted_diag, rhs, inner, cap, w);
        tr.inner_iterations += next.stats.iterations;
        for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (w[i] + next.x[i]);
        op.apply(mid, Amid);
        tr.dissipation += tau * op.inner(mid, Amid);
        for (std::size_t i = 0; i < n; ++i) tr.u_T[i] += tau * mid[i];
        w = std::move(next.x);
        tr.energy_history.push_back(op.norm(w));
        tr.times.push_back(k + 1 == steps ? T : tau * static_cast<double>(k + 1));
    }
    tr.w_final = std::move(w);
    return tr;
}

bool is_nonincreasing(std::span<const double> history, double rel_slack)
{
    for (std::size_t k = 1; k < history.size(); ++k) {
        if (history[k] > history[k - 1] * (1.0 + rel_slack)) return false;
    }
    return true;
}

} // namespace expreg
