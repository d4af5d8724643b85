#include "expreg/dense.hpp"

#include "expreg/error.hpp"

#include <cmath>
#include <sstream>

namespace expreg {

namespace {

void check_cap(const DiscreteOperator& op)
{
    if (op.size() > dense_size_cap) {
        std::ostringstream os;
        os << "dense oracle limited to n_int <= " << dense_size_cap << " (got " << op.size() << ")";
        throw Error(ErrorCode::TooLarge, os.str());
    }
}

void check_length(const DiscreteOperator& op, std::span<const double> v)
{
    if (static_cast<std::int64_t>(v.size()) != op.size()) throw Error(ErrorCode::DimMismatch, "vector has the wrong length");
}

} // namespace

Eigen::MatrixXd to_dense(const DiscreteOperator& op)
{
    check_cap(op);
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::MatrixXd A(n, n);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0), col(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        e[static_cast<std::size_t>(j)] = 1.0;
        op.apply(e, col);
        e[static_cast<std::size_t>(j)] = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) A(i, j) = col[static_cast<std::size_t>(i)];
    }
    return A;
}

std::vector<double> dense_solve(const DiscreteOperator& op, std::span<const double> b)
{
    check_length(op, b);
    const Eigen::MatrixXd A = to_dense(op);
    const Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularOperator, "Cholesky factorization failed");
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd x = llt.solve(bv);
    return {x.data(), x.data() + x.size()};
}

DenseSpectrum dense_spectrum(const DiscreteOperator& op)
{
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(op));
    if (es.info() != Eigen::Success) throw Error(ErrorCode::SingularOperator, "eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

std::vector<double> expm_dense(const DiscreteOperator& op, std::span<const double> g, double T)
{
    check_length(op, g);
    if (T == 0.0) return {g.begin(), g.end()};
    return dense_spectrum(op).apply_function([T](double lam) { return std::exp(-T * lam); }, g);
}

std::vector<double> time_integral_dense(const DiscreteOperator& op, std::span<const double> g, double T)
{
    check_length(op, g);
    return dense_spectrum(op).apply_function([T](double lam) { return -std::expm1(-T * lam) / lam; }, g);
}

} // namespace expreg
