#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "systolic/gfield.hpp"

namespace systolic::oracle {

struct OracleError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroPivotError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Monic GCD by repeated division with remainder.
gf::FieldPoly euclid_poly_gcd(gf::FieldPoly A, gf::FieldPoly B);

std::uint64_t euclid_int_gcd(std::int64_t a, std::int64_t b);
std::uint64_t euclid_uint_gcd(std::uint64_t a, std::uint64_t b);

/// Binary GCD for odd positive a, b.
std::uint64_t binary_int_gcd(std::uint64_t a, std::uint64_t b);

template <typename Scalar>
struct LuSolution {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> U;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> L;  ///< unit lower
};

/// Gaussian elimination without pivoting. Throws ZeroPivotError when a pivot
/// magnitude is <= tol.
template <typename MatrixT, typename VectorT>
auto dense_lu_solve_nopivot(const Eigen::MatrixBase<MatrixT>& M, const Eigen::MatrixBase<VectorT>& b,
                            typename MatrixT::Scalar tol = typename MatrixT::Scalar(0)) {
    using Scalar = typename MatrixT::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = M.rows();
    if (M.cols() != n || b.size() != n) throw OracleError("dimension mismatch");
    Mat U = M;
    Mat L = Mat::Identity(n, n);
    Vec y = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(U(k, k)) <= tol) throw ZeroPivotError("zero pivot in unpivoted elimination");
        for (Eigen::Index i = k + 1; i < n; ++i) {
            const Scalar f = U(i, k) / U(k, k);
            L(i, k) = f;
            for (Eigen::Index j = k; j < n; ++j) U(i, j) -= f * U(k, j);
            y(i) -= f * y(k);
        }
    }
    Vec x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        Scalar acc = y(i);
        for (Eigen::Index j = i + 1; j < n; ++j) acc -= U(i, j) * x(j);
        x(i) = acc / U(i, i);
    }
    return LuSolution<Scalar>{x, U, L};
}

struct JacobiResult {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    int sweeps = 0;
    long rotations = 0;
};

/// Cyclic-by-rows Jacobi: pairs (0,1), (0,2), ..., (n-2,n-1) per sweep, until
/// the off-diagonal Frobenius norm is below tol * ||A||_F.
JacobiResult serial_cyclic_jacobi(const Eigen::MatrixXd& A, double tol = 1e-12, int max_sweeps = 50);

}  // namespace systolic::oracle
