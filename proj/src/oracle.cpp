#include "systolic/oracle.hpp"

#include <cstdlib>
#include <utility>

namespace systolic::oracle {

gf::FieldPoly euclid_poly_gcd(gf::FieldPoly A, gf::FieldPoly B) {
    if (A.modulus() != B.modulus()) throw OracleError("polynomials over different fields");
    if (A.is_zero() && B.is_zero()) throw OracleError("gcd(0, 0) is undefined");
    while (!B.is_zero()) {
        auto r = gf::divmod(A, B).remainder;
        A = std::move(B);
        B = std::move(r);
    }
    return A.monic();
}

std::uint64_t euclid_uint_gcd(std::uint64_t a, std::uint64_t b) {
    if (a == 0 && b == 0) throw OracleError("gcd(0, 0) is undefined");
    while (b != 0) {
        auto t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::uint64_t euclid_int_gcd(std::int64_t a, std::int64_t b) {
    auto mag = [](std::int64_t v) { return v < 0 ? 0 - static_cast<std::uint64_t>(v) : static_cast<std::uint64_t>(v); };
    return euclid_uint_gcd(mag(a), mag(b));
}

std::uint64_t binary_int_gcd(std::uint64_t a, std::uint64_t b) {
    if (a % 2 == 0 || b % 2 == 0) throw OracleError("binary gcd expects odd inputs");
    // both odd: the difference is even and is reduced until odd
    while (a != b) {
        if (a < b) std::swap(a, b);
        std::uint64_t t = a - b;
        do t /= 2; while (t % 2 == 0);
        a = t;
    }
    return a;
}

JacobiResult serial_cyclic_jacobi(const Eigen::MatrixXd& A0, double tol, int max_sweeps) {
    const Eigen::Index n = A0.rows();
    if (A0.cols() != n) throw OracleError("matrix must be square");
    const double norm = A0.norm();
    if ((A0 - A0.transpose()).norm() > 1e-12 * norm) throw OracleError("matrix is not symmetric");

    Eigen::MatrixXd A = A0;
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    auto off = [&A, n] {
        double s = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (i != j) s += A(i, j) * A(i, j);
        return std::sqrt(s);
    };

    JacobiResult r;
    while (off() > tol * norm && r.sweeps < max_sweeps) {
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                // classical formulation via theta = cot(2 phi)
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                A(p, q) = A(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
                ++r.rotations;
            }
        }
        ++r.sweeps;
    }
    r.eigenvalues = A.diagonal();
    r.eigenvectors = V;
    return r;
}

}  // namespace systolic::oracle
