#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "systolic/generators.hpp"
#include "systolic/oracle.hpp"

using namespace systolic;
using namespace systolic::oracle;
using gf::FieldPoly;

TEST_CASE("polynomial euclid") {
    auto A = FieldPoly::normalize({3, 0, 5}, 7);
    CHECK(euclid_poly_gcd(A, FieldPoly(7)) == A.monic());
    CHECK(euclid_poly_gcd(FieldPoly(7), A) == A.monic());
    CHECK_THROWS_AS(euclid_poly_gcd(FieldPoly(7), FieldPoly(7)), OracleError);
    CHECK_THROWS_AS(euclid_poly_gcd(FieldPoly(7), FieldPoly(5)), OracleError);

    // (x+1)^3 and (x+1)^2 over GF(2)
    auto g2 = euclid_poly_gcd(FieldPoly::normalize({1, 1, 1, 1}, 2), FieldPoly::normalize({1, 0, 1}, 2));
    CHECK(g2 == FieldPoly::normalize({1, 0, 1}, 2));

    // built by multiplication, then checked by division
    auto xp2 = FieldPoly::normalize({2, 1}, 7);
    auto P = xp2 * FieldPoly::normalize({3, 1}, 7), Q = xp2 * FieldPoly::normalize({5, 1}, 7);
    auto g7 = euclid_poly_gcd(P, Q);
    CHECK(g7 == xp2);
    CHECK(gf::divmod(P, g7).remainder.is_zero());
    CHECK(gf::divmod(Q, g7).remainder.is_zero());
}

TEST_CASE("polynomial euclid on constructed common factors") {
    gen::Rng rng(13);
    for (std::uint32_t p : {2u, 3u, 7u, 257u}) {
        for (int i = 0; i < 100; ++i) {
            auto G = gen::random_poly(rng, p, 5).monic();
            auto U = gen::random_poly(rng, p, 6), V = gen::random_poly(rng, p, 6);
            auto g = euclid_poly_gcd(G * U, G * V);
            // g is a multiple of G that divides both products
            REQUIRE(gf::divmod(g, G).remainder.is_zero());
            REQUIRE(gf::divmod(G * U, g).remainder.is_zero());
            REQUIRE(gf::divmod(G * V, g).remainder.is_zero());
            REQUIRE(g.lead().value() == 1);
        }
    }
}

TEST_CASE("integer gcds") {
    CHECK(euclid_int_gcd(12, 18) == 6);
    CHECK(euclid_int_gcd(-12, 18) == 6);
    CHECK(euclid_int_gcd(-7, 0) == 7);
    CHECK(euclid_int_gcd(1, 987654321) == 1);
    CHECK(euclid_int_gcd(INT64_MIN, 0) == std::uint64_t{1} << 63);
    CHECK_THROWS_AS(euclid_int_gcd(0, 0), OracleError);

    CHECK(binary_int_gcd(3, 5) == 1);
    CHECK(binary_int_gcd(9, 9) == 9);
    CHECK(binary_int_gcd(15, 25) == 5);
    CHECK_THROWS_AS(binary_int_gcd(4, 5), OracleError);

    for (std::uint64_t a = 1; a < 1024; a += 2)
        for (std::uint64_t b = 1; b < 1024; b += 2) {
            REQUIRE(binary_int_gcd(a, b) == euclid_uint_gcd(a, b));
            REQUIRE(euclid_uint_gcd(a, b) == std::gcd(a, b));
        }
}

TEST_CASE("dense LU without pivoting") {
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd b(4);
    b << 1, -2, 3, 4;
    CHECK(dense_lu_solve_nopivot(I, b).x == b);

    Eigen::Matrix2d M;
    M << 2, 1, 1, 2;
    auto s = dense_lu_solve_nopivot(M, Eigen::Vector2d(3, 3));
    CHECK(s.x(0) == doctest::Approx(1));
    CHECK(s.x(1) == doctest::Approx(1));
    CHECK((s.L * s.U - M).norm() < 1e-15);

    gen::Rng rng(8);
    for (int i = 0; i < 20; ++i) {
        Eigen::MatrixXd R(8, 8);
        for (int r = 0; r < 8; ++r) {
            double sum = 0;
            for (int c = 0; c < 8; ++c) sum += std::abs(R(r, c) = rng.uniform(-1, 1));
            R(r, r) = sum + 1;
        }
        Eigen::VectorXd y(8);
        for (int k = 0; k < 8; ++k) y(k) = rng.uniform(-1, 1);
        auto sol = dense_lu_solve_nopivot(R, y);
        CHECK((R * sol.x - y).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((sol.L * sol.U - R).norm() < 1e-12 * R.norm());
    }

    Eigen::Matrix2d Z;
    Z << 0, 1, 1, 0;
    CHECK_THROWS_AS(dense_lu_solve_nopivot(Z, Eigen::Vector2d(1, 1)), ZeroPivotError);
    CHECK_THROWS_AS(dense_lu_solve_nopivot(Z, Eigen::Vector3d(1, 1, 1)), OracleError);
}

TEST_CASE("serial cyclic Jacobi") {
    Eigen::MatrixXd D = Eigen::Vector3d(3, -1, 2).asDiagonal();
    auto d = serial_cyclic_jacobi(D);
    CHECK(d.sweeps == 0);
    CHECK(d.eigenvalues == Eigen::Vector3d(3, -1, 2));

    Eigen::Matrix2d X;
    X << 0, 1, 1, 0;
    auto x = serial_cyclic_jacobi(X);
    auto ev = x.eigenvalues;
    std::sort(ev.begin(), ev.end());
    CHECK(ev(0) == doctest::Approx(-1));
    CHECK(ev(1) == doctest::Approx(1));
    CHECK(x.rotations == 1);

    gen::Rng rng(21);
    for (int i = 0; i < 10; ++i) {
        auto A = gen::random_symmetric(rng, 8);
        auto r = serial_cyclic_jacobi(A);
        const auto& V = r.eigenvectors;
        CHECK((A * V - V * r.eigenvalues.asDiagonal()).norm() < 1e-10 * A.norm());
        CHECK(r.rotations <= static_cast<long>(r.sweeps) * 28);

        // eigenvalues agree with Eigen's own symmetric solver
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        auto mine = r.eigenvalues;
        std::sort(mine.begin(), mine.end());
        CHECK((mine - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10 * A.norm());
    }

    Eigen::Matrix2d N;
    N << 1, 2, 0, 1;
    CHECK_THROWS_AS(serial_cyclic_jacobi(N), OracleError);
}

TEST_CASE("generators") {
    gen::Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());
    gen::Rng r(1);
    for (int i = 0; i < 1000; ++i) {
        const auto v = r.uniform_int(-3, 3);
        REQUIRE(v >= -3);
        REQUIRE(v <= 3);
        const double u = r.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    for (int i = 0; i < 100; ++i) {
        auto P = gen::random_poly(r, 7, 16);
        REQUIRE(P.degree() <= 16);
        REQUIRE_FALSE(P.coeff(0).is_zero());
        auto [x, y] = gen::random_pm_pair(r, 10);
        REQUIRE(x % 2 != 0);
        REQUIRE(y != 0);
        auto [u, w] = gen::random_int_pair(r, 5);
        REQUIRE(u > 0);
        REQUIRE(u < 32);
        REQUIRE(w > 0);
        auto T = gen::random_dominant_toeplitz(r, 6);
        double off = 0;
        for (int k = -6; k <= 6; ++k)
            if (k != 0) off += std::abs(T.a(k));
        REQUIRE(std::abs(T.a(0)) > off);
    }
    auto S = gen::random_symmetric(r, 9);
    CHECK((S - S.transpose()).norm() == 0.0);
}
