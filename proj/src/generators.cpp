#include "systolic/generators.hpp"

#include <cmath>

namespace systolic::gen {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(eng_());
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do v = eng_(); while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
}

gf::FieldPoly random_poly(Rng& rng, std::uint32_t p, int max_degree) {
    const int deg = static_cast<int>(rng.uniform_int(0, max_degree));
    std::vector<std::int64_t> c(static_cast<std::size_t>(deg) + 1);
    for (auto& x : c) x = rng.uniform_int(0, p - 1);
    c.front() = rng.uniform_int(1, p - 1);
    c.back() = rng.uniform_int(1, p - 1);
    return gf::FieldPoly::normalize(c, p);
}

std::pair<std::uint64_t, std::uint64_t> random_int_pair(Rng& rng, int n) {
    auto draw = [&] {
        std::uint64_t v;
        do {
            v = rng.bits();
            if (n < 64) v &= (std::uint64_t{1} << n) - 1;
        } while (v == 0);
        return v;
    };
    auto a = draw();
    auto b = draw();
    return {a, b};
}

std::pair<std::int64_t, std::int64_t> random_pm_pair(Rng& rng, int n) {
    const std::int64_t top = (std::int64_t{1} << n) - 1;
    std::int64_t a;
    do a = rng.uniform_int(-top, top); while (a % 2 == 0);
    std::int64_t b;
    do b = rng.uniform_int(-top, top); while (b == 0);
    return {a, b};
}

toeplitz::ToeplitzBands random_dominant_toeplitz(Rng& rng, int n) {
    std::vector<double> diag(static_cast<std::size_t>(2 * n + 1));
    double sum = 0;
    for (auto& v : diag) {
        v = rng.uniform(-1.0, 1.0);
        sum += std::abs(v);
    }
    auto& a0 = diag[static_cast<std::size_t>(n)];
    sum -= std::abs(a0);
    a0 = (a0 < 0 ? -1.0 : 1.0) * (sum + 1.0 + std::abs(a0));
    std::vector<double> b(static_cast<std::size_t>(n + 1));
    for (auto& v : b) v = rng.uniform(-1.0, 1.0);
    return toeplitz::ToeplitzBands(std::move(diag), std::move(b));
}

Eigen::MatrixXd random_symmetric(Rng& rng, int n) {
    Eigen::VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
    const int rotations = 3 * n * n;
    for (int k = 0; k < rotations && n > 1; ++k) {
        const int i = static_cast<int>(rng.uniform_int(0, n - 1));
        int j = static_cast<int>(rng.uniform_int(0, n - 2));
        if (j >= i) ++j;
        const double th = rng.uniform(-M_PI, M_PI);
        const double c = std::cos(th), s = std::sin(th);
        for (int r = 0; r < n; ++r) {
            const double qi = Q(r, i), qj = Q(r, j);
            Q(r, i) = c * qi - s * qj;
            Q(r, j) = s * qi + c * qj;
        }
    }
    Eigen::MatrixXd A = Q * lambda.asDiagonal() * Q.transpose();
    return (A + A.transpose()) / 2.0;
}

}  // namespace systolic::gen
