#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "systolic/gfield.hpp"
#include "systolic/toeplitz.hpp"

namespace systolic::gen {

/// Seeded generator whose derived draws do not depend on the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }
    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

private:
    std::mt19937_64 eng_;
};

/// Degree in [0, max_degree], uniform coefficients, nonzero leading and
/// constant terms.
gf::FieldPoly random_poly(Rng& rng, std::uint32_t p, int max_degree);

/// Pair 0 < a, b < 2^n.
std::pair<std::uint64_t, std::uint64_t> random_int_pair(Rng& rng, int n);

/// Odd a and nonzero b with |a|, |b| < 2^n.
std::pair<std::int64_t, std::int64_t> random_pm_pair(Rng& rng, int n);

/// Bands uniform in [-1, 1], a_0 raised above the sum of the other magnitudes.
toeplitz::ToeplitzBands random_dominant_toeplitz(Rng& rng, int n);

/// Q diag(lambda) Q^T with lambda uniform in [-1, 1] and Q a product of
/// seeded plane rotations.
Eigen::MatrixXd random_symmetric(Rng& rng, int n);

}  // namespace systolic::gen
