#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "systolic/engine.hpp"

namespace systolic::toeplitz {

struct SingularMinorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Toeplitz system of order n+1: entry (i,j) is a_{j-i}, diagonals a_{-n}..a_n.
template <typename Scalar>
struct BasicToeplitzBands {
    int n = 0;
    std::vector<Scalar> diag;  ///< diag[k + n] = a_k
    std::vector<Scalar> rhs;   ///< b_0..b_n

    BasicToeplitzBands() = default;
    BasicToeplitzBands(std::vector<Scalar> diagonals, std::vector<Scalar> b)
        : n(static_cast<int>(b.size()) - 1), diag(std::move(diagonals)), rhs(std::move(b)) {
        if (rhs.empty()) throw std::invalid_argument("empty right-hand side");
        if (diag.size() != 2 * rhs.size() - 1)
            throw std::invalid_argument("expected 2n+1 diagonals for n+1 unknowns");
    }

    /// a_k, zero outside -n..n.
    Scalar a(int k) const { return k < -n || k > n ? Scalar(0) : diag[static_cast<std::size_t>(k + n)]; }
    Scalar b(int i) const { return i < 0 || i > n ? Scalar(0) : rhs[static_cast<std::size_t>(i)]; }
    int order() const { return n + 1; }

    Scalar max_abs() const {
        Scalar m(0);
        for (auto v : diag) m = std::max<Scalar>(m, std::abs(v));
        return m;
    }
    Scalar pivot_tolerance() const { return Scalar(1e-12) * max_abs(); }

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M(n + 1, n + 1);
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) M(i, j) = a(j - i);
        return M;
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs_vector() const {
        return Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(rhs.data(), n + 1);
    }
};

using ToeplitzBands = BasicToeplitzBands<double>;

/// Generators of the Toeplitz parts of A^(-k) and A^(+k), stored by diagonal
/// offset d in -n..n, plus multipliers and transformed right-hand sides.
template <typename Scalar>
struct BasicBareissState {
    int n = 0;
    int k = 0;                   ///< forward steps taken
    std::vector<Scalar> minus;   ///< minus[d + n]: Toeplitz part of A^(-k)
    std::vector<Scalar> plus;    ///< plus[d + n]: Toeplitz part of A^(+k)
    std::vector<Scalar> m_minus; ///< m_{-k} at index k-1
    std::vector<Scalar> m_plus;  ///< m_{+k} at index k-1
    std::vector<Scalar> b_minus; ///< b^(-k)
    std::vector<Scalar> b_plus;  ///< b^(+k)
    Scalar tol = 0;

    Scalar tm(int d) const { return d < -n || d > n ? Scalar(0) : minus[static_cast<std::size_t>(d + n)]; }
    Scalar tp(int d) const { return d < -n || d > n ? Scalar(0) : plus[static_cast<std::size_t>(d + n)]; }

    // The four band views, indexed 0..n.
    std::vector<Scalar> alpha() const { return band([&](int j) { return tm(-j - 1); }); }
    std::vector<Scalar> beta() const { return band([&](int j) { return tm(j); }); }
    std::vector<Scalar> gamma() const { return band([&](int j) { return tp(-j); }); }
    std::vector<Scalar> delta() const { return band([&](int j) { return tp(j + 1); }); }

    /// Auxiliary words held, for the O(n) storage check.
    std::size_t storage_words() const {
        return minus.size() + plus.size() + m_minus.size() + m_plus.size() + b_minus.size() + b_plus.size();
    }

private:
    template <typename F>
    std::vector<Scalar> band(F f) const {
        std::vector<Scalar> v;
        for (int j = 0; j <= n; ++j) v.push_back(f(j));
        return v;
    }
};

using BareissBandState = BasicBareissState<double>;

/// Forward Bareiss recursions for k = 1..n.
template <typename Scalar>
BasicBareissState<Scalar> bareiss_forward(const BasicToeplitzBands<Scalar>& T) {
    const int n = T.n;
    BasicBareissState<Scalar> s;
    s.n = n;
    s.tol = T.pivot_tolerance();
    s.minus = T.diag;
    s.plus = T.diag;
    s.b_minus = T.rhs;
    s.b_plus = T.rhs;
    auto at = [n](std::vector<Scalar>& v, int d) -> Scalar& { return v[static_cast<std::size_t>(d + n)]; };
    if (std::abs(s.tp(0)) <= s.tol) throw SingularMinorError("singular leading minor: a_0 vanishes");
    for (int k = 1; k <= n; ++k) {
        // A^(-k) = A^(1-k) - m_{-k} Z_{-k} A^(k-1)
        const Scalar mm = s.tm(-k) / s.tp(0);
        std::vector<Scalar> nm(s.minus.size());
        for (int d = -n; d <= n; ++d) nm[static_cast<std::size_t>(d + n)] = s.tm(d) - mm * s.tp(d + k);
        s.minus = std::move(nm);
        for (int i = n; i >= k; --i)
            s.b_minus[static_cast<std::size_t>(i)] -= mm * s.b_plus[static_cast<std::size_t>(i - k)];
        const Scalar pivot = s.tm(0);
        if (std::abs(pivot) <= s.tol)
            throw SingularMinorError("singular leading minor at step " + std::to_string(k));
        // A^(+k) = A^(k-1) - m_{+k} Z_{+k} A^(-k)
        const Scalar mp = s.tp(k) / pivot;
        for (int d = -n; d <= n; ++d) at(s.plus, d) -= mp * s.tm(d - k);
        for (int i = 0; i + k <= n; ++i)
            s.b_plus[static_cast<std::size_t>(i)] -= mp * s.b_minus[static_cast<std::size_t>(i + k)];
        s.m_minus.push_back(mm);
        s.m_plus.push_back(mp);
        s.k = k;
    }
    return s;
}

/// Visits rows n, n-1, ..., 0 of U = A^(-n), each regenerated from the saved
/// generators and multipliers. `row(k, get)` receives get(j) = U(k, j).
template <typename Scalar, typename RowFn>
void regenerate_rows(BasicBareissState<Scalar> s, RowFn row) {
    const int n = s.n;
    for (int k = n; k >= 0; --k) {
        row(k, [&s, k](int j) { return j < k ? Scalar(0) : s.tm(j - k); });
        if (k == 0) break;
        // A^(k-1) = A^(k) + m_{+k} Z_{+k} A^(-k)
        const Scalar mp = s.m_plus[static_cast<std::size_t>(k - 1)];
        for (int d = -n; d <= n; ++d) s.plus[static_cast<std::size_t>(d + n)] += mp * s.tm(d - k);
        // A^(1-k) = A^(-k) + m_{-k} Z_{-k} A^(k-1)
        const Scalar mm = s.m_minus[static_cast<std::size_t>(k - 1)];
        std::vector<Scalar> nm(s.minus.size());
        for (int d = -n; d <= n; ++d) nm[static_cast<std::size_t>(d + n)] = s.tm(d) + mm * s.tp(d + k);
        s.minus = std::move(nm);
    }
}

/// Solves A^(-n) x = b^(-n), regenerating U one row at a time.
template <typename Scalar>
std::vector<Scalar> bareiss_back_substitute(const BasicBareissState<Scalar>& s) {
    if (s.k != s.n) throw std::logic_error("forward pass incomplete");
    std::vector<Scalar> x(static_cast<std::size_t>(s.n + 1), Scalar(0));
    regenerate_rows(s, [&](int k, auto u) {
        const Scalar piv = u(k);
        if (std::abs(piv) <= s.tol) throw SingularMinorError("zero regenerated diagonal");
        Scalar acc = s.b_minus[static_cast<std::size_t>(k)];
        for (int j = k + 1; j <= s.n; ++j) acc -= u(j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(k)] = acc / piv;
    });
    return x;
}

/// Upper factor of the forward pass as a dense matrix (test helper).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> bareiss_upper(const BasicBareissState<Scalar>& s) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> U =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(s.n + 1, s.n + 1);
    regenerate_rows(s, [&](int k, auto u) {
        for (int j = k; j <= s.n; ++j) U(k, j) = u(j);
    });
    return U;
}

template <typename Scalar>
std::vector<Scalar> bareiss_solve(const BasicToeplitzBands<Scalar>& T) {
    return bareiss_back_substitute(bareiss_forward(T));
}

// ---------------------------------------------------------------- systolic

struct ToeplitzCellState {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
    double lambda = 0, mu = 0, xi = 0, eta = 0;
};

struct ToeplitzIn {
    double inL1 = 0, inL2 = 0, inR1 = 0, inR2 = 0, inR3 = 0;
};

struct ToeplitzOut {
    double outL1 = 0, outL2 = 0, outL3 = 0, outR1 = 0, outR2 = 0;
};

struct ToeplitzStep {
    ToeplitzCellState state;
    ToeplitzOut out;
    bool active = false;
    int multiplications = 0;
};

bool phase1_active(int k, int n, std::int64_t T);
bool phase2_active(int k, int n, std::int64_t T);

/// One tick of cell P_k. `prev_out` is the latched output returned unchanged
/// when the cell is idle. Throws SingularMinorError when cell 0 would divide
/// by a value of magnitude <= tol.
ToeplitzStep toeplitz_cell_step(int k, int n, std::int64_t T, ToeplitzCellState s, const ToeplitzIn& in,
                                const ToeplitzOut& prev_out, double tol);

ToeplitzCellState initial_cell_state(const ToeplitzBands& T, int k);

struct SystolicOptions {
    bool trace = false;
    int trace_stride = 1;
};

struct SystolicResult {
    std::vector<double> x;
    std::int64_t ticks = 0;            ///< ticks simulated (4n+1)
    std::int64_t completion_tick = 0;  ///< last tick on which any cell was active
    std::int64_t multiplications = 0;  ///< divisions not counted
    std::size_t registers_per_cell = 0;
    engine::Trace trace;
};

SystolicResult systolic_toeplitz_solve(const ToeplitzBands& T, const SystolicOptions& opts = {});

}  // namespace systolic::toeplitz
