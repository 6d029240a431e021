#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "systolic/engine.hpp"

namespace systolic::eig {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// 2x2 block ((alpha, beta), (gamma, delta)).
struct Block {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
    friend bool operator==(const Block&, const Block&) = default;
};

struct RotationPair {
    double c = 1, s = 0;
    friend bool operator==(const RotationPair&, const RotationPair&) = default;
};

/// Rotation zeroing the off-diagonal of ((alpha, beta), (beta, delta)) with
/// |theta| <= pi/4.
template <typename Scalar>
std::pair<Scalar, Scalar> jacobi_cs(Scalar alpha, Scalar beta, Scalar delta) {
    if (beta == Scalar(0)) return {Scalar(1), Scalar(0)};
    const Scalar tau = (delta - alpha) / (Scalar(2) * beta);
    const Scalar sign = tau >= Scalar(0) ? Scalar(1) : Scalar(-1);
    const Scalar t = sign / (std::abs(tau) + std::sqrt(Scalar(1) + tau * tau));
    const Scalar c = Scalar(1) / std::sqrt(Scalar(1) + t * t);
    return {c, t * c};
}

inline RotationPair jacobi_rotation(double alpha, double beta, double delta) {
    auto [c, s] = jacobi_cs(alpha, beta, delta);
    return {c, s};
}

/// [c_i -s_i; s_i c_i] B [c_j s_j; -s_j c_j]
Block rotate_block(const Block& b, const RotationPair& ri, const RotationPair& rj);

/// Half-size h grid of 2x2 blocks covering 2h positions. tracker[p] is the
/// original index held at position p (0-based); index n marks padding.
struct BlockGrid {
    int h = 0;
    int n = 0;  ///< unpadded order
    std::vector<Block> blocks;
    std::vector<int> tracker;

    Block& at(int i, int j) { return blocks[static_cast<std::size_t>(i * h + j)]; }
    const Block& at(int i, int j) const { return blocks[static_cast<std::size_t>(i * h + j)]; }
    int positions() const { return 2 * h; }

    /// Element at positions (p, q), 0-based.
    double element(int p, int q) const;
    double& element(int p, int q);

    static BlockGrid pack(const Eigen::MatrixXd& A);
    /// Matrix in position coordinates, including any padding.
    Eigen::MatrixXd to_dense() const;
    double off_norm() const;
    bool symmetric(double tol) const;

    friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

/// P applied to 1-based position p for 2h positions: 1 fixed, odd positions
/// move up by two (2h-1 to 2h), even positions down by two (2 to 3).
int permutation_target(int p, int positions);

BlockGrid permute(const BlockGrid& g);

/// Diagonal pairs (original indices, 1-based) of the grid's current step.
std::vector<std::pair<int, int>> diagonal_pairs(const BlockGrid& g);

struct GridStep {
    BlockGrid grid;
    std::vector<RotationPair> rotations;  ///< one per diagonal cell
    std::vector<bool> performed;
    double annihilated = 0;  ///< sum of beta_kk^2 over performed rotations
};

/// Rotates every block, then permutes.
GridStep grid_step(const BlockGrid& g, double threshold);

/// Block rotation of diagonal cell i and the flag whether it was performed.
std::pair<RotationPair, bool> diagonal_rotation(const Block& b, double threshold);
/// Diagonal block after its own rotation (off-diagonal forced to zero when performed).
Block rotate_diagonal(const Block& b, const RotationPair& r, bool performed);

/// threshold(sweep, off_F(A0), n)
using ThresholdSchedule = std::function<double(int sweep, double off0, int n)>;
double default_threshold(int sweep, double off0, int n);

enum class Mode { broadcast, delayed };

struct SweepReport {
    int sweeps_used = 0;
    int steps = 0;
    bool converged = false;
    std::vector<double> off_norms;  ///< before the first step, then after each step
    std::vector<int> skipped_per_sweep;
    int rotations_performed = 0;
};

struct RunOptions {
    Mode mode = Mode::broadcast;
    int max_sweeps = 10;
    bool vectors = false;
    bool keep_steps = false;  ///< keep every post-step grid and its rotations
    bool trace = false;       ///< engine trace (delayed mode)
    int trace_stride = 1;
    ThresholdSchedule threshold = default_threshold;
};

struct EigenResult {
    Eigen::VectorXd eigenvalues;                ///< ordered by original index at each final position
    std::optional<Eigen::MatrixXd> eigenvectors;  ///< columns match eigenvalues
    SweepReport report;
    std::vector<BlockGrid> step_grids;          ///< with keep_steps: grid after each step
    std::vector<GridStep> steps;                ///< with keep_steps (broadcast) rotations per step
    std::int64_t ticks = 0;                     ///< delayed mode: ticks simulated
    engine::Trace trace;
};

EigenResult run_sweeps(const Eigen::MatrixXd& A, const RunOptions& opts = {});

/// |Delta_ij - Delta_{i+1,j+1}| for the delayed schedule, maximised over the grid.
int max_dependency_slack(int h);

}  // namespace systolic::eig
