#pragma once

#include "drawnet/drawup.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace drawnet {

inline constexpr int kDefaultMaxLag = 3;

using EventSpan = std::span<const std::uint8_t>;

/// Days t with a[t] = 1 and b[t + lag] = 1, for t + lag < T.
std::size_t joint_counts(EventSpan a, EventSpan b, int lag);

struct LaggedJointMatrix {
    std::vector<int> lags;
    std::vector<Eigen::MatrixXd> joint;  ///< joint[k](i, j) = count^lag_k(i, j) / T
    Eigen::VectorXd marginals;           ///< event count / T per entity
    std::size_t days = 0;
};

LaggedJointMatrix build_joint_matrices(const std::vector<DrawupVector>& vectors,
                                       int max_lag = kDefaultMaxLag);

/// joint^lag(i, j) - P_i * P_j for every lag. Entries may be negative.
std::vector<Eigen::MatrixXd> raw_interdependence(const LaggedJointMatrix& joint);

struct PermutationOptions {
    int n_perm = 100;
    double confidence = 0.95;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const PermutationOptions&) const = default;
};

/// Upper `confidence` quantile of the raw interdependence of (a, b) at `lag`
/// after independently shuffling the event positions of both vectors.
/// Zero when either vector has no events.
double permutation_threshold(EventSpan a, EventSpan b, int lag,
                             const PermutationOptions& options);

/// Same null for trend reinforcement: one shuffle of `v` compared with itself.
double self_permutation_threshold(EventSpan v, int lag, const PermutationOptions& options);

/// Per-job seed so results do not depend on scheduling.
std::uint64_t job_seed(std::uint64_t global_seed, std::size_t i, std::size_t j, int lag);

/// All pairs and lags. Jobs are distributed over `threads` workers (0 = hardware).
std::vector<Eigen::MatrixXd> permutation_thresholds(const std::vector<DrawupVector>& vectors,
                                                    const std::vector<int>& lags,
                                                    const PermutationOptions& options,
                                                    unsigned threads = 0);

struct FilterMeta {
    int n_perm = 0;
    double confidence = 0.0;
    std::uint64_t seed = 0;
    bool conditional = false;
};

struct DependencyMatrix {
    std::vector<std::string> entities;
    Eigen::MatrixXd weights;  ///< W(i, j) >= 0; diagonal is trend reinforcement
    std::string period_label;
    FilterMeta meta;
};

/// Keeps entries strictly above their threshold and sums them over lags.
/// Off-diagonal entries use every lag; the diagonal skips lag 0.
Eigen::MatrixXd filter_and_aggregate(const std::vector<Eigen::MatrixXd>& raw,
                                     const std::vector<Eigen::MatrixXd>& thresholds,
                                     const std::vector<int>& lags);

struct ComovementOptions {
    int max_lag = kDefaultMaxLag;
    PermutationOptions permutation;
    /// Divide row i by P_i (conditional-probability reading).
    bool conditional = false;
    unsigned threads = 0;
};

struct ComovementResult {
    LaggedJointMatrix joint;
    std::vector<Eigen::MatrixXd> raw;
    std::vector<Eigen::MatrixXd> thresholds;
    DependencyMatrix dependency;
};

/// Fills in `dependency` from precomputed thresholds (used by the stage cache).
ComovementResult assemble_dependency(const std::vector<DrawupVector>& vectors,
                                     std::vector<Eigen::MatrixXd> thresholds,
                                     const ComovementOptions& options);

ComovementResult estimate_dependency(const std::vector<DrawupVector>& vectors,
                                     const ComovementOptions& options);

}  // namespace drawnet
