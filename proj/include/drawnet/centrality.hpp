#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace drawnet {

enum class Normalization {
    Column,  ///< W(i, j) / sum_l W(l, j)
    Row,     ///< W(i, j) / sum_l W(i, l)
};

struct NormalizedDependency {
    Eigen::MatrixXd matrix;
    Normalization mode = Normalization::Column;
    std::vector<bool> zero_lines;  ///< all-zero columns (or rows in Row mode)
};

NormalizedDependency normalize_dependency(const Eigen::MatrixXd& weights,
                                          Normalization mode = Normalization::Column);

struct FeedbackOptions {
    double beta = 0.85;
    Normalization normalization = Normalization::Column;
    /// Fixed-point fallback stops when successive iterates differ by less than this.
    double tolerance = 1e-13;
    int max_iterations = 100000;

    void validate() const;
    bool operator==(const FeedbackOptions&) const = default;
};

struct FeedbackSolution {
    Eigen::VectorXd raw;         ///< solution of x = M 1 + beta M x
    Eigen::VectorXd normalized;  ///< raw / max(raw), or zeros
    double residual = 0.0;       ///< ||x - M 1 - beta M x||_inf
    bool used_fallback = false;
};

/// Dense LU solve of (I - beta M) x = M 1, with fixed-point iteration as the fallback.
FeedbackSolution solve_feedback(const Eigen::MatrixXd& normalized, double beta,
                                const FeedbackOptions& options = {});

/// x <- M 1 + beta M x from x = 0.
Eigen::VectorXd fixed_point_feedback(const Eigen::MatrixXd& normalized, double beta,
                                     int iterations, double tolerance = 0.0);

double feedback_residual(const Eigen::MatrixXd& normalized, double beta,
                         const Eigen::VectorXd& x);

/// How strongly each node's drawups propagate: feedback on the normalized W.
FeedbackSolution impacting_centrality(const Eigen::MatrixXd& weights,
                                      const FeedbackOptions& options = {});

/// How strongly each node receives drawups: impacting centrality of W transposed.
FeedbackSolution impacted_centrality(const Eigen::MatrixXd& weights,
                                     const FeedbackOptions& options = {});

/// b / c, with +inf where c = 0 < b and NaN where both vanish.
Eigen::VectorXd centrality_ratio(const Eigen::VectorXd& impacting,
                                 const Eigen::VectorXd& impacted);

struct CentralityProfile {
    std::string entity_id;
    double impacting = 0.0;
    double impacted = 0.0;
    double ratio = 0.0;
    double beta = 0.85;
};

std::vector<CentralityProfile> centrality_profiles(const std::vector<std::string>& names,
                                                   const Eigen::MatrixXd& weights,
                                                   const FeedbackOptions& options = {});

}  // namespace drawnet
