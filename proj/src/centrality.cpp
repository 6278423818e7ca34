#include "drawnet/centrality.hpp"

#include <Eigen/LU>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drawnet {

namespace {

void check_weights(const Eigen::MatrixXd& w) {
    if (w.rows() != w.cols()) throw std::invalid_argument("dependency matrix must be square");
    if (!w.allFinite() || (w.array() < 0.0).any()) {
        throw std::invalid_argument("dependency matrix entries must be finite and >= 0");
    }
}

Eigen::VectorXd scale_to_unit_max(const Eigen::VectorXd& x) {
    if (x.size() == 0) return x;
    const double top = x.maxCoeff();
    return top > 0.0 ? Eigen::VectorXd(x / top) : Eigen::VectorXd::Zero(x.size());
}

}  // namespace

void FeedbackOptions::validate() const {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
}

NormalizedDependency normalize_dependency(const Eigen::MatrixXd& weights, Normalization mode) {
    check_weights(weights);
    NormalizedDependency out;
    out.mode = mode;
    out.matrix = weights;
    const Eigen::Index n = weights.rows();
    out.zero_lines.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double sum = mode == Normalization::Column ? weights.col(k).sum() : weights.row(k).sum();
        if (sum > 0.0) {
            if (mode == Normalization::Column) {
                out.matrix.col(k) /= sum;
            } else {
                out.matrix.row(k) /= sum;
            }
        } else {
            out.zero_lines[static_cast<std::size_t>(k)] = true;
        }
    }
    return out;
}

double feedback_residual(const Eigen::MatrixXd& normalized, double beta, const Eigen::VectorXd& x) {
    if (x.size() == 0) return 0.0;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(normalized.rows());
    return (x - normalized * ones - beta * (normalized * x)).cwiseAbs().maxCoeff();
}

Eigen::VectorXd fixed_point_feedback(const Eigen::MatrixXd& normalized, double beta, int iterations,
                                     double tolerance) {
    const Eigen::Index n = normalized.rows();
    const Eigen::VectorXd rhs = normalized * Eigen::VectorXd::Ones(n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < iterations; ++k) {
        Eigen::VectorXd next = rhs + beta * (normalized * x);
        const double step = n == 0 ? 0.0 : (next - x).cwiseAbs().maxCoeff();
        x.swap(next);
        if (tolerance > 0.0 && step <= tolerance) break;
    }
    return x;
}

FeedbackSolution solve_feedback(const Eigen::MatrixXd& normalized, double beta,
                                const FeedbackOptions& options) {
    FeedbackOptions checked = options;
    checked.beta = beta;
    checked.validate();
    const Eigen::Index n = normalized.rows();
    if (n == 0) throw std::invalid_argument("centrality of an empty network");
    if (normalized.cols() != n) throw std::invalid_argument("normalized matrix must be square");

    FeedbackSolution out;
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - beta * normalized;
    const Eigen::VectorXd rhs = normalized * Eigen::VectorXd::Ones(n);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    out.raw = lu.solve(rhs);
    out.residual = feedback_residual(normalized, beta, out.raw);

    // beta < 1 with a substochastic matrix keeps the system nonsingular; the
    // iteration only takes over if round-off says otherwise.
    const double scale = std::max(1.0, out.raw.allFinite() ? out.raw.cwiseAbs().maxCoeff() : 1.0);
    if (!out.raw.allFinite() || lu.rcond() < 1e-14 || out.residual > 1e-10 * scale) {
        out.raw = fixed_point_feedback(normalized, beta, options.max_iterations, options.tolerance);
        out.residual = feedback_residual(normalized, beta, out.raw);
        out.used_fallback = true;
    }
    out.normalized = scale_to_unit_max(out.raw);
    return out;
}

FeedbackSolution impacting_centrality(const Eigen::MatrixXd& weights, const FeedbackOptions& options) {
    options.validate();
    const auto wn = normalize_dependency(weights, options.normalization);
    return solve_feedback(wn.matrix, options.beta, options);
}

FeedbackSolution impacted_centrality(const Eigen::MatrixXd& weights, const FeedbackOptions& options) {
    return impacting_centrality(weights.transpose(), options);
}

Eigen::VectorXd centrality_ratio(const Eigen::VectorXd& impacting, const Eigen::VectorXd& impacted) {
    if (impacting.size() != impacted.size()) throw std::invalid_argument("centrality_ratio: size mismatch");
    Eigen::VectorXd r(impacting.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double b = impacting(i);
        const double c = impacted(i);
        if (c > 0.0) {
            r(i) = b / c;
        } else if (b > 0.0) {
            r(i) = std::numeric_limits<double>::infinity();
        } else {
            r(i) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return r;
}

std::vector<CentralityProfile> centrality_profiles(const std::vector<std::string>& names,
                                                   const Eigen::MatrixXd& weights,
                                                   const FeedbackOptions& options) {
    if (names.size() != static_cast<std::size_t>(weights.rows())) {
        throw std::invalid_argument("centrality_profiles: name count mismatch");
    }
    const auto b = impacting_centrality(weights, options);
    const auto c = impacted_centrality(weights, options);
    const auto r = centrality_ratio(b.normalized, c.normalized);
    std::vector<CentralityProfile> out;
    out.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out.push_back({names[i], b.normalized(k), c.normalized(k), r(k), options.beta});
    }
    return out;
}

}  // namespace drawnet
