#include "drawnet/comovement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace drawnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void check_lag(int lag, std::size_t days) {
    if (lag < 0 || static_cast<std::size_t>(lag) >= std::max<std::size_t>(days, 1)) {
        throw std::invalid_argument("lag " + std::to_string(lag) + " out of range");
    }
}

std::size_t event_count(EventSpan v) {
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](auto e) { return e != 0; }));
}

/// Uniform random k-subset of [0, n) (Floyd), marked in `marks` and listed in `picked`.
void sample_positions(std::size_t n, std::size_t k, std::mt19937_64& rng,
                      std::vector<std::uint8_t>& marks, std::vector<std::size_t>& picked) {
    picked.clear();
    for (std::size_t j = n - k; j < n; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        const std::size_t pos = marks[t] ? j : t;
        marks[pos] = 1;
        picked.push_back(pos);
    }
}

void clear_marks(std::vector<std::uint8_t>& marks, const std::vector<std::size_t>& picked) {
    for (auto p : picked) marks[p] = 0;
}

/// Linear-interpolation quantile of an unsorted sample.
double quantile(std::vector<double> sample, double q) {
    std::sort(sample.begin(), sample.end());
    const double h = static_cast<double>(sample.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sample.size() - 1);
    return sample[lo] + (h - static_cast<double>(lo)) * (sample[hi] - sample[lo]);
}

}  // namespace

std::size_t joint_counts(EventSpan a, EventSpan b, int lag) {
    if (a.size() != b.size()) throw std::invalid_argument("joint_counts: length mismatch");
    if (lag < 0) throw std::invalid_argument("joint_counts: negative lag");
    const auto tau = static_cast<std::size_t>(lag);
    std::size_t count = 0;
    for (std::size_t t = 0; t + tau < a.size(); ++t) {
        if (a[t] && b[t + tau]) ++count;
    }
    return count;
}

LaggedJointMatrix build_joint_matrices(const std::vector<DrawupVector>& vectors, int max_lag) {
    if (vectors.empty()) throw std::invalid_argument("build_joint_matrices: no vectors");
    if (max_lag < 0) throw std::invalid_argument("build_joint_matrices: negative max lag");
    const std::size_t days = vectors.front().events.size();
    if (days == 0) throw std::invalid_argument("build_joint_matrices: empty vectors");
    for (const auto& v : vectors) {
        if (v.events.size() != days) throw std::invalid_argument("build_joint_matrices: length mismatch");
    }

    const auto n = static_cast<Eigen::Index>(vectors.size());
    const double inv_t = 1.0 / static_cast<double>(days);
    LaggedJointMatrix out;
    out.days = days;
    out.marginals.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.marginals(i) = static_cast<double>(event_count(vectors[static_cast<std::size_t>(i)].events)) * inv_t;
    }
    for (int lag = 0; lag <= max_lag; ++lag) {
        Eigen::MatrixXd d(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                d(i, j) = static_cast<double>(joint_counts(vectors[static_cast<std::size_t>(i)].events,
                                                           vectors[static_cast<std::size_t>(j)].events, lag)) *
                          inv_t;
            }
        }
        out.lags.push_back(lag);
        out.joint.push_back(std::move(d));
    }
    return out;
}

std::vector<Eigen::MatrixXd> raw_interdependence(const LaggedJointMatrix& joint) {
    const Eigen::MatrixXd independent = joint.marginals * joint.marginals.transpose();
    std::vector<Eigen::MatrixXd> out;
    out.reserve(joint.joint.size());
    for (const auto& d : joint.joint) out.push_back(d - independent);
    return out;
}

void PermutationOptions::validate() const {
    if (n_perm < 20) throw std::invalid_argument("n_perm must be >= 20");
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
}

double permutation_threshold(EventSpan a, EventSpan b, int lag, const PermutationOptions& options) {
    options.validate();
    if (a.size() != b.size()) throw std::invalid_argument("permutation_threshold: length mismatch");
    const std::size_t days = a.size();
    check_lag(lag, days);
    const std::size_t ka = event_count(a);
    const std::size_t kb = event_count(b);
    if (ka == 0 || kb == 0) return 0.0;

    const double inv_t = 1.0 / static_cast<double>(days);
    const double independent = static_cast<double>(ka) * inv_t * static_cast<double>(kb) * inv_t;
    const auto tau = static_cast<std::size_t>(lag);

    std::mt19937_64 rng(options.seed);
    std::vector<std::uint8_t> marks_a(days, 0), marks_b(days, 0);
    std::vector<std::size_t> picked_a, picked_b;
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(options.n_perm));
    for (int p = 0; p < options.n_perm; ++p) {
        sample_positions(days, ka, rng, marks_a, picked_a);
        sample_positions(days, kb, rng, marks_b, picked_b);
        std::size_t count = 0;
        for (auto t : picked_a) {
            if (t + tau < days && marks_b[t + tau]) ++count;
        }
        clear_marks(marks_a, picked_a);
        clear_marks(marks_b, picked_b);
        stats.push_back(static_cast<double>(count) * inv_t - independent);
    }
    return quantile(std::move(stats), options.confidence);
}

double self_permutation_threshold(EventSpan v, int lag, const PermutationOptions& options) {
    options.validate();
    const std::size_t days = v.size();
    check_lag(lag, days);
    const std::size_t k = event_count(v);
    if (k == 0) return 0.0;

    const double inv_t = 1.0 / static_cast<double>(days);
    const double p = static_cast<double>(k) * inv_t;
    const auto tau = static_cast<std::size_t>(lag);

    std::mt19937_64 rng(options.seed);
    std::vector<std::uint8_t> marks(days, 0);
    std::vector<std::size_t> picked;
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(options.n_perm));
    for (int s = 0; s < options.n_perm; ++s) {
        sample_positions(days, k, rng, marks, picked);
        std::size_t count = 0;
        for (auto t : picked) {
            if (t + tau < days && marks[t + tau]) ++count;
        }
        clear_marks(marks, picked);
        stats.push_back(static_cast<double>(count) * inv_t - p * p);
    }
    return quantile(std::move(stats), options.confidence);
}

std::uint64_t job_seed(std::uint64_t global_seed, std::size_t i, std::size_t j, int lag) {
    std::uint64_t h = splitmix64(global_seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(i));
    h = splitmix64(h ^ static_cast<std::uint64_t>(j));
    return splitmix64(h ^ static_cast<std::uint64_t>(lag));
}

std::vector<Eigen::MatrixXd> permutation_thresholds(const std::vector<DrawupVector>& vectors,
                                                    const std::vector<int>& lags,
                                                    const PermutationOptions& options,
                                                    unsigned threads) {
    options.validate();
    const std::size_t n = vectors.size();
    std::vector<Eigen::MatrixXd> out(lags.size(), Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                                        static_cast<Eigen::Index>(n)));
    if (n == 0) return out;
    for (const auto& v : vectors) {
        if (v.events.size() != vectors.front().events.size()) {
            throw std::invalid_argument("permutation_thresholds: length mismatch");
        }
    }

    // One job per ordered pair; every (pair, lag) gets its own seed, so the
    // result is independent of how jobs land on workers.
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < n * n; job = next++) {
            const std::size_t i = job / n;
            const std::size_t j = job % n;
            for (std::size_t k = 0; k < lags.size(); ++k) {
                const int lag = lags[k];
                if (i == j && lag == 0) continue;
                PermutationOptions job_options = options;
                job_options.seed = job_seed(options.seed, i, j, lag);
                out[k](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    i == j ? self_permutation_threshold(vectors[i].events, lag, job_options)
                           : permutation_threshold(vectors[i].events, vectors[j].events, lag,
                                                   job_options);
            }
        }
    };

    unsigned pool = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    pool = static_cast<unsigned>(std::min<std::size_t>(pool, n * n));
    if (pool <= 1) {
        worker();
        return out;
    }
    std::vector<std::jthread> workers;
    workers.reserve(pool);
    for (unsigned w = 0; w < pool; ++w) workers.emplace_back(worker);
    return out;
}

Eigen::MatrixXd filter_and_aggregate(const std::vector<Eigen::MatrixXd>& raw,
                                     const std::vector<Eigen::MatrixXd>& thresholds,
                                     const std::vector<int>& lags) {
    if (raw.size() != thresholds.size() || raw.size() != lags.size() || raw.empty()) {
        throw std::invalid_argument("filter_and_aggregate: lag count mismatch");
    }
    const Eigen::Index n = raw.front().rows();
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (raw[k].rows() != n || raw[k].cols() != n || thresholds[k].rows() != n ||
            thresholds[k].cols() != n) {
            throw std::invalid_argument("filter_and_aggregate: shape mismatch");
        }
    }
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (i == j && lags[k] == 0) continue;
                const double value = raw[k](i, j);
                if (value > thresholds[k](i, j) && value > 0.0) w(i, j) += value;
            }
        }
    }
    return w;
}

ComovementResult assemble_dependency(const std::vector<DrawupVector>& vectors,
                                     std::vector<Eigen::MatrixXd> thresholds,
                                     const ComovementOptions& options) {
    ComovementResult result;
    result.joint = build_joint_matrices(vectors, options.max_lag);
    result.raw = raw_interdependence(result.joint);
    result.thresholds = std::move(thresholds);

    auto& dep = result.dependency;
    for (const auto& v : vectors) dep.entities.push_back(v.entity_id);
    dep.weights = filter_and_aggregate(result.raw, result.thresholds, result.joint.lags);
    if (options.conditional) {
        for (Eigen::Index i = 0; i < dep.weights.rows(); ++i) {
            const double p = result.joint.marginals(i);
            if (p > 0.0) dep.weights.row(i) /= p;
        }
    }
    dep.meta = {options.permutation.n_perm, options.permutation.confidence,
                options.permutation.seed, options.conditional};
    return result;
}

ComovementResult estimate_dependency(const std::vector<DrawupVector>& vectors,
                                     const ComovementOptions& options) {
    if (vectors.empty()) throw std::invalid_argument("estimate_dependency: no vectors");
    std::vector<int> lags;
    for (int lag = 0; lag <= options.max_lag; ++lag) lags.push_back(lag);
    auto thresholds = permutation_thresholds(vectors, lags, options.permutation, options.threads);
    return assemble_dependency(vectors, std::move(thresholds), options);
}

}  // namespace drawnet
