#include "doctest.h"

#include "drawnet/comovement.hpp"
#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace drawnet;

namespace {

std::vector<std::uint8_t> ev(std::initializer_list<int> bits) {
    std::vector<std::uint8_t> out;
    for (int b : bits) out.push_back(static_cast<std::uint8_t>(b));
    return out;
}

// Independent permutation loop: full std::shuffle of both vectors, sorted
// sample, linear interpolation between order statistics.
double oracle_threshold(std::vector<std::uint8_t> a, std::vector<std::uint8_t> b, int lag, int n_perm,
                        double q, std::uint64_t seed) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    const double days = static_cast<double>(a.size());
    const double pa = std::accumulate(a.begin(), a.end(), 0.0) / days;
    const double pb = std::accumulate(b.begin(), b.end(), 0.0) / days;
    std::vector<double> stats;
    for (int p = 0; p < n_perm; ++p) {
        std::shuffle(a.begin(), a.end(), rng);
        std::shuffle(b.begin(), b.end(), rng);
        stats.push_back(static_cast<double>(gen::brute_joint(a, b, lag)) / days - pa * pb);
    }
    std::sort(stats.begin(), stats.end());
    const double pos = q * (n_perm - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    return lo + 1 < stats.size() ? stats[lo] * (1 - frac) + stats[lo + 1] * frac : stats[lo];
}

double mean(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double variance(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / (x.size() - 1);
}

std::vector<DrawupVector> random_vectors(gen::Rng& rng, std::size_t n, std::size_t days, double p) {
    std::vector<DrawupVector> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(gen::drawup_vector("E" + std::to_string(i), gen::events(rng, days, p)));
    return out;
}

}  // namespace

TEST_CASE("joint_counts examples") {
    const auto a = ev({1, 0, 1, 0});
    CHECK(joint_counts(a, a, 0) == 2);
    CHECK(joint_counts(ev({1, 0, 0, 0}), ev({0, 0, 1, 0}), 2) == 1);
    CHECK(joint_counts(ev({0, 0, 0, 1}), ev({1, 1, 1, 1}), 1) == 0);
    CHECK_THROWS_AS(joint_counts(ev({1, 0}), ev({1}), 0), std::invalid_argument);
}

TEST_CASE("property: joint_counts equals the double-loop count") {
    gen::Rng rng(31);
    for (int k = 0; k < 300; ++k) {
        const std::size_t days = 5 + k % 40;
        const auto a = gen::events(rng, days, 0.3);
        const auto b = gen::events(rng, days, 0.4);
        for (int lag = 0; lag <= 3; ++lag) CHECK(joint_counts(a, b, lag) == gen::brute_joint(a, b, lag));
    }
}

TEST_CASE("build_joint_matrices examples") {
    SUBCASE("disjoint supports give zero off-diagonal at lag 0") {
        const std::vector<DrawupVector> v{gen::drawup_vector("a", ev({1, 0, 0, 0, 0, 0})),
                                          gen::drawup_vector("b", ev({0, 0, 0, 1, 0, 0}))};
        const auto j = build_joint_matrices(v, 0);
        CHECK(j.joint[0](0, 1) == 0.0);
        CHECK(j.joint[0](1, 0) == 0.0);
    }
    SUBCASE("identical vectors") {
        const auto e = ev({1, 0, 1, 0, 1, 0, 1, 0});
        const std::vector<DrawupVector> v{gen::drawup_vector("a", e), gen::drawup_vector("b", e)};
        const auto j = build_joint_matrices(v);
        CHECK(j.joint[0](0, 1) == 0.5);
        CHECK(j.joint[0](0, 0) == j.marginals(0));
        const auto raw = raw_interdependence(j);
        CHECK(raw[0](0, 1) == doctest::Approx(0.25));
    }
    SUBCASE("length mismatch") {
        const std::vector<DrawupVector> v{gen::drawup_vector("a", ev({1, 0})), gen::drawup_vector("b", ev({1}))};
        CHECK_THROWS_AS(build_joint_matrices(v), std::invalid_argument);
    }
}

TEST_CASE("property: joint matrix invariants") {
    gen::Rng rng(32);
    for (int k = 0; k < 50; ++k) {
        const auto v = random_vectors(rng, 5, 40 + k, 0.2 + 0.01 * k);
        const auto j = build_joint_matrices(v);
        const double slack = 3.0 / static_cast<double>(j.days);
        for (std::size_t l = 0; l < j.joint.size(); ++l) {
            for (Eigen::Index a = 0; a < 5; ++a) {
                for (Eigen::Index b = 0; b < 5; ++b) {
                    CHECK(j.joint[l](a, b) >= 0.0);
                    CHECK(j.joint[l](a, b) <= std::min(j.marginals(a), j.marginals(b)) + slack);
                }
                if (l == 0) CHECK(j.joint[0](a, a) == j.marginals(a));
            }
        }
        // lag 0 raw interdependence is symmetric
        const auto raw = raw_interdependence(j);
        CHECK(raw[0].isApprox(raw[0].transpose(), 0.0));
    }
}

TEST_CASE("independent long vectors give raw interdependence near zero") {
    gen::Rng rng(33);
    const std::size_t days = 20000;
    const auto v = random_vectors(rng, 4, days, 0.3);
    const auto raw = raw_interdependence(build_joint_matrices(v));
    const auto j = build_joint_matrices(v);
    for (std::size_t l = 0; l < raw.size(); ++l) {
        for (Eigen::Index a = 0; a < 4; ++a) {
            for (Eigen::Index b = 0; b < 4; ++b) {
                if (a == b && l == 0) continue;
                const double p = j.marginals(a) * j.marginals(b);
                CHECK(std::abs(raw[l](a, b)) < 3.0 * std::sqrt(p * (1 - p) / days));
            }
        }
    }
}

TEST_CASE("entity without events has non-positive raw row") {
    gen::Rng rng(34);
    auto v = random_vectors(rng, 3, 200, 0.2);
    v[1].events.assign(200, 0);
    const auto raw = raw_interdependence(build_joint_matrices(v));
    for (const auto& m : raw) CHECK((m.row(1).array() <= 0.0).all());
    PermutationOptions o;
    CHECK(permutation_threshold(v[1].events, v[0].events, 1, o) == 0.0);
    CHECK(self_permutation_threshold(v[1].events, 1, o) == 0.0);
}

TEST_CASE("permutation threshold matches an independent shuffle loop") {
    gen::Rng rng(35);
    const auto a = gen::events(rng, 1000, 0.5);
    const auto b = gen::events(rng, 1000, 0.5);
    for (int lag : {0, 2}) {
        std::vector<double> impl, oracle;
        for (std::uint64_t s = 0; s < 40; ++s) {
            impl.push_back(permutation_threshold(a, b, lag, {100, 0.95, 1000 + s}));
            oracle.push_back(oracle_threshold(a, b, lag, 100, 0.95, 5000 + s));
        }
        const double stderr_diff = std::sqrt(variance(impl) / 40 + variance(oracle) / 40);
        INFO("lag " << lag << " impl " << mean(impl) << " oracle " << mean(oracle));
        CHECK(std::abs(mean(impl) - mean(oracle)) < 2.0 * stderr_diff);
        CHECK(mean(impl) > 0.0);
    }
}

TEST_CASE("permutation threshold is deterministic per seed") {
    gen::Rng rng(36);
    const auto a = gen::events(rng, 500, 0.1);
    const auto b = gen::events(rng, 500, 0.1);
    const PermutationOptions o{100, 0.95, 42};
    CHECK(permutation_threshold(a, b, 1, o) == permutation_threshold(a, b, 1, o));
    CHECK(self_permutation_threshold(a, 2, o) == self_permutation_threshold(a, 2, o));
    CHECK_THROWS_AS(permutation_threshold(a, b, 1, {10, 0.95, 0}), std::invalid_argument);
    CHECK_THROWS_AS(permutation_threshold(a, b, 1, {100, 1.0, 0}), std::invalid_argument);
}

TEST_CASE("filter_and_aggregate examples") {
    const std::vector<int> lags{0, 1, 2, 3};
    std::vector<Eigen::MatrixXd> raw(4, Eigen::MatrixXd::Zero(2, 2)), thr(4, Eigen::MatrixXd::Constant(2, 2, 0.05));
    SUBCASE("all below threshold") {
        for (auto& m : raw) m.setConstant(0.04);
        CHECK(filter_and_aggregate(raw, thr, lags).isZero());
    }
    SUBCASE("two surviving lags sum") {
        raw[1](0, 1) = 0.2;
        raw[2](0, 1) = 0.1;
        const auto w = filter_and_aggregate(raw, thr, lags);
        CHECK(w(0, 1) == doctest::Approx(0.3));
        CHECK(w(1, 0) == 0.0);
    }
    SUBCASE("ties are filtered and the diagonal skips lag 0") {
        raw[1](1, 0) = 0.05;
        raw[0](0, 0) = 0.9;
        raw[1](0, 0) = 0.07;
        const auto w = filter_and_aggregate(raw, thr, lags);
        CHECK(w(1, 0) == 0.0);
        CHECK(w(0, 0) == doctest::Approx(0.07));
    }
    SUBCASE("negative raw above a negative threshold stays out") {
        for (auto& m : thr) m.setConstant(-0.1);
        raw[1](0, 1) = -0.01;
        CHECK(filter_and_aggregate(raw, thr, lags).isZero());
    }
}

TEST_CASE("property: estimated W bounds and determinism") {
    gen::Rng rng(37);
    for (int k = 0; k < 8; ++k) {
        const auto v = random_vectors(rng, 5, 300, 0.05 + 0.02 * k);
        ComovementOptions o;
        o.permutation.seed = static_cast<std::uint64_t>(k);
        o.threads = 1;
        const auto r = estimate_dependency(v, o);
        const auto& w = r.dependency.weights;
        Eigen::MatrixXd joint_sum = Eigen::MatrixXd::Zero(5, 5);
        for (const auto& d : r.joint.joint) joint_sum += d;
        CHECK((w.array() >= 0.0).all());
        CHECK(w.allFinite());
        CHECK((w.array() <= joint_sum.array() + 1e-15).all());

        o.threads = 4;
        CHECK(estimate_dependency(v, o).dependency.weights == w);
        CHECK(estimate_dependency(v, o).thresholds == r.thresholds);
    }
}

TEST_CASE("property: significant pairs never increase with confidence") {
    gen::Rng rng(38);
    for (int k = 0; k < 5; ++k) {
        const auto v = random_vectors(rng, 6, 400, 0.08);
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (double c : {0.5, 0.8, 0.9, 0.95, 0.99}) {
            ComovementOptions o;
            o.permutation = {100, c, static_cast<std::uint64_t>(k)};
            const auto w = estimate_dependency(v, o).dependency.weights;
            std::size_t count = 0;
            for (Eigen::Index i = 0; i < 6; ++i)
                for (Eigen::Index j = 0; j < 6; ++j)
                    if (i != j && w(i, j) > 0) ++count;
            CHECK(count <= prev);
            prev = count;
        }
    }
}

TEST_CASE("identical swapped inputs give a symmetric lag-0 component") {
    gen::Rng rng(39);
    const auto e = gen::events(rng, 300, 0.1);
    const std::vector<DrawupVector> v{gen::drawup_vector("a", e), gen::drawup_vector("b", e)};
    const auto r = estimate_dependency(v, {});
    CHECK(r.raw[0](0, 1) == r.raw[0](1, 0));
}

TEST_CASE("lag-one echo is detected, conditional mode divides by the marginal") {
    gen::Rng rng(40);
    auto a = gen::events(rng, 1000, 0.05);
    std::vector<std::uint8_t> b(1000, 0);
    for (std::size_t t = 0; t + 1 < a.size(); ++t) b[t + 1] = a[t];
    const std::vector<DrawupVector> v{gen::drawup_vector("a", a), gen::drawup_vector("b", b)};
    ComovementOptions o;
    const auto plain = estimate_dependency(v, o);
    CHECK(plain.dependency.weights(0, 1) > 0.0);
    CHECK(plain.dependency.weights(1, 0) == 0.0);
    o.conditional = true;
    const auto cond = estimate_dependency(v, o);
    CHECK(cond.dependency.weights(0, 1) == doctest::Approx(plain.dependency.weights(0, 1) / plain.joint.marginals(0)));
    CHECK(cond.dependency.meta.conditional);
}

TEST_CASE("job seeds differ across pairs and lags") {
    CHECK(job_seed(1, 0, 1, 0) != job_seed(1, 1, 0, 0));
    CHECK(job_seed(1, 0, 1, 0) != job_seed(1, 0, 1, 1));
    CHECK(job_seed(1, 0, 1, 0) != job_seed(2, 0, 1, 0));
}
