// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                  run everything
//   acceptance --criterion X    run one of: detector null_calibration planted_recovery
//                               centrality brute_force bowtie layout regime

#include "drawnet/bowtie.hpp"
#include "drawnet/centrality.hpp"
#include "drawnet/comovement.hpp"
#include "drawnet/drawup.hpp"
#include "drawnet/graph.hpp"
#include "drawnet/layout.hpp"
#include "drawnet/pipeline.hpp"
#include "drawnet/synth.hpp"
#include "generators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace drawnet;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double mean(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double stderr_of(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

std::vector<DrawupVector> detect_all(const PricePanel& panel, const EpsilonPolicy& policy) {
    std::vector<DrawupVector> out;
    for (Eigen::Index i = 0; i < panel.values.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(panel.values.cols()));
        for (Eigen::Index t = 0; t < panel.values.cols(); ++t) row[static_cast<std::size_t>(t)] = panel.values(i, t);
        out.push_back(detect_drawups(row, policy, panel.entities[static_cast<std::size_t>(i)]));
    }
    return out;
}

std::size_t off_diagonal_positive(const Eigen::MatrixXd& w) {
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
            if (i != j && w(i, j) > 0) ++n;
    return n;
}

// ---------------------------------------------------------------------------

Outcome detector() {
    SynthSpec s;
    s.n_entities = 20;
    s.days = 3624;
    s.base_jump_prob = 0.01;
    s.coupling = 0.3;
    s.edges = matching_edges(20, 1);
    s.baseline_noise = 0.0;
    std::size_t planted = 0, recovered = 0, detected = 0, false_events = 0;
    double slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        s.seed = seed;
        const auto r = generate_panel(s);
        for (std::size_t i = 0; i < s.n_entities; ++i) {
            std::vector<double> row(s.days);
            for (std::size_t t = 0; t < s.days; ++t)
                row[t] = r.panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
            const auto t0 = Clock::now();
            const auto v = detect_drawups(row, EpsilonPolicy{});
            slowest = std::max(slowest, seconds_since(t0));
            // an event matches a planted jump peaking on the same day or one day either side
            auto near = [&](const std::vector<std::uint8_t>& x, std::size_t t) {
                for (std::size_t u = t == 0 ? 0 : t - 1; u <= std::min(t + 1, s.days - 1); ++u)
                    if (x[u]) return true;
                return false;
            };
            for (std::size_t t = 0; t < s.days; ++t) {
                if (r.jumps[i][t] && t >= 10) {
                    ++planted;
                    if (near(v.events, t)) ++recovered;
                }
                if (v.events[t]) {
                    ++detected;
                    if (!near(r.jumps[i], t)) ++false_events;
                }
            }
        }
    }
    const double recall = static_cast<double>(recovered) / static_cast<double>(planted);
    const double false_rate = static_cast<double>(false_events) / static_cast<double>(std::max<std::size_t>(detected, 1));
    return {recall >= 0.90 && false_rate <= 0.05 && slowest < 1.0,
            fmt("recovered %zu/%zu planted episodes (%.3f, need >= 0.90), false events %zu/%zu (%.3f, need <= 0.05), "
                "slowest 3624-day series %.4f s (need < 1 s)",
                recovered, planted, recall, false_events, detected, false_rate, slowest)};
}

Outcome null_calibration() {
    std::vector<double> fractions;
    std::vector<double> per_lag(4, 0.0);
    double per_lag_cells = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SynthSpec s;
        s.n_entities = 20;
        s.days = 3000;
        s.coupling = 0.0;
        s.base_jump_prob = 0.01;
        s.seed = seed;
        const auto r = generate_panel(s);
        ComovementOptions o;
        o.permutation.seed = seed;
        const auto c = estimate_dependency(detect_all(r.panel, EpsilonPolicy{}), o);
        fractions.push_back(static_cast<double>(off_diagonal_positive(c.dependency.weights)) / (20.0 * 19.0));
        for (std::size_t k = 0; k < 4; ++k) {
            for (Eigen::Index i = 0; i < 20; ++i)
                for (Eigen::Index j = 0; j < 20; ++j)
                    if (i != j && c.raw[k](i, j) > c.thresholds[k](i, j) && c.raw[k](i, j) > 0) per_lag[k] += 1;
        }
        per_lag_cells += 20.0 * 19.0;
    }
    const double m = mean(fractions);
    const double bound = 0.05 + 2.0 * stderr_of(fractions);
    return {m <= bound,
            fmt("surviving off-diagonal fraction %.4f over 10 seeds (need <= %.4f); per-lag survival "
                "lag0 %.4f lag1 %.4f lag2 %.4f lag3 %.4f",
                m, bound, per_lag[0] / per_lag_cells, per_lag[1] / per_lag_cells, per_lag[2] / per_lag_cells,
                per_lag[3] / per_lag_cells)};
}

Outcome planted_recovery() {
    SynthSpec s;
    s.n_entities = 20;
    s.days = 3000;
    s.coupling = 0.3;
    s.base_jump_prob = 0.01;
    s.edges = matching_edges(20, 7);
    s.seed = 7;
    const auto t0 = Clock::now();
    const auto r = generate_panel(s);
    ComovementOptions o;
    o.permutation.seed = 7;
    const auto c = estimate_dependency(detect_all(r.panel, EpsilonPolicy{}), o);
    const double elapsed = seconds_since(t0);
    std::set<std::pair<Eigen::Index, Eigen::Index>> truth;
    for (const auto& e : s.edges) truth.emplace(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target));
    std::size_t tp = 0, fp = 0;
    const auto& w = c.dependency.weights;
    for (Eigen::Index i = 0; i < 20; ++i)
        for (Eigen::Index j = 0; j < 20; ++j) {
            if (i == j || w(i, j) <= 0) continue;
            (truth.count({i, j}) ? tp : fp) += 1;
        }
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = static_cast<double>(tp) / static_cast<double>(truth.size());
    return {precision >= 0.9 && recall >= 0.9 && elapsed < 300.0,
            fmt("precision %.3f (%zu/%zu), recall %.3f (%zu/%zu), need both >= 0.9; full run %.2f s (need < 300 s)",
                precision, tp, tp + fp, recall, tp, truth.size(), elapsed)};
}

Outcome centrality() {
    gen::Rng rng(2024);
    double worst_rel = 0.0, worst_residual = 0.0, worst_sym = 0.0;
    auto iterate = [](const Eigen::MatrixXd& m, double beta) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(m.rows());
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.rows());
        for (int s = 0; s < 10000; ++s) x = m * (ones + beta * x);
        return x;
    };
    for (int k = 0; k < 50; ++k) {
        const auto w = gen::weights(rng, 10, 0.4);
        const FeedbackOptions o;
        for (const Eigen::MatrixXd& mat : {Eigen::MatrixXd(w), Eigen::MatrixXd(w.transpose())}) {
            const auto sol = impacting_centrality(mat, o);
            const auto ref = iterate(normalize_dependency(mat).matrix, o.beta);
            const double scale = std::max(ref.cwiseAbs().maxCoeff(), 1e-300);
            worst_rel = std::max(worst_rel, (sol.raw - ref).cwiseAbs().maxCoeff() / scale);
            worst_residual = std::max(worst_residual, sol.residual);
        }
        const Eigen::MatrixXd sym = w + w.transpose();
        const auto b = impacting_centrality(sym, o).raw;
        const auto c = impacted_centrality(sym, o).raw;
        worst_sym = std::max(worst_sym, (b - c).cwiseAbs().maxCoeff());
    }
    return {worst_rel < 1e-9 && worst_residual < 1e-10 && worst_sym < 1e-10,
            fmt("50 random 10-node networks: max relative gap to 1e4-step iteration %.3e (need < 1e-9), "
                "max residual %.3e (need < 1e-10), symmetric max |b - c| %.3e",
                worst_rel, worst_residual, worst_sym)};
}

Outcome brute_force() {
    std::size_t instances = 0, mismatches = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        gen::Rng rng(seed);
        const std::size_t n = 1 + seed % 8;
        // joint counts
        for (int lag = 0; lag <= 3; ++lag) {
            const auto a = gen::events(rng, 30, 0.3);
            const auto b = gen::events(rng, 30, 0.3);
            if (joint_counts(a, b, lag) != gen::brute_joint(a, b, lag)) ++mismatches;
        }
        // SCC decomposition against mutual reachability
        const auto edges = gen::digraph(rng, n, 0.15 + 0.05 * static_cast<double>(seed % 10));
        const auto reach = gen::closure(n, edges);
        std::set<std::vector<std::size_t>> oracle;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> c;
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][j] && reach[j][i]) c.push_back(j);
            oracle.insert(c);
        }
        const auto sccs = strongly_connected_components(n, edges);
        if (std::set<std::vector<std::size_t>>(sccs.begin(), sccs.end()) != oracle) ++mismatches;
        // path statistics on the LSCC
        Eigen::MatrixXd w = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (const auto& e : edges) w(static_cast<Eigen::Index>(e.source), static_cast<Eigen::Index>(e.target)) = 1.0;
        const auto report = connectivity_report(build_network(w));
        const auto& keep = report.lscc_nodes;
        if (keep.size() >= 2) {
            std::vector<Edge> sub;
            for (const auto& e : edges) {
                const auto a = std::find(keep.begin(), keep.end(), e.source);
                const auto b = std::find(keep.begin(), keep.end(), e.target);
                if (a != keep.end() && b != keep.end())
                    sub.push_back({static_cast<std::size_t>(a - keep.begin()), static_cast<std::size_t>(b - keep.begin()), 1.0});
            }
            const auto d = gen::floyd(keep.size(), sub);
            double total = 0;
            for (std::size_t i = 0; i < keep.size(); ++i)
                for (std::size_t j = 0; j < keep.size(); ++j)
                    if (i != j) total += static_cast<double>(d[i][j]);
            const double m = static_cast<double>(keep.size());
            if (std::abs(*report.mean_path_length - total / (m * (m - 1))) > 1e-12) ++mismatches;
            if (report.density != static_cast<double>(sub.size()) / (m * (m - 1))) ++mismatches;
        } else if (report.mean_path_length) {
            ++mismatches;
        }
        ++instances;
    }
    return {mismatches == 0, fmt("%zu seeds with N <= 8: %zu mismatches against exhaustive oracles", instances, mismatches)};
}

Outcome bowtie() {
    gen::Rng rng(99);
    std::size_t instances = 0, into_in = 0, out_of_out = 0, not_idempotent = 0;
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = 3 + static_cast<std::size_t>(k % 18);
        const auto w = gen::weights(rng, n, 0.15 + 0.05 * (k % 8));
        const auto profiles = centrality_profiles(std::vector<std::string>(n, "x"), w);
        std::vector<double> r;
        for (const auto& p : profiles) r.push_back(p.ratio);
        const auto regions = classify_regions(r);
        const auto net = build_network(w);
        const auto once = filter_links(net, regions);
        for (const auto& e : once.filtered_edges) {
            if (regions[e.target] == Region::In) ++into_in;
            if (regions[e.source] == Region::Out) ++out_of_out;
        }
        if (filter_links(with_edges(net, once.filtered_edges), regions).filtered_edges != once.filtered_edges)
            ++not_idempotent;
        ++instances;
    }
    return {into_in == 0 && out_of_out == 0 && not_idempotent == 0,
            fmt("%zu instances: %zu edges into IN, %zu edges out of OUT, %zu non-idempotent filters", instances, into_in,
                out_of_out, not_idempotent)};
}

Outcome layout() {
    gen::Rng rng(7);
    double worst_radial = 0.0;
    std::size_t wing_violations = 0, unstable = 0, glyphs = 0;
    RunConfig config;
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 4 + static_cast<std::size_t>(k % 30);
        const auto w = gen::weights(rng, n, 0.2 + 0.01 * (k % 30));
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
        const auto a = analyze_weights(names, w, config);
        for (const auto& g : a.glyphs) {
            ++glyphs;
            const double rho = std::hypot(g.x, g.y);
            double angle = std::atan2(g.y, g.x);
            if (angle < 0) angle += 2 * std::numbers::pi;
            if (g.region == Region::Scc) {
                worst_radial = std::max(worst_radial, std::abs(rho - (1.0 - a.profiles[g.node].impacting)));
            } else if (g.region == Region::In) {
                if (rho < 1.1 - 1e-12 || angle < kInArcBegin - 1e-12 || angle > kInArcEnd + 1e-12) ++wing_violations;
            } else if (g.region == Region::Out) {
                if (rho < 1.1 - 1e-12 || angle < kOutArcBegin - 1e-12 || angle > kOutArcEnd + 1e-12) ++wing_violations;
            }
        }
        const auto again = analyze_weights(names, w, config);
        if (render_svg(a.glyphs, a.bowtie.filtered_edges) != render_svg(again.glyphs, again.bowtie.filtered_edges))
            ++unstable;
    }
    return {worst_radial < 1e-9 && wing_violations == 0 && unstable == 0,
            fmt("%zu glyphs: max SCC radial error %.3e (need < 1e-9), %zu IN/OUT placement violations, "
                "%zu unstable SVG renders",
                glyphs, worst_radial, wing_violations, unstable)};
}

Outcome regime() {
    int wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SynthSpec s;
        s.n_entities = 20;
        s.days = 3000;
        s.base_jump_prob = 0.01;
        s.coupling = 0.15;
        s.edges = reciprocal_edges(20, seed);
        s.regimes = {{1500, 3000, 3.0}};
        s.seed = seed;
        const auto r = generate_panel(s);
        const auto filled = forward_fill(r.panel);
        RunConfig config;
        config.permutation.seed = seed;
        const PeriodSpec calm{"calm", r.panel.calendar[0], r.panel.calendar[1500]};
        const PeriodSpec wild{"volatile", r.panel.calendar[1500], r.panel.calendar[2999] + 1};
        const auto a = analyze_period(filled, calm, config).stats;
        const auto b = analyze_period(filled, wild, config).stats;
        const bool win = b.significant_pair_fraction > a.significant_pair_fraction &&
                         b.trend_reinforcement_fraction > a.trend_reinforcement_fraction;
        wins += win ? 1 : 0;
        detail += fmt(" [%llu: pairs %.3f->%.3f tr %.2f->%.2f]", static_cast<unsigned long long>(seed),
                      a.significant_pair_fraction, b.significant_pair_fraction, a.trend_reinforcement_fraction,
                      b.trend_reinforcement_fraction);
    }
    return {wins >= 9, fmt("volatile regime strictly higher on both fractions in %d/10 seeds (need >= 9);", wins) + detail};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"detector", detector},       {"null_calibration", null_calibration},
    {"planted_recovery", planted_recovery}, {"centrality", centrality},
    {"brute_force", brute_force}, {"bowtie", bowtie},
    {"layout", layout},           {"regime", regime},
};

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) only = argv[++i];
        else {
            std::fprintf(stderr, "usage: %s [--criterion NAME]\n", argv[0]);
            return 2;
        }
    }
    int failures = 0;
    bool ran = false;
    for (const auto& [name, run] : kCriteria) {
        if (!only.empty() && only != name) continue;
        ran = true;
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    if (!ran) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
