// drawnet command line. Stage subcommands run the pipeline up to their stage
// and write that stage's artifacts; `run` does every period end to end.

#include "drawnet/io.hpp"
#include "drawnet/pipeline.hpp"
#include "drawnet/synth.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace drawnet;

namespace {

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> periods;
    std::string out_dir;
    std::optional<unsigned> threads;
};

struct Sources {
    std::vector<std::string> prices;
    std::string drawups;
    std::string weights;
    std::string size_attr;
};

RunConfig load_config(const Common& common) {
    try {
        RunConfig c;
        if (!common.config_path.empty()) c = parse_config(io::read_file(common.config_path));
        if (common.seed) c.permutation.seed = *common.seed;
        if (!common.periods.empty()) {
            c.periods.clear();
            for (const auto& p : common.periods) c.periods.push_back(parse_period(p));
        }
        if (!common.out_dir.empty()) c.out_dir = common.out_dir;
        if (common.threads) c.threads = *common.threads;
        c.validate();
        return c;
    } catch (const std::exception& e) {
        throw StageError(Stage::Config, e.what());
    }
}

std::vector<std::string> price_inputs(const Sources& src, const RunConfig& config) {
    return src.prices.empty() ? config.inputs : src.prices;
}

// The first configured period, or the whole calendar when none is given.
DetectionResult detect_stage(const Sources& src, const RunConfig& config, std::string* label) {
    const auto inputs = price_inputs(src, config);
    PricePanel filled;
    try {
        filled = forward_fill(load_inputs(inputs));
    } catch (const std::exception& e) {
        throw StageError(Stage::Ingest, e.what());
    }
    const PeriodSpec period = config.periods.empty() ? whole_span(filled) : config.periods.front();
    *label = period.label;
    return detect_period(filled, period, config);
}

struct WeightsStage {
    std::vector<std::string> names;
    Eigen::MatrixXd weights;
    FilterMeta meta;
    std::string label;
};

WeightsStage weights_stage(const Sources& src, const RunConfig& config, const fs::path& out) {
    WeightsStage w;
    if (!src.weights.empty()) {
        try {
            std::ifstream in(src.weights);
            if (!in) throw std::runtime_error("cannot open '" + src.weights + "'");
            auto m = io::read_matrix_csv(in);
            w.names = std::move(m.names);
            w.weights = std::move(m.values);
        } catch (const std::exception& e) {
            throw StageError(Stage::Ingest, e.what());
        }
        w.label = fs::path(src.weights).stem().string();
        w.meta = {config.permutation.n_perm, config.permutation.confidence, config.permutation.seed, config.conditional};
        return w;
    }
    std::vector<DrawupVector> drawups;
    if (!src.drawups.empty()) {
        try {
            std::ifstream in(src.drawups);
            if (!in) throw std::runtime_error("cannot open '" + src.drawups + "'");
            drawups = read_drawups_csv(in);
        } catch (const std::exception& e) {
            throw StageError(Stage::Ingest, e.what());
        }
        w.label = fs::path(src.drawups).stem().string();
    } else {
        auto detection = detect_stage(src, config, &w.label);
        write_detection_artifacts(out, detection);
        drawups = std::move(detection.drawups);
    }
    std::optional<ThresholdCache> cache;
    if (config.cache) cache.emplace(out / "cache");
    auto c = comovement_stage(drawups, config, cache ? &*cache : nullptr);
    for (const auto& v : drawups) w.names.push_back(v.entity_id);
    write_comovement_artifacts(out, w.names, c, w.label);
    w.weights = c.dependency.weights;
    w.meta = c.dependency.meta;
    return w;
}

void add_sources(CLI::App* cmd, Sources& src, bool accepts_weights) {
    cmd->add_option("inputs", src.prices, "Price CSV files (date,entity,price); defaults to the config's inputs");
    cmd->add_option("--drawups", src.drawups, "Start from a drawups.csv written by `detect`");
    if (accepts_weights) {
        cmd->add_option("--weights", src.weights, "Start from a W.csv written by `network`");
        cmd->add_option("--size-attr", src.size_attr, "entity,attribute_value CSV used for glyph sizes");
    }
}

template <typename F>
auto guarded(Stage stage, F&& body) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

Regime parse_regime(const std::string& text) {
    const auto f = io::split(text, ':');
    if (f.size() != 3) throw std::invalid_argument("regime must look like start:end:volatility");
    return {static_cast<std::size_t>(std::stoull(std::string(f[0]))),
            static_cast<std::size_t>(std::stoull(std::string(f[1]))), io::parse_double(f[2])};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Drawup co-movement networks: detection, dependency filtering, centrality and bow-tie layout"};
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("--config", common.config_path, "key = value config file");
    app.add_option("--seed", common.seed, "Seed for permutations (and for `synth`)");
    app.add_option("--period", common.periods, "label:YYYY-MM-DD:YYYY-MM-DD, repeatable");
    app.add_option("--out-dir", common.out_dir, "Output directory");
    app.add_option("--threads", common.threads, "Permutation workers (0 = all cores)");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a panel with planted lagged dependencies");
    SynthSpec spec;
    std::string planted = "matching";
    double density = 0.1;
    std::vector<std::string> regimes;
    std::string synth_out, truth_out;
    synth->add_option("--entities", spec.n_entities, "Number of entities")->capture_default_str();
    synth->add_option("--days", spec.days, "Number of business days")->capture_default_str();
    synth->add_option("--coupling", spec.coupling, "Extra jump probability after a parent's jump")->capture_default_str();
    synth->add_option("--base-prob", spec.base_jump_prob, "Daily base jump probability")->capture_default_str();
    synth->add_option("--jump-log-mean", spec.jump_log_mean, "Mean log jump size")->capture_default_str();
    synth->add_option("--jump-log-sd", spec.jump_log_sd, "Sd of the log jump size")->capture_default_str();
    synth->add_option("--noise", spec.baseline_noise, "Daily log-return sd of the baseline")->capture_default_str();
    synth->add_option("--planted", planted, "matching | reciprocal | random | none")->capture_default_str();
    synth->add_option("--density", density, "Edge probability for --planted random")->capture_default_str();
    synth->add_option("--regime", regimes, "start:end:volatility (day indices), repeatable");
    synth->add_option("--out", synth_out, "Panel CSV (default <out-dir>/panel.csv)");
    synth->add_option("--truth", truth_out, "Ground truth JSON (default <out-dir>/truth.json)");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse, forward-fill and slice price CSVs into a panel JSON");
    Sources ingest_src;
    std::string panel_json;
    ingest->add_option("inputs", ingest_src.prices, "Price CSV files");
    ingest->add_option("--json", panel_json, "Panel JSON path (default <out-dir>/panel.json)");

    auto* detect = app.add_subcommand("detect", "Detect drawups; writes drawups.csv and episodes.json");
    Sources detect_src;
    detect->add_option("inputs", detect_src.prices, "Price CSV files");

    auto* network = app.add_subcommand("network", "Estimate the filtered dependency matrix W");
    Sources network_src;
    bool report = false;
    add_sources(network, network_src, false);
    network->add_flag("--report", report, "Print the connectivity report as JSON");

    auto* centrality = app.add_subcommand("centrality", "Impacting/impacted centralities on the LSCC");
    Sources centrality_src;
    add_sources(centrality, centrality_src, true);

    auto* bowtie = app.add_subcommand("bowtie", "Bow-tie regions and filtered edges");
    Sources bowtie_src;
    add_sources(bowtie, bowtie_src, true);

    auto* render = app.add_subcommand("render", "Draw the bow-tie as SVG");
    Sources render_src;
    SvgStyle style;
    std::string svg_out, coords_out;
    add_sources(render, render_src, true);
    render->add_option("--out", svg_out, "SVG path (default <out-dir>/bowtie.svg)");
    render->add_option("--coords", coords_out, "Glyph coordinates JSON");
    render->add_option("--in-color", style.in_to_scc, "IN -> SCC edge color")->capture_default_str();
    render->add_option("--scc-color", style.scc_to_scc, "SCC -> SCC edge color")->capture_default_str();
    render->add_option("--out-color", style.scc_to_out, "SCC -> OUT edge color")->capture_default_str();
    render->add_option("--other-color", style.other, "Any other edge")->capture_default_str();
    render->add_option("--ramp-low", style.ramp_low, "Node color at b = 0")->capture_default_str();
    render->add_option("--ramp-high", style.ramp_high, "Node color at b = 1")->capture_default_str();
    render->add_option("--background", style.background, "Canvas fill")->capture_default_str();
    render->add_option("--canvas", style.canvas, "Canvas size in px")->capture_default_str();
    render->add_flag("--labels", style.labels, "Draw entity labels");

    auto* run = app.add_subcommand("run", "Full pipeline over every configured period");
    Sources run_src;
    run->add_option("inputs", run_src.prices, "Price CSV files (override the config's inputs)");
    run->add_option("--size-attr", run_src.size_attr, "entity,attribute_value CSV used for glyph sizes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_code(Stage::Config);
    }

    try {
        RunConfig config = load_config(common);
        const fs::path out(config.out_dir);

        if (synth->parsed()) {
            guarded(Stage::Config, [&] {
                spec.seed = common.seed.value_or(spec.seed);
                for (const auto& r : regimes) spec.regimes.push_back(parse_regime(r));
                if (planted == "matching") spec.edges = matching_edges(spec.n_entities, spec.seed);
                else if (planted == "reciprocal") spec.edges = reciprocal_edges(spec.n_entities, spec.seed);
                else if (planted == "random") spec.edges = random_edges(spec.n_entities, density, spec.seed);
                else if (planted != "none") throw std::invalid_argument("--planted must be matching, reciprocal, random or none");
                spec.validate();
            });
            const auto result = generate_panel(spec);
            guarded(Stage::Output, [&] {
                fs::create_directories(out);
                std::ofstream csv(synth_out.empty() ? (out / "panel.csv").string() : synth_out);
                write_panel_csv(csv, result.panel);
                if (!csv) throw std::runtime_error("failed to write the panel CSV");
                io::write_file(truth_out.empty() ? (out / "truth.json").string() : truth_out,
                               ground_truth_json(spec, result).dump(2) + "\n");
            });
            std::cout << "synth: " << spec.n_entities << " entities, " << spec.days << " days, "
                      << spec.edges.size() << " planted edges\n";
        } else if (ingest->parsed()) {
            const auto inputs = price_inputs(ingest_src, config);
            auto panel = guarded(Stage::Ingest, [&] {
                auto p = forward_fill(load_inputs(inputs));
                return config.periods.empty() ? p : slice_period(p, config.periods.front());
            });
            guarded(Stage::Output, [&] {
                fs::create_directories(out);
                io::write_file(panel_json.empty() ? (out / "panel.json").string() : panel_json,
                               panel_to_json(panel).dump());
            });
            std::cout << "ingest: " << panel.n_entities() << " entities, " << panel.n_days() << " days ("
                      << panel.calendar.front().iso() << " .. " << panel.calendar.back().iso() << ")\n";
        } else if (detect->parsed()) {
            std::string label;
            const auto d = detect_stage(detect_src, config, &label);
            guarded(Stage::Output, [&] { write_detection_artifacts(out, d); });
            std::size_t events = 0;
            for (const auto& v : d.drawups) events += v.count();
            std::cout << "detect: " << events << " drawups across " << d.drawups.size() << " entities\n";
        } else if (network->parsed()) {
            const auto w = guarded(Stage::Output, [&] { return weights_stage(network_src, config, out); });
            const auto net = build_network(w.weights, w.names);
            const auto json = connectivity_json(net, connectivity_report(net));
            guarded(Stage::Output, [&] { io::write_file((out / "connectivity.json").string(), json.dump(2)); });
            if (report) {
                std::cout << json.dump(2) << "\n";
            } else {
                std::cout << "network: " << net.edges.size() << " edges among " << net.size() << " entities\n";
            }
        } else if (centrality->parsed() || bowtie->parsed() || render->parsed()) {
            const Sources& src = centrality->parsed() ? centrality_src : bowtie->parsed() ? bowtie_src : render_src;
            const auto w = guarded(Stage::Output, [&] { return weights_stage(src, config, out); });
            std::optional<std::map<std::string, double>> attrs;
            const std::string attr_path = src.size_attr.empty() ? config.size_attr : src.size_attr;
            if (!attr_path.empty()) attrs = load_node_attributes(attr_path);
            const auto a = analyze_weights(w.names, w.weights, config, attrs ? &*attrs : nullptr);
            guarded(Stage::Output, [&] {
                if (render->parsed()) {
                    io::write_file(svg_out.empty() ? (out / "bowtie.svg").string() : svg_out,
                                   render_svg(a.glyphs, a.bowtie.filtered_edges, style));
                    if (!coords_out.empty()) io::write_file(coords_out, glyphs_to_json(a.glyphs).dump(2));
                } else {
                    write_network_artifacts(out, a, w.meta, w.label, style);
                }
            });
            if (centrality->parsed()) {
                std::cout << centrality_csv(a.profiles, a.bowtie.regions);
            } else if (bowtie->parsed()) {
                for (const auto& warning : a.diagnostics.warnings) std::cerr << "warning: " << warning << "\n";
                std::cout << "bowtie: IN " << a.diagnostics.n_in << ", SCC " << a.diagnostics.n_scc << ", OUT "
                          << a.diagnostics.n_out << ", DISCONNECTED " << a.diagnostics.n_disconnected << "\n";
            } else {
                std::cout << "render: " << a.glyphs.size() << " glyphs, " << a.bowtie.filtered_edges.size()
                          << " edges\n";
            }
        } else if (run->parsed()) {
            if (!run_src.prices.empty()) config.inputs = run_src.prices;
            if (!run_src.size_attr.empty()) config.size_attr = run_src.size_attr;
            const auto result = run_pipeline(config);
            for (const auto& p : result.periods) {
                const auto& s = p.stats;
                std::cout << p.period.label << ": significant pairs " << s.significant_pair_fraction
                          << ", trend reinforcement " << s.trend_reinforcement_fraction << ", LSCC " << s.lscc_size
                          << ", IN/SCC/OUT " << s.n_in << "/" << s.n_scc << "/" << s.n_out << "\n";
                for (const auto& warning : p.network.diagnostics.warnings) {
                    std::cerr << "warning: " << p.period.label << ": " << warning << "\n";
                }
            }
            std::cout << "summary: " << (out / "summary.json").string() << "\n";
        }
    } catch (const StageError& e) {
        std::cerr << "drawnet: " << e.what() << "\n";
        return exit_code(e.stage());
    } catch (const std::exception& e) {
        std::cerr << "drawnet: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
