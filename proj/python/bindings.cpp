#include "drawnet/io.hpp"
#include "drawnet/pipeline.hpp"
#include "drawnet/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace drawnet;

namespace {

using EventMatrix = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

VariationKind kind_of(const std::string& kind) {
    if (kind == "stddev") return VariationKind::StddevOfDailyChanges;
    if (kind == "range") return VariationKind::Range;
    throw std::invalid_argument("kind must be 'stddev' or 'range'");
}

Normalization normalization_of(const std::string& mode) {
    if (mode == "column") return Normalization::Column;
    if (mode == "row") return Normalization::Row;
    throw std::invalid_argument("normalization must be 'column' or 'row'");
}

std::vector<std::string> default_names(std::vector<std::string> names, std::size_t n) {
    if (names.empty())
        for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
    if (names.size() != n) throw std::invalid_argument("names must match the matrix size");
    return names;
}

py::dict drawup_dict(const DrawupVector& v) {
    py::list episodes;
    for (const auto& e : v.episodes) {
        py::dict d;
        d["start_day"] = e.start_day;
        d["peak_day"] = e.peak_day;
        d["trough_day"] = e.trough_day;
        d["event_day"] = e.event_day;
        d["amplitude"] = e.amplitude;
        d["correction"] = e.correction;
        d["epsilon"] = e.epsilon;
        episodes.append(d);
    }
    py::dict out;
    out["events"] = py::array_t<std::uint8_t>(static_cast<py::ssize_t>(v.events.size()), v.events.data());
    out["episodes"] = episodes;
    return out;
}

std::vector<DrawupVector> vectors_from(const EventMatrix& events) {
    if (events.ndim() != 2) throw std::invalid_argument("events must be a 2-D array (entities x days)");
    const auto r = events.unchecked<2>();
    std::vector<DrawupVector> out;
    for (py::ssize_t i = 0; i < r.shape(0); ++i) {
        DrawupVector v;
        v.entity_id = std::to_string(i);
        for (py::ssize_t t = 0; t < r.shape(1); ++t) v.events.push_back(r(i, t) ? 1 : 0);
        out.push_back(std::move(v));
    }
    return out;
}

py::object json_to_python(const nlohmann::json& doc) {
    return py::module_::import("json").attr("loads")(doc.dump());
}

RunConfig config_from(const std::string& text) {
    try {
        auto config = parse_config(text);
        config.validate();
        return config;
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(Stage::Config, e.what());
    }
}

}  // namespace

PYBIND11_MODULE(_drawnet, m) {
    m.doc() = "Drawup co-movement networks: detection, significance filtering, centrality and bow-tie analysis.";

    static py::exception<StageError> stage_error(m, "StageError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const StageError& e) {
            py::object err = stage_error;
            PyErr_SetObject(err.ptr(), py::make_tuple(e.what(), std::string(to_string(e.stage())),
                                                      exit_code(e.stage())).ptr());
        }
    });

    m.def(
        "rolling_epsilon",
        [](const std::vector<double>& series, std::size_t t, std::size_t window, const std::string& kind) {
            return rolling_epsilon(series, EpsilonPolicy{window, kind_of(kind)}, t);
        },
        py::arg("series"), py::arg("t"), py::arg("window") = 10, py::arg("kind") = "stddev");

    m.def(
        "local_extrema",
        [](const std::vector<double>& series) {
            std::vector<std::pair<std::size_t, std::string>> out;
            for (const auto& e : local_extrema(series))
                out.emplace_back(e.day, e.kind == ExtremumKind::Max ? "max" : "min");
            return out;
        },
        py::arg("series"));

    m.def(
        "detect_drawups",
        [](const std::vector<double>& series, std::size_t window, const std::string& kind, int event_offset) {
            return drawup_dict(detect_drawups(series, EpsilonPolicy{window, kind_of(kind), event_offset}));
        },
        py::arg("series"), py::arg("window") = 10, py::arg("kind") = "stddev", py::arg("event_offset") = 0,
        "Event vector and confirmed episodes of one price series.");

    m.def(
        "estimate_dependency",
        [](const EventMatrix& events, int max_lag, int n_perm, double confidence, std::uint64_t seed,
           bool conditional, unsigned threads) {
            ComovementOptions o;
            o.max_lag = max_lag;
            o.permutation = {n_perm, confidence, seed};
            o.conditional = conditional;
            o.threads = threads;
            const auto vectors = vectors_from(events);
            ComovementResult r;
            {
                py::gil_scoped_release release;
                r = estimate_dependency(vectors, o);
            }
            py::dict out;
            out["W"] = r.dependency.weights;
            out["joint"] = r.joint.joint;
            out["raw"] = r.raw;
            out["thresholds"] = r.thresholds;
            out["marginals"] = r.joint.marginals;
            out["lags"] = r.joint.lags;
            return out;
        },
        py::arg("events"), py::arg("max_lag") = 3, py::arg("n_perm") = 100, py::arg("confidence") = 0.95,
        py::arg("seed") = 0, py::arg("conditional") = false, py::arg("threads") = 0,
        "Lagged joint frequencies, permutation thresholds and the filtered dependency matrix W.");

    m.def(
        "connectivity",
        [](const Eigen::MatrixXd& w, std::vector<std::string> names) {
            const auto net = build_network(w, default_names(std::move(names), static_cast<std::size_t>(w.rows())));
            return json_to_python(connectivity_json(net, connectivity_report(net)));
        },
        py::arg("W"), py::arg("names") = std::vector<std::string>{});

    m.def(
        "strongly_connected_components",
        [](const Eigen::MatrixXd& w) { return strongly_connected_components(build_network(w)); }, py::arg("W"));

    m.def(
        "centrality",
        [](const Eigen::MatrixXd& w, double beta, const std::string& normalization) {
            FeedbackOptions o;
            o.beta = beta;
            o.normalization = normalization_of(normalization);
            const auto b = impacting_centrality(w, o);
            const auto c = impacted_centrality(w, o);
            py::dict out;
            out["b"] = b.normalized;
            out["c"] = c.normalized;
            out["r"] = Eigen::VectorXd(centrality_ratio(b.normalized, c.normalized));
            out["b_raw"] = b.raw;
            out["c_raw"] = c.raw;
            out["residual"] = std::max(b.residual, c.residual);
            return out;
        },
        py::arg("W"), py::arg("beta") = 0.85, py::arg("normalization") = "column",
        "Impacting (b) and impacted (c) feedback centrality on the whole matrix, both scaled to max 1.");

    m.def(
        "classify_regions",
        [](const std::vector<double>& ratios, double delta, const std::string& mode) {
            const auto t = BowtieThresholds::from_delta(delta, mode == "additive" ? ThresholdMode::Additive
                                                                                  : ThresholdMode::Reciprocal);
            std::vector<std::string> out;
            for (auto r : classify_regions(ratios, t)) out.emplace_back(to_string(r));
            return out;
        },
        py::arg("ratios"), py::arg("delta") = 0.5, py::arg("mode") = "reciprocal");

    m.def(
        "analyze_weights",
        [](const Eigen::MatrixXd& w, std::vector<std::string> names, const std::string& config_text) {
            const auto config = config_from(config_text);
            names = default_names(std::move(names), static_cast<std::size_t>(w.rows()));
            const auto a = analyze_weights(names, w, config);
            py::dict out;
            out["connectivity"] = json_to_python(connectivity_json(a.network, a.connectivity));
            out["centrality"] = json_to_python(centrality_json(a.profiles, a.bowtie.regions));
            std::vector<std::string> regions;
            for (auto r : a.bowtie.regions) regions.emplace_back(to_string(r));
            out["regions"] = regions;
            std::vector<std::tuple<std::string, std::string, double>> edges;
            for (const auto& e : a.bowtie.filtered_edges) edges.emplace_back(names[e.source], names[e.target], e.weight);
            out["filtered_edges"] = edges;
            out["diagnostics"] = json_to_python(diagnostics_json(a.network, a.diagnostics));
            out["coords"] = json_to_python(glyphs_to_json(a.glyphs));
            out["svg"] = render_svg(a.glyphs, a.bowtie.filtered_edges);
            return out;
        },
        py::arg("W"), py::arg("names") = std::vector<std::string>{}, py::arg("config") = "",
        "Network, LSCC centrality, bow-tie and layout for one dependency matrix.");

    m.def(
        "generate_panel",
        [](std::size_t n_entities, std::size_t days, double coupling, double base_jump_prob,
           const std::string& planted, std::uint64_t seed, double baseline_noise,
           const std::vector<std::tuple<std::size_t, std::size_t, double>>& regimes) {
            SynthSpec s;
            s.n_entities = n_entities;
            s.days = days;
            s.coupling = coupling;
            s.base_jump_prob = base_jump_prob;
            s.seed = seed;
            s.baseline_noise = baseline_noise;
            if (planted == "matching") s.edges = matching_edges(n_entities, seed);
            else if (planted == "reciprocal") s.edges = reciprocal_edges(n_entities, seed);
            else if (planted == "random") s.edges = random_edges(n_entities, 0.1, seed);
            else if (planted != "none") throw std::invalid_argument("planted must be matching, reciprocal, random or none");
            for (const auto& [a, b, v] : regimes) s.regimes.push_back({a, b, v});
            const auto r = generate_panel(s);
            py::dict out;
            out["prices"] = r.panel.values;
            out["entities"] = r.panel.entities;
            std::vector<std::string> dates;
            for (const auto& d : r.panel.calendar) dates.push_back(d.iso());
            out["dates"] = dates;
            py::array_t<std::uint8_t> jumps({static_cast<py::ssize_t>(n_entities), static_cast<py::ssize_t>(days)});
            auto j = jumps.mutable_unchecked<2>();
            for (std::size_t i = 0; i < n_entities; ++i)
                for (std::size_t t = 0; t < days; ++t) j(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(t)) = r.jumps[i][t];
            out["jumps"] = jumps;
            std::vector<std::tuple<std::size_t, std::size_t, int>> edges;
            for (const auto& e : s.edges) edges.emplace_back(e.source, e.target, e.lag);
            out["edges"] = edges;
            std::ostringstream csv;
            write_panel_csv(csv, r.panel);
            out["csv"] = csv.str();
            return out;
        },
        py::arg("n_entities") = 20, py::arg("days") = 3000, py::arg("coupling") = 0.3,
        py::arg("base_jump_prob") = 0.01, py::arg("planted") = "matching", py::arg("seed") = 1,
        py::arg("baseline_noise") = 0.0,
        py::arg("regimes") = std::vector<std::tuple<std::size_t, std::size_t, double>>{},
        "Synthetic price panel with planted lagged dependencies; `csv` is ingest-ready.");

    m.def(
        "run_pipeline",
        [](const std::string& config_text) {
            const auto config = config_from(config_text);
            nlohmann::json summary;
            {
                py::gil_scoped_release release;
                summary = run_pipeline(config).summary;
            }
            return json_to_python(summary);
        },
        py::arg("config"), "Full pipeline from config text; artifacts go to out_dir, the summary is returned.");

    m.def("parse_config", [](const std::string& text) { return format_config(config_from(text)); },
          py::arg("text"), "Validated, normalized config text.");
}
