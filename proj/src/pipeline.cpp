#include "drawnet/pipeline.hpp"

#include "drawnet/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace drawnet {

namespace fs = std::filesystem;

std::string_view to_string(Stage stage) {
    switch (stage) {
        case Stage::Config: return "config";
        case Stage::Ingest: return "ingest";
        case Stage::Detect: return "detect";
        case Stage::Comovement: return "comovement";
        case Stage::Network: return "network";
        case Stage::Centrality: return "centrality";
        case Stage::Bowtie: return "bowtie";
        case Stage::Layout: return "layout";
        case Stage::Output: return "output";
    }
    return "unknown";
}

int exit_code(Stage stage) {
    return 2 + static_cast<int>(stage);
}

namespace {

template <typename F>
auto in_stage(Stage stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("expected a boolean, got '" + std::string(v) + "'");
}

long long parse_int(std::string_view v) {
    std::size_t used = 0;
    const std::string s(v);
    const long long out = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("expected an integer, got '" + s + "'");
    return out;
}

std::string_view kind_name(VariationKind k) {
    return k == VariationKind::Range ? "range" : "stddev";
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < len; ++k) {
        h ^= p[k];
        h *= 0x100000001B3ULL;
    }
    return h;
}

template <typename T>
std::uint64_t fnv1a(std::uint64_t h, const T& value) {
    return fnv1a(h, &value, sizeof value);
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
    epsilon.validate();
    permutation.validate();
    feedback.validate();
    if (max_lag < 0) throw std::invalid_argument("max_lag must be >= 0");
    bowtie_thresholds();
}

std::vector<PeriodSpec> RunConfig::effective_periods() const {
    return periods.empty() ? default_periods() : periods;
}

ComovementOptions RunConfig::comovement_options() const {
    ComovementOptions o;
    o.max_lag = max_lag;
    o.permutation = permutation;
    o.conditional = conditional;
    o.threads = threads;
    return o;
}

BowtieThresholds RunConfig::bowtie_thresholds() const {
    return BowtieThresholds::from_delta(delta, threshold_mode);
}

RunConfig parse_config(std::string_view text) {
    RunConfig c;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = io::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const auto key = io::trim(body.substr(0, eq));
        const auto value = io::trim(body.substr(eq + 1));
        try {
            if (key == "input") c.inputs.emplace_back(value);
            else if (key == "period") c.periods.push_back(parse_period(value));
            else if (key == "epsilon.window") c.epsilon.window = static_cast<std::size_t>(parse_int(value));
            else if (key == "epsilon.kind") {
                if (value == "stddev") c.epsilon.kind = VariationKind::StddevOfDailyChanges;
                else if (value == "range") c.epsilon.kind = VariationKind::Range;
                else throw std::invalid_argument("epsilon.kind must be stddev or range");
            } else if (key == "epsilon.event_offset") c.epsilon.event_offset = static_cast<int>(parse_int(value));
            else if (key == "max_lag") c.max_lag = static_cast<int>(parse_int(value));
            else if (key == "n_perm") c.permutation.n_perm = static_cast<int>(parse_int(value));
            else if (key == "confidence") c.permutation.confidence = io::parse_double(value);
            else if (key == "seed") c.permutation.seed = std::stoull(std::string(value));
            else if (key == "conditional") c.conditional = parse_bool(value);
            else if (key == "beta") c.feedback.beta = io::parse_double(value);
            else if (key == "normalization") {
                if (value == "column") c.feedback.normalization = Normalization::Column;
                else if (value == "row") c.feedback.normalization = Normalization::Row;
                else throw std::invalid_argument("normalization must be column or row");
            } else if (key == "solver.tolerance") c.feedback.tolerance = io::parse_double(value);
            else if (key == "solver.max_iterations") c.feedback.max_iterations = static_cast<int>(parse_int(value));
            else if (key == "delta") c.delta = io::parse_double(value);
            else if (key == "threshold_mode") {
                if (value == "reciprocal") c.threshold_mode = ThresholdMode::Reciprocal;
                else if (value == "additive") c.threshold_mode = ThresholdMode::Additive;
                else throw std::invalid_argument("threshold_mode must be reciprocal or additive");
            } else if (key == "out_dir") c.out_dir = std::string(value);
            else if (key == "threads") c.threads = static_cast<unsigned>(parse_int(value));
            else if (key == "size_attr") c.size_attr = std::string(value);
            else if (key == "cache") c.cache = parse_bool(value);
            else throw std::invalid_argument("unknown key '" + std::string(key) + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        } catch (const std::out_of_range&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": value out of range");
        }
    }
    return c;
}

std::string format_config(const RunConfig& c) {
    std::ostringstream out;
    for (const auto& in : c.inputs) out << "input = " << in << '\n';
    for (const auto& p : c.periods) out << "period = " << p.label << ':' << p.start.iso() << ':' << p.end.iso() << '\n';
    out << "epsilon.window = " << c.epsilon.window << '\n'
        << "epsilon.kind = " << kind_name(c.epsilon.kind) << '\n'
        << "epsilon.event_offset = " << c.epsilon.event_offset << '\n'
        << "max_lag = " << c.max_lag << '\n'
        << "n_perm = " << c.permutation.n_perm << '\n'
        << "confidence = " << io::format_double(c.permutation.confidence) << '\n'
        << "seed = " << c.permutation.seed << '\n'
        << "conditional = " << (c.conditional ? "true" : "false") << '\n'
        << "beta = " << io::format_double(c.feedback.beta) << '\n'
        << "normalization = " << (c.feedback.normalization == Normalization::Row ? "row" : "column") << '\n'
        << "solver.tolerance = " << io::format_double(c.feedback.tolerance) << '\n'
        << "solver.max_iterations = " << c.feedback.max_iterations << '\n'
        << "delta = " << io::format_double(c.delta) << '\n'
        << "threshold_mode = " << (c.threshold_mode == ThresholdMode::Additive ? "additive" : "reciprocal") << '\n'
        << "out_dir = " << c.out_dir << '\n'
        << "threads = " << c.threads << '\n';
    if (!c.size_attr.empty()) out << "size_attr = " << c.size_attr << '\n';
    out << "cache = " << (c.cache ? "true" : "false") << '\n';
    return out.str();
}

bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.inputs == b.inputs && a.periods == b.periods && a.epsilon == b.epsilon && a.max_lag == b.max_lag &&
           a.permutation == b.permutation && a.conditional == b.conditional && a.feedback == b.feedback &&
           a.delta == b.delta && a.threshold_mode == b.threshold_mode && a.out_dir == b.out_dir &&
           a.threads == b.threads && a.size_attr == b.size_attr && a.cache == b.cache;
}

// ---------------------------------------------------------------------------
// Statistics

PeriodStats summarize_period(const Eigen::MatrixXd& weights, const std::vector<bool>& included,
                             const std::vector<Region>& regions, const std::vector<Edge>& filtered_edges,
                             std::size_t n_events) {
    const auto n = static_cast<std::size_t>(weights.rows());
    if (included.size() != n || regions.size() != n) {
        throw std::invalid_argument("summarize_period: size mismatch");
    }
    PeriodStats s;
    s.n_entities = n;
    s.n_events = n_events;
    s.n_included = static_cast<std::size_t>(std::count(included.begin(), included.end(), true));

    std::size_t pairs = 0;
    std::size_t reinforcing = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!included[i]) continue;
        for (std::size_t j = 0; j < n; ++j) {
            if (!included[j]) continue;
            const double w = weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (i == j) {
                reinforcing += w > 0.0 ? 1 : 0;
            } else {
                pairs += w > 0.0 ? 1 : 0;
            }
        }
    }
    if (s.n_included >= 2) {
        s.significant_pair_fraction =
            static_cast<double>(pairs) / static_cast<double>(s.n_included * (s.n_included - 1));
    }
    if (s.n_included >= 1) {
        s.trend_reinforcement_fraction = static_cast<double>(reinforcing) / static_cast<double>(s.n_included);
    }

    const auto report = connectivity_report(build_network(weights));
    s.n_disconnected = report.n_disconnected;
    s.lscc_size = report.lscc_nodes.size();
    s.density = report.density;
    s.mean_out_degree = report.mean_out_degree;
    s.stddev_out_degree = report.stddev_out_degree;
    s.mean_path_length = report.mean_path_length;

    BowtieAssignment assignment;
    assignment.regions = regions;
    assignment.filtered_edges = filtered_edges;
    const auto diag = validate_bowtie(assignment);
    s.n_in = diag.n_in;
    s.n_scc = diag.n_scc;
    s.n_out = diag.n_out;
    s.middle_strongly_connected = diag.middle_strongly_connected;
    return s;
}

nlohmann::json stats_to_json(const PeriodStats& s) {
    nlohmann::json j;
    j["n_entities"] = s.n_entities;
    j["n_included"] = s.n_included;
    j["n_events"] = s.n_events;
    j["significant_pair_fraction"] = s.significant_pair_fraction;
    j["trend_reinforcement_fraction"] = s.trend_reinforcement_fraction;
    j["n_disconnected"] = s.n_disconnected;
    j["lscc_size"] = s.lscc_size;
    j["density"] = s.density;
    j["mean_out_degree"] = s.mean_out_degree;
    j["stddev_out_degree"] = s.stddev_out_degree;
    j["mean_path_length"] = s.mean_path_length ? nlohmann::json(*s.mean_path_length) : nlohmann::json(nullptr);
    j["regions"] = {{"IN", s.n_in}, {"SCC", s.n_scc}, {"OUT", s.n_out}};
    j["middle_strongly_connected"] = s.middle_strongly_connected;
    return j;
}

// ---------------------------------------------------------------------------
// Threshold cache

std::uint64_t threshold_cache_key(const std::vector<DrawupVector>& vectors, const ComovementOptions& options) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    constexpr std::string_view tag = "drawnet-thresholds-v1";
    h = fnv1a(h, tag.data(), tag.size());
    h = fnv1a(h, static_cast<std::uint64_t>(vectors.size()));
    for (const auto& v : vectors) {
        h = fnv1a(h, static_cast<std::uint64_t>(v.events.size()));
        h = fnv1a(h, v.events.data(), v.events.size());
    }
    h = fnv1a(h, static_cast<std::int64_t>(options.max_lag));
    h = fnv1a(h, static_cast<std::int64_t>(options.permutation.n_perm));
    h = fnv1a(h, std::bit_cast<std::uint64_t>(options.permutation.confidence));
    h = fnv1a(h, options.permutation.seed);
    return h;
}

namespace {

fs::path cache_file(const fs::path& dir, std::uint64_t key) {
    char name[64];
    std::snprintf(name, sizeof name, "thresholds-%016llx.json", static_cast<unsigned long long>(key));
    return dir / name;
}

}  // namespace

std::optional<std::vector<Eigen::MatrixXd>> ThresholdCache::load(std::uint64_t key) const {
    const auto path = cache_file(dir_, key);
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
        const auto doc = nlohmann::json::parse(in);
        std::vector<Eigen::MatrixXd> out;
        for (const auto& m : doc.at("thresholds")) {
            const auto n = static_cast<Eigen::Index>(m.size());
            Eigen::MatrixXd mat(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < n; ++j) {
                    mat(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
                }
            }
            out.push_back(std::move(mat));
        }
        return out;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void ThresholdCache::store(std::uint64_t key, const std::vector<Eigen::MatrixXd>& thresholds) const {
    fs::create_directories(dir_);
    nlohmann::json doc;
    auto& arr = doc["thresholds"] = nlohmann::json::array();
    for (const auto& m : thresholds) {
        auto rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            std::vector<double> row;
            for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
            rows.push_back(row);
        }
        arr.push_back(std::move(rows));
    }
    io::write_file(cache_file(dir_, key).string(), doc.dump());
}

// ---------------------------------------------------------------------------
// Stages

NetworkAnalysis analyze_weights(const std::vector<std::string>& names, const Eigen::MatrixXd& w,
                                const RunConfig& config, const std::map<std::string, double>* size_attr) {
    const std::size_t n = names.size();
    NetworkAnalysis a;
    in_stage(Stage::Network, [&] {
        if (static_cast<std::size_t>(w.rows()) != n || w.rows() != w.cols()) {
            throw std::invalid_argument("dependency matrix does not match the entity list");
        }
        a.network = build_network(w, names);
        a.connectivity = connectivity_report(a.network);
    });

    const auto& lscc = a.connectivity.lscc_nodes;
    in_stage(Stage::Centrality, [&] {
        for (std::size_t i = 0; i < n; ++i) {
            a.profiles.push_back({names[i], 0.0, 0.0, std::numeric_limits<double>::quiet_NaN(), config.feedback.beta});
        }
        if (lscc.empty()) return;
        const auto m = static_cast<Eigen::Index>(lscc.size());
        Eigen::MatrixXd sub(m, m);
        for (Eigen::Index r = 0; r < m; ++r) {
            for (Eigen::Index c = 0; c < m; ++c) {
                sub(r, c) = w(static_cast<Eigen::Index>(lscc[static_cast<std::size_t>(r)]),
                              static_cast<Eigen::Index>(lscc[static_cast<std::size_t>(c)]));
            }
        }
        std::vector<std::string> sub_names;
        for (auto v : lscc) sub_names.push_back(names[v]);
        const auto sub_profiles = centrality_profiles(sub_names, sub, config.feedback);
        for (std::size_t k = 0; k < lscc.size(); ++k) a.profiles[lscc[k]] = sub_profiles[k];
    });

    in_stage(Stage::Bowtie, [&] {
        std::vector<double> ratios;
        for (const auto& p : a.profiles) ratios.push_back(p.ratio);
        const auto thresholds = config.bowtie_thresholds();
        const auto regions = classify_regions(ratios, thresholds);
        std::vector<bool> in_lscc(n, false);
        for (auto v : lscc) in_lscc[v] = true;
        std::vector<Edge> core;
        for (const auto& e : a.network.edges) {
            if (in_lscc[e.source] && in_lscc[e.target]) core.push_back(e);
        }
        a.bowtie = filter_links(with_edges(a.network, core), regions, thresholds);
        a.diagnostics = validate_bowtie(a.bowtie);
    });

    in_stage(Stage::Layout, [&] {
        LayoutOptions layout;
        if (size_attr) {
            std::vector<double> attr(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto it = size_attr->find(names[i]);
                if (it != size_attr->end()) attr[i] = it->second;
            }
            layout.size_attribute = std::move(attr);
        }
        a.glyphs = place_nodes(a.bowtie.regions, a.profiles, layout);
    });
    return a;
}

PeriodSpec whole_span(const PricePanel& panel, std::string label) {
    if (panel.calendar.empty()) throw std::invalid_argument("panel has an empty calendar");
    return {std::move(label), panel.calendar.front(), panel.calendar.back() + 1};
}

DetectionResult detect_period(const PricePanel& filled, const PeriodSpec& period, const RunConfig& config) {
    DetectionResult d;
    d.panel = in_stage(Stage::Ingest, [&] { return slice_period(filled, period); });
    in_stage(Stage::Detect, [&] {
        config.epsilon.validate();
        const std::size_t n = d.panel.n_entities();
        const std::size_t days = d.panel.n_days();
        if (n == 0) throw std::invalid_argument("panel has no entities");
        d.included.assign(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            DrawupVector v;
            v.entity_id = d.panel.entities[i];
            v.events.assign(days, 0);
            const std::size_t first = d.panel.first_valid(i);
            const bool enough = d.panel.observed_count(i) >= config.epsilon.window + 2 && first < days &&
                                days - first > config.epsilon.window;
            if (enough) {
                std::vector<double> series(days - first);
                for (std::size_t t = first; t < days; ++t) {
                    series[t - first] = d.panel.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
                }
                auto found = detect_drawups(series, config.epsilon, v.entity_id);
                for (std::size_t t = 0; t < series.size(); ++t) v.events[t + first] = found.events[t];
                for (auto& e : found.episodes) {
                    e.start_day += first;
                    e.peak_day += first;
                    e.trough_day += first;
                    e.event_day += first;
                }
                v.episodes = std::move(found.episodes);
                d.included[i] = true;
            }
            d.drawups.push_back(std::move(v));
        }
    });
    return d;
}

ComovementResult comovement_stage(const std::vector<DrawupVector>& drawups, const RunConfig& config,
                                  const ThresholdCache* cache) {
    return in_stage(Stage::Comovement, [&] {
        const auto options = config.comovement_options();
        std::optional<std::vector<Eigen::MatrixXd>> thresholds;
        std::uint64_t key = 0;
        if (cache) {
            key = threshold_cache_key(drawups, options);
            thresholds = cache->load(key);
        }
        if (!thresholds) {
            std::vector<int> lags;
            for (int lag = 0; lag <= options.max_lag; ++lag) lags.push_back(lag);
            thresholds = permutation_thresholds(drawups, lags, options.permutation, options.threads);
            if (cache) cache->store(key, *thresholds);
        }
        return assemble_dependency(drawups, std::move(*thresholds), options);
    });
}

PeriodAnalysis analyze_period(const PricePanel& filled, const PeriodSpec& period, const RunConfig& config,
                              const std::map<std::string, double>* size_attr, const ThresholdCache* cache) {
    in_stage(Stage::Config, [&] { config.validate(); });
    PeriodAnalysis a;
    a.period = period;
    a.detection = detect_period(filled, period, config);
    a.comovement = comovement_stage(a.detection.drawups, config, cache);
    a.comovement.dependency.period_label = period.label;
    a.network = analyze_weights(a.detection.panel.entities, a.comovement.dependency.weights, config, size_attr);

    std::size_t n_events = 0;
    for (const auto& v : a.detection.drawups) n_events += v.count();
    a.stats = summarize_period(a.comovement.dependency.weights, a.detection.included, a.network.bowtie.regions,
                               a.network.bowtie.filtered_edges, n_events);
    return a;
}

std::map<std::string, double> load_node_attributes(const std::string& path) {
    return in_stage(Stage::Ingest, [&] {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open '" + path + "'");
        return parse_node_attributes(in);
    });
}

PricePanel load_inputs(const std::vector<std::string>& paths) {
    if (paths.empty()) throw std::invalid_argument("no input files configured");
    if (paths.size() == 1) {
        std::ifstream in(paths.front());
        if (!in) throw std::runtime_error("cannot open '" + paths.front() + "'");
        return parse_panel(in);
    }
    std::vector<PriceSeries> all;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot open '" + p + "'");
        const auto panel = parse_panel(in);
        for (std::size_t i = 0; i < panel.n_entities(); ++i) {
            auto s = panel.series(i);
            PriceSeries kept;
            kept.entity_id = s.entity_id;
            for (std::size_t t = 0; t < s.dates.size(); ++t) {
                if (!s.observed[t]) continue;
                kept.dates.push_back(s.dates[t]);
                kept.prices.push_back(s.prices[t]);
                kept.observed.push_back(true);
            }
            all.push_back(std::move(kept));
        }
    }
    return panel_from_series(all);
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string matrix_csv(const std::vector<std::string>& names, const Eigen::MatrixXd& m) {
    std::ostringstream out;
    io::write_matrix_csv(out, names, m);
    return out.str();
}

}  // namespace

nlohmann::json network_json(const DependencyNetwork& net, const std::vector<Edge>& edges, const FilterMeta& meta,
                            const std::string& label) {
    nlohmann::json doc;
    doc["directed"] = true;
    doc["multigraph"] = false;
    doc["graph"] = {{"period", label},
                    {"n_perm", meta.n_perm},
                    {"confidence", meta.confidence},
                    {"seed", meta.seed},
                    {"conditional", meta.conditional}};
    auto& nodes = doc["nodes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < net.size(); ++i) {
        nodes.push_back({{"id", net.nodes[i]}, {"trend_reinforcement", net.self_loops[i]}});
    }
    auto& links = doc["links"] = nlohmann::json::array();
    for (const auto& e : edges) {
        links.push_back({{"source", net.nodes[e.source]}, {"target", net.nodes[e.target]}, {"weight", e.weight}});
    }
    return doc;
}

std::string edges_csv(const DependencyNetwork& net, const std::vector<Edge>& edges) {
    std::string out = "source,target,weight\n";
    for (const auto& e : edges) {
        out += net.nodes[e.source] + "," + net.nodes[e.target] + "," + io::format_double(e.weight) + "\n";
    }
    return out;
}

std::vector<DrawupVector> read_drawups_csv(std::istream& in, std::vector<Date>* calendar) {
    std::string line;
    std::size_t lineno = 1;
    if (!std::getline(in, line) || io::trim(line) != "entity,date,event") {
        throw IngestError("drawups CSV must start with 'entity,date,event'", 1);
    }
    std::vector<DrawupVector> out;
    std::vector<Date> days;
    std::size_t pos = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (io::trim(line).empty()) continue;
        const auto f = io::split(io::trim(line));
        if (f.size() != 3 || (f[2] != "0" && f[2] != "1")) throw IngestError("malformed drawup row", lineno);
        const auto date = Date::parse(f[1]);
        if (out.empty() || out.back().entity_id != f[0]) {
            if (!out.empty() && pos != days.size()) throw IngestError("entity rows do not cover the calendar", lineno);
            out.push_back({});
            out.back().entity_id = std::string(f[0]);
            pos = 0;
        }
        if (out.size() == 1) {
            days.push_back(date);
        } else if (pos >= days.size() || days[pos] != date) {
            throw IngestError("entity rows do not follow the shared calendar", lineno);
        }
        out.back().events.push_back(f[2] == "1" ? 1 : 0);
        ++pos;
    }
    if (out.empty()) throw IngestError("drawups CSV has no rows");
    if (pos != days.size()) throw IngestError("last entity does not cover the calendar");
    if (calendar) *calendar = std::move(days);
    return out;
}

std::string drawups_csv(const PricePanel& panel, const std::vector<DrawupVector>& drawups) {
    std::string out = "entity,date,event\n";
    for (const auto& v : drawups) {
        for (std::size_t t = 0; t < v.events.size(); ++t) {
            out += v.entity_id + "," + panel.calendar[t].iso() + "," + (v.events[t] ? "1" : "0") + "\n";
        }
    }
    return out;
}

nlohmann::json episodes_json(const PricePanel& panel, const std::vector<DrawupVector>& drawups) {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& v : drawups) {
        auto arr = nlohmann::json::array();
        for (const auto& e : v.episodes) {
            arr.push_back({{"start", panel.calendar[e.start_day].iso()},
                           {"peak", panel.calendar[e.peak_day].iso()},
                           {"trough", panel.calendar[e.trough_day].iso()},
                           {"event", panel.calendar[e.event_day].iso()},
                           {"amplitude", e.amplitude},
                           {"correction", e.correction},
                           {"epsilon", e.epsilon}});
        }
        doc[v.entity_id] = std::move(arr);
    }
    return doc;
}

std::string centrality_csv(const std::vector<CentralityProfile>& profiles, const std::vector<Region>& regions) {
    std::string out = "entity,b,c,r,region\n";
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        out += p.entity_id + "," + io::format_double(p.impacting) + "," + io::format_double(p.impacted) + "," +
               io::format_double(p.ratio) + "," + std::string(to_string(regions[i])) + "\n";
    }
    return out;
}

nlohmann::json centrality_json(const std::vector<CentralityProfile>& profiles, const std::vector<Region>& regions) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        arr.push_back({{"entity", p.entity_id},
                       {"b", p.impacting},
                       {"c", p.impacted},
                       {"r", std::isfinite(p.ratio) ? nlohmann::json(p.ratio)
                                                    : nlohmann::json(io::format_double(p.ratio))},
                       {"beta", p.beta},
                       {"region", std::string(to_string(regions[i]))}});
    }
    return arr;
}

nlohmann::json connectivity_json(const DependencyNetwork& net, const ConnectivityReport& r) {
    nlohmann::json j;
    j["n_nodes"] = r.n_nodes;
    j["n_disconnected"] = r.n_disconnected;
    j["n_connected_outside_lscc"] = r.n_connected_outside_lscc;
    auto& nodes = j["lscc_nodes"] = nlohmann::json::array();
    for (auto v : r.lscc_nodes) nodes.push_back(net.nodes[v]);
    j["lscc_size"] = r.lscc_nodes.size();
    j["lscc_edges"] = r.lscc_edges;
    j["density"] = r.density;
    j["mean_out_degree"] = r.mean_out_degree;
    j["stddev_out_degree"] = r.stddev_out_degree;
    j["mean_path_length"] = r.mean_path_length ? nlohmann::json(*r.mean_path_length) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json diagnostics_json(const DependencyNetwork& net, const BowtieDiagnostics& d) {
    nlohmann::json j;
    j["regions"] = {{"IN", d.n_in}, {"SCC", d.n_scc}, {"OUT", d.n_out}, {"DISCONNECTED", d.n_disconnected}};
    j["middle_strongly_connected"] = d.middle_strongly_connected;
    auto& tt = j["tubes_tendrils"] = nlohmann::json::array();
    for (auto v : d.tubes_tendrils) tt.push_back(net.nodes[v]);
    j["warnings"] = d.warnings;
    return j;
}

void write_detection_artifacts(const fs::path& dir, const DetectionResult& d) {
    fs::create_directories(dir);
    auto put = [&](const std::string& name, std::string_view text) { io::write_file((dir / name).string(), text); };
    put("panel.json", panel_to_json(d.panel).dump());
    put("drawups.csv", drawups_csv(d.panel, d.drawups));
    put("episodes.json", episodes_json(d.panel, d.drawups).dump(2));
    nlohmann::json entities = nlohmann::json::array();
    for (std::size_t i = 0; i < d.panel.n_entities(); ++i) {
        entities.push_back({{"entity", d.panel.entities[i]},
                            {"included", static_cast<bool>(d.included[i])},
                            {"observed_days", d.panel.observed_count(i)},
                            {"events", d.drawups[i].count()}});
    }
    put("entities.json", entities.dump(2));
}

void write_comovement_artifacts(const fs::path& dir, const std::vector<std::string>& names,
                                const ComovementResult& c, const std::string& label) {
    fs::create_directories(dir);
    auto put = [&](const std::string& name, std::string_view text) { io::write_file((dir / name).string(), text); };
    for (std::size_t k = 0; k < c.joint.lags.size(); ++k) {
        const auto lag = std::to_string(c.joint.lags[k]);
        put("joint_lag" + lag + ".csv", matrix_csv(names, c.joint.joint[k]));
        put("raw_lag" + lag + ".csv", matrix_csv(names, c.raw[k]));
        put("threshold_lag" + lag + ".csv", matrix_csv(names, c.thresholds[k]));
    }
    put("W.csv", matrix_csv(names, c.dependency.weights));
    const auto net = build_network(c.dependency.weights, names);
    put("network.json", network_json(net, net.edges, c.dependency.meta, label).dump(2));
    put("edges.csv", edges_csv(net, net.edges));
}

void write_network_artifacts(const fs::path& dir, const NetworkAnalysis& a, const FilterMeta& meta,
                             const std::string& label, const SvgStyle& style) {
    fs::create_directories(dir);
    auto put = [&](const std::string& name, std::string_view text) { io::write_file((dir / name).string(), text); };
    put("connectivity.json", connectivity_json(a.network, a.connectivity).dump(2));
    put("centrality.csv", centrality_csv(a.profiles, a.bowtie.regions));
    put("centrality.json", centrality_json(a.profiles, a.bowtie.regions).dump(2));
    std::string regions = "entity,region\n";
    for (std::size_t i = 0; i < a.network.size(); ++i) {
        regions += a.network.nodes[i] + "," + std::string(to_string(a.bowtie.regions[i])) + "\n";
    }
    put("bowtie.csv", regions);
    auto bowtie = network_json(a.network, a.bowtie.filtered_edges, meta, label);
    bowtie["graph"]["upper"] = a.bowtie.thresholds.upper;
    bowtie["graph"]["lower"] = a.bowtie.thresholds.lower;
    bowtie["diagnostics"] = diagnostics_json(a.network, a.diagnostics);
    put("bowtie_edges.json", bowtie.dump(2));
    put("bowtie.svg", render_svg(a.glyphs, a.bowtie.filtered_edges, style));
    put("coords.json", glyphs_to_json(a.glyphs).dump(2));
}

void write_period_artifacts(const fs::path& dir, const PeriodAnalysis& a) {
    write_detection_artifacts(dir, a.detection);
    write_comovement_artifacts(dir, a.detection.panel.entities, a.comovement, a.period.label);
    write_network_artifacts(dir, a.network, a.comovement.dependency.meta, a.period.label);
}

nlohmann::json summary_json(const RunConfig& config, const std::vector<PeriodAnalysis>& periods) {
    nlohmann::json doc;
    doc["format"] = "drawnet-summary";
    doc["version"] = 1;
    doc["parameters"] = {{"epsilon_window", config.epsilon.window},
                         {"epsilon_kind", std::string(kind_name(config.epsilon.kind))},
                         {"event_offset", config.epsilon.event_offset},
                         {"max_lag", config.max_lag},
                         {"n_perm", config.permutation.n_perm},
                         {"confidence", config.permutation.confidence},
                         {"seed", config.permutation.seed},
                         {"conditional", config.conditional},
                         {"beta", config.feedback.beta},
                         {"normalization", config.feedback.normalization == Normalization::Row ? "row" : "column"},
                         {"delta", config.delta},
                         {"upper", config.bowtie_thresholds().upper},
                         {"lower", config.bowtie_thresholds().lower}};
    auto& arr = doc["periods"] = nlohmann::json::array();
    for (const auto& a : periods) {
        nlohmann::json p;
        p["label"] = a.period.label;
        p["start"] = a.period.start.iso();
        p["end"] = a.period.end.iso();
        const auto& d = a.detection;
        p["days"] = d.panel.n_days();
        auto excluded = nlohmann::json::array();
        for (std::size_t i = 0; i < d.included.size(); ++i) {
            if (!d.included[i]) excluded.push_back(d.panel.entities[i]);
        }
        p["excluded"] = std::move(excluded);
        p["stats"] = stats_to_json(a.stats);
        p["warnings"] = a.network.diagnostics.warnings;
        arr.push_back(std::move(p));
    }
    return doc;
}

RunReport run_pipeline(const RunConfig& config) {
    in_stage(Stage::Config, [&] { config.validate(); });
    const auto filled = in_stage(Stage::Ingest, [&] { return forward_fill(load_inputs(config.inputs)); });
    std::optional<std::map<std::string, double>> attrs;
    if (!config.size_attr.empty()) {
        attrs = load_node_attributes(config.size_attr);
    }

    const fs::path out_dir(config.out_dir);
    in_stage(Stage::Output, [&] { fs::create_directories(out_dir); });
    std::optional<ThresholdCache> cache;
    if (config.cache) cache.emplace(out_dir / "cache");

    RunReport report;
    for (const auto& period : config.effective_periods()) {
        auto analysis = analyze_period(filled, period, config, attrs ? &*attrs : nullptr, cache ? &*cache : nullptr);
        in_stage(Stage::Output, [&] { write_period_artifacts(out_dir / period.label, analysis); });
        report.periods.push_back(std::move(analysis));
    }
    report.summary = summary_json(config, report.periods);
    in_stage(Stage::Output, [&] {
        io::write_file((out_dir / "summary.json").string(), report.summary.dump(2) + "\n");
        io::write_file((out_dir / "run.conf").string(), format_config(config));
    });
    return report;
}

}  // namespace drawnet
