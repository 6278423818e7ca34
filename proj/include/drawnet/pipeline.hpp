#pragma once

#include "drawnet/bowtie.hpp"
#include "drawnet/centrality.hpp"
#include "drawnet/comovement.hpp"
#include "drawnet/drawup.hpp"
#include "drawnet/graph.hpp"
#include "drawnet/ingest.hpp"
#include "drawnet/layout.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drawnet {

enum class Stage { Config, Ingest, Detect, Comovement, Network, Centrality, Bowtie, Layout, Output };

std::string_view to_string(Stage stage);

/// Process exit code used by the CLI when `stage` fails.
int exit_code(Stage stage);

class StageError : public std::runtime_error {
public:
    StageError(Stage stage, const std::string& what)
        : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
    Stage stage() const noexcept { return stage_; }

private:
    Stage stage_;
};

struct RunConfig {
    std::vector<std::string> inputs;
    std::vector<PeriodSpec> periods;  ///< empty: default_periods()
    EpsilonPolicy epsilon;
    int max_lag = kDefaultMaxLag;
    PermutationOptions permutation;
    bool conditional = false;
    FeedbackOptions feedback;
    double delta = 0.5;
    ThresholdMode threshold_mode = ThresholdMode::Reciprocal;
    std::string out_dir = "drawnet-out";
    unsigned threads = 0;
    std::string size_attr;  ///< optional node attribute CSV for glyph sizing
    bool cache = true;

    void validate() const;
    std::vector<PeriodSpec> effective_periods() const;
    ComovementOptions comovement_options() const;
    BowtieThresholds bowtie_thresholds() const;
};

/// Plain `key = value` lines; `#` starts a comment. `input` and `period` may repeat.
RunConfig parse_config(std::string_view text);
std::string format_config(const RunConfig& config);
bool operator==(const RunConfig& a, const RunConfig& b);

struct PeriodStats {
    std::size_t n_entities = 0;
    std::size_t n_included = 0;
    std::size_t n_events = 0;
    double significant_pair_fraction = 0.0;
    double trend_reinforcement_fraction = 0.0;
    std::size_t n_disconnected = 0;
    std::size_t lscc_size = 0;
    double density = 0.0;
    double mean_out_degree = 0.0;
    double stddev_out_degree = 0.0;
    std::optional<double> mean_path_length;
    std::size_t n_in = 0;
    std::size_t n_scc = 0;
    std::size_t n_out = 0;
    bool middle_strongly_connected = true;
};

/// Summary statistics from the persisted pieces alone: filtered W, the
/// included-entity mask and the bow-tie regions.
PeriodStats summarize_period(const Eigen::MatrixXd& weights, const std::vector<bool>& included,
                             const std::vector<Region>& regions,
                             const std::vector<Edge>& filtered_edges, std::size_t n_events);

nlohmann::json stats_to_json(const PeriodStats& stats);

/// On-disk store for permutation thresholds keyed by a content hash.
class ThresholdCache {
public:
    explicit ThresholdCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
    std::optional<std::vector<Eigen::MatrixXd>> load(std::uint64_t key) const;
    void store(std::uint64_t key, const std::vector<Eigen::MatrixXd>& thresholds) const;

private:
    std::filesystem::path dir_;
};

std::uint64_t threshold_cache_key(const std::vector<DrawupVector>& vectors,
                                  const ComovementOptions& options);

/// Everything downstream of the dependency matrix.
struct NetworkAnalysis {
    DependencyNetwork network;
    ConnectivityReport connectivity;
    std::vector<CentralityProfile> profiles;  ///< zero b, c and NaN r outside the LSCC
    BowtieAssignment bowtie;
    BowtieDiagnostics diagnostics;
    std::vector<NodeGlyph> glyphs;
};

/// Network, centrality (on the LSCC), bow-tie and layout stages for one W.
NetworkAnalysis analyze_weights(const std::vector<std::string>& names, const Eigen::MatrixXd& weights,
                                const RunConfig& config,
                                const std::map<std::string, double>* size_attr = nullptr);

struct DetectionResult {
    PricePanel panel;  ///< sliced, forward-filled
    std::vector<bool> included;  ///< enough in-period history for the detector
    std::vector<DrawupVector> drawups;
};

/// Slices `filled` to `period` and runs the detector on every entity with at
/// least window + 2 in-period observations; the rest get empty event vectors.
DetectionResult detect_period(const PricePanel& filled, const PeriodSpec& period, const RunConfig& config);

/// Period covering the whole calendar of `panel`.
PeriodSpec whole_span(const PricePanel& panel, std::string label = "all");

/// Joint matrices, permutation thresholds (through `cache` when given) and W.
ComovementResult comovement_stage(const std::vector<DrawupVector>& drawups, const RunConfig& config,
                                  const ThresholdCache* cache = nullptr);

struct PeriodAnalysis {
    PeriodSpec period;
    DetectionResult detection;
    ComovementResult comovement;
    NetworkAnalysis network;
    PeriodStats stats;
};

/// In-memory run of every stage for one period. `filled` is the forward-filled
/// full panel; the period slice is taken here.
PeriodAnalysis analyze_period(const PricePanel& filled, const PeriodSpec& period,
                              const RunConfig& config,
                              const std::map<std::string, double>* size_attr = nullptr,
                              const ThresholdCache* cache = nullptr);

/// Reads every configured input into one panel (entities must not repeat across files).
PricePanel load_inputs(const std::vector<std::string>& paths);

std::map<std::string, double> load_node_attributes(const std::string& path);

struct RunReport {
    std::vector<PeriodAnalysis> periods;
    nlohmann::json summary;
};

nlohmann::json summary_json(const RunConfig& config, const std::vector<PeriodAnalysis>& periods);

/// Full pipeline with every intermediate written under config.out_dir.
RunReport run_pipeline(const RunConfig& config);

/// Inverse of drawups_csv; rows must be grouped by entity in calendar order.
std::vector<DrawupVector> read_drawups_csv(std::istream& in, std::vector<Date>* calendar = nullptr);
std::string drawups_csv(const PricePanel& panel, const std::vector<DrawupVector>& drawups);
nlohmann::json episodes_json(const PricePanel& panel, const std::vector<DrawupVector>& drawups);
std::string centrality_csv(const std::vector<CentralityProfile>& profiles, const std::vector<Region>& regions);
nlohmann::json centrality_json(const std::vector<CentralityProfile>& profiles,
                               const std::vector<Region>& regions);
nlohmann::json connectivity_json(const DependencyNetwork& net, const ConnectivityReport& report);
nlohmann::json diagnostics_json(const DependencyNetwork& net, const BowtieDiagnostics& diagnostics);

/// panel.json, drawups.csv, episodes.json, entities.json
void write_detection_artifacts(const std::filesystem::path& dir, const DetectionResult& detection);
/// joint_lag*.csv, raw_lag*.csv, threshold_lag*.csv, W.csv, edges.csv, network.json
void write_comovement_artifacts(const std::filesystem::path& dir, const std::vector<std::string>& names,
                                const ComovementResult& comovement, const std::string& label);
/// connectivity.json, centrality.{csv,json}, bowtie.csv, bowtie_edges.json, bowtie.svg, coords.json
void write_network_artifacts(const std::filesystem::path& dir, const NetworkAnalysis& analysis,
                             const FilterMeta& meta, const std::string& label, const SvgStyle& style = {});
/// Node-link JSON: {"directed","multigraph","graph":{..},"nodes":[{"id",..}],"links":[{"source","target","weight"}]}
nlohmann::json network_json(const DependencyNetwork& net, const std::vector<Edge>& edges, const FilterMeta& meta,
                            const std::string& label);
std::string edges_csv(const DependencyNetwork& net, const std::vector<Edge>& edges);

/// Every artifact of one period.
void write_period_artifacts(const std::filesystem::path& dir, const PeriodAnalysis& analysis);

}  // namespace drawnet
