#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scal/autoencoder.hpp"
#include "scal/dataset.hpp"
#include "scal/exact.hpp"
#include "scal/kmeans.hpp"

namespace scal {

enum class Method { scal_r, scal_k, kmeans_baseline, exact };

Method method_from_string(const std::string& name);
std::string to_string(Method method);

/// End-to-end run configuration. Mirrored one-to-one by the JSON config file
/// accepted by the CLI (--config); command-line flags override file values.
struct PipelineConfig {
    // Dataset source: a generator shape name, "csv", or "idx".
    std::string dataset = "two_moons";
    int n = 4000;
    double noise = 0.05;
    std::string csv_path;
    std::optional<int> label_column;
    std::string idx_images;
    std::string idx_labels;

    // "auto" normalizes CSV input only (generated data is already O(1) scale
    // and IDX pixels arrive in [0,1]); "on"/"off" force it.
    std::string normalize = "auto";

    Method method = Method::scal_r;
    int landmarks = 200;
    int clusters = 2;

    // Empty means the auto rule [min(512,2p), min(256,p), max(2,k),
    // min(256,p), min(512,2p)] between input and output size p.
    std::vector<int> architecture;

    TrainConfig train;
    int kmeans_restarts = 10;
    int oracle_cap = kDefaultOracleCap;

    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool dump_matrices = false;  // write w.lspc / s.lspc checkpoints
    bool save_model = false;     // write model.laen
    bool write_outputs = true;   // labels.csv / metrics.json / points.csv
};

/// Wall-clock seconds per pipeline stage.
struct StageTimes {
    double landmarks = 0.0;
    double affinity = 0.0;  // bandwidth + W + degrees + S
    double train = 0.0;
    double cluster = 0.0;   // encode + k-means (or eigs + k-means for exact)

    double total() const { return landmarks + affinity + train + cluster; }
};

struct RunReport {
    std::string dataset_name;
    Method method = Method::scal_r;
    int p = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::optional<double> purity;  // absent when the dataset has no labels
    std::optional<double> nmi;
    StageTimes times;
    ClusterAssignment assignment;
    std::vector<double> loss_history;

    /// The metrics document: {dataset, method, p, k, seed, purity, nmi,
    /// wall_times: {landmarks, affinity, train, cluster}}.
    nlohmann::json to_json() const;
};

/// Builds the full layer size list [p, ..., p] from the auto rule.
std::vector<int> auto_architecture(int p, int k);

/// Loads or generates the dataset named by the config, applying the
/// normalization policy.
Dataset prepare_dataset(const PipelineConfig& config);

/// Runs the configured method end to end and, unless write_outputs is off,
/// writes labels.csv, metrics.json and (for 2-D data) points.csv into
/// out_dir. On error, partially written outputs are removed and the failure
/// is rethrown as PipelineError naming the stage.
RunReport run_pipeline(const PipelineConfig& config);

/// Same, on an already prepared dataset (used by sweeps to load data once).
RunReport run_on_dataset(const Dataset& dataset, const PipelineConfig& config);

struct SweepCell {
    int p = 0;
    int repeat = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;  // set when !ok
    double purity = 0.0;
    double nmi = 0.0;
    StageTimes times;
    double time_total_norm = 0.0;  // total over the same repeat's largest-p total
};

/// Runs the pipeline for every (p, repeat) pair with seed = config.seed +
/// repeat, continuing past failed cells, and writes sweep.csv into out_dir.
/// Times are also reported normalized to the largest-p run of each repeat.
std::vector<SweepCell> sweep(const PipelineConfig& config,
                             const std::vector<int>& p_values, int repeats);

/// Parses the JSON mirror of PipelineConfig.
PipelineConfig config_from_json(const nlohmann::json& j);

} // namespace scal
