#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aor/dataset.hpp"
#include "aor/split_model.hpp"
#include "aor/train.hpp"

namespace aor {

/// Generation parameters of the attribute-only dataset used by stage A.
struct ExternalDataParams {
    std::size_t n = 16000;
    double domain_shift_sd = 0.25;
};

/// Full description of one experiment: data source, model shape, both
/// training stages, and the lambda x seed grid. When dataset_csv is set the
/// task data comes from that file instead of the generator (the generator
/// spec still drives the external stage-A data).
struct ExperimentConfig {
    std::optional<std::string> dataset_csv;
    DatasetSpec dataset;
    ExternalDataParams external;
    SplitModelConfig model;
    TrainingConfig stage_a;
    TrainingConfig stage_b;
    std::vector<double> lambda_values{0.0, 0.1, 1.0, 10.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::string output_dir = "out";
};

/// The calibrated-preset experiment with the default grid.
ExperimentConfig default_experiment_config();

/// Stable tags for the per-seed randomness streams of run_experiment
/// (derive_seed(seed, tag)); public so external tooling can reproduce any
/// stream, e.g. the validation split of a finished run.
namespace seed_tags {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t external = 2;
inline constexpr std::uint64_t model = 3;
inline constexpr std::uint64_t stage_a = 4;
inline constexpr std::uint64_t stage_b = 5;
inline constexpr std::uint64_t split = 6;
inline constexpr std::uint64_t subset = 7;
} // namespace seed_tags

/// Throws ConfigError on an invalid or inconsistent config (empty grids,
/// duplicate grid entries, model/dataset dimension mismatch, bad stage
/// settings).
void validate(const ExperimentConfig& config);

/// Parses a config from TOML-style key/value text (sections [dataset],
/// [external], [model], [stage_a], [stage_b]; top-level output_dir,
/// lambda_values, seeds) or from JSON when the first non-space byte is '{'.
/// Unspecified fields keep the defaults of default_experiment_config().
/// Throws ConfigError naming the offending key or value.
ExperimentConfig parse_experiment_config(const std::string& text);

ExperimentConfig load_experiment_config(const std::string& path);

/// FNV-1a (64-bit) over the canonical serialization of every semantic field;
/// output_dir is excluded since it does not affect results. 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Per-seed stage-A artifacts; paths are relative to the output directory.
struct StageARecord {
    std::uint64_t seed = 0;
    std::string checkpoint_path;
    std::string history_path;
    bool ok = false;
    std::string error;
};

/// One (seed, lambda) stage-B run with its summary metrics.
struct RunRecord {
    std::uint64_t seed = 0;
    double lambda = 0.0;
    std::string checkpoint_path;
    std::string history_path;
    std::string report_path;
    bool ok = false;
    std::string error;
    double group_pcc = 0.0;
    double accuracy = 0.0;
    double final_l_ortho = 0.0;
};

struct RunManifest {
    std::string config_hash;
    std::string library_version;
    double wall_clock_seconds = 0.0;
    std::string output_dir;
    std::vector<StageARecord> stage_a;
    std::vector<RunRecord> runs;
};

void write_manifest_json(const RunManifest& manifest, const std::string& path);

/// Runs the staged pipeline over every (seed, lambda): per seed, generate or
/// load data, split 80/20, train stage A once on external data, then per
/// lambda reload that checkpoint, train stage B, and evaluate on the
/// validation split. A failing run is recorded in the manifest and the
/// remaining runs proceed. Writes checkpoints, histories, reports, and
/// manifest.json under config.output_dir; log (when non-null) receives one
/// progress line per run.
RunManifest run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

struct SweepRow {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    double group_pcc = 0.0;
    double accuracy = 0.0;
    double final_l_ortho = 0.0;
};

struct SweepAggregate {
    double lambda = 0.0;
    double mean_group_pcc = 0.0;
    double min_group_pcc = 0.0;
    double max_group_pcc = 0.0;
    double mean_accuracy = 0.0;
    double mean_final_l_ortho = 0.0;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    std::vector<SweepAggregate> aggregates;
    double best_lambda = 0.0;       // highest mean group PCC, first on ties
    bool monotone_improvement = false; // best-lambda mean PCC > lambda=0 mean PCC
};

/// run_experiment plus aggregation: writes sweep.csv (one row per successful
/// run) and sweep.json (rows, per-lambda mean and range, best lambda, and the
/// improvement flag) into config.output_dir. Requires >= 2 lambda values and
/// at least one successful run per lambda.
SweepSummary sweep_lambda(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Renders a report's two group distributions as side-by-side SVG bar
/// charts. Output bytes are deterministic for identical input. Throws
/// ValidationError naming the field path when the report is malformed.
void render_histograms(const std::string& report_path, const std::string& out_path);

} // namespace aor
