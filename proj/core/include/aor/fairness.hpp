#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aor/dataset.hpp"
#include "aor/split_model.hpp"

namespace aor {

/// Normalized 4-level prediction histogram of one group.
struct GroupDistribution {
    int group = 0;
    std::array<double, 4> proportions{};
};

/// Sample Pearson correlation coefficient. Throws DimensionError on length
/// mismatch or length < 2, DegenerateError when either vector is constant.
double pearson(const std::vector<double>& u, const std::vector<double>& v);

double pearson(const std::array<double, 4>& u, const std::array<double, 4>& v);

/// Per-group normalized histograms of predicted levels. Throws
/// DegenerateError naming the group that has no samples.
std::pair<GroupDistribution, GroupDistribution> group_prediction_distributions(
    const std::vector<int>& pred_levels, const std::vector<int>& g);

/// pearson applied to the two groups' 4-vectors.
double group_distribution_pcc(const std::vector<int>& pred_levels, const std::vector<int>& g);

/// One-vs-rest F1 per (class, group), computed within each group's subset.
/// F1 = 0 whenever precision + recall = 0, including the never-true,
/// never-predicted case.
std::array<std::array<double, 2>, 4> f1_table(const std::vector<int>& pred_levels,
                                              const std::vector<int>& true_levels,
                                              const std::vector<int>& g);

/// Fraction of exact matches; DimensionError on length mismatch or empty.
double accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

/// Skew-aware accuracy floors: uniform guessing (exactly 1/4) and the
/// majority level's frequency with its level (lowest index on ties).
struct Baselines {
    double uniform = 0.25;
    double mode = 0.0;
    int mode_level = 0;
};

Baselines baselines(const GroupLabeledDataset& ds);

/// Averaged per-group prediction proportions over `repeats` balanced
/// subsets; repeat r reuses uniform_subset with seed + r, so repeats=1
/// reproduces a direct single-subset evaluation.
struct SubsetEval {
    std::size_t per_cell = 0;
    std::size_t repeats = 0;
    GroupDistribution dist_g0;
    GroupDistribution dist_g1;
};

SubsetEval uniform_subset_eval(const SplitModel& model, const GroupLabeledDataset& ds,
                               std::size_t per_cell, std::size_t repeats, std::uint64_t seed);

/// Input-gradient saliency of the predicted-class logit, averaged per group
/// over at most sample_cap samples of each group (dataset order), plus the
/// cosine similarity of the two mean vectors. Model parameters are left
/// untouched. Throws DegenerateError on an empty group or zero mean vector.
struct SaliencyDivergence {
    std::vector<double> mean_saliency_g0;
    std::vector<double> mean_saliency_g1;
    double cosine_similarity = 0.0;
};

SaliencyDivergence group_saliency_divergence(const SplitModel& model,
                                             const GroupLabeledDataset& ds,
                                             std::size_t sample_cap);

/// Evaluation summary of one trained model on one labeled dataset.
/// ext_total_variation is an extension beyond the distribution-PCC metric:
/// the total-variation distance between the two group distributions.
struct FairnessReport {
    GroupDistribution dist_g0;
    GroupDistribution dist_g1;
    double group_pcc = 0.0;
    std::array<std::array<double, 2>, 4> f1{};
    double accuracy = 0.0;
    double baseline_uniform = 0.25;
    double baseline_mode = 0.0;
    std::optional<SubsetEval> uniform_subset_eval;
    double ext_total_variation = 0.0;
};

/// Throws ValidationError when a report violates its invariants
/// (proportions non-negative and summing to 1, pcc in [-1,1], f1 in [0,1],
/// uniform baseline exactly 1/4).
void validate(const FairnessReport& report);

struct SubsetEvalParams {
    std::size_t per_cell = 21;
    std::size_t repeats = 10;
    std::uint64_t seed = 1;
};

/// Runs the full metric suite on ds (must carry task labels). The subset
/// evaluation is included when requested and the dataset has enough samples
/// per cell; a deficient cell leaves the field absent.
FairnessReport evaluate_model(const SplitModel& model, const GroupLabeledDataset& ds,
                              const std::optional<SubsetEvalParams>& subset = {});

/// Stable JSON schema, field names exactly as in FairnessReport.
std::string report_to_json(const FairnessReport& report);

/// Parses and validates; throws ValidationError naming the missing or
/// ill-typed field path.
FairnessReport report_from_json(const std::string& text);

void write_report_json(const FairnessReport& report, const std::string& path);
FairnessReport read_report_json(const std::string& path);

/// Group-disaggregated F1 table: one row per level, one column per group.
void write_f1_csv(const FairnessReport& report, const std::string& path);

} // namespace aor
