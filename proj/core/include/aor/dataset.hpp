#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aor/matrix.hpp"

namespace aor {

/// Feature matrix with group labels and optional 4-level task labels.
/// Task labels are absent (empty y) for external attribute-only datasets.
struct GroupLabeledDataset {
    Matrix X;                              // n x d
    std::vector<int> y;                    // levels 0..3; empty = absent
    std::vector<int> g;                    // groups 0/1, size n
    std::array<std::string, 4> level_names{"very low", "low", "high", "very high"};

    std::size_t size() const { return X.rows; }
    bool has_task_labels() const { return !y.empty(); }
};

/// Throws ValidationError if sizes or label ranges are inconsistent.
void validate(const GroupLabeledDataset& ds);

/// Generative recipe for a biased task dataset. Features are three
/// concatenated blocks: a core block carrying the task signal, a spurious
/// block carrying the group signal, and a pure-noise block.
struct DatasetSpec {
    std::size_t n = 40000;
    double group1_fraction = 0.5;
    std::array<double, 4> label_dist_g0{0.25, 0.25, 0.25, 0.25};
    std::array<double, 4> label_dist_g1{0.25, 0.25, 0.25, 0.25};
    std::size_t d_core = 12;
    std::size_t d_spur = 8;
    std::size_t d_noise = 4;
    double class_separation = 1.0;
    double group_separation = 2.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 1;

    std::size_t feature_dim() const { return d_core + d_spur + d_noise; }
};

void validate(const DatasetSpec& spec);

/// One of the 8 (group x level) intersections.
struct CellIndex {
    int group; // 0 or 1
    int level; // 0..3
};

/// Spec calibrated to the skew of the engagement corpus this project models:
/// group ratio 2.3:1, overall mass 0.935 in levels {2,3}, level-2 mass 0.495,
/// inter-group label-distribution correlation 0.809, modes 2 and 3. The
/// per-group distributions are derived to satisfy those aggregate targets.
DatasetSpec daisee_skew_preset();

/// Draws a dataset from the spec: per sample, group by group1_fraction, level
/// from the group's label distribution, then the three feature blocks. The
/// class and group mean directions are orthonormalized unit vectors seeded by
/// spec.seed, so the geometry is a function of the spec alone; seed_override
/// redraws only the samples.
GroupLabeledDataset generate_task_dataset(const DatasetSpec& spec,
                                          std::optional<std::uint64_t> seed_override = {});

/// External attribute-only dataset: balanced groups, the same feature
/// geometry as the task spec, an extra Gaussian perturbation of
/// domain_shift_sd on every feature, and no task labels.
GroupLabeledDataset generate_external_dataset(const DatasetSpec& spec, std::size_t n_ext,
                                              double domain_shift_sd, std::uint64_t seed);

/// Exactly per_cell samples from each of the 8 (group x level) cells, drawn
/// without replacement with a seeded shuffle. Throws ValidationError naming
/// the deficient cell when one has fewer than per_cell samples.
GroupLabeledDataset uniform_subset(const GroupLabeledDataset& ds, std::size_t per_cell,
                                   std::uint64_t seed);

/// Seeded permutation split; the first (1 - val_fraction) goes to train.
std::pair<GroupLabeledDataset, GroupLabeledDataset> split_train_val(const GroupLabeledDataset& ds,
                                                                    double val_fraction,
                                                                    std::uint64_t seed);

/// Rows of ds selected by index, in order.
GroupLabeledDataset take_rows(const GroupLabeledDataset& ds, const std::vector<std::size_t>& idx);

/// Empirical per-group label distributions (4-vectors). Requires y.
std::pair<std::array<double, 4>, std::array<double, 4>> group_label_distributions(
    const GroupLabeledDataset& ds);

} // namespace aor
