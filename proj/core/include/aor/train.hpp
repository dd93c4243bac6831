#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aor/dataset.hpp"
#include "aor/split_model.hpp"

namespace aor {

/// Mini-batch SGD settings shared by both stages. lambda weighs the
/// orthogonality penalty and is read only by stage B; allow_unfrozen permits
/// joint training of trunk/attribute head in stage B for experimentation.
struct TrainingConfig {
    double lambda = 0.0;
    double learning_rate = 0.05;
    std::size_t batch_size = 64;
    std::size_t epochs = 60;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    bool shuffle = true;
    bool allow_unfrozen = false;
};

/// Throws ConfigError on invalid settings.
void validate(const TrainingConfig& cfg);

/// One training epoch's summary. Losses are means over the epoch's batches,
/// so total_loss == l_cls1 + lambda * l_ortho holds by construction.
/// val_group_pcc is NaN when undefined (stage A, or a degenerate epoch).
struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double total_loss = 0.0;
    double l_cls1 = 0.0;
    double l_ortho = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
    double val_group_pcc = 0.0;
};

using TrainingHistory = std::vector<EpochRecord>;

/// Loss components of one objective evaluation; total = ce + lambda * ortho.
struct LossBreakdown {
    double total = 0.0;
    double ce = 0.0;
    double l_ortho = 0.0;
};

/// The stage-B objective on one batch: task-head cross-entropy plus
/// lambda times the head-orthogonality penalty. Accumulates gradients into
/// every trainable parameter on the task path, including the penalty's
/// contribution to the task head's first-layer weights (and to the attribute
/// head's only when that head is trainable). Caller zeroes grads beforehand.
LossBreakdown total_loss(SplitModel& model, const Matrix& X, const Matrix& y_onehot,
                         double lambda);

/// Stage A: trains trunk + attribute head with cross-entropy on group labels,
/// leaving the task head untouched. Uses a seeded internal 80/20 split of
/// external_ds for the validation column; val_group_pcc is NaN throughout
/// (no task predictions exist yet). Tags the model "stage-a".
TrainingHistory train_stage_a(SplitModel& model, const GroupLabeledDataset& external_ds,
                              const TrainingConfig& cfg);

/// Stage B: trains the task head under total_loss. Requires the "stage-a"
/// tag and a frozen trunk and attribute head (ContractError otherwise,
/// unless cfg.allow_unfrozen). Tags the model "stage-b".
TrainingHistory train_stage_b(SplitModel& model, const GroupLabeledDataset& train_ds,
                              const GroupLabeledDataset& val_ds, const TrainingConfig& cfg);

/// Freezes trunk + attribute head and marks the task head trainable.
void freeze_for_stage_b(SplitModel& model);

/// Task-head inference: softmax probabilities and argmax levels, ties broken
/// toward the lowest index.
struct Prediction {
    std::vector<int> levels;
    Matrix probabilities;
};

Prediction predict(const SplitModel& model, const Matrix& X);

/// Attribute-head inference, same argmax convention.
std::vector<int> predict_attr(const SplitModel& model, const Matrix& X);

/// Row-wise argmax with lowest-index tie-break.
std::vector<int> argmax_rows(const Matrix& m);

/// Writes `epoch,total_loss,l_cls1,l_ortho,train_acc,val_acc,val_group_pcc`
/// rows, doubles at 17 significant digits. Throws IoError on failure.
void write_history_csv(const TrainingHistory& history, const std::string& path);

} // namespace aor
