#include "aor/train.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "aor/errors.hpp"
#include "aor/fairness.hpp"
#include "aor/ortho.hpp"
#include "aor/rng.hpp"

namespace aor {

namespace {

constexpr std::uint64_t kShuffleTag = 0x53485546;  // epoch permutation stream
constexpr std::uint64_t kValSplitTag = 0x56414C53; // stage-A internal split

const double kNan = std::numeric_limits<double>::quiet_NaN();

Matrix gather_rows(const Matrix& X, const std::vector<std::size_t>& order, std::size_t begin,
                   std::size_t end) {
    Matrix out(end - begin, X.cols);
    for (std::size_t r = begin; r < end; ++r)
        for (std::size_t c = 0; c < X.cols; ++c)
            out.at(r - begin, c) = X.at(order[r], c);
    return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels, const std::vector<std::size_t>& order,
                               std::size_t begin, std::size_t end) {
    std::vector<int> out;
    out.reserve(end - begin);
    for (std::size_t r = begin; r < end; ++r)
        out.push_back(labels[order[r]]);
    return out;
}

std::size_t count_matches(const std::vector<int>& pred, const std::vector<int>& truth) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == truth[i])
            ++correct;
    return correct;
}

// v <- momentum * v + grad; theta <- theta - lr * v, trainable entries only.
struct SgdState {
    std::vector<Parameter*> params;
    std::vector<std::vector<double>> velocity;

    explicit SgdState(SplitModel& model) {
        for (Parameter* p : model.parameters())
            if (p->trainable) {
                params.push_back(p);
                velocity.emplace_back(p->value.data.size(), 0.0);
            }
    }

    void step(double lr, double momentum) {
        for (std::size_t k = 0; k < params.size(); ++k) {
            Parameter& p = *params[k];
            auto& v = velocity[k];
            for (std::size_t i = 0; i < v.size(); ++i) {
                v[i] = momentum * v[i] + p.grad.data[i];
                p.value.data[i] -= lr * v[i];
            }
        }
    }
};

void check_feature_dim(const SplitModel& model, const GroupLabeledDataset& ds,
                       const std::string& what) {
    if (ds.X.cols != model.config.input_dim)
        throw DimensionError(what + " has " + std::to_string(ds.X.cols) +
                             " features, model expects " + std::to_string(model.config.input_dim));
}

// l_ortho of the two head first layers; adds lambda-weighted gradients to
// whichever of them is trainable. Shared by total_loss and the stage-B loop.
double apply_ortho_penalty(SplitModel& model, double lambda) {
    Parameter& w1 = head_first_layer_param(model, Head::Task);
    Parameter& w2 = head_first_layer_param(model, Head::Attr);
    const AorValue penalty = l_ortho(w1.value, w2.value);
    if (lambda != 0.0) {
        const auto [g1, g2] = l_ortho_grad(w1.value, w2.value);
        if (w1.trainable)
            add_scaled_inplace(w1.grad, g1, lambda);
        if (w2.trainable)
            add_scaled_inplace(w2.grad, g2, lambda);
    }
    return penalty.l_ortho;
}

} // namespace

void validate(const TrainingConfig& cfg) {
    if (cfg.lambda < 0.0)
        throw ConfigError("lambda must be non-negative");
    if (!(cfg.learning_rate > 0.0))
        throw ConfigError("learning_rate must be positive");
    if (cfg.batch_size < 1)
        throw ConfigError("batch_size must be at least 1");
    if (cfg.epochs < 1)
        throw ConfigError("epochs must be at least 1");
    if (!(cfg.momentum >= 0.0 && cfg.momentum < 1.0))
        throw ConfigError("momentum must lie in [0, 1)");
}

LossBreakdown total_loss(SplitModel& model, const Matrix& X, const Matrix& y_onehot,
                         double lambda) {
    if (lambda < 0.0)
        throw ConfigError("lambda must be non-negative");
    if (X.rows == 0)
        throw ContractError("empty batch");

    const auto trunk_acts = forward(model.trunk, X);
    const auto head_acts = forward(model.head_task, trunk_acts.back());
    const auto [ce, logit_grad] = softmax_cross_entropy(head_acts.back(), y_onehot);

    const bool trunk_grads = section_trainable(model, Section::Trunk);
    const Matrix trunk_out_grad =
        backward(model.head_task, head_acts, logit_grad, {true, trunk_grads});
    if (trunk_grads)
        backward(model.trunk, trunk_acts, trunk_out_grad, {true, false});

    const double penalty = apply_ortho_penalty(model, lambda);
    return {ce + lambda * penalty, ce, penalty};
}

TrainingHistory train_stage_a(SplitModel& model, const GroupLabeledDataset& external_ds,
                              const TrainingConfig& cfg) {
    validate(cfg);
    if (external_ds.g.size() != external_ds.X.rows || external_ds.size() == 0)
        throw ContractError("stage A requires a nonempty dataset with group labels");
    validate(external_ds);
    check_feature_dim(model, external_ds, "stage-A dataset");

    set_trainable(model, Section::Trunk, true);
    set_trainable(model, Section::HeadAttr, true);
    set_trainable(model, Section::HeadTask, false);

    const auto [train_ds, val_ds] =
        split_train_val(external_ds, 0.2, derive_seed(cfg.seed, kValSplitTag));
    const std::size_t n = train_ds.size();

    SgdState sgd(model);
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleTag));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainingHistory history;
    history.reserve(cfg.epochs);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle)
            shuffle_rng.shuffle(order);
        double ce_sum = 0.0;
        std::size_t batches = 0;
        std::size_t correct = 0;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, n);
            const Matrix xb = gather_rows(train_ds.X, order, begin, end);
            const auto gb = gather_labels(train_ds.g, order, begin, end);
            const Matrix targets = one_hot(gb, 2);

            model.zero_grads();
            const auto trunk_acts = forward(model.trunk, xb);
            const auto head_acts = forward(model.head_attr, trunk_acts.back());
            const auto [ce, logit_grad] = softmax_cross_entropy(head_acts.back(), targets);
            correct += count_matches(argmax_rows(head_acts.back()), gb);
            const Matrix trunk_out_grad =
                backward(model.head_attr, head_acts, logit_grad, {true, true});
            backward(model.trunk, trunk_acts, trunk_out_grad, {true, false});
            sgd.step(cfg.learning_rate, cfg.momentum);
            ce_sum += ce;
            ++batches;
        }
        const double ce_mean = ce_sum / static_cast<double>(batches);
        const double val_acc =
            static_cast<double>(count_matches(predict_attr(model, val_ds.X), val_ds.g)) /
            static_cast<double>(val_ds.size());
        history.push_back({epoch, ce_mean, ce_mean, 0.0,
                           static_cast<double>(correct) / static_cast<double>(n), val_acc, kNan});
    }
    model.stage_tag = "stage-a";
    return history;
}

TrainingHistory train_stage_b(SplitModel& model, const GroupLabeledDataset& train_ds,
                              const GroupLabeledDataset& val_ds, const TrainingConfig& cfg) {
    validate(cfg);
    if (!train_ds.has_task_labels() || !val_ds.has_task_labels())
        throw ContractError("stage B requires task labels on both splits");
    validate(train_ds);
    validate(val_ds);
    check_feature_dim(model, train_ds, "stage-B train split");
    check_feature_dim(model, val_ds, "stage-B validation split");
    if (model.stage_tag != "stage-a")
        throw ContractError("stage B requires a stage-a model, tag is '" + model.stage_tag + "'");
    if (!cfg.allow_unfrozen &&
        (section_trainable(model, Section::Trunk) || section_trainable(model, Section::HeadAttr)))
        throw ContractError(
            "trunk or attribute head is trainable; call freeze_for_stage_b or set allow_unfrozen");
    if (!section_trainable(model, Section::HeadTask))
        throw ContractError("task head has no trainable parameters");

    const std::size_t n = train_ds.size();
    SgdState sgd(model);
    Rng shuffle_rng(derive_seed(cfg.seed, kShuffleTag));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    // A frozen trunk maps each input to a fixed feature vector, so those
    // features are computed once and the epoch loop touches only the head.
    const bool trunk_frozen = !section_trainable(model, Section::Trunk);
    Matrix train_feat;
    Matrix val_feat;
    if (trunk_frozen) {
        train_feat = forward_output(model.trunk, train_ds.X);
        val_feat = forward_output(model.trunk, val_ds.X);
    }

    TrainingHistory history;
    history.reserve(cfg.epochs);
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle)
            shuffle_rng.shuffle(order);
        double ce_sum = 0.0;
        double ortho_sum = 0.0;
        std::size_t batches = 0;
        std::size_t correct = 0;
        for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
            const std::size_t end = std::min(begin + cfg.batch_size, n);
            const auto yb = gather_labels(train_ds.y, order, begin, end);
            const Matrix targets = one_hot(yb, model.config.task_classes());

            model.zero_grads();
            double ce;
            if (trunk_frozen) {
                const Matrix fb = gather_rows(train_feat, order, begin, end);
                const auto head_acts = forward(model.head_task, fb);
                auto [ce_val, logit_grad] = softmax_cross_entropy(head_acts.back(), targets);
                ce = ce_val;
                correct += count_matches(argmax_rows(head_acts.back()), yb);
                backward(model.head_task, head_acts, logit_grad, {true, false});
                ortho_sum += apply_ortho_penalty(model, cfg.lambda);
            } else {
                const Matrix xb = gather_rows(train_ds.X, order, begin, end);
                const LossBreakdown loss = total_loss(model, xb, targets, cfg.lambda);
                ce = loss.ce;
                ortho_sum += loss.l_ortho;
                correct += count_matches(predict(model, xb).levels, yb);
            }
            sgd.step(cfg.learning_rate, cfg.momentum);
            ce_sum += ce;
            ++batches;
        }
        const double ce_mean = ce_sum / static_cast<double>(batches);
        const double ortho_mean = ortho_sum / static_cast<double>(batches);

        const Matrix val_logits = trunk_frozen
                                      ? forward_output(model.head_task, val_feat)
                                      : forward_output(model.head_task,
                                                       forward_output(model.trunk, val_ds.X));
        const std::vector<int> val_levels = argmax_rows(val_logits);
        const double val_acc = static_cast<double>(count_matches(val_levels, val_ds.y)) /
                               static_cast<double>(val_ds.size());
        double val_pcc = kNan;
        try {
            val_pcc = group_distribution_pcc(val_levels, val_ds.g);
        } catch (const DegenerateError&) {
            // uniform prediction histogram in some epoch; leave NaN
        }
        history.push_back({epoch, ce_mean + cfg.lambda * ortho_mean, ce_mean, ortho_mean,
                           static_cast<double>(correct) / static_cast<double>(n), val_acc,
                           val_pcc});
    }
    model.stage_tag = "stage-b";
    return history;
}

void freeze_for_stage_b(SplitModel& model) {
    set_trainable(model, Section::Trunk, false);
    set_trainable(model, Section::HeadAttr, false);
    set_trainable(model, Section::HeadTask, true);
}

std::vector<int> argmax_rows(const Matrix& m) {
    std::vector<int> out(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < m.cols; ++c)
            if (m.at(r, c) > m.at(r, best))
                best = c;
        out[r] = static_cast<int>(best);
    }
    return out;
}

Prediction predict(const SplitModel& model, const Matrix& X) {
    const Matrix features = forward_output(model.trunk, X);
    const Matrix logits = forward_output(model.head_task, features);
    Prediction pred;
    pred.probabilities = softmax_rows(logits);
    pred.levels = argmax_rows(pred.probabilities);
    return pred;
}

std::vector<int> predict_attr(const SplitModel& model, const Matrix& X) {
    const Matrix features = forward_output(model.trunk, X);
    return argmax_rows(forward_output(model.head_attr, features));
}

void write_history_csv(const TrainingHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    out << "epoch,total_loss,l_cls1,l_ortho,train_acc,val_acc,val_group_pcc\n";
    char buf[256];
    for (const EpochRecord& r : history) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.epoch,
                      r.total_loss, r.l_cls1, r.l_ortho, r.train_acc, r.val_acc, r.val_group_pcc);
        out << buf;
    }
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

} // namespace aor
