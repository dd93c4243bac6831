#include "aor/split_model.hpp"

#include <cmath>

#include "aor/errors.hpp"
#include "aor/rng.hpp"

namespace aor {

void validate(const SplitModelConfig& config) {
    if (config.input_dim == 0) {
        throw ConfigError("model config: input_dim must be positive");
    }
    if (config.trunk_widths.empty()) {
        throw ConfigError("model config: trunk_widths must be non-empty");
    }
    for (std::size_t w : config.trunk_widths) {
        if (w == 0) throw ConfigError("model config: zero trunk width");
    }
    if (config.head_task_widths.empty() || config.head_attr_widths.empty()) {
        throw ConfigError("model config: head width sequences must be non-empty");
    }
    for (std::size_t w : config.head_task_widths) {
        if (w == 0) throw ConfigError("model config: zero task head width");
    }
    for (std::size_t w : config.head_attr_widths) {
        if (w == 0) throw ConfigError("model config: zero attribute head width");
    }
    if (config.task_classes() < 2) {
        throw ConfigError("model config: task head must end in at least 2 classes");
    }
    if (config.attr_classes() != 2) {
        throw ConfigError("model config: attribute head must end in exactly 2 classes");
    }
}

std::vector<Parameter*> SplitModel::parameters() {
    std::vector<Parameter*> out = aor::parameters(trunk);
    for (auto* p : aor::parameters(head_task)) out.push_back(p);
    for (auto* p : aor::parameters(head_attr)) out.push_back(p);
    return out;
}

std::vector<const Parameter*> SplitModel::parameters() const {
    std::vector<const Parameter*> out = aor::parameters(trunk);
    for (const auto* p : aor::parameters(head_task)) out.push_back(p);
    for (const auto* p : aor::parameters(head_attr)) out.push_back(p);
    return out;
}

void SplitModel::zero_grads() {
    for (auto* p : parameters()) p->zero_grad();
}

namespace {

// Dense + relu for every width except the last, which stays at logits.
LayerStack make_head(std::size_t in_dim, const std::vector<std::size_t>& widths,
                     const std::string& prefix) {
    LayerStack stack;
    std::size_t prev = in_dim;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        stack.push_back(make_dense(prev, widths[i], prefix + "." + std::to_string(i)));
        if (i + 1 < widths.size()) {
            stack.push_back(make_relu(widths[i]));
        }
        prev = widths[i];
    }
    return stack;
}

// The trunk is a linear dense stack: nonlinearities live in the heads. Keeping
// the shared feature layer linear keeps group information low-rank at the
// bifurcation point, which is what lets a first-layer decorrelation penalty
// actually remove it; relu heads still give the full model nonlinear capacity.
LayerStack make_trunk(std::size_t in_dim, const std::vector<std::size_t>& widths) {
    LayerStack stack;
    std::size_t prev = in_dim;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        stack.push_back(make_dense(prev, widths[i], "trunk." + std::to_string(i)));
        prev = widths[i];
    }
    return stack;
}

void init_weights(SplitModel& model) {
    Rng rng(derive_seed(model.config.seed, /*tag=*/0xA0));
    for (Parameter* p : model.parameters()) {
        if (p->name.size() >= 7 && p->name.compare(p->name.size() - 7, 7, ".weight") == 0) {
            const double bound = std::sqrt(6.0 / static_cast<double>(p->value.rows));
            for (auto& v : p->value.data) v = rng.uniform(-bound, bound);
        }
        // biases stay zero
    }
}

} // namespace

SplitModel build_split_model(const SplitModelConfig& config) {
    validate(config);
    SplitModel model;
    model.config = config;
    model.trunk = make_trunk(config.input_dim, config.trunk_widths);
    model.head_task = make_head(config.feature_dim(), config.head_task_widths, "head_task");
    model.head_attr = make_head(config.feature_dim(), config.head_attr_widths, "head_attr");
    init_weights(model);
    return model;
}

namespace {

LayerStack& section_stack(SplitModel& model, Section section) {
    switch (section) {
        case Section::Trunk: return model.trunk;
        case Section::HeadTask: return model.head_task;
        case Section::HeadAttr: return model.head_attr;
    }
    return model.trunk;
}

} // namespace

void set_trainable(SplitModel& model, Section section, bool flag) {
    for (Parameter* p : parameters(section_stack(model, section))) {
        p->trainable = flag;
    }
}

bool section_trainable(const SplitModel& model, Section section) {
    SplitModel& m = const_cast<SplitModel&>(model);
    for (Parameter* p : parameters(section_stack(m, section))) {
        if (p->trainable) return true;
    }
    return false;
}

Matrix& head_first_layer_weights(SplitModel& model, Head head) {
    LayerStack& stack = head == Head::Task ? model.head_task : model.head_attr;
    return stack.front().weight.value;
}

const Matrix& head_first_layer_weights(const SplitModel& model, Head head) {
    const LayerStack& stack = head == Head::Task ? model.head_task : model.head_attr;
    return stack.front().weight.value;
}

Parameter& head_first_layer_param(SplitModel& model, Head head) {
    LayerStack& stack = head == Head::Task ? model.head_task : model.head_attr;
    return stack.front().weight;
}

} // namespace aor
