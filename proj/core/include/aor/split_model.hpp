#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aor/layers.hpp"

namespace aor {

/// Shapes and seed for a split model. Head width sequences include the
/// output layer: head_task_widths ends in the 4 task classes, head_attr_widths
/// ends in the 2 attribute classes. The first entry of each head consumes the
/// last trunk width (the shared feature dimension d).
///
/// Default heads are single dense readouts. With deeper heads the relu stack
/// is positively homogeneous, so training can rescale the first layer up and
/// later layers down, driving the normalized decorrelation penalty to zero
/// without changing the function it computes; a single readout layer ties the
/// first-layer norm to the logit scale and keeps the penalty binding.
struct SplitModelConfig {
    std::size_t input_dim = 24;
    std::vector<std::size_t> trunk_widths{32, 16};
    std::vector<std::size_t> head_task_widths{4};
    std::vector<std::size_t> head_attr_widths{2};
    std::uint64_t seed = 1;

    std::size_t feature_dim() const { return trunk_widths.empty() ? 0 : trunk_widths.back(); }
    std::size_t task_classes() const {
        return head_task_widths.empty() ? 0 : head_task_widths.back();
    }
    std::size_t attr_classes() const {
        return head_attr_widths.empty() ? 0 : head_attr_widths.back();
    }
};

/// Throws ConfigError when the config violates its invariants.
void validate(const SplitModelConfig& config);

enum class Section { Trunk, HeadTask, HeadAttr };
enum class Head { Task, Attr };

/// Shared trunk plus task head (cls1) and attribute head (cls2), both heads
/// reading the same trunk feature layer. Head stacks end at logits; softmax
/// is applied by the loss and by prediction.
struct SplitModel {
    SplitModelConfig config;
    LayerStack trunk;
    LayerStack head_task;
    LayerStack head_attr;
    std::string stage_tag = "init";

    /// All parameters in canonical order: trunk, head_task, head_attr.
    std::vector<Parameter*> parameters();
    std::vector<const Parameter*> parameters() const;
    void zero_grads();
};

/// Builds the model with seeded He-style uniform weight init
/// (bound sqrt(6 / fan_in)), zero biases, everything trainable.
SplitModel build_split_model(const SplitModelConfig& config);

/// Sets the trainable flag on every parameter under the selector.
void set_trainable(SplitModel& model, Section section, bool flag);

bool section_trainable(const SplitModel& model, Section section); // true if ANY param trainable

/// Live weight matrix of the head's first dense layer (theta_cls1a or
/// theta_cls2a), shape d x h_head. Mutations through training are visible.
Matrix& head_first_layer_weights(SplitModel& model, Head head);
const Matrix& head_first_layer_weights(const SplitModel& model, Head head);

/// The same weight as a Parameter, for gradient writes and trainable checks.
Parameter& head_first_layer_param(SplitModel& model, Head head);

} // namespace aor
