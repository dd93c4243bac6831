#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "aor/matrix.hpp"

namespace aor {

/// A value matrix coupled with its gradient and a trainable flag.
///
/// Gradients accumulate across backward calls; callers zero them once per
/// optimization step. The gradient of a non-trainable Parameter is never
/// written to, so it stays identically zero across a training step.
struct Parameter {
    Matrix value;
    Matrix grad;
    bool trainable = true;
    std::string name;

    Parameter() = default;
    Parameter(Matrix value_, std::string name_)
        : value(std::move(value_)), grad(value.rows, value.cols, 0.0), name(std::move(name_)) {}

    void zero_grad() { grad.fill(0.0); }
};

enum class LayerKind { Dense, Relu, SoftmaxOutput };

/// One layer of the fixed vocabulary {dense, relu, softmax-output}.
/// Dense layers own a weight (in_dim x out_dim) and a bias (1 x out_dim);
/// the other kinds carry no parameters and require in_dim == out_dim.
struct Layer {
    LayerKind kind = LayerKind::Dense;
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Parameter weight;
    Parameter bias;
};

using LayerStack = std::vector<Layer>;

Layer make_dense(std::size_t in_dim, std::size_t out_dim, const std::string& name);
Layer make_relu(std::size_t dim);
Layer make_softmax_output(std::size_t dim);

const char* layer_kind_name(LayerKind kind);

/// Pointers to the parameters of a stack, in layer order (weight then bias).
std::vector<Parameter*> parameters(LayerStack& layers);
std::vector<const Parameter*> parameters(const LayerStack& layers);
void zero_grads(LayerStack& layers);

/// Runs the stack on a batch and returns every activation: result[0] is the
/// input, result[i+1] the output of layer i. Throws DimensionError naming the
/// offending layer on a shape mismatch.
std::vector<Matrix> forward(const LayerStack& layers, const Matrix& input);

/// Output of the stack only (convenience wrapper around forward).
Matrix forward_output(const LayerStack& layers, const Matrix& input);

struct BackwardOptions {
    bool accumulate_param_grads = true;
    bool need_input_grad = true;
};

/// Reverse-mode pass over activations produced by a matching forward call.
/// Accumulates d(objective)/d(param) into every trainable parameter's grad;
/// non-trainable parameter grads are left untouched. Returns the gradient
/// with respect to the stack input (empty when need_input_grad is false and
/// no trainable parameter lies below the cut). Throws ContractError when the
/// activations do not match the stack.
Matrix backward(LayerStack& layers, const std::vector<Matrix>& activations,
                const Matrix& upstream_grad, const BackwardOptions& options = {});

/// Row softmax with max-subtraction for stability. Rows sum to 1.
Matrix softmax_rows(const Matrix& logits);

/// Mean categorical cross-entropy over the batch with softmax fused in:
/// loss = mean_b of -sum_i y_i log(max(softmax(logits)_i, 1e-12)), and the
/// exact analytic gradient (softmax(logits) - y) / b with respect to logits.
/// Targets must be one-hot rows; throws ValidationError otherwise.
std::pair<double, Matrix> softmax_cross_entropy(const Matrix& logits, const Matrix& targets);

/// One-hot encode integer labels into an n x num_classes matrix.
Matrix one_hot(const std::vector<int>& labels, std::size_t num_classes);

} // namespace aor
