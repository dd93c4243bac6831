#include "aor/layers.hpp"

#include <algorithm>
#include <cmath>

#include "aor/errors.hpp"

namespace aor {

Layer make_dense(std::size_t in_dim, std::size_t out_dim, const std::string& name) {
    if (in_dim == 0 || out_dim == 0) {
        throw ConfigError("dense layer '" + name + "': zero dimension");
    }
    Layer layer;
    layer.kind = LayerKind::Dense;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.weight = Parameter(Matrix(in_dim, out_dim, 0.0), name + ".weight");
    layer.bias = Parameter(Matrix(1, out_dim, 0.0), name + ".bias");
    return layer;
}

Layer make_relu(std::size_t dim) {
    Layer layer;
    layer.kind = LayerKind::Relu;
    layer.in_dim = dim;
    layer.out_dim = dim;
    return layer;
}

Layer make_softmax_output(std::size_t dim) {
    Layer layer;
    layer.kind = LayerKind::SoftmaxOutput;
    layer.in_dim = dim;
    layer.out_dim = dim;
    return layer;
}

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Relu: return "relu";
        case LayerKind::SoftmaxOutput: return "softmax-output";
    }
    return "?";
}

std::vector<Parameter*> parameters(LayerStack& layers) {
    std::vector<Parameter*> out;
    for (auto& layer : layers) {
        if (layer.kind == LayerKind::Dense) {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
    }
    return out;
}

std::vector<const Parameter*> parameters(const LayerStack& layers) {
    std::vector<const Parameter*> out;
    for (const auto& layer : layers) {
        if (layer.kind == LayerKind::Dense) {
            out.push_back(&layer.weight);
            out.push_back(&layer.bias);
        }
    }
    return out;
}

void zero_grads(LayerStack& layers) {
    for (auto* p : parameters(layers)) p->zero_grad();
}

std::vector<Matrix> forward(const LayerStack& layers, const Matrix& input) {
    if (input.rows == 0) {
        throw DimensionError("forward: empty batch");
    }
    if (!layers.empty() && input.cols != layers.front().in_dim) {
        throw DimensionError("forward: input has " + std::to_string(input.cols) +
                             " columns, layer 0 (" + layer_kind_name(layers.front().kind) +
                             ") expects " + std::to_string(layers.front().in_dim));
    }
    std::vector<Matrix> acts;
    acts.reserve(layers.size() + 1);
    acts.push_back(input);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& layer = layers[i];
        const Matrix& x = acts.back();
        if (x.cols != layer.in_dim) {
            throw DimensionError("forward: layer " + std::to_string(i) + " (" +
                                 layer_kind_name(layer.kind) + ") expects " +
                                 std::to_string(layer.in_dim) + " inputs, got " +
                                 std::to_string(x.cols));
        }
        switch (layer.kind) {
            case LayerKind::Dense:
                acts.push_back(add_row_broadcast(matmul(x, layer.weight.value), layer.bias.value));
                break;
            case LayerKind::Relu: {
                Matrix y = x;
                for (auto& v : y.data) v = v > 0.0 ? v : 0.0;
                acts.push_back(std::move(y));
                break;
            }
            case LayerKind::SoftmaxOutput:
                acts.push_back(softmax_rows(x));
                break;
        }
    }
    return acts;
}

Matrix forward_output(const LayerStack& layers, const Matrix& input) {
    return forward(layers, input).back();
}

namespace {

void check_activations(const LayerStack& layers, const std::vector<Matrix>& acts,
                       const Matrix& upstream) {
    if (acts.size() != layers.size() + 1) {
        throw ContractError("backward: got " + std::to_string(acts.size()) +
                            " activations for " + std::to_string(layers.size()) + " layers");
    }
    const std::size_t batch = acts.front().rows;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (acts[i].cols != layers[i].in_dim || acts[i + 1].cols != layers[i].out_dim ||
            acts[i].rows != batch || acts[i + 1].rows != batch) {
            throw ContractError("backward: activation shape at layer " + std::to_string(i) +
                                " does not match the stack (stale activations?)");
        }
    }
    if (!upstream.same_shape(acts.back())) {
        throw ContractError("backward: upstream gradient is " + shape_str(upstream) +
                            ", final activation is " + shape_str(acts.back()));
    }
}

// Index of the lowest dense layer with a trainable parameter, or layers.size().
std::size_t lowest_trainable(const LayerStack& layers) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].kind == LayerKind::Dense &&
            (layers[i].weight.trainable || layers[i].bias.trainable)) {
            return i;
        }
    }
    return layers.size();
}

} // namespace

Matrix backward(LayerStack& layers, const std::vector<Matrix>& activations,
                const Matrix& upstream_grad, const BackwardOptions& options) {
    check_activations(layers, activations, upstream_grad);

    // Nothing below this index needs a gradient; stop the pass there unless
    // the caller asked for the input gradient.
    const std::size_t cut =
        options.need_input_grad || !options.accumulate_param_grads ? 0 : lowest_trainable(layers);
    if (cut == layers.size() && !options.need_input_grad) {
        return Matrix();
    }

    Matrix g = upstream_grad;
    for (std::size_t idx = layers.size(); idx-- > cut;) {
        Layer& layer = layers[idx];
        const Matrix& x = activations[idx];
        switch (layer.kind) {
            case LayerKind::Dense: {
                if (options.accumulate_param_grads) {
                    if (layer.weight.trainable) {
                        add_inplace(layer.weight.grad, matmul_at_b(x, g));
                    }
                    if (layer.bias.trainable) {
                        add_inplace(layer.bias.grad, col_sums(g));
                    }
                }
                if (idx == cut && !options.need_input_grad) {
                    return Matrix();
                }
                g = matmul_a_bt(g, layer.weight.value);
                break;
            }
            case LayerKind::Relu: {
                Matrix masked = g;
                for (std::size_t i = 0; i < masked.data.size(); ++i) {
                    if (x.data[i] <= 0.0) masked.data[i] = 0.0;
                }
                g = std::move(masked);
                break;
            }
            case LayerKind::SoftmaxOutput: {
                // dL/dz_j = p_j * (g_j - sum_k g_k p_k), rows independent.
                const Matrix& p = activations[idx + 1];
                Matrix out(g.rows, g.cols);
                for (std::size_t r = 0; r < g.rows; ++r) {
                    double gp = 0.0;
                    for (std::size_t j = 0; j < g.cols; ++j) gp += g.at(r, j) * p.at(r, j);
                    for (std::size_t j = 0; j < g.cols; ++j) {
                        out.at(r, j) = p.at(r, j) * (g.at(r, j) - gp);
                    }
                }
                g = std::move(out);
                break;
            }
        }
    }
    return g;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix p(logits.rows, logits.cols);
    for (std::size_t r = 0; r < logits.rows; ++r) {
        double row_max = logits.at(r, 0);
        for (std::size_t j = 1; j < logits.cols; ++j) {
            row_max = std::max(row_max, logits.at(r, j));
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols; ++j) {
            const double e = std::exp(logits.at(r, j) - row_max);
            p.at(r, j) = e;
            sum += e;
        }
        for (std::size_t j = 0; j < logits.cols; ++j) {
            p.at(r, j) /= sum;
        }
    }
    return p;
}

std::pair<double, Matrix> softmax_cross_entropy(const Matrix& logits, const Matrix& targets) {
    if (!logits.same_shape(targets)) {
        throw DimensionError("softmax_cross_entropy: logits " + shape_str(logits) +
                             " vs targets " + shape_str(targets));
    }
    if (logits.cols < 2) {
        throw ValidationError("softmax_cross_entropy: need at least 2 classes");
    }
    for (std::size_t r = 0; r < targets.rows; ++r) {
        std::size_t ones = 0;
        for (std::size_t j = 0; j < targets.cols; ++j) {
            const double v = targets.at(r, j);
            if (v == 1.0) {
                ++ones;
            } else if (v != 0.0) {
                throw ValidationError("softmax_cross_entropy: target row " + std::to_string(r) +
                                      " is not one-hot");
            }
        }
        if (ones != 1) {
            throw ValidationError("softmax_cross_entropy: target row " + std::to_string(r) +
                                  " is not one-hot");
        }
    }

    const double batch = static_cast<double>(logits.rows);
    Matrix p = softmax_rows(logits);
    double loss = 0.0;
    for (std::size_t r = 0; r < p.rows; ++r) {
        for (std::size_t j = 0; j < p.cols; ++j) {
            if (targets.at(r, j) == 1.0) {
                loss -= std::log(std::max(p.at(r, j), 1e-12));
            }
        }
    }
    loss /= batch;

    Matrix grad(p.rows, p.cols);
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        grad.data[i] = (p.data[i] - targets.data[i]) / batch;
    }
    return {loss, std::move(grad)};
}

Matrix one_hot(const std::vector<int>& labels, std::size_t num_classes) {
    Matrix m(labels.size(), num_classes, 0.0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int v = labels[i];
        if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
            throw ValidationError("one_hot: label " + std::to_string(v) + " at index " +
                                  std::to_string(i) + " outside [0, " +
                                  std::to_string(num_classes) + ")");
        }
        m.at(i, static_cast<std::size_t>(v)) = 1.0;
    }
    return m;
}

} // namespace aor
