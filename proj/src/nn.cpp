#include "smartpam/model.hpp"

#include <algorithm>
#include <cmath>

namespace smartpam {

void ConvLayerSpec::validate() const {
    if (in_channels == 0 || out_channels == 0 || kernel == 0 || stride == 0 || dilation == 0) {
        throw ShapeError("conv layer fields must be positive");
    }
    if (weights.size() != weight_count()) {
        throw ShapeError("conv weight array size does not match declared shape");
    }
    if (bias.size() != out_channels) {
        throw ShapeError("conv bias array size does not match out_channels");
    }
}

void DenseSpec::validate() const {
    if (in_features == 0 || out_features == 0) {
        throw ShapeError("dense layer dimensions must be positive");
    }
    if (weights.size() != out_features * in_features) {
        throw ShapeError("dense weight array size does not match declared shape");
    }
    if (bias.size() != out_features) {
        throw ShapeError("dense bias array size does not match out_features");
    }
}

void ModelSpec::validate() const {
    if (conv_layers.empty()) {
        throw ShapeError("model needs at least one conv layer");
    }
    if (window_samples == 0 || sample_rate_hz == 0) {
        throw ShapeError("window_samples and sample_rate_hz must be positive");
    }
    if (conv_layers.front().in_channels != 1) {
        throw ShapeError("first conv layer must take a single channel");
    }
    for (std::size_t i = 0; i < conv_layers.size(); ++i) {
        conv_layers[i].validate();
        if (i + 1 < conv_layers.size() &&
            conv_layers[i].out_channels != conv_layers[i + 1].in_channels) {
            throw ShapeError("channel mismatch between conv layers " + std::to_string(i) +
                             " and " + std::to_string(i + 1));
        }
    }
    dense.validate();

    // Every layer must keep at least one output column under valid padding.
    const std::vector<std::size_t> lengths = layer_output_lengths();
    const std::size_t flat = lengths.back() * conv_layers.back().out_channels;
    if (dense.in_features != flat) {
        throw ShapeError("dense in_features " + std::to_string(dense.in_features) +
                         " does not match flattened conv output " + std::to_string(flat));
    }
    if (class_labels.size() != dense.out_features) {
        throw ShapeError("class label count does not match dense out_features");
    }
}

std::vector<std::size_t> ModelSpec::layer_output_lengths() const {
    std::vector<std::size_t> lengths;
    lengths.reserve(conv_layers.size());
    std::size_t len = window_samples;
    for (const ConvLayerSpec& layer : conv_layers) {
        len = output_length(len, layer);
        lengths.push_back(len);
    }
    return lengths;
}

std::size_t ModelSpec::final_conv_length() const {
    return layer_output_lengths().back();
}

bool operator==(const ConvLayerSpec& a, const ConvLayerSpec& b) {
    return a.in_channels == b.in_channels && a.out_channels == b.out_channels &&
           a.kernel == b.kernel && a.stride == b.stride && a.dilation == b.dilation &&
           a.weights == b.weights && a.bias == b.bias && a.activation == b.activation;
}

bool operator==(const DenseSpec& a, const DenseSpec& b) {
    return a.in_features == b.in_features && a.out_features == b.out_features &&
           a.weights == b.weights && a.bias == b.bias;
}

bool ModelSpec::operator==(const ModelSpec& other) const {
    return conv_layers == other.conv_layers && dense == other.dense &&
           class_labels == other.class_labels && window_samples == other.window_samples &&
           sample_rate_hz == other.sample_rate_hz;
}

std::size_t output_length(std::size_t in_length, const ConvLayerSpec& layer) {
    const std::size_t extent = layer.effective_extent();
    if (in_length < extent) {
        throw ShortInputError("window too short for layer: length " +
                              std::to_string(in_length) + " < effective kernel extent " +
                              std::to_string(extent));
    }
    return (in_length - extent) / layer.stride + 1;
}

PlanarTensor conv1d_forward(const PlanarTensor& input, const ConvLayerSpec& layer) {
    if (input.channels() != layer.in_channels) {
        throw ShapeError("channel mismatch: input has " + std::to_string(input.channels()) +
                         " channels, layer expects " + std::to_string(layer.in_channels));
    }
    const std::size_t out_len = output_length(input.length(), layer);
    PlanarTensor out(layer.out_channels, out_len);

    for (std::size_t c = 0; c < layer.out_channels; ++c) {
        for (std::size_t i = 0; i < out_len; ++i) {
            // Fixed accumulation order (c_in outer, tap inner, float32 acc):
            // both the monolithic and the tiled path hit the exact same
            // sequence of operations, so their outputs match bit for bit.
            float acc = layer.bias[c];
            const std::size_t base = i * layer.stride;
            for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
                std::span<const float> in = input.channel(ci);
                for (std::size_t t = 0; t < layer.kernel; ++t) {
                    acc += layer.weight(c, ci, t) * in[base + t * layer.dilation];
                }
            }
            if (layer.activation == Activation::ReLU && acc < 0.0f) acc = 0.0f;
            out.at(c, i) = acc;
        }
    }
    return out;
}

std::vector<float> dense_forward(std::span<const float> input, const DenseSpec& dense) {
    if (input.size() != dense.in_features) {
        throw ShapeError("feature-count mismatch: got " + std::to_string(input.size()) +
                         " features, dense expects " + std::to_string(dense.in_features));
    }
    std::vector<float> out(dense.out_features);
    for (std::size_t j = 0; j < dense.out_features; ++j) {
        float acc = dense.bias[j];
        const float* row = dense.weights.data() + j * dense.in_features;
        for (std::size_t i = 0; i < dense.in_features; ++i) {
            acc += row[i] * input[i];
        }
        out[j] = acc;
    }
    return out;
}

std::vector<float> softmax(std::span<const float> logits) {
    if (logits.empty()) {
        throw ShapeError("softmax on empty vector");
    }
    float max = logits[0];
    for (float v : logits) max = std::max(max, v);

    std::vector<float> out(logits.size());
    float sum = 0.0f;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - max);
        sum += out[i];
    }
    for (float& v : out) v /= sum;
    return out;
}

namespace {

std::size_t argmax_lowest(std::span<const float> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

} // namespace

Classification classify_features(const PlanarTensor& conv_output, const ModelSpec& model) {
    // Channel-major flatten order: the planar layout already is the flatten.
    std::vector<float> logits = dense_forward(conv_output.values(), model.dense);
    Classification result;
    result.probabilities = softmax(logits);
    result.argmax_index = argmax_lowest(result.probabilities);
    result.argmax_label = model.class_labels[result.argmax_index];
    return result;
}

Classification model_forward(const PlanarTensor& window, const ModelSpec& model) {
    if (window.channels() != 1) {
        throw ShapeError("channel mismatch: model input must have a single channel");
    }
    if (window.length() != model.window_samples) {
        throw ShapeError("window length " + std::to_string(window.length()) +
                         " does not match model window_samples " +
                         std::to_string(model.window_samples));
    }
    PlanarTensor x = window;
    for (const ConvLayerSpec& layer : model.conv_layers) {
        x = conv1d_forward(x, layer);
    }
    return classify_features(x, model);
}

ParamCount param_count(const ModelSpec& model) {
    ParamCount counts;
    for (const ConvLayerSpec& layer : model.conv_layers) {
        counts.conv_params += layer.param_count();
    }
    counts.dense_params = model.dense.param_count();
    counts.total = counts.conv_params + counts.dense_params;
    return counts;
}

std::size_t model_size_bytes(const ModelSpec& model) {
    return param_count(model).total * 4;
}

} // namespace smartpam
