#ifndef SMARTPAM_MODEL_HPP
#define SMARTPAM_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smartpam/tensor.hpp"

namespace smartpam {

enum class Activation : std::uint8_t { ReLU, None };

/// One 1-D convolution layer. Valid padding only: outputs are computed where
/// the kernel fits entirely inside the input, so each layer shortens the
/// signal by (kernel-1)*dilation and then decimates by stride. All length
/// and receptive-field arithmetic in the tiler relies on this.
struct ConvLayerSpec {
    std::size_t in_channels = 1;
    std::size_t out_channels = 1;
    std::size_t kernel = 1;
    std::size_t stride = 1;
    std::size_t dilation = 1;
    std::vector<float> weights; // [out][in][tap], flattened
    std::vector<float> bias;    // [out]
    Activation activation = Activation::ReLU;

    std::size_t effective_extent() const { return (kernel - 1) * dilation + 1; }

    float weight(std::size_t c_out, std::size_t c_in, std::size_t tap) const {
        return weights[(c_out * in_channels + c_in) * kernel + tap];
    }
    float& weight(std::size_t c_out, std::size_t c_in, std::size_t tap) {
        return weights[(c_out * in_channels + c_in) * kernel + tap];
    }

    std::size_t weight_count() const { return out_channels * in_channels * kernel; }
    std::size_t param_count() const { return weight_count() + out_channels; }

    void validate() const;
};

struct DenseSpec {
    std::size_t in_features = 0;
    std::size_t out_features = 0;
    std::vector<float> weights; // [out][in], flattened
    std::vector<float> bias;    // [out]

    std::size_t param_count() const { return out_features * in_features + out_features; }

    void validate() const;
};

/// Full architecture: conv stack, dense head, labels, window geometry.
struct ModelSpec {
    std::vector<ConvLayerSpec> conv_layers;
    DenseSpec dense;
    std::vector<std::string> class_labels = {"male", "female", "chick", "noise"};
    std::size_t window_samples = 0;
    std::size_t sample_rate_hz = 24000;

    /// Checks channel chaining, dense wiring against the flattened final
    /// conv output, and that the window survives the whole stack.
    void validate() const;

    /// Conv output lengths per layer for this model's window.
    std::vector<std::size_t> layer_output_lengths() const;

    /// Length of the last conv layer's output for this model's window.
    std::size_t final_conv_length() const;

    bool operator==(const ModelSpec&) const;
};

bool operator==(const ConvLayerSpec& a, const ConvLayerSpec& b);
bool operator==(const DenseSpec& a, const DenseSpec& b);

struct ParamCount {
    std::size_t conv_params = 0;
    std::size_t dense_params = 0;
    std::size_t total = 0;
};

/// Valid-padding output length: floor((in - ((kernel-1)*dilation + 1)) / stride) + 1.
/// Throws ShortInputError when the input cannot fit even one kernel placement.
std::size_t output_length(std::size_t in_length, const ConvLayerSpec& layer);

/// Runs one conv layer. Accumulation order is fixed (input channel outer,
/// tap inner, float32 accumulator) so results are bit-reproducible and the
/// tiled executor can claim exact equivalence.
PlanarTensor conv1d_forward(const PlanarTensor& input, const ConvLayerSpec& layer);

/// Dense head without activation; softmax is applied separately.
std::vector<float> dense_forward(std::span<const float> input, const DenseSpec& dense);

/// Max-subtracted softmax.
std::vector<float> softmax(std::span<const float> logits);

struct Classification {
    std::vector<float> probabilities;
    std::size_t argmax_index = 0;
    std::string argmax_label;
};

/// Whole-model forward pass on one standardized window (1 channel,
/// model.window_samples long). Argmax ties break toward the lowest index.
Classification model_forward(const PlanarTensor& window, const ModelSpec& model);

/// Dense head + softmax + argmax over an already-computed conv stack output.
Classification classify_features(const PlanarTensor& conv_output, const ModelSpec& model);

ParamCount param_count(const ModelSpec& model);

/// Flash footprint of the weights at 4 bytes per parameter.
std::size_t model_size_bytes(const ModelSpec& model);

} // namespace smartpam

#endif
