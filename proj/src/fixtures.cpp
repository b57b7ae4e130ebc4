#include "smartpam/fixtures.hpp"

#include <cmath>
#include <random>

namespace smartpam {

FixtureArch FixtureArch::small() {
    return FixtureArch{};
}

FixtureArch FixtureArch::large() {
    FixtureArch arch;
    arch.n_conv_layers = 12;
    arch.filters = 16;
    arch.kernel = 3;
    arch.dilation = 5;
    arch.stride = 3;
    arch.stride_period = 3;
    arch.window_samples = 9000;
    return arch;
}

namespace {

constexpr double kPi = 3.14159265358979323846;

bool layer_is_strided(const FixtureArch& arch, std::size_t layer_index) {
    if (arch.stride_period == 0) return false;
    const std::size_t pos = layer_index % arch.stride_period;
    return arch.stride_on_first_of_group ? pos == 0 : pos == arch.stride_period - 1;
}

// mt19937 with an explicit uint32 -> [-0.5, 0.5) mapping; unlike
// std::uniform_real_distribution this is identical on every platform, so
// equal seeds give bit-identical blobs.
class WeightRng {
public:
    explicit WeightRng(std::uint64_t seed) : engine_(static_cast<std::uint32_t>(seed)) {}

    float next() {
        const std::uint32_t bits = engine_();
        return static_cast<float>(bits >> 8) * (1.0f / 16777216.0f) - 0.5f;
    }

private:
    std::mt19937 engine_;
};

ModelSpec build_skeleton(const FixtureArch& arch) {
    ModelSpec model;
    model.window_samples = arch.window_samples;
    model.sample_rate_hz = arch.sample_rate_hz;
    model.class_labels = arch.class_labels;

    for (std::size_t k = 0; k < arch.n_conv_layers; ++k) {
        ConvLayerSpec layer;
        layer.in_channels = (k == 0) ? 1 : arch.filters;
        layer.out_channels = arch.filters;
        layer.kernel = arch.kernel;
        layer.stride = layer_is_strided(arch, k) ? arch.stride : 1;
        layer.dilation = arch.dilation;
        layer.activation = Activation::ReLU;
        layer.weights.assign(layer.weight_count(), 0.0f);
        layer.bias.assign(layer.out_channels, 0.0f);
        model.conv_layers.push_back(std::move(layer));
    }

    const std::size_t final_len = model.final_conv_length();
    model.dense.in_features = final_len * arch.filters;
    model.dense.out_features = arch.class_labels.size();
    model.dense.weights.assign(model.dense.out_features * model.dense.in_features, 0.0f);
    model.dense.bias.assign(model.dense.out_features, 0.0f);
    return model;
}

void fill_random(ModelSpec& model, std::uint64_t seed) {
    WeightRng rng(seed);
    for (ConvLayerSpec& layer : model.conv_layers) {
        for (float& w : layer.weights) w = rng.next();
        for (float& b : layer.bias) b = rng.next();
    }
    for (float& w : model.dense.weights) w = rng.next();
    for (float& b : model.dense.bias) b = rng.next();
}

// Frequency discriminator on standardized audio. Layer 1 splits the band:
// channel 0 is a dilated high-pass [0.5, -1, 0.5] (zero response to DC,
// maximal when adjacent taps are in antiphase), channel 1 a moving average
// [1/3, 1/3, 1/3]. ReLU rectifies both, every later layer passes each
// channel through its own moving average (DC gain 1), and the dense head
// compares the two channels' accumulated energy. Silence standardizes to
// all zeros, so only the noise bias survives there.
void fill_detector(ModelSpec& model) {
    ConvLayerSpec& first = model.conv_layers.front();
    for (std::size_t t = 0; t < first.kernel; ++t) {
        first.weight(0, 0, t) = (t == first.kernel / 2) ? -1.0f : 0.5f;
        first.weight(1, 0, t) = 1.0f / static_cast<float>(first.kernel);
    }

    for (std::size_t k = 1; k < model.conv_layers.size(); ++k) {
        ConvLayerSpec& layer = model.conv_layers[k];
        const float tap = 1.0f / static_cast<float>(layer.kernel);
        for (std::size_t c = 0; c < 2; ++c) {
            for (std::size_t t = 0; t < layer.kernel; ++t) {
                layer.weight(c, c, t) = tap;
            }
        }
    }

    // male = low-band minus high-band energy, female the reverse, noise a
    // small constant bias that wins only when the window is silent.
    const std::size_t final_len = model.final_conv_length();
    for (std::size_t i = 0; i < final_len; ++i) {
        model.dense.weights[0 * model.dense.in_features + 1 * final_len + i] = 1.0f;
        model.dense.weights[0 * model.dense.in_features + 0 * final_len + i] = -1.0f;
        model.dense.weights[1 * model.dense.in_features + 0 * final_len + i] = 1.0f;
        model.dense.weights[1 * model.dense.in_features + 1 * final_len + i] = -1.0f;
    }
    model.dense.bias[3] = 0.5f;
}

} // namespace

ModelSpec gen_fixture(const FixtureArch& arch, std::uint64_t seed, WeightMode mode) {
    ModelSpec model = build_skeleton(arch);
    switch (mode) {
        case WeightMode::Zero:
            break;
        case WeightMode::RandomUniform:
            fill_random(model, seed);
            break;
        case WeightMode::CraftedDetector:
            fill_detector(model);
            break;
    }
    model.validate();
    return model;
}

// Tap spacing is the dilation, so the average filter passes f when the
// per-tap phase step is small (30 degrees) and the high-pass peaks when it
// nears a half turn. The high tone is detuned off the exact half turn: at
// exactly sample_rate/(2*dilation) its period locks onto the stride lattice
// and some window phases place every surviving tap on a zero crossing.
double detector_male_tone_hz(const FixtureArch& arch) {
    return static_cast<double>(arch.sample_rate_hz) /
           (12.0 * static_cast<double>(arch.dilation));
}

double detector_female_tone_hz(const FixtureArch& arch) {
    return 0.95 * static_cast<double>(arch.sample_rate_hz) /
           (2.0 * static_cast<double>(arch.dilation));
}

std::vector<std::int16_t> synth_tone(double freq_hz, std::size_t n_samples,
                                     std::size_t sample_rate_hz, double amplitude) {
    std::vector<std::int16_t> samples(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double phase =
            2.0 * kPi * freq_hz * static_cast<double>(i) / static_cast<double>(sample_rate_hz);
        samples[i] = static_cast<std::int16_t>(std::lround(amplitude * std::sin(phase)));
    }
    return samples;
}

std::vector<std::int16_t> synth_silence(std::size_t n_samples) {
    return std::vector<std::int16_t>(n_samples, 0);
}

} // namespace smartpam
