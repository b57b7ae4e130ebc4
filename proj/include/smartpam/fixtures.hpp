#ifndef SMARTPAM_FIXTURES_HPP
#define SMARTPAM_FIXTURES_HPP

#include <cstdint>
#include <vector>

#include "smartpam/model.hpp"
#include "smartpam/stream.hpp"

namespace smartpam {

enum class WeightMode { RandomUniform, Zero, CraftedDetector };

/// Architecture knobs for fixture generation. Strided layers sit at the end
/// of each group of `stride_period` layers by default; set
/// stride_on_first_of_group to move them to the front of each group.
struct FixtureArch {
    std::size_t n_conv_layers = 6;
    std::size_t filters = 4;
    std::size_t kernel = 3;
    std::size_t dilation = 3;
    std::size_t stride = 3;
    std::size_t stride_period = 2;
    bool stride_on_first_of_group = false;
    std::size_t window_samples = 1024;
    std::size_t sample_rate_hz = 24000;
    std::vector<std::string> class_labels = {"male", "female", "chick", "noise"};

    /// 6 convs, 4 filters, kernel 3, dilation 3, stride 3 on layers 2/4/6,
    /// 1024-sample window. 808 parameters.
    static FixtureArch small();

    /// 12 convs, 16 filters, kernel 3, dilation 5, stride 3 on layers
    /// 3/6/9/12, 9000-sample window. 14900 parameters.
    static FixtureArch large();
};

/// Builds a fixture model. RandomUniform draws weights in [-0.5, 0.5] from
/// the seed with a platform-independent generator, so equal seeds give
/// bit-identical blobs everywhere. CraftedDetector wires a frequency
/// discriminator: the bundled low tone classifies as "male", the high tone
/// as "female", and silence as "noise".
ModelSpec gen_fixture(const FixtureArch& arch, std::uint64_t seed, WeightMode mode);

/// Tone frequencies the crafted detector responds to. Derived from the
/// architecture's dilation so the layer-1 filters keep their pass/stop
/// behavior for any fixture geometry.
double detector_male_tone_hz(const FixtureArch& arch);
double detector_female_tone_hz(const FixtureArch& arch);

/// Sine tone as 16-bit PCM, amplitude in raw sample units.
std::vector<std::int16_t> synth_tone(double freq_hz, std::size_t n_samples,
                                     std::size_t sample_rate_hz, double amplitude = 8000.0);

std::vector<std::int16_t> synth_silence(std::size_t n_samples);

} // namespace smartpam

#endif
