// Acceptance suite: one check per release criterion, one PASS/FAIL line
// each. Run through ctest or directly; exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smartpam/config_io.hpp"
#include "smartpam/fixtures.hpp"
#include "smartpam/model_io.hpp"
#include "smartpam/sim.hpp"
#include "smartpam/wav.hpp"

using namespace smartpam;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void note(const std::string& text) { g_notes.push_back(text); }

bool expect(bool condition, const std::string& what) {
    if (!condition) note("    failed: " + what);
    return condition;
}

void run(int number, const char* name, bool (*fn)()) {
    g_notes.clear();
    bool ok = false;
    try {
        ok = fn();
    } catch (const std::exception& e) {
        note(std::string("    exception: ") + e.what());
    }
    std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", number, name);
    for (const std::string& line : g_notes) std::printf("%s\n", line.c_str());
    if (!ok) ++g_failures;
}

// -- 1 -----------------------------------------------------------------

bool tiling_equivalence() {
    std::size_t models = 0, comparisons = 0;
    for (std::uint32_t seed = 0; seed < 210; ++seed) {
        oracles::Rng rng(9000 + seed);
        oracles::RandomModelOptions options;
        options.max_layers = 6;
        options.max_channels = 8;
        options.max_window = 2048;
        options.max_final_length = 40;
        const ModelSpec model = oracles::random_model(rng, options);
        const PlanarTensor window = oracles::random_window(rng, model.window_samples);
        const Classification mono = model_forward(window, model);

        const std::size_t final_len = model.final_conv_length();
        for (std::size_t n = 1; n <= final_len; ++n) {
            const TilePlan plan = make_tile_plan(model, n);
            const Classification tiled = tiled_forward(window, model, plan);
            if (!expect(tiled.probabilities == mono.probabilities,
                        "bit-exact equivalence, seed " + std::to_string(seed) +
                            ", slices " + std::to_string(n))) {
                return false;
            }
            ++comparisons;
        }
        ++models;
    }
    note("    " + std::to_string(models) + " models, " + std::to_string(comparisons) +
         " tiled runs, all bit-identical");
    return models >= 200;
}

// -- 2 -----------------------------------------------------------------

bool receptive_field_oracle() {
    std::size_t stacks = 0;
    for (std::uint32_t seed = 0; seed < 55; ++seed) {
        oracles::Rng rng(400 + seed);
        const auto stack = oracles::random_positive_stack(rng);

        std::size_t min_len = 1;
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            min_len = (min_len - 1) * it->stride + it->effective_extent();
        }
        const std::size_t in_len = min_len + rng.index(0, 50);

        std::vector<double> input(in_len);
        for (double& v : input) v = 0.5 + 0.001 * static_cast<double>(rng.index(0, 999));

        const auto affects = oracles::trace_dependencies(stack, input);
        std::size_t out_len = in_len;
        for (const auto& layer : stack) {
            out_len = (out_len - layer.effective_extent()) / layer.stride + 1;
        }

        for (std::size_t o = 0; o < out_len; ++o) {
            const IndexRange predicted = stack_receptive_range({o, o}, stack);
            std::size_t first = in_len, last = 0;
            for (std::size_t j = 0; j < in_len; ++j) {
                if (affects[j][o]) {
                    first = std::min(first, j);
                    last = std::max(last, j);
                }
                if (affects[j][o] && (j < predicted.start || j > predicted.end)) {
                    return expect(false, "dependency outside the predicted range");
                }
            }
            if (!expect(first == predicted.start && last == predicted.end,
                        "receptive bounds, seed " + std::to_string(seed))) {
                return false;
            }
        }
        ++stacks;
    }
    note("    " + std::to_string(stacks) + " stacks traced sample by sample");
    return stacks >= 50;
}

// -- 3 -----------------------------------------------------------------

bool size_arithmetic() {
    const ModelSpec small = gen_fixture(FixtureArch::small(), 1, WeightMode::RandomUniform);
    const ModelSpec large = gen_fixture(FixtureArch::large(), 1, WeightMode::RandomUniform);
    const double small_bytes = static_cast<double>(model_size_bytes(small));
    const double large_bytes = static_cast<double>(model_size_bytes(large));
    note("    small: " + std::to_string(model_size_bytes(small)) + " B, large: " +
         std::to_string(model_size_bytes(large)) + " B");
    return expect(model_size_bytes(small) == 3232, "small model is 3232 bytes") &&
           expect(std::abs(small_bytes - 3300.0) / 3300.0 <= 0.10,
                  "small model within 10% of 3.3 kB") &&
           expect(model_size_bytes(large) == 59600, "large model is 59600 bytes") &&
           expect(std::abs(large_bytes - 62000.0) / 62000.0 <= 0.10,
                  "large model within 10% of 62 kB");
}

// -- 4 -----------------------------------------------------------------

bool memory_reduction() {
    const ModelSpec small = gen_fixture(FixtureArch::small(), 1, WeightMode::Zero);
    const std::size_t untiled = peak_activation_bytes(small).peak_bytes;
    const TilePlan plan = make_tile_plan(small, 5);
    const std::size_t tiled = peak_activation_bytes(small, &plan).peak_bytes;

    const ModelSpec large = gen_fixture(FixtureArch::large(), 1, WeightMode::Zero);
    const std::size_t large_untiled = peak_activation_bytes(large).peak_bytes;

    note("    small untiled " + std::to_string(untiled) + " B, 5 slices " +
         std::to_string(tiled) + " B (" +
         std::to_string(static_cast<double>(untiled) / static_cast<double>(tiled)) +
         "x); large untiled " + std::to_string(large_untiled) + " B");
    return expect(tiled * 3 <= untiled, "5-slice peak at most a third of untiled") &&
           expect(large_untiled > 256 * 1024, "large model exceeds 256 kB of RAM");
}

// -- 5 -----------------------------------------------------------------

bool window_arithmetic() {
    AudioStream ten_seconds;
    ten_seconds.sample_rate_hz = 24000;
    ten_seconds.samples = synth_silence(240000);
    return expect(window_duration_ms(9000, 24000) == 375.0, "9000 samples = 375 ms") &&
           expect(std::abs(window_duration_ms(1024, 24000) - 42.67) <= 0.01,
                  "1024 samples = 42.67 +- 0.01 ms") &&
           expect(windows(ten_seconds, 1024).size() == 234,
                  "10 s at 24 kHz yields 234 windows of 1024");
}

// -- 6 -----------------------------------------------------------------

bool detection_semantics() {
    const FixtureArch arch = FixtureArch::small();
    const ModelSpec model = gen_fixture(arch, 0, WeightMode::CraftedDetector);
    const std::size_t w = arch.window_samples;
    const DetectionConfig config;

    AudioStream consecutive;
    consecutive.sample_rate_hz = 24000;
    consecutive.samples = synth_tone(detector_male_tone_hz(arch), 35 * w, 24000);
    const DetectionOutcome a = detection_cycle(consecutive, model, nullptr, config);

    AudioStream split;
    split.sample_rate_hz = 24000;
    split.samples = synth_tone(detector_male_tone_hz(arch), 29 * w, 24000);
    const auto female = synth_tone(detector_female_tone_hz(arch), 29 * w, 24000);
    split.samples.insert(split.samples.end(), female.begin(), female.end());
    const auto pad = synth_silence(176 * w);
    split.samples.insert(split.samples.end(), pad.begin(), pad.end());
    const DetectionOutcome b = detection_cycle(split, model, nullptr, config);

    AudioStream noise_only;
    noise_only.sample_rate_hz = 24000;
    noise_only.samples = synth_silence(234 * w);
    const DetectionOutcome c = detection_cycle(noise_only, model, nullptr, config);

    return expect(a.triggered && a.trigger_class == "male" && a.windows_evaluated == 30,
                  "30 consecutive positives trigger male at window 30") &&
           expect(!b.triggered && b.counts.at("male") == 29 && b.counts.at("female") == 29,
                  "29+29 split across two classes stays silent") &&
           expect(!c.triggered, "noise-only cycle stays silent");
}

// -- 7 -----------------------------------------------------------------

bool timing_energy_arithmetic() {
    const DeviceProfile profile;
    const TimingModel timing;

    const DeadlineResult deadline = deadline_check(timing);
    const double smart = cycle_energy_mj(profile, timing);
    const double baseline = baseline_window_energy_mj(profile, timing.window_ms);
    const double overhead_points = 100.0 * (smart - baseline) / baseline;

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "    utilization %.4f, smart %.4f mJ, baseline %.4f mJ, overhead %.2f%%",
                  deadline.utilization, smart, baseline, overhead_points);
    note(buf);

    return expect(deadline.met, "36 ms fits the 42.7 ms window") &&
           expect(std::abs(deadline.utilization - 0.843) <= 0.001, "utilization 0.843") &&
           expect(std::abs(smart - 8.31) <= 0.01, "smart cycle 8.31 mJ") &&
           expect(std::abs(baseline - 7.03) <= 0.01, "baseline cycle 7.03 mJ") &&
           expect(std::abs(overhead_points - 18.2) <= 0.1, "overhead 18.2 points");
}

// -- 8 -----------------------------------------------------------------

bool simulator_guarantees() {
    const ModelSpec model = gen_fixture(FixtureArch::small(), 0, WeightMode::Zero);
    AudioStream minute;
    minute.sample_rate_hz = 24000;
    minute.samples = synth_silence(60 * 24000);

    const SimReport fits = simulate(minute, model, nullptr, FirmwareMode::F2, DeviceProfile{},
                                    TimingModel{}, DetectionConfig{});

    TimingModel slow;
    slow.preprocess_ms = 20.0;
    slow.inference_ms = 30.0;
    const SimReport overruns = simulate(minute, model, nullptr, FirmwareMode::F2,
                                        DeviceProfile{}, slow, DetectionConfig{});

    note("    fits: " + std::to_string(fits.windows_processed) +
         " processed, slow: " + std::to_string(overruns.deadline_misses) + " misses + " +
         std::to_string(overruns.buffer_overruns) + " overruns of " +
         std::to_string(overruns.windows_total));
    return expect(fits.deadline_misses == 0 && fits.buffer_overruns == 0,
                  "36 ms stages never miss on a 60 s stream") &&
           expect(fits.windows_processed == fits.windows_total, "every window analyzed") &&
           expect(overruns.deadline_misses == overruns.windows_processed,
                  "every processed window late when stages overrun") &&
           expect(overruns.deadline_misses + overruns.buffer_overruns ==
                      overruns.windows_total,
                  "every window flagged when stages overrun");
}

// -- 9 -----------------------------------------------------------------

bool format_round_trips() {
    const std::string path = "acceptance_model.spm";
    const ModelSpec model = gen_fixture(FixtureArch::small(), 99, WeightMode::RandomUniform);
    save_model(path, model);
    const ModelSpec loaded = load_model(path);

    bool ok = expect(loaded == model, "model round-trip is bit-exact");

    // Truncation: structural (malformed) error class.
    {
        std::string bytes;
        {
            std::FILE* f = std::fopen(path.c_str(), "rb");
            char chunk[4096];
            std::size_t n;
            while ((n = std::fread(chunk, 1, sizeof(chunk), f)) > 0) bytes.append(chunk, n);
            std::fclose(f);
        }
        auto rewrite = [&](const std::string& data) {
            std::FILE* f = std::fopen(path.c_str(), "wb");
            std::fwrite(data.data(), 1, data.size(), f);
            std::fclose(f);
        };

        rewrite(bytes.substr(0, bytes.size() - 4));
        try {
            (void)load_model(path);
            ok = expect(false, "truncated blob must be rejected");
        } catch (const MalformedModelError&) {
        } catch (const std::exception&) {
            ok = expect(false, "truncation must raise the malformed class");
        }

        std::string corrupted = bytes;
        corrupted.back() = static_cast<char>(corrupted.back() ^ 0x01);
        rewrite(corrupted);
        try {
            (void)load_model(path);
            ok = expect(false, "flipped byte must be rejected");
        } catch (const CorruptModelError&) {
        } catch (const std::exception&) {
            ok = expect(false, "flipped byte must raise the corrupt class");
        }

        rewrite(bytes); // restore
    }
    std::remove(path.c_str());

    // WAV fuzz corpus.
    AudioStream stream;
    stream.sample_rate_hz = 24000;
    stream.samples = synth_tone(800.0, 256, 24000);
    const std::vector<std::uint8_t> valid = encode_wav(stream);
    std::mt19937 rng(4242);
    std::size_t survived = 0;
    for (int i = 0; i < 1200; ++i) {
        std::vector<std::uint8_t> bytes = valid;
        const std::size_t mutations = 1 + rng() % 6;
        for (std::size_t m = 0; m < mutations; ++m) {
            bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
        }
        if (rng() % 5 == 0) bytes.resize(rng() % (bytes.size() + 1));
        try {
            (void)parse_wav(bytes);
        } catch (const WavError&) {
        }
        ++survived;
    }
    note("    " + std::to_string(survived) + " mutated WAV headers survived");
    return ok && expect(survived == 1200, "1200 fuzz inputs handled without a crash");
}

// -- 10 ----------------------------------------------------------------

bool end_to_end_f1() {
    const FixtureArch arch = FixtureArch::small();
    const ModelSpec model = gen_fixture(arch, 0, WeightMode::CraftedDetector);
    const std::size_t w = arch.window_samples;

    // Silence, then the synthetic call, then silence again; two cycles long.
    AudioStream stream;
    stream.sample_rate_hz = arch.sample_rate_hz;
    stream.samples = synth_silence(50 * w);
    const auto tone = synth_tone(detector_male_tone_hz(arch), 40 * w, arch.sample_rate_hz);
    stream.samples.insert(stream.samples.end(), tone.begin(), tone.end());
    const auto tail = synth_silence((468 - 90) * w);
    stream.samples.insert(stream.samples.end(), tail.begin(), tail.end());

    const std::string wav_path = "acceptance_demo.wav";
    write_wav(wav_path, stream);
    const WavClip clip = read_wav(wav_path);
    std::remove(wav_path.c_str());

    const SimReport report = simulate(clip.stream, model, nullptr, FirmwareMode::F1,
                                      DeviceProfile{}, TimingModel{}, DetectionConfig{});

    if (!expect(report.triggers.size() == 1, "exactly one trigger")) return false;
    const TriggerEvent& trigger = report.triggers[0];

    const double wdur = window_duration_ms(w, arch.sample_rate_hz);
    const double tone_window_30_start = 79.0 * wdur; // global window 79, 0-based
    const double tone_window_30_end = 80.0 * wdur;
    const double distance = std::max(
        0.0, std::max(tone_window_30_start - trigger.time_ms,
                      trigger.time_ms - tone_window_30_end));

    char buf[128];
    std::snprintf(buf, sizeof(buf), "    trigger %s at %.3f ms (30th tone window %.3f..%.3f)",
                  trigger.class_label.c_str(), trigger.time_ms, tone_window_30_start,
                  tone_window_30_end);
    note(buf);
    return expect(trigger.class_label == "male", "trigger class is male") &&
           expect(distance <= wdur + 1e-9, "timestamp within one window duration");
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    run(1, "tiling equivalence, bit-exact over random models", tiling_equivalence);
    run(2, "receptive-field dependency oracle", receptive_field_oracle);
    run(3, "fixture size arithmetic (3.3 kB / 62 kB)", size_arithmetic);
    run(4, "activation memory reduction (>=3x, large >256 kB)", memory_reduction);
    run(5, "window arithmetic (375 ms / 42.67 ms / 234 windows)", window_arithmetic);
    run(6, "detection threshold semantics", detection_semantics);
    run(7, "timing and energy arithmetic (36/42.7 ms, 8.31/7.03 mJ)",
        timing_energy_arithmetic);
    run(8, "simulator deadline and overrun guarantees", simulator_guarantees);
    run(9, "format round-trips, rejection classes, WAV fuzz", format_round_trips);
    run(10, "end-to-end detection-triggered recording", end_to_end_f1);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
