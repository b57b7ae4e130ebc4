#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "smartpam/fixtures.hpp"
#include "smartpam/stream.hpp"

using namespace smartpam;

namespace {

const FixtureArch kArch = FixtureArch::small();

AudioStream make_stream(std::vector<std::int16_t> samples, std::size_t rate = 24000) {
    AudioStream stream;
    stream.samples = std::move(samples);
    stream.sample_rate_hz = rate;
    return stream;
}

// Window-aligned segments of detector inputs.
AudioStream tone_silence_stream(std::size_t male_windows, std::size_t female_windows,
                                std::size_t silence_windows,
                                std::size_t leading_silence_windows = 0) {
    const std::size_t w = kArch.window_samples;
    std::vector<std::int16_t> samples = synth_silence(leading_silence_windows * w);
    const auto male =
        synth_tone(detector_male_tone_hz(kArch), male_windows * w, kArch.sample_rate_hz);
    samples.insert(samples.end(), male.begin(), male.end());
    const auto female =
        synth_tone(detector_female_tone_hz(kArch), female_windows * w, kArch.sample_rate_hz);
    samples.insert(samples.end(), female.begin(), female.end());
    const auto tail = synth_silence(silence_windows * w);
    samples.insert(samples.end(), tail.begin(), tail.end());
    return make_stream(std::move(samples));
}

} // namespace

TEST_CASE("standardize_window handles the degenerate constant window") {
    const std::int16_t raw[] = {5, 5, 5, 5};
    const PlanarTensor out = standardize_window(raw);
    REQUIRE(out.length() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out.at(0, i) == 0.0f);
}

TEST_CASE("standardize_window z-scores a two-sample window") {
    const std::int16_t raw[] = {0, 2};
    const PlanarTensor out = standardize_window(raw);
    CHECK(out.at(0, 0) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(out.at(0, 1) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("standardize_window yields near-zero mean and unit deviation") {
    oracles::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::int16_t> raw(rng.index(2, 4096));
        for (auto& s : raw) {
            s = static_cast<std::int16_t>(static_cast<int>(rng.index(0, 20000)) - 10000);
        }
        bool constant = true;
        for (auto s : raw) constant = constant && s == raw[0];
        if (constant) continue;

        const PlanarTensor out = standardize_window(raw);
        double mean = 0.0;
        for (float v : out.values()) mean += v;
        mean /= static_cast<double>(out.length());
        double var = 0.0;
        for (float v : out.values()) var += (v - mean) * (v - mean);
        var /= static_cast<double>(out.length());

        CHECK(std::abs(mean) < 1e-4);
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-4);
    }
}

TEST_CASE("standardize_window rejects an empty slice") {
    CHECK_THROWS_WITH_AS(standardize_window(std::span<const std::int16_t>{}),
                         doctest::Contains("empty window"), Error);
}

TEST_CASE("windows are consecutive and drop the trailing partial") {
    const AudioStream one_second = make_stream(std::vector<std::int16_t>(24000, 0));

    CHECK(windows(one_second, 9000).size() == 2);
    CHECK(window_duration_ms(9000, 24000) == doctest::Approx(375.0));

    CHECK(windows(one_second, 1024).size() == 23);
    CHECK(window_duration_ms(1024, 24000) == doctest::Approx(42.67).epsilon(0.001));

    const AudioStream tiny = make_stream(std::vector<std::int16_t>(512, 0));
    CHECK(windows(tiny, 1024).empty());
}

TEST_CASE("window count is floor(stream length / window size)") {
    oracles::Rng rng(23);
    for (int i = 0; i < 50; ++i) {
        const std::size_t ws = rng.index(1, 512);
        const std::size_t len = rng.index(0, 4096);
        const AudioStream stream = make_stream(std::vector<std::int16_t>(len, 1));
        CHECK(windows(stream, ws).size() == len / ws);
    }
}

TEST_CASE("analyse_and_record on silence labels every window with class 0") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::Zero);
    const AudioStream stream = make_stream(synth_silence(8 * model.window_samples));
    const auto records = analyse_and_record(stream, model);
    REQUIRE(records.size() == 8);
    for (const WindowRecord& record : records) {
        CHECK(record.label == "male"); // class 0 of the zero-weight fixture
        CHECK(record.probabilities.size() == 4);
    }
}

TEST_CASE("analyse_and_record yields 234 records for 10 seconds at 24 kHz") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::Zero);
    const AudioStream stream = make_stream(synth_silence(240000));
    const auto records = analyse_and_record(stream, model);
    CHECK(records.size() == 234);

    const double duration = window_duration_ms(model.window_samples, 24000);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].index == i);
        CHECK(records[i].t_start_ms == static_cast<double>(i) * duration);
    }
}

TEST_CASE("analyse_and_record is identical with and without a tile plan") {
    const ModelSpec model = gen_fixture(kArch, 21, WeightMode::RandomUniform);
    oracles::Rng rng(31);
    std::vector<std::int16_t> samples(6 * model.window_samples);
    for (auto& s : samples) {
        s = static_cast<std::int16_t>(static_cast<int>(rng.index(0, 16000)) - 8000);
    }
    const AudioStream stream = make_stream(std::move(samples));

    const TilePlan plan = make_tile_plan(model, 5);
    const auto without = analyse_and_record(stream, model);
    const auto with = analyse_and_record(stream, model, &plan);

    REQUIRE(without.size() == with.size());
    for (std::size_t i = 0; i < without.size(); ++i) {
        CHECK(without[i].label == with[i].label);
        CHECK(without[i].probabilities == with[i].probabilities); // bit-exact
    }
}

TEST_CASE("crafted detector separates the bundled tones from silence") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    const std::size_t w = model.window_samples;

    const auto male = analyse_and_record(
        make_stream(synth_tone(detector_male_tone_hz(kArch), 4 * w, 24000)), model);
    for (const auto& r : male) CHECK(r.label == "male");

    const auto female = analyse_and_record(
        make_stream(synth_tone(detector_female_tone_hz(kArch), 4 * w, 24000)), model);
    for (const auto& r : female) CHECK(r.label == "female");

    const auto silent = analyse_and_record(make_stream(synth_silence(4 * w)), model);
    for (const auto& r : silent) CHECK(r.label == "noise");
}

TEST_CASE("detection_cycle triggers on the 30th positive window") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    DetectionConfig config;

    // 10 noise windows then a persistent call: male count reaches 30 on
    // window 40 overall.
    const AudioStream stream = tone_silence_stream(35, 0, 0, 10);
    const DetectionOutcome outcome = detection_cycle(stream, model, nullptr, config);

    CHECK(outcome.triggered);
    REQUIRE(outcome.trigger_class.has_value());
    CHECK(*outcome.trigger_class == "male");
    CHECK(outcome.windows_evaluated == 40);
    CHECK(outcome.counts.at("male") == 30);
    CHECK(outcome.counts.at("noise") == 10);
}

TEST_CASE("29 + 29 across two positive classes does not trigger") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    DetectionConfig config;

    const AudioStream stream = tone_silence_stream(29, 29, 176);
    const DetectionOutcome outcome = detection_cycle(stream, model, nullptr, config);

    CHECK_FALSE(outcome.triggered);
    CHECK(outcome.counts.at("male") == 29);
    CHECK(outcome.counts.at("female") == 29);
    CHECK(outcome.windows_evaluated == 234);

    // The same count concentrated in one class does trigger.
    const AudioStream single = tone_silence_stream(30, 0, 0);
    CHECK(detection_cycle(single, model, nullptr, config).triggered);
}

TEST_CASE("all-noise stream never triggers") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    DetectionConfig config;
    const AudioStream stream = make_stream(synth_silence(234 * kArch.window_samples));
    const DetectionOutcome outcome = detection_cycle(stream, model, nullptr, config);
    CHECK_FALSE(outcome.triggered);
    CHECK(outcome.counts.at("noise") == outcome.windows_evaluated);
}

TEST_CASE("detection evaluates at most one cycle of windows") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    DetectionConfig config;
    const std::size_t wpc = windows_per_cycle(config, 24000, model.window_samples);
    CHECK(wpc == 234);

    const AudioStream stream = make_stream(synth_silence(300 * kArch.window_samples));
    CHECK(detection_cycle(stream, model, nullptr, config).windows_evaluated == wpc);
}

TEST_CASE("appending positive windows never un-triggers a stream") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    DetectionConfig config;

    AudioStream stream = tone_silence_stream(31, 0, 0, 5);
    REQUIRE(detection_cycle(stream, model, nullptr, config).triggered);

    const auto extra = synth_tone(detector_male_tone_hz(kArch),
                                  20 * kArch.window_samples, kArch.sample_rate_hz);
    stream.samples.insert(stream.samples.end(), extra.begin(), extra.end());
    CHECK(detection_cycle(stream, model, nullptr, config).triggered);
}

TEST_CASE("early exit leaves exactly one positive class at the threshold") {
    const ModelSpec model = gen_fixture(kArch, 0, WeightMode::CraftedDetector);
    DetectionConfig config;
    const AudioStream stream = tone_silence_stream(29, 60, 0);
    const DetectionOutcome outcome = detection_cycle(stream, model, nullptr, config);

    REQUIRE(outcome.triggered);
    CHECK(*outcome.trigger_class == "female");
    CHECK(outcome.windows_evaluated == 59); // 29 male + 30 female
    std::size_t at_threshold = 0;
    for (const auto& [label, count] : outcome.counts) {
        if (config.is_positive(label) && count >= config.threshold) ++at_threshold;
    }
    CHECK(at_threshold == 1);
}

TEST_CASE("trigger_decision picks the qualifying class with the highest count") {
    DetectionConfig config;

    CHECK(trigger_decision({{"male", 30}, {"noise", 204}}, config) == "male");
    CHECK(trigger_decision({{"male", 29}, {"female", 29}}, config) == std::nullopt);
    CHECK(trigger_decision({{"male", 31}, {"chick", 35}}, config) == "chick");
    // Count tie: class order (male before female) decides.
    CHECK(trigger_decision({{"male", 30}, {"female", 30}}, config) == "male");
    // Non-positive classes never qualify.
    CHECK(trigger_decision({{"noise", 500}}, config) == std::nullopt);
}

TEST_CASE("window record log line format") {
    WindowRecord record;
    record.index = 7;
    record.t_start_ms = 298.666666;
    record.label = "chick";
    record.probabilities = {0.125f, 0.25f, 0.5f, 0.125f};
    CHECK(format_window_record(record) == "7,298.667,chick,0.125000,0.250000,0.500000,0.125000");
}

TEST_CASE("detection outcome rendering keeps class-label order") {
    DetectionOutcome outcome;
    outcome.triggered = true;
    outcome.trigger_class = "male";
    outcome.windows_evaluated = 40;
    outcome.counts = {{"male", 30}, {"noise", 10}};
    const std::string text =
        format_detection_outcome(outcome, {"male", "female", "chick", "noise"});
    CHECK(text == "triggered: yes\ntrigger_class: male\nwindows_evaluated: 40\n"
                  "counts: male=30 female=0 chick=0 noise=10\n");
}
