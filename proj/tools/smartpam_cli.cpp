// smartpam command line: model inspection, tile planning, window inference,
// detection, device simulation, and fixture generation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "smartpam/config_io.hpp"
#include "smartpam/fixtures.hpp"
#include "smartpam/model_io.hpp"
#include "smartpam/sim.hpp"
#include "smartpam/wav.hpp"

namespace {

using namespace smartpam;

AudioStream load_stream(const std::string& path, const ModelSpec& model) {
    WavClip clip = read_wav(path);
    if (clip.stream.sample_rate_hz != model.sample_rate_hz) {
        std::cerr << "warning: stream is " << clip.stream.sample_rate_hz
                  << " Hz, model expects " << model.sample_rate_hz
                  << " Hz; durations use the stream rate\n";
    }
    return std::move(clip.stream);
}

std::optional<TilePlan> maybe_plan(const ModelSpec& model, std::size_t slices) {
    if (slices == 0) return std::nullopt;
    return make_tile_plan(model, slices);
}

int cmd_info(const std::string& model_path) {
    const ModelSpec model = load_model(model_path);
    const ParamCount counts = param_count(model);
    const std::vector<std::size_t> lengths = model.layer_output_lengths();

    std::printf("window_samples: %zu\n", model.window_samples);
    std::printf("sample_rate_hz: %zu\n", model.sample_rate_hz);
    std::printf("window_ms: %.3f\n",
                window_duration_ms(model.window_samples, model.sample_rate_hz));
    std::string classes;
    for (std::size_t i = 0; i < model.class_labels.size(); ++i) {
        if (i) classes += ",";
        classes += model.class_labels[i];
    }
    std::printf("classes: %s\n", classes.c_str());
    std::printf("layers:\n");
    for (std::size_t k = 0; k < model.conv_layers.size(); ++k) {
        const ConvLayerSpec& layer = model.conv_layers[k];
        std::printf(
            "  conv%zu: in=%zu out=%zu kernel=%zu stride=%zu dilation=%zu act=%s "
            "out_len=%zu\n",
            k + 1, layer.in_channels, layer.out_channels, layer.kernel, layer.stride,
            layer.dilation, layer.activation == Activation::ReLU ? "relu" : "none",
            lengths[k]);
    }
    std::printf("  dense: in=%zu out=%zu\n", model.dense.in_features,
                model.dense.out_features);
    std::printf("conv_params: %zu\n", counts.conv_params);
    std::printf("dense_params: %zu\n", counts.dense_params);
    std::printf("total_params: %zu\n", counts.total);
    std::printf("model_size_bytes: %zu\n", model_size_bytes(model));
    return 0;
}

int cmd_plan(const std::string& model_path, std::size_t slices, double budget_kb,
             const std::string& out_path) {
    const ModelSpec model = load_model(model_path);

    if (budget_kb > 0.0) {
        const double budget_bytes = budget_kb * 1024.0;
        const std::size_t final_len = model.final_conv_length();
        const MemoryReport untiled = peak_activation_bytes(model);
        for (std::size_t n = 1; n <= final_len; ++n) {
            const TilePlan plan = make_tile_plan(model, n);
            const MemoryReport report = peak_activation_bytes(model, &plan);
            if (static_cast<double>(report.peak_bytes) <= budget_bytes) {
                std::printf("budget_kb: %.3f\n", budget_kb);
                std::printf("untiled_peak_bytes: %zu\n", untiled.peak_bytes);
                std::printf("n_slices: %zu\n", n);
                std::printf("tiled_peak_bytes: %zu\n", report.peak_bytes);
                if (!out_path.empty()) save_plan(out_path, plan);
                return 0;
            }
        }
        std::fprintf(stderr, "no slice count up to %zu fits %.3f kB\n", final_len, budget_kb);
        return 1;
    }

    const TilePlan plan = make_tile_plan(model, slices);
    const MemoryReport untiled = peak_activation_bytes(model);
    const MemoryReport tiled = peak_activation_bytes(model, &plan);
    std::fputs(format_tile_plan(plan).c_str(), stdout);
    std::printf("untiled_peak_bytes: %zu\n", untiled.peak_bytes);
    std::fputs(format_memory_report(tiled).c_str(), stdout);
    if (!out_path.empty()) save_plan(out_path, plan);
    return 0;
}

int cmd_infer(const std::string& model_path, const std::string& wav_path, std::size_t slices,
              const std::string& out_path) {
    const ModelSpec model = load_model(model_path);
    const AudioStream stream = load_stream(wav_path, model);
    const std::optional<TilePlan> plan = maybe_plan(model, slices);

    const std::vector<WindowRecord> records =
        analyse_and_record(stream, model, plan ? &*plan : nullptr);

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        file.open(out_path, std::ios::trunc);
        if (!file) throw Error("cannot write " + out_path);
        out = &file;
    }
    for (const WindowRecord& record : records) {
        *out << format_window_record(record) << "\n";
    }
    return 0;
}

int cmd_detect(const std::string& model_path, const std::string& wav_path, double cycle_s,
               std::size_t threshold, std::size_t slices) {
    const ModelSpec model = load_model(model_path);
    const AudioStream stream = load_stream(wav_path, model);
    const std::optional<TilePlan> plan = maybe_plan(model, slices);

    DetectionConfig config;
    config.cycle_seconds = cycle_s;
    config.threshold = threshold;

    const std::size_t wpc =
        windows_per_cycle(config, stream.sample_rate_hz, model.window_samples);
    if (wpc == 0) throw Error("cycle shorter than one window");
    if (config.threshold > wpc) {
        throw Error("threshold " + std::to_string(config.threshold) +
                    " exceeds the " + std::to_string(wpc) + " windows in a cycle");
    }

    const std::size_t cycle_samples = wpc * model.window_samples;
    const std::size_t n_cycles =
        (stream.samples.size() + cycle_samples - 1) / cycle_samples;
    for (std::size_t c = 0; c < n_cycles; ++c) {
        AudioStream cycle_stream;
        cycle_stream.sample_rate_hz = stream.sample_rate_hz;
        const std::size_t begin = c * cycle_samples;
        const std::size_t end = std::min(stream.samples.size(), begin + cycle_samples);
        cycle_stream.samples.assign(stream.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                    stream.samples.begin() + static_cast<std::ptrdiff_t>(end));
        const DetectionOutcome outcome =
            detection_cycle(cycle_stream, model, plan ? &*plan : nullptr, config);
        std::printf("cycle %zu:\n", c);
        std::fputs(format_detection_outcome(outcome, model.class_labels).c_str(), stdout);
    }
    return 0;
}

int cmd_simulate(const std::string& model_path, const std::string& wav_path,
                 const std::string& mode_text, const std::string& profile_path,
                 std::size_t slices, const std::string& log_path) {
    const ModelSpec model = load_model(model_path);
    const AudioStream stream = load_stream(wav_path, model);
    const std::optional<TilePlan> plan = maybe_plan(model, slices);

    SimConfig config;
    if (!profile_path.empty()) config = load_sim_config(profile_path);

    const FirmwareMode mode = (mode_text == "f1") ? FirmwareMode::F1 : FirmwareMode::F2;
    const DetectionConfig detection;
    const SimReport report = simulate(stream, model, plan ? &*plan : nullptr, mode,
                                      config.profile, config.timing, detection);

    std::fputs(format_sim_report(report).c_str(), stdout);
    if (mode == FirmwareMode::F2) {
        if (!log_path.empty()) {
            std::ofstream log(log_path, std::ios::trunc);
            if (!log) throw Error("cannot write " + log_path);
            for (const WindowRecord& record : report.records) {
                log << format_window_record(record) << "\n";
            }
        } else {
            std::printf("windows:\n");
            for (const WindowRecord& record : report.records) {
                std::printf("%s\n", format_window_record(record).c_str());
            }
        }
    }
    return 0;
}

int cmd_gen_model(const std::string& arch_text, std::uint64_t seed,
                  const std::string& weights_text, const std::string& out_path) {
    const FixtureArch arch =
        (arch_text == "large") ? FixtureArch::large() : FixtureArch::small();
    WeightMode mode = WeightMode::RandomUniform;
    if (weights_text == "zero") mode = WeightMode::Zero;
    if (weights_text == "detector") mode = WeightMode::CraftedDetector;

    const ModelSpec model = gen_fixture(arch, seed, mode);
    save_model(out_path, model);
    std::printf("wrote %s (%zu params, %zu bytes)\n", out_path.c_str(),
                param_count(model).total, model_size_bytes(model));
    return 0;
}

int cmd_gen_wav(const std::string& kind, std::size_t n_windows, const std::string& arch_text,
                const std::string& out_path) {
    const FixtureArch arch =
        (arch_text == "large") ? FixtureArch::large() : FixtureArch::small();
    const std::size_t n = n_windows * arch.window_samples;

    AudioStream stream;
    stream.sample_rate_hz = arch.sample_rate_hz;
    if (kind == "silence") {
        stream.samples = synth_silence(n);
    } else if (kind == "male-tone") {
        stream.samples = synth_tone(detector_male_tone_hz(arch), n, arch.sample_rate_hz);
    } else if (kind == "female-tone") {
        stream.samples = synth_tone(detector_female_tone_hz(arch), n, arch.sample_rate_hz);
    } else if (kind == "detect-demo") {
        // Silence, a run of the male tone, then silence again: the standard
        // demo input for `simulate --mode f1`.
        const std::size_t w = arch.window_samples;
        const std::size_t lead = 50, tone = 40;
        if (n_windows < lead + tone + 1) {
            throw Error("detect-demo needs at least " + std::to_string(lead + tone + 1) +
                        " windows");
        }
        stream.samples = synth_silence(lead * w);
        const auto tone_samples =
            synth_tone(detector_male_tone_hz(arch), tone * w, arch.sample_rate_hz);
        stream.samples.insert(stream.samples.end(), tone_samples.begin(), tone_samples.end());
        const auto tail = synth_silence((n_windows - lead - tone) * w);
        stream.samples.insert(stream.samples.end(), tail.begin(), tail.end());
    } else {
        throw Error("unknown wav kind '" + kind + "'");
    }
    write_wav(out_path, stream);
    std::printf("wrote %s (%zu samples, %zu windows)\n", out_path.c_str(),
                stream.samples.size(), stream.samples.size() / arch.window_samples);
    return 0;
}

int cmd_bench(const std::string& model_path, const std::string& wav_path,
              std::size_t slices) {
    const ModelSpec model = load_model(model_path);
    const AudioStream stream = load_stream(wav_path, model);
    const std::optional<TilePlan> plan = maybe_plan(model, slices);
    const auto raw_windows = windows(stream, model.window_samples);
    if (raw_windows.empty()) throw Error("stream shorter than one window");

    using clock = std::chrono::steady_clock;
    double total_ms = 0.0, min_ms = 1e300, max_ms = 0.0;
    for (const auto& raw : raw_windows) {
        const auto t0 = clock::now();
        const PlanarTensor x = standardize_window(raw);
        if (plan) {
            (void)tiled_forward(x, model, *plan);
        } else {
            (void)model_forward(x, model);
        }
        const auto t1 = clock::now();
        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        total_ms += ms;
        min_ms = std::min(min_ms, ms);
        max_ms = std::max(max_ms, ms);
    }
    // Host timings only. Device latency is a profile constant for `simulate`
    // and is never measured here.
    std::printf("host timings over %zu windows (not device time):\n", raw_windows.size());
    std::printf("  mean_ms: %.4f\n", total_ms / static_cast<double>(raw_windows.size()));
    std::printf("  min_ms: %.4f\n", min_ms);
    std::printf("  max_ms: %.4f\n", max_ms);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"smart passive acoustic monitoring toolkit"};
    app.require_subcommand(1);

    std::string model_path, wav_path, out_path, profile_path, log_path;
    std::string arch_text = "small", weights_text = "random", mode_text, kind;
    std::size_t slices = 0, threshold = 30, n_windows = 120;
    double budget_kb = 0.0, cycle_s = 10.0;
    std::uint64_t seed = 1;

    auto* info = app.add_subcommand("info", "architecture, parameter counts, sizes");
    info->add_option("model", model_path)->required();

    auto* plan = app.add_subcommand("plan", "tile plan and activation memory report");
    plan->add_option("model", model_path)->required();
    plan->add_option("--slices", slices);
    plan->add_option("--budget-kb", budget_kb, "smallest slice count fitting the budget");
    plan->add_option("--out", out_path, "also save the plan to this file");

    auto* infer = app.add_subcommand("infer", "per-window classification log (F2)");
    infer->add_option("model", model_path)->required();
    infer->add_option("wav", wav_path)->required();
    infer->add_option("--plan", slices, "run tiled with this many slices");
    infer->add_option("--out", out_path);

    auto* detect = app.add_subcommand("detect", "detection cycles over a recording (F1)");
    detect->add_option("model", model_path)->required();
    detect->add_option("wav", wav_path)->required();
    detect->add_option("--cycle-s", cycle_s);
    detect->add_option("--threshold", threshold);
    detect->add_option("--plan", slices);

    auto* simulate = app.add_subcommand("simulate", "timing/energy device simulation");
    simulate->add_option("model", model_path)->required();
    simulate->add_option("wav", wav_path)->required();
    simulate->add_option("--mode", mode_text)->required()->check(CLI::IsMember({"f1", "f2"}));
    simulate->add_option("--profile", profile_path, "device profile config file");
    simulate->add_option("--plan", slices);
    simulate->add_option("--log", log_path, "write the F2 window log here");

    auto* gen_model = app.add_subcommand("gen-model", "write a fixture model file");
    gen_model->add_option("--arch", arch_text)->check(CLI::IsMember({"small", "large"}));
    gen_model->add_option("--seed", seed);
    gen_model->add_option("--weights", weights_text)
        ->check(CLI::IsMember({"random", "zero", "detector"}));
    gen_model->add_option("--out", out_path)->required();

    auto* gen_wav = app.add_subcommand("gen-wav", "write a synthetic test recording");
    gen_wav->add_option("--kind", kind)
        ->required()
        ->check(CLI::IsMember({"silence", "male-tone", "female-tone", "detect-demo"}));
    gen_wav->add_option("--windows", n_windows, "length in model windows");
    gen_wav->add_option("--arch", arch_text)->check(CLI::IsMember({"small", "large"}));
    gen_wav->add_option("--out", out_path)->required();

    auto* bench = app.add_subcommand("bench", "host-side per-window processing time");
    bench->add_option("model", model_path)->required();
    bench->add_option("wav", wav_path)->required();
    bench->add_option("--plan", slices);

    CLI11_PARSE(app, argc, argv);

    try {
        if (info->parsed()) return cmd_info(model_path);
        if (plan->parsed()) {
            if (slices == 0 && budget_kb <= 0.0) {
                throw smartpam::Error("plan needs --slices or --budget-kb");
            }
            return cmd_plan(model_path, slices, budget_kb, out_path);
        }
        if (infer->parsed()) return cmd_infer(model_path, wav_path, slices, out_path);
        if (detect->parsed())
            return cmd_detect(model_path, wav_path, cycle_s, threshold, slices);
        if (simulate->parsed())
            return cmd_simulate(model_path, wav_path, mode_text, profile_path, slices,
                                log_path);
        if (gen_model->parsed())
            return cmd_gen_model(arch_text, seed, weights_text, out_path);
        if (gen_wav->parsed()) return cmd_gen_wav(kind, n_windows, arch_text, out_path);
        if (bench->parsed()) return cmd_bench(model_path, wav_path, slices);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
