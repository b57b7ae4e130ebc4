#include "smartpam/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace smartpam {

const char* stage_name(Stage stage) {
    switch (stage) {
        case Stage::Sleep: return "sleep";
        case Stage::Preprocess: return "preprocess";
        case Stage::Inference: return "inference";
        case Stage::Record: return "record";
    }
    return "?";
}

double DeviceProfile::current_ma(Stage stage) const {
    auto it = stage_current_ma.find(stage);
    return it == stage_current_ma.end() ? 0.0 : it->second;
}

void DeviceProfile::validate() const {
    if (supply_voltage_v < 0.0) throw Error("supply voltage must be >= 0");
    if (shunt_ohms <= 0.0) throw Error("shunt resistance must be positive");
    for (const auto& [stage, current] : stage_current_ma) {
        if (current < 0.0) {
            throw Error(std::string("stage current must be >= 0: ") + stage_name(stage));
        }
    }
    if (measured_stage_durations_ms) {
        for (const auto& [stage, ms] : *measured_stage_durations_ms) {
            if (ms < 0.0) {
                throw Error(std::string("stage duration must be >= 0: ") + stage_name(stage));
            }
        }
    }
}

double shunt_current_ma(double v_shunt_mv, double shunt_ohms) {
    if (shunt_ohms <= 0.0) {
        throw Error("shunt resistance must be positive");
    }
    return v_shunt_mv / shunt_ohms;
}

double cycle_energy_mj(const DeviceProfile& profile, const TimingModel& timing) {
    const double rest_ms =
        std::max(0.0, timing.window_ms - timing.preprocess_ms - timing.inference_ms);
    const double charge_ma_ms = profile.current_ma(Stage::Preprocess) * timing.preprocess_ms +
                                profile.current_ma(Stage::Inference) * timing.inference_ms +
                                profile.current_ma(Stage::Sleep) * rest_ms;
    return profile.supply_voltage_v * charge_ma_ms / 1000.0;
}

double baseline_window_energy_mj(const DeviceProfile& profile, double window_ms) {
    return profile.supply_voltage_v * profile.current_ma(Stage::Record) * window_ms / 1000.0;
}

DeadlineResult deadline_check(const TimingModel& timing) {
    DeadlineResult result;
    result.utilization = timing.total_active_ms() / timing.window_ms;
    result.met = timing.total_active_ms() <= timing.window_ms;
    return result;
}

namespace {

double sleep_window_energy_mj(const DeviceProfile& profile, double window_ms) {
    return profile.supply_voltage_v * profile.current_ma(Stage::Sleep) * window_ms / 1000.0;
}

const char* kSimAssumptions =
    "two-buffer ping-pong acquisition with one window of fill time per "
    "window_ms of the timing model; a window completing while the CPU is "
    "still busy is dropped and counted as a buffer overrun; dropped windows "
    "are charged sleep current, recorded windows record current, analyzed "
    "windows the full analysis cycle energy; trigger timestamps follow the "
    "stream sample clock";

} // namespace

SimReport simulate(const AudioStream& stream, const ModelSpec& model, const TilePlan* plan,
                   FirmwareMode mode, const DeviceProfile& profile, const TimingModel& timing,
                   const DetectionConfig& config) {
    profile.validate();

    SimReport report;
    report.assumptions = kSimAssumptions;

    const auto raw_windows = windows(stream, model.window_samples);
    report.windows_total = raw_windows.size();

    const double stream_window_ms =
        window_duration_ms(model.window_samples, stream.sample_rate_hz);
    const std::size_t wpc =
        windows_per_cycle(config, stream.sample_rate_hz, model.window_samples);

    const double active_ms = timing.total_active_ms();
    const bool misses_deadline = active_ms > timing.window_ms;
    const double analysis_energy = cycle_energy_mj(profile, timing);
    const double record_energy = baseline_window_energy_mj(profile, timing.window_ms);
    const double sleep_energy = sleep_window_energy_mj(profile, timing.window_ms);

    double cpu_free_at_ms = 0.0;
    std::map<std::string, std::size_t> counts;
    bool recording = false;
    std::size_t cycle = 0;

    for (std::size_t w = 0; w < raw_windows.size(); ++w) {
        if (mode == FirmwareMode::F1 && wpc > 0) {
            const std::size_t w_cycle = w / wpc;
            if (w_cycle != cycle || w == 0) {
                cycle = w_cycle;
                counts.clear();
                recording = false;
            }
        }
        report.baseline_energy_mj += baseline_window_energy_mj(profile, timing.window_ms);

        if (mode == FirmwareMode::F1 && recording) {
            report.windows_recorded += 1;
            report.energy_mj += record_energy;
            continue;
        }

        // Acquisition clock: window w is handed over at (w+1) * window_ms.
        const double fill_done_ms = static_cast<double>(w + 1) * timing.window_ms;
        if (cpu_free_at_ms > fill_done_ms + 1e-9) {
            report.buffer_overruns += 1; // CPU still busy: fresh window dropped
            report.energy_mj += sleep_energy;
            continue;
        }

        cpu_free_at_ms = fill_done_ms + active_ms;
        report.windows_processed += 1;
        report.energy_mj += analysis_energy;
        if (misses_deadline) report.deadline_misses += 1;

        const PlanarTensor x = standardize_window(raw_windows[w]);
        const Classification c =
            plan ? tiled_forward(x, model, *plan) : model_forward(x, model);

        if (mode == FirmwareMode::F2) {
            WindowRecord record;
            record.index = w;
            record.t_start_ms = static_cast<double>(w) * stream_window_ms;
            record.label = c.argmax_label;
            record.probabilities = c.probabilities;
            report.records.push_back(std::move(record));
        } else {
            counts[c.argmax_label] += 1;
            if (config.is_positive(c.argmax_label) &&
                counts[c.argmax_label] >= config.threshold) {
                TriggerEvent event;
                event.cycle_index = cycle;
                event.class_label = c.argmax_label;
                event.time_ms = static_cast<double>(w + 1) * stream_window_ms;
                report.triggers.push_back(std::move(event));
                recording = true; // rest of this cycle goes to storage
            }
        }
    }

    if (report.baseline_energy_mj > 0.0) {
        report.overhead_vs_baseline =
            (report.energy_mj - report.baseline_energy_mj) / report.baseline_energy_mj;
    }
    return report;
}

std::string format_sim_report(const SimReport& report) {
    char buf[256];
    std::string text;
    text += "windows_total: " + std::to_string(report.windows_total) + "\n";
    text += "windows_processed: " + std::to_string(report.windows_processed) + "\n";
    text += "windows_recorded: " + std::to_string(report.windows_recorded) + "\n";
    text += "deadline_misses: " + std::to_string(report.deadline_misses) + "\n";
    text += "buffer_overruns: " + std::to_string(report.buffer_overruns) + "\n";
    std::snprintf(buf, sizeof(buf), "energy_mj: %.4f\n", report.energy_mj);
    text += buf;
    std::snprintf(buf, sizeof(buf), "baseline_energy_mj: %.4f\n", report.baseline_energy_mj);
    text += buf;
    std::snprintf(buf, sizeof(buf), "overhead_vs_baseline: %.4f\n",
                  report.overhead_vs_baseline);
    text += buf;
    text += "triggers: " + std::to_string(report.triggers.size()) + "\n";
    for (const TriggerEvent& t : report.triggers) {
        std::snprintf(buf, sizeof(buf), "trigger: cycle=%zu class=%s time_ms=%.3f\n",
                      t.cycle_index, t.class_label.c_str(), t.time_ms);
        text += buf;
    }
    return text;
}

} // namespace smartpam
