#ifndef SMARTPAM_SIM_HPP
#define SMARTPAM_SIM_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smartpam/stream.hpp"

namespace smartpam {

enum class Stage { Sleep, Preprocess, Inference, Record };

const char* stage_name(Stage stage);

/// Electrical model of the device. Stage currents are configuration, not
/// measurement: the defaults are calibrated so the standard timing model
/// reproduces the reference cycle energies (8.31 mJ smart, 7.03 mJ baseline).
struct DeviceProfile {
    double supply_voltage_v = 3.0;
    double shunt_ohms = 1.045;
    std::map<Stage, double> stage_current_ma = {
        {Stage::Sleep, 10.0},
        {Stage::Preprocess, 50.0},
        {Stage::Inference, 95.15},
        {Stage::Record, 54.879},
    };
    std::optional<std::map<Stage, double>> measured_stage_durations_ms;
    double baseline_cycle_mj = 7.03;
    double smart_cycle_mj = 8.31;

    double current_ma(Stage stage) const;
    void validate() const;
};

/// Per-window timing. The device's inference time is an input here, not a
/// measurement: this code runs on a desk, so the on-device numbers are
/// profile constants. Host-side timings are reported separately by `bench`
/// and never mixed with these.
struct TimingModel {
    double window_ms = 42.7;
    double preprocess_ms = 16.0;
    double inference_ms = 20.0;

    double total_active_ms() const { return preprocess_ms + inference_ms; }
};

struct TriggerEvent {
    std::size_t cycle_index = 0;
    std::string class_label;
    double time_ms = 0.0;
};

struct SimReport {
    std::size_t windows_total = 0;
    std::size_t windows_processed = 0; // windows that went through preprocess+inference
    std::size_t windows_recorded = 0;  // F1 post-trigger windows written to storage
    std::size_t deadline_misses = 0;
    std::size_t buffer_overruns = 0; // windows dropped while the CPU was still busy
    double energy_mj = 0.0;
    double baseline_energy_mj = 0.0;
    double overhead_vs_baseline = 0.0;
    std::vector<TriggerEvent> triggers;
    std::vector<WindowRecord> records; // F2 window log
    std::string assumptions;
};

enum class FirmwareMode { F1, F2 };

/// Ohm's law over the measurement shunt: mV across ohms -> mA.
double shunt_current_ma(double v_shunt_mv, double shunt_ohms);

/// Energy of one analysis window: active stages at their currents, the rest
/// of the window asleep (clamped to zero when the stages overrun).
double cycle_energy_mj(const DeviceProfile& profile, const TimingModel& timing);

/// Energy of one baseline (record-only) window: the whole window at the
/// record-stage current.
double baseline_window_energy_mj(const DeviceProfile& profile, double window_ms);

struct DeadlineResult {
    bool met = false;
    double utilization = 0.0;
};

DeadlineResult deadline_check(const TimingModel& timing);

/// Discrete-event run over the stream with ping-pong acquisition: while one
/// buffer fills, the CPU processes the other. Processing that outlasts the
/// fill time marks a deadline miss and drops (overruns) the freshly filled
/// window. F1 runs detection cycles and records the rest of a triggered
/// cycle; F2 logs every window. Problems are report fields, never failures.
SimReport simulate(const AudioStream& stream, const ModelSpec& model, const TilePlan* plan,
                   FirmwareMode mode, const DeviceProfile& profile, const TimingModel& timing,
                   const DetectionConfig& config);

std::string format_sim_report(const SimReport& report);

} // namespace smartpam

#endif
