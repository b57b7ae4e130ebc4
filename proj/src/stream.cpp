#include "smartpam/stream.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace smartpam {

bool DetectionConfig::is_positive(const std::string& label) const {
    return std::find(positive_classes.begin(), positive_classes.end(), label) !=
           positive_classes.end();
}

PlanarTensor standardize_window(std::span<const std::int16_t> raw) {
    if (raw.empty()) {
        throw Error("empty window");
    }
    const std::size_t n = raw.size();

    double mean = 0.0;
    for (std::int16_t s : raw) mean += static_cast<double>(s);
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (std::int16_t s : raw) {
        const double d = static_cast<double>(s) - mean;
        var += d * d;
    }
    var /= static_cast<double>(n); // population variance
    const double std_dev = std::sqrt(var);

    PlanarTensor out(1, n);
    if (std_dev < 1e-8) {
        return out; // degenerate window: all zeros
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.at(0, i) = static_cast<float>((static_cast<double>(raw[i]) - mean) / std_dev);
    }
    return out;
}

std::vector<std::span<const std::int16_t>> windows(const AudioStream& stream,
                                                   std::size_t window_samples) {
    std::vector<std::span<const std::int16_t>> out;
    if (window_samples == 0) {
        throw Error("window_samples must be positive");
    }
    const std::size_t count = stream.samples.size() / window_samples;
    out.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        out.emplace_back(stream.samples.data() + w * window_samples, window_samples);
    }
    return out;
}

double window_duration_ms(std::size_t window_samples, std::size_t sample_rate_hz) {
    return static_cast<double>(window_samples) * 1000.0 /
           static_cast<double>(sample_rate_hz);
}

std::size_t windows_per_cycle(const DetectionConfig& config, std::size_t sample_rate_hz,
                              std::size_t window_samples) {
    const double samples = config.cycle_seconds * static_cast<double>(sample_rate_hz);
    return static_cast<std::size_t>(samples) / window_samples;
}

std::vector<WindowRecord> analyse_and_record(const AudioStream& stream,
                                             const ModelSpec& model, const TilePlan* plan) {
    std::vector<WindowRecord> records;
    const auto raw_windows = windows(stream, model.window_samples);
    records.reserve(raw_windows.size());
    const double duration = window_duration_ms(model.window_samples, stream.sample_rate_hz);

    for (std::size_t w = 0; w < raw_windows.size(); ++w) {
        const PlanarTensor x = standardize_window(raw_windows[w]);
        const Classification c =
            plan ? tiled_forward(x, model, *plan) : model_forward(x, model);
        WindowRecord record;
        record.index = w;
        record.t_start_ms = static_cast<double>(w) * duration;
        record.label = c.argmax_label;
        record.probabilities = c.probabilities;
        records.push_back(std::move(record));
    }
    return records;
}

DetectionOutcome detection_cycle(const AudioStream& stream, const ModelSpec& model,
                                 const TilePlan* plan, const DetectionConfig& config) {
    DetectionOutcome outcome;
    for (const std::string& label : model.class_labels) outcome.counts[label] = 0;

    const auto raw_windows = windows(stream, model.window_samples);
    const std::size_t cycle_cap =
        windows_per_cycle(config, stream.sample_rate_hz, model.window_samples);
    const std::size_t n = std::min(raw_windows.size(), cycle_cap);

    for (std::size_t w = 0; w < n; ++w) {
        const PlanarTensor x = standardize_window(raw_windows[w]);
        const Classification c =
            plan ? tiled_forward(x, model, *plan) : model_forward(x, model);
        outcome.counts[c.argmax_label] += 1;
        outcome.windows_evaluated += 1;

        if (config.is_positive(c.argmax_label) &&
            outcome.counts[c.argmax_label] >= config.threshold) {
            // Early exit: only persistent vocalizations reach this point,
            // and exactly one class can cross the threshold on this window.
            outcome.triggered = true;
            outcome.trigger_class = c.argmax_label;
            return outcome;
        }
    }
    return outcome;
}

std::optional<std::string> trigger_decision(const std::map<std::string, std::size_t>& counts,
                                            const DetectionConfig& config) {
    std::optional<std::string> best;
    std::size_t best_count = 0;
    for (const std::string& label : config.positive_classes) {
        auto it = counts.find(label);
        if (it == counts.end()) continue;
        // Strictly greater keeps the earlier class on count ties.
        if (it->second >= config.threshold && it->second > best_count) {
            best = label;
            best_count = it->second;
        }
    }
    return best;
}

std::string format_window_record(const WindowRecord& record) {
    char head[96];
    std::snprintf(head, sizeof(head), "%zu,%.3f,%s", record.index, record.t_start_ms,
                  record.label.c_str());
    std::string line = head;
    for (float p : record.probabilities) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), ",%.6f", static_cast<double>(p));
        line += buf;
    }
    return line;
}

std::string format_detection_outcome(const DetectionOutcome& outcome,
                                     const std::vector<std::string>& class_labels) {
    std::string text;
    text += "triggered: ";
    text += outcome.triggered ? "yes" : "no";
    text += "\n";
    text += "trigger_class: ";
    text += outcome.trigger_class ? *outcome.trigger_class : "-";
    text += "\n";
    text += "windows_evaluated: " + std::to_string(outcome.windows_evaluated) + "\n";
    text += "counts:";
    for (const std::string& label : class_labels) {
        auto it = outcome.counts.find(label);
        const std::size_t count = (it == outcome.counts.end()) ? 0 : it->second;
        text += " " + label + "=" + std::to_string(count);
    }
    text += "\n";
    return text;
}

} // namespace smartpam
