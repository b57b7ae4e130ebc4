#ifndef SMARTPAM_STREAM_HPP
#define SMARTPAM_STREAM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smartpam/tiler.hpp"

namespace smartpam {

/// 16-bit PCM sample stream, as delivered by the WAV reader or synthesized
/// by tests and tools.
struct AudioStream {
    std::vector<std::int16_t> samples;
    std::size_t sample_rate_hz = 24000;

    double duration_ms() const {
        return static_cast<double>(samples.size()) * 1000.0 /
               static_cast<double>(sample_rate_hz);
    }
};

struct WindowRecord {
    std::size_t index = 0;
    double t_start_ms = 0.0;
    std::string label;
    std::vector<float> probabilities;
};

struct DetectionConfig {
    double cycle_seconds = 10.0;
    std::size_t threshold = 30;
    // Order matters: it is the tie-break order when several classes qualify
    // with equal counts.
    std::vector<std::string> positive_classes = {"male", "female", "chick"};

    bool is_positive(const std::string& label) const;
};

struct DetectionOutcome {
    bool triggered = false;
    std::optional<std::string> trigger_class;
    std::map<std::string, std::size_t> counts;
    std::size_t windows_evaluated = 0;
};

/// Z-score standardization with the population standard deviation; windows
/// with std below 1e-8 come back as all zeros.
PlanarTensor standardize_window(std::span<const std::int16_t> raw);

/// Consecutive non-overlapping windows; a trailing partial window is dropped.
/// Always floor(samples / window_samples) views into the stream.
std::vector<std::span<const std::int16_t>> windows(const AudioStream& stream,
                                                   std::size_t window_samples);

double window_duration_ms(std::size_t window_samples, std::size_t sample_rate_hz);

/// Windows a detection cycle holds: floor(cycle_seconds * rate / window_samples).
std::size_t windows_per_cycle(const DetectionConfig& config, std::size_t sample_rate_hz,
                              std::size_t window_samples);

/// F2 semantics: standardize + classify every window, in order. Uses the
/// tiled executor when a plan is given; records are identical either way.
std::vector<WindowRecord> analyse_and_record(const AudioStream& stream,
                                             const ModelSpec& model,
                                             const TilePlan* plan = nullptr);

/// F1 semantics for one cycle: classify windows sequentially, counting each
/// window's argmax class, and stop the moment any single positive class
/// reaches the threshold. Counts start fresh each call.
DetectionOutcome detection_cycle(const AudioStream& stream, const ModelSpec& model,
                                 const TilePlan* plan, const DetectionConfig& config);

/// Positive class with count >= threshold; several qualifying -> highest
/// count, ties broken by class-label order in the config set.
std::optional<std::string> trigger_decision(const std::map<std::string, std::size_t>& counts,
                                            const DetectionConfig& config);

/// One log line per record: index,t_start_ms,label,p0,p1,... with
/// probabilities at 6 decimal places.
std::string format_window_record(const WindowRecord& record);

/// Structured-text rendering with counts in class-label order.
std::string format_detection_outcome(const DetectionOutcome& outcome,
                                     const std::vector<std::string>& class_labels);

} // namespace smartpam

#endif
