#include "smartpam/config_io.hpp"

#include <cstdio>
#include <sstream>

#include "file_util.hpp"

namespace smartpam {

namespace {

std::string trim(const std::string& s) {
    const std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

SimConfig parse_sim_config(const std::string& text) {
    SimConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value_text = trim(line.substr(eq + 1));
        double value = 0.0;
        try {
            value = std::stod(value_text);
        } catch (const std::exception&) {
            throw Error("config line " + std::to_string(line_no) + ": bad number '" +
                        value_text + "'");
        }

        if (key == "supply_voltage_v") {
            config.profile.supply_voltage_v = value;
        } else if (key == "shunt_ohms") {
            config.profile.shunt_ohms = value;
        } else if (key == "current_sleep_ma") {
            config.profile.stage_current_ma[Stage::Sleep] = value;
        } else if (key == "current_preprocess_ma") {
            config.profile.stage_current_ma[Stage::Preprocess] = value;
        } else if (key == "current_inference_ma") {
            config.profile.stage_current_ma[Stage::Inference] = value;
        } else if (key == "current_record_ma") {
            config.profile.stage_current_ma[Stage::Record] = value;
        } else if (key == "baseline_cycle_mj") {
            config.profile.baseline_cycle_mj = value;
        } else if (key == "smart_cycle_mj") {
            config.profile.smart_cycle_mj = value;
        } else if (key == "window_ms") {
            config.timing.window_ms = value;
        } else if (key == "duration_preprocess_ms") {
            config.timing.preprocess_ms = value;
            auto& measured = config.profile.measured_stage_durations_ms;
            if (!measured) measured.emplace();
            (*measured)[Stage::Preprocess] = value;
        } else if (key == "duration_inference_ms") {
            config.timing.inference_ms = value;
            auto& measured = config.profile.measured_stage_durations_ms;
            if (!measured) measured.emplace();
            (*measured)[Stage::Inference] = value;
        } else {
            throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key +
                        "'");
        }
    }
    config.profile.validate();
    if (config.timing.window_ms <= 0.0) {
        throw Error("config: window_ms must be positive");
    }
    return config;
}

SimConfig load_sim_config(const std::string& path) {
    return parse_sim_config(detail::read_file(path));
}

std::string format_sim_config(const SimConfig& config) {
    char buf[64];
    std::string text;
    auto add = [&](const char* key, double value) {
        std::snprintf(buf, sizeof(buf), "%s = %.6g\n", key, value);
        text += buf;
    };
    add("supply_voltage_v", config.profile.supply_voltage_v);
    add("shunt_ohms", config.profile.shunt_ohms);
    add("current_sleep_ma", config.profile.current_ma(Stage::Sleep));
    add("current_preprocess_ma", config.profile.current_ma(Stage::Preprocess));
    add("current_inference_ma", config.profile.current_ma(Stage::Inference));
    add("current_record_ma", config.profile.current_ma(Stage::Record));
    add("baseline_cycle_mj", config.profile.baseline_cycle_mj);
    add("smart_cycle_mj", config.profile.smart_cycle_mj);
    add("window_ms", config.timing.window_ms);
    add("duration_preprocess_ms", config.timing.preprocess_ms);
    add("duration_inference_ms", config.timing.inference_ms);
    return text;
}

void save_sim_config(const std::string& path, const SimConfig& config) {
    detail::write_file_atomically(path, format_sim_config(config));
}

} // namespace smartpam
