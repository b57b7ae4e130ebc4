#ifndef SMARTPAM_CONFIG_IO_HPP
#define SMARTPAM_CONFIG_IO_HPP

#include <string>

#include "smartpam/sim.hpp"

namespace smartpam {

/// Device profile + timing model as read from a config file. Keys carry
/// explicit units (current_inference_ma, duration_preprocess_ms, ...).
struct SimConfig {
    DeviceProfile profile;
    TimingModel timing;
};

/// Plain `key = value` text, '#' comments, unknown keys rejected.
SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::string& path);

std::string format_sim_config(const SimConfig& config);
void save_sim_config(const std::string& path, const SimConfig& config);

} // namespace smartpam

#endif
