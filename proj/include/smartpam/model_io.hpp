#ifndef SMARTPAM_MODEL_IO_HPP
#define SMARTPAM_MODEL_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "smartpam/model.hpp"
#include "smartpam/tiler.hpp"

namespace smartpam {

/// CRC-32 (IEEE 802.3, reflected 0xEDB88320).
std::uint32_t crc32(const std::uint8_t* data, std::size_t len);

/// Serializes a model to the two-part on-disk format: a line-oriented text
/// manifest describing the architecture, then the raw little-endian float32
/// blob (per layer, weights [out][in][tap] then bias; finally the dense
/// weights [out][in] then bias). Writes a temp file and renames into place.
void save_model(const std::string& path, const ModelSpec& model);

/// Loads and validates a model file. Checksum mismatch -> CorruptModelError;
/// manifest/blob structural disagreement -> MalformedModelError; unknown
/// manifest version -> UnsupportedVersionError.
ModelSpec load_model(const std::string& path);

/// Weight blob exactly as stored on disk.
std::vector<std::uint8_t> model_blob(const ModelSpec& model);

/// Tile plans persist as structured text.
void save_plan(const std::string& path, const TilePlan& plan);
TilePlan load_plan(const std::string& path);

std::string format_tile_plan(const TilePlan& plan);
std::string format_memory_report(const MemoryReport& report);

} // namespace smartpam

#endif
