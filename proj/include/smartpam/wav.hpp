#ifndef SMARTPAM_WAV_HPP
#define SMARTPAM_WAV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "smartpam/stream.hpp"

namespace smartpam {

/// Decoded WAV plus the container metadata it came with. Only mono 16-bit
/// integer PCM is accepted; any declared sample rate is, with downstream
/// duration math using the declared rate.
struct WavClip {
    AudioStream stream;
    std::size_t declared_sample_rate_hz = 0;
    std::size_t bits_per_sample = 0;
    std::size_t channel_count = 0;
};

/// Strict RIFF/WAVE reader for the supported subset. Malformed input raises
/// WavError with a description; truncated data chunks name the expected and
/// actual byte counts.
WavClip read_wav(const std::string& path);

/// Parses from memory; the file reader and the fuzz tests share this path.
WavClip parse_wav(const std::vector<std::uint8_t>& bytes);

/// Canonical 44-byte-header mono 16-bit PCM writer for fixtures and demos.
void write_wav(const std::string& path, const AudioStream& stream);

/// In-memory encoder matching write_wav.
std::vector<std::uint8_t> encode_wav(const AudioStream& stream);

} // namespace smartpam

#endif
