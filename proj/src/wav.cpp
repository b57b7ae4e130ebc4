#include "smartpam/wav.hpp"

#include <cstring>
#include <fstream>

#include "file_util.hpp"

namespace smartpam {

namespace {

std::uint16_t read_u16(const std::vector<std::uint8_t>& b, std::size_t pos) {
    return static_cast<std::uint16_t>(b[pos] | (b[pos + 1] << 8));
}

std::uint32_t read_u32(const std::vector<std::uint8_t>& b, std::size_t pos) {
    return static_cast<std::uint32_t>(b[pos]) | (static_cast<std::uint32_t>(b[pos + 1]) << 8) |
           (static_cast<std::uint32_t>(b[pos + 2]) << 16) |
           (static_cast<std::uint32_t>(b[pos + 3]) << 24);
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

void append_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

bool tag_is(const std::vector<std::uint8_t>& b, std::size_t pos, const char* tag) {
    return std::memcmp(b.data() + pos, tag, 4) == 0;
}

} // namespace

WavClip parse_wav(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 12) {
        throw WavError("not a WAV file: shorter than the RIFF header");
    }
    if (!tag_is(bytes, 0, "RIFF")) {
        throw WavError("not a WAV file: missing RIFF tag");
    }
    if (!tag_is(bytes, 8, "WAVE")) {
        throw WavError("not a WAV file: missing WAVE tag");
    }

    WavClip clip;
    bool have_fmt = false;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::size_t chunk_size = read_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;

        if (tag_is(bytes, pos, "fmt ")) {
            if (chunk_size < 16 || body + 16 > bytes.size()) {
                throw WavError("truncated fmt chunk");
            }
            const std::uint16_t format_tag = read_u16(bytes, body);
            clip.channel_count = read_u16(bytes, body + 2);
            clip.declared_sample_rate_hz = read_u32(bytes, body + 4);
            clip.bits_per_sample = read_u16(bytes, body + 14);

            if (format_tag != 1) {
                throw WavError("unsupported format tag " + std::to_string(format_tag) +
                               ": integer PCM required");
            }
            if (clip.channel_count != 1) {
                throw WavError("mono required, file has " +
                               std::to_string(clip.channel_count) + " channels");
            }
            if (clip.bits_per_sample != 16) {
                throw WavError("16-bit samples required, file has " +
                               std::to_string(clip.bits_per_sample) + " bits");
            }
            if (clip.declared_sample_rate_hz == 0) {
                throw WavError("declared sample rate is zero");
            }
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            if (!have_fmt) {
                throw WavError("data chunk before fmt chunk");
            }
            const std::size_t available = bytes.size() - body;
            if (chunk_size > available) {
                throw WavError("truncated data chunk: expected " +
                               std::to_string(chunk_size) + " bytes, got " +
                               std::to_string(available));
            }
            if (chunk_size % 2 != 0) {
                throw WavError("data chunk size is odd for 16-bit samples");
            }
            const std::size_t n = chunk_size / 2;
            clip.stream.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                clip.stream.samples[i] =
                    static_cast<std::int16_t>(read_u16(bytes, body + 2 * i));
            }
            have_data = true;
        }
        // Other chunk types (LIST, fact, ...) are skipped.

        const std::size_t padded = chunk_size + (chunk_size % 2); // chunks are word-aligned
        if (padded > bytes.size() - body) {
            if (have_data) break;
            throw WavError("chunk extends past end of file");
        }
        pos = body + padded;
    }

    if (!have_fmt) throw WavError("missing fmt chunk");
    if (!have_data) throw WavError("missing data chunk");

    clip.stream.sample_rate_hz = clip.declared_sample_rate_hz;
    return clip;
}

WavClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw WavError("cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioStream& stream) {
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(stream.samples.size() * 2);
    const std::uint32_t rate = static_cast<std::uint32_t>(stream.sample_rate_hz);

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    append_tag(out, "RIFF");
    append_u32(out, 36 + data_bytes);
    append_tag(out, "WAVE");
    append_tag(out, "fmt ");
    append_u32(out, 16);
    append_u16(out, 1); // integer PCM
    append_u16(out, 1); // mono
    append_u32(out, rate);
    append_u32(out, rate * 2); // byte rate
    append_u16(out, 2);        // block align
    append_u16(out, 16);       // bits per sample
    append_tag(out, "data");
    append_u32(out, data_bytes);
    for (std::int16_t s : stream.samples) {
        append_u16(out, static_cast<std::uint16_t>(s));
    }
    return out;
}

void write_wav(const std::string& path, const AudioStream& stream) {
    const std::vector<std::uint8_t> bytes = encode_wav(stream);
    detail::write_file_atomically(path, reinterpret_cast<const char*>(bytes.data()),
                                  bytes.size());
}

} // namespace smartpam
