#include "smartpam/model_io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "file_util.hpp"

namespace smartpam {

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int bit = 0; bit < 8; ++bit) {
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : (c >> 1);
            }
            t[i] = c;
        }
        return t;
    }();

    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

namespace {

constexpr const char* kMagic = "smartpam-model";
constexpr int kVersion = 1;
constexpr const char* kHeaderEnd = "---";

void append_f32_le(std::vector<std::uint8_t>& out, float value) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    out.push_back(static_cast<std::uint8_t>(bits & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFFu));
    out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFFu));
}

float read_f32_le(const std::uint8_t* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                               (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    float value;
    std::memcpy(&value, &bits, sizeof(value));
    return value;
}

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ",";
        out += labels[i];
    }
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

using detail::read_file;
using detail::write_file_atomically;

// key=value pairs out of a manifest layer line.
std::size_t parse_field(const std::string& line, const std::string& key) {
    const std::string needle = key + "=";
    const std::size_t pos = line.find(needle);
    if (pos == std::string::npos) {
        throw MalformedModelError("malformed model: missing field '" + key + "' in: " + line);
    }
    try {
        return static_cast<std::size_t>(std::stoull(line.substr(pos + needle.size())));
    } catch (const std::exception&) {
        throw MalformedModelError("malformed model: bad value for '" + key + "' in: " + line);
    }
}

std::string parse_string_field(const std::string& line, const std::string& key) {
    const std::string needle = key + "=";
    const std::size_t pos = line.find(needle);
    if (pos == std::string::npos) {
        throw MalformedModelError("malformed model: missing field '" + key + "' in: " + line);
    }
    const std::size_t start = pos + needle.size();
    std::size_t end = line.find(' ', start);
    if (end == std::string::npos) end = line.size();
    return line.substr(start, end - start);
}

} // namespace

std::vector<std::uint8_t> model_blob(const ModelSpec& model) {
    std::vector<std::uint8_t> blob;
    blob.reserve(param_count(model).total * 4);
    for (const ConvLayerSpec& layer : model.conv_layers) {
        for (float w : layer.weights) append_f32_le(blob, w);
        for (float b : layer.bias) append_f32_le(blob, b);
    }
    for (float w : model.dense.weights) append_f32_le(blob, w);
    for (float b : model.dense.bias) append_f32_le(blob, b);
    return blob;
}

void save_model(const std::string& path, const ModelSpec& model) {
    model.validate();
    const std::vector<std::uint8_t> blob = model_blob(model);

    std::ostringstream head;
    head << kMagic << " v" << kVersion << "\n";
    head << "window_samples " << model.window_samples << "\n";
    head << "sample_rate_hz " << model.sample_rate_hz << "\n";
    head << "classes " << join_labels(model.class_labels) << "\n";
    for (const ConvLayerSpec& layer : model.conv_layers) {
        head << "conv in=" << layer.in_channels << " out=" << layer.out_channels
             << " kernel=" << layer.kernel << " stride=" << layer.stride
             << " dilation=" << layer.dilation
             << " act=" << (layer.activation == Activation::ReLU ? "relu" : "none") << "\n";
    }
    head << "dense in=" << model.dense.in_features << " out=" << model.dense.out_features
         << "\n";
    head << "blob_bytes " << blob.size() << "\n";
    char crc_buf[16];
    std::snprintf(crc_buf, sizeof(crc_buf), "%08x", crc32(blob.data(), blob.size()));
    head << "blob_crc32 " << crc_buf << "\n";
    head << kHeaderEnd << "\n";

    std::string bytes = head.str();
    bytes.append(reinterpret_cast<const char*>(blob.data()), blob.size());
    write_file_atomically(path, bytes);
}

ModelSpec load_model(const std::string& path) {
    const std::string bytes = read_file(path);

    // Manifest is everything up to the first "---" line; the blob follows.
    std::size_t cursor = 0;
    std::vector<std::string> lines;
    bool saw_end = false;
    while (cursor < bytes.size()) {
        const std::size_t eol = bytes.find('\n', cursor);
        if (eol == std::string::npos) break;
        std::string line = bytes.substr(cursor, eol - cursor);
        cursor = eol + 1;
        if (line == kHeaderEnd) {
            saw_end = true;
            break;
        }
        lines.push_back(std::move(line));
    }
    if (!saw_end || lines.empty()) {
        throw MalformedModelError("malformed model: missing manifest terminator");
    }

    {
        std::istringstream first(lines[0]);
        std::string magic, version;
        first >> magic >> version;
        if (magic != kMagic) {
            throw MalformedModelError("malformed model: bad magic '" + magic + "'");
        }
        if (version != "v" + std::to_string(kVersion)) {
            throw UnsupportedVersionError("unsupported version: " + version);
        }
    }

    ModelSpec model;
    std::size_t declared_blob_bytes = 0;
    std::uint32_t declared_crc = 0;
    bool have_blob_bytes = false, have_crc = false, have_dense = false;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream in(lines[i]);
        std::string key;
        in >> key;
        if (key == "window_samples") {
            in >> model.window_samples;
        } else if (key == "sample_rate_hz") {
            in >> model.sample_rate_hz;
        } else if (key == "classes") {
            std::string csv;
            in >> csv;
            model.class_labels = split_csv(csv);
        } else if (key == "conv") {
            ConvLayerSpec layer;
            layer.in_channels = parse_field(lines[i], "in");
            layer.out_channels = parse_field(lines[i], "out");
            layer.kernel = parse_field(lines[i], "kernel");
            layer.stride = parse_field(lines[i], "stride");
            layer.dilation = parse_field(lines[i], "dilation");
            const std::string act = parse_string_field(lines[i], "act");
            if (act == "relu") {
                layer.activation = Activation::ReLU;
            } else if (act == "none") {
                layer.activation = Activation::None;
            } else {
                throw MalformedModelError("malformed model: unknown activation '" + act + "'");
            }
            model.conv_layers.push_back(std::move(layer));
        } else if (key == "dense") {
            model.dense.in_features = parse_field(lines[i], "in");
            model.dense.out_features = parse_field(lines[i], "out");
            have_dense = true;
        } else if (key == "blob_bytes") {
            in >> declared_blob_bytes;
            have_blob_bytes = true;
        } else if (key == "blob_crc32") {
            std::string hex;
            in >> hex;
            try {
                declared_crc = static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16));
            } catch (const std::exception&) {
                throw MalformedModelError("malformed model: bad checksum '" + hex + "'");
            }
            have_crc = true;
        } else {
            throw MalformedModelError("malformed model: unknown manifest key '" + key + "'");
        }
    }
    if (!have_blob_bytes || !have_crc || !have_dense || model.conv_layers.empty()) {
        throw MalformedModelError("malformed model: incomplete manifest");
    }

    const std::size_t blob_len = bytes.size() - cursor;
    if (blob_len != declared_blob_bytes) {
        throw MalformedModelError("malformed model: blob is " + std::to_string(blob_len) +
                                  " bytes, manifest declares " +
                                  std::to_string(declared_blob_bytes));
    }

    std::size_t expected = 0;
    for (const ConvLayerSpec& layer : model.conv_layers) expected += layer.param_count();
    expected += model.dense.param_count();
    if (declared_blob_bytes != expected * 4) {
        throw MalformedModelError("malformed model: blob declares " +
                                  std::to_string(declared_blob_bytes) +
                                  " bytes, architecture needs " +
                                  std::to_string(expected * 4));
    }

    const std::uint8_t* blob = reinterpret_cast<const std::uint8_t*>(bytes.data()) + cursor;
    if (crc32(blob, blob_len) != declared_crc) {
        throw CorruptModelError("corrupt model: blob checksum mismatch");
    }

    const std::uint8_t* p = blob;
    auto take = [&p](std::vector<float>& dst, std::size_t count) {
        dst.resize(count);
        for (std::size_t i = 0; i < count; ++i, p += 4) dst[i] = read_f32_le(p);
    };
    for (ConvLayerSpec& layer : model.conv_layers) {
        take(layer.weights, layer.weight_count());
        take(layer.bias, layer.out_channels);
    }
    take(model.dense.weights, model.dense.out_features * model.dense.in_features);
    take(model.dense.bias, model.dense.out_features);

    try {
        model.validate();
    } catch (const Error& e) {
        throw MalformedModelError(std::string("malformed model: ") + e.what());
    }
    return model;
}

namespace {

constexpr const char* kPlanMagic = "smartpam-plan";

std::string range_text(const IndexRange& r) {
    return std::to_string(r.start) + ":" + std::to_string(r.end);
}

IndexRange parse_range(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) {
        throw Error("bad plan range '" + text + "'");
    }
    try {
        IndexRange r;
        r.start = static_cast<std::size_t>(std::stoull(text.substr(0, colon)));
        r.end = static_cast<std::size_t>(std::stoull(text.substr(colon + 1)));
        return r;
    } catch (const std::exception&) {
        throw Error("bad plan range '" + text + "'");
    }
}

} // namespace

void save_plan(const std::string& path, const TilePlan& plan) {
    std::ostringstream out;
    out << kPlanMagic << " v1\n";
    out << "n_slices " << plan.n_slices << "\n";
    out << "window_samples " << plan.window_samples << "\n";
    out << "final_length " << plan.final_length << "\n";
    for (const TileSlice& slice : plan.slices) {
        out << "slice out=" << range_text(slice.out_range)
            << " in=" << range_text(slice.in_range) << " layers=";
        for (std::size_t k = 0; k < slice.per_layer_ranges.size(); ++k) {
            if (k) out << ",";
            out << range_text(slice.per_layer_ranges[k]);
        }
        out << "\n";
    }
    write_file_atomically(path, out.str());
}

TilePlan load_plan(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != std::string(kPlanMagic) + " v1") {
        throw Error("unsupported plan file: " + path);
    }
    TilePlan plan;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "n_slices") {
            ls >> plan.n_slices;
        } else if (key == "window_samples") {
            ls >> plan.window_samples;
        } else if (key == "final_length") {
            ls >> plan.final_length;
        } else if (key == "slice") {
            TileSlice slice;
            slice.out_range = parse_range(parse_string_field(line, "out"));
            slice.in_range = parse_range(parse_string_field(line, "in"));
            for (const std::string& part : split_csv(parse_string_field(line, "layers"))) {
                slice.per_layer_ranges.push_back(parse_range(part));
            }
            plan.slices.push_back(std::move(slice));
        } else {
            throw Error("unknown plan key '" + key + "'");
        }
    }
    if (plan.slices.size() != plan.n_slices) {
        throw Error("plan file declares " + std::to_string(plan.n_slices) + " slices, has " +
                    std::to_string(plan.slices.size()));
    }
    return plan;
}

std::string format_tile_plan(const TilePlan& plan) {
    std::string text;
    text += "n_slices: " + std::to_string(plan.n_slices) + "\n";
    text += "final_length: " + std::to_string(plan.final_length) + "\n";
    for (std::size_t s = 0; s < plan.slices.size(); ++s) {
        const TileSlice& slice = plan.slices[s];
        text += "slice " + std::to_string(s) + ": out [" +
                std::to_string(slice.out_range.start) + "," +
                std::to_string(slice.out_range.end) + "] in [" +
                std::to_string(slice.in_range.start) + "," +
                std::to_string(slice.in_range.end) + "]\n";
    }
    return text;
}

std::string format_memory_report(const MemoryReport& report) {
    char buf[128];
    std::string text;
    for (const MemoryStep& step : report.steps) {
        text += "step " + step.label + ": " + std::to_string(step.live_bytes) + " B\n";
    }
    std::snprintf(buf, sizeof(buf), "peak: %zu B (%.1f kB)\n", report.peak_bytes,
                  static_cast<double>(report.peak_bytes) / 1024.0);
    text += buf;
    text += "assumptions: " + report.assumptions + "\n";
    return text;
}

} // namespace smartpam
