#include "smartpam/tiler.hpp"

#include <algorithm>

namespace smartpam {

IndexRange layer_receptive_range(const IndexRange& out_range, const ConvLayerSpec& layer) {
    return IndexRange{
        out_range.start * layer.stride,
        out_range.end * layer.stride + (layer.kernel - 1) * layer.dilation,
    };
}

IndexRange stack_receptive_range(const IndexRange& out_range,
                                 const std::vector<ConvLayerSpec>& conv_layers) {
    IndexRange range = out_range;
    for (auto it = conv_layers.rbegin(); it != conv_layers.rend(); ++it) {
        range = layer_receptive_range(range, *it);
    }
    return range;
}

TilePlan make_tile_plan(const ModelSpec& model, std::size_t n_slices) {
    const std::size_t final_length = model.final_conv_length();
    if (n_slices < 1 || n_slices > final_length) {
        throw Error("invalid slice count " + std::to_string(n_slices) +
                    " for final output length " + std::to_string(final_length));
    }

    TilePlan plan;
    plan.n_slices = n_slices;
    plan.window_samples = model.window_samples;
    plan.final_length = final_length;
    plan.slices.reserve(n_slices);

    // Near-equal split, remainder assigned to the earliest slices.
    const std::size_t base = final_length / n_slices;
    const std::size_t remainder = final_length % n_slices;

    std::size_t cursor = 0;
    for (std::size_t s = 0; s < n_slices; ++s) {
        const std::size_t len = base + (s < remainder ? 1 : 0);
        TileSlice slice;
        slice.out_range = IndexRange{cursor, cursor + len - 1};
        cursor += len;

        // Walk the stack backwards; per_layer_ranges[k] is the range of
        // layer k's output this slice needs (the last one is out_range).
        slice.per_layer_ranges.assign(model.conv_layers.size(), IndexRange{});
        IndexRange range = slice.out_range;
        for (std::size_t k = model.conv_layers.size(); k-- > 0;) {
            slice.per_layer_ranges[k] = range;
            range = layer_receptive_range(range, model.conv_layers[k]);
        }
        slice.in_range = range;

        // Valid padding keeps the fold inside the window; anything else
        // means the plan and model disagree.
        if (slice.in_range.end >= model.window_samples) {
            throw Error("internal consistency error: receptive range [" +
                        std::to_string(slice.in_range.start) + "," +
                        std::to_string(slice.in_range.end) + "] exceeds window " +
                        std::to_string(model.window_samples));
        }
        plan.slices.push_back(std::move(slice));
    }
    return plan;
}

namespace {

void check_plan(const ModelSpec& model, const TilePlan& plan) {
    // A stale plan can differ in window size, layer geometry, or slice
    // split; recomputing the plan and comparing catches all three.
    bool ok = plan.window_samples == model.window_samples &&
              plan.n_slices >= 1 && plan.n_slices <= plan.final_length;
    if (ok) {
        try {
            ok = make_tile_plan(model, plan.n_slices) == plan;
        } catch (const Error&) {
            ok = false; // slice count infeasible for this model
        }
    }
    if (!ok) {
        throw StalePlanError("stale plan: tile plan was not built for this model");
    }
}

} // namespace

Classification tiled_forward(const PlanarTensor& window, const ModelSpec& model,
                             const TilePlan& plan) {
    if (window.channels() != 1) {
        throw ShapeError("channel mismatch: model input must have a single channel");
    }
    if (window.length() != model.window_samples) {
        throw ShapeError("window length " + std::to_string(window.length()) +
                         " does not match model window_samples " +
                         std::to_string(model.window_samples));
    }
    check_plan(model, plan);

    const std::size_t final_channels = model.conv_layers.back().out_channels;
    PlanarTensor concat(final_channels, plan.final_length);

    for (const TileSlice& slice : plan.slices) {
        PlanarTensor x = window.slice(slice.in_range.start, slice.in_range.length());
        for (std::size_t k = 0; k < model.conv_layers.size(); ++k) {
            x = conv1d_forward(x, model.conv_layers[k]);
            // The backward fold sizes each input to exactly the receptive
            // field of the wanted output, so the produced length already
            // equals the per-layer range; a mismatch is a plan bug.
            if (x.length() != slice.per_layer_ranges[k].length()) {
                throw Error("internal consistency error: slice produced " +
                            std::to_string(x.length()) + " outputs at layer " +
                            std::to_string(k) + ", plan expects " +
                            std::to_string(slice.per_layer_ranges[k].length()));
            }
        }
        for (std::size_t c = 0; c < final_channels; ++c) {
            for (std::size_t i = 0; i < x.length(); ++i) {
                concat.at(c, slice.out_range.start + i) = x.at(c, i);
            }
        }
    }
    return classify_features(concat, model);
}

namespace {

constexpr std::size_t kBytesPerElement = 4;

const char* kUntiledAssumptions =
    "activation buffers of 4-byte elements; a buffer lives from the step "
    "producing it until its last consumer finishes; a layer's input and "
    "output coexist; weights reside in flash and are not counted; the raw "
    "acquisition buffer is not counted; the stack input counted is the full "
    "standardized window";

const char* kTiledAssumptions =
    "activation buffers of 4-byte elements; a buffer lives from the step "
    "producing it until its last consumer finishes; a layer's input and "
    "output coexist; weights reside in flash and are not counted; the raw "
    "acquisition buffer is not counted; the stack input counted per slice is "
    "that slice's standardized receptive field; the final-output "
    "concatenation buffer is live for the whole run; per-slice buffers are "
    "not retained across slices";

} // namespace

MemoryReport peak_activation_bytes(const ModelSpec& model, const TilePlan* plan) {
    MemoryReport report;
    const std::vector<std::size_t> lengths = model.layer_output_lengths();

    auto layer_bytes = [&](std::size_t k) {
        return lengths[k] * model.conv_layers[k].out_channels * kBytesPerElement;
    };

    if (plan == nullptr) {
        report.assumptions = kUntiledAssumptions;
        const std::size_t window_bytes = model.window_samples * kBytesPerElement;
        report.steps.push_back({"window", window_bytes});
        for (std::size_t k = 0; k < model.conv_layers.size(); ++k) {
            const std::size_t in_bytes = (k == 0) ? window_bytes : layer_bytes(k - 1);
            report.steps.push_back({"conv" + std::to_string(k + 1), in_bytes + layer_bytes(k)});
        }
        report.steps.push_back(
            {"dense", layer_bytes(model.conv_layers.size() - 1) +
                          model.dense.out_features * kBytesPerElement});
    } else {
        check_plan(model, *plan);
        report.assumptions = kTiledAssumptions;
        const std::size_t concat_bytes = plan->final_length *
                                         model.conv_layers.back().out_channels *
                                         kBytesPerElement;
        for (std::size_t s = 0; s < plan->slices.size(); ++s) {
            const TileSlice& slice = plan->slices[s];
            auto slice_layer_bytes = [&](std::size_t k) {
                return slice.per_layer_ranges[k].length() *
                       model.conv_layers[k].out_channels * kBytesPerElement;
            };
            for (std::size_t k = 0; k < model.conv_layers.size(); ++k) {
                const std::size_t in_bytes = (k == 0)
                                                 ? slice.in_range.length() * kBytesPerElement
                                                 : slice_layer_bytes(k - 1);
                report.steps.push_back({"slice" + std::to_string(s) + ".conv" +
                                            std::to_string(k + 1),
                                        concat_bytes + in_bytes + slice_layer_bytes(k)});
            }
        }
        report.steps.push_back(
            {"dense", concat_bytes + model.dense.out_features * kBytesPerElement});
    }

    report.peak_bytes = 0;
    for (const MemoryStep& step : report.steps) {
        report.peak_bytes = std::max(report.peak_bytes, step.live_bytes);
    }
    return report;
}

} // namespace smartpam
