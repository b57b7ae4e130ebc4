#ifndef SMARTPAM_TILER_HPP
#define SMARTPAM_TILER_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smartpam/model.hpp"

namespace smartpam {

/// Inclusive index range over a concrete tensor axis.
struct IndexRange {
    std::size_t start = 0;
    std::size_t end = 0; // inclusive

    std::size_t length() const { return end - start + 1; }
    bool operator==(const IndexRange&) const = default;
};

/// One slice of a tile plan: which final-layer outputs it produces, which
/// input samples it needs, and the intermediate ranges in between.
struct TileSlice {
    IndexRange out_range;                     // over final conv output positions
    IndexRange in_range;                      // over input samples
    std::vector<IndexRange> per_layer_ranges; // one per conv layer output

    bool operator==(const TileSlice&) const = default;
};

struct TilePlan {
    std::size_t n_slices = 0;
    std::size_t window_samples = 0;
    std::size_t final_length = 0;
    std::vector<TileSlice> slices;

    bool operator==(const TilePlan&) const = default;
};

struct MemoryStep {
    std::string label;
    std::size_t live_bytes = 0;
};

struct MemoryReport {
    std::vector<MemoryStep> steps;
    std::size_t peak_bytes = 0;
    std::string assumptions;
};

/// Input range a single layer needs to produce out_range:
/// [start*stride, end*stride + (kernel-1)*dilation].
IndexRange layer_receptive_range(const IndexRange& out_range, const ConvLayerSpec& layer);

/// Folds layer_receptive_range from the last layer back to the input.
IndexRange stack_receptive_range(const IndexRange& out_range,
                                 const std::vector<ConvLayerSpec>& conv_layers);

/// Splits the final conv output into n_slices near-equal contiguous ranges
/// (earliest slices take the remainder) and derives every slice's input and
/// intermediate ranges. Pure function of (model, n_slices).
TilePlan make_tile_plan(const ModelSpec& model, std::size_t n_slices);

/// Runs the conv stack slice by slice, concatenates the final-layer pieces,
/// then applies dense + softmax once. Bit-identical to model_forward.
Classification tiled_forward(const PlanarTensor& window, const ModelSpec& model,
                             const TilePlan& plan);

/// Simulated activation-RAM profile under the documented buffer model:
/// a buffer lives from the step that produces it until its last consumer
/// finishes, a layer's input and output coexist, elements are 4 bytes, and
/// weights stay in flash. With a plan, per-slice buffers are sized to the
/// plan's ranges and the final-output concatenation buffer is live for the
/// whole run; the stack input counted is what the step actually consumes
/// (full window untiled, the slice's receptive field tiled).
MemoryReport peak_activation_bytes(const ModelSpec& model,
                                   const TilePlan* plan = nullptr);

} // namespace smartpam

#endif
