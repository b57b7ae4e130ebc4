#ifndef SMARTPAM_TENSOR_HPP
#define SMARTPAM_TENSOR_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "smartpam/error.hpp"

namespace smartpam {

/// Channel-major (planar) float32 tensor: all samples of channel 0, then
/// channel 1, and so on. This is the universal activation carrier; the
/// flatten feeding the dense head is simply the underlying vector.
class PlanarTensor {
public:
    PlanarTensor() = default;

    PlanarTensor(std::size_t channels, std::size_t length)
        : channels_(channels), length_(length), values_(channels * length, 0.0f) {}

    PlanarTensor(std::size_t channels, std::size_t length, std::vector<float> values)
        : channels_(channels), length_(length), values_(std::move(values)) {
        if (values_.size() != channels_ * length_) {
            throw ShapeError("tensor value count does not match channels x length");
        }
    }

    std::size_t channels() const { return channels_; }
    std::size_t length() const { return length_; }

    float& at(std::size_t c, std::size_t i) { return values_[c * length_ + i]; }
    float at(std::size_t c, std::size_t i) const { return values_[c * length_ + i]; }

    std::span<const float> channel(std::size_t c) const {
        return std::span<const float>(values_.data() + c * length_, length_);
    }
    std::span<float> channel(std::size_t c) {
        return std::span<float>(values_.data() + c * length_, length_);
    }

    const std::vector<float>& values() const { return values_; }
    std::vector<float>& values() { return values_; }

    /// Copy of samples [start, start+count) from every channel. Used by the
    /// tiled executor to materialize a slice's input sub-window; the copied
    /// floats are bit-identical to the originals, which is what makes tiled
    /// and monolithic execution agree exactly.
    PlanarTensor slice(std::size_t start, std::size_t count) const {
        if (start + count > length_) {
            throw ShapeError("slice range exceeds tensor length");
        }
        PlanarTensor out(channels_, count);
        for (std::size_t c = 0; c < channels_; ++c) {
            const float* src = values_.data() + c * length_ + start;
            float* dst = out.values_.data() + c * count;
            for (std::size_t i = 0; i < count; ++i) dst[i] = src[i];
        }
        return out;
    }

    bool operator==(const PlanarTensor& other) const = default;

private:
    std::size_t channels_ = 0;
    std::size_t length_ = 0;
    std::vector<float> values_;
};

} // namespace smartpam

#endif
