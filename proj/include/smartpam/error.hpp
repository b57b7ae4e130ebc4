#ifndef SMARTPAM_ERROR_HPP
#define SMARTPAM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace smartpam {

// Base class for all domain errors raised by this library. The CLI turns
// these into one-line diagnostics; anything else escaping is a bug.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer shape disagreements (channel mismatch, feature-count mismatch).
class ShapeError : public Error {
public:
    using Error::Error;
};

// Input shorter than a layer's effective kernel extent.
class ShortInputError : public Error {
public:
    using Error::Error;
};

// Model file whose blob checksum does not match its manifest.
class CorruptModelError : public Error {
public:
    using Error::Error;
};

// Model file whose manifest and blob disagree structurally.
class MalformedModelError : public Error {
public:
    using Error::Error;
};

// Model file with a manifest version this build does not understand.
class UnsupportedVersionError : public Error {
public:
    using Error::Error;
};

// WAV container violations (non-PCM, non-mono, truncated chunks, ...).
class WavError : public Error {
public:
    using Error::Error;
};

// Tile plan used against a model it was not built for.
class StalePlanError : public Error {
public:
    using Error::Error;
};

} // namespace smartpam

#endif
