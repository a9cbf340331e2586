#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "geqie/errors.hpp"

namespace geqie {

using Extents = std::vector<std::size_t>;

inline std::size_t element_count(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string format_extents(std::span<const std::size_t> dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); i++) {
        if (i) {
            s += 'x';
        }
        s += std::to_string(dims[i]);
    }
    return s;
}

/// A d-dimensional raster with C channels, values in [0, 1].
///
/// Layout is row-major over the coordinates (axis 0 slowest) with channels interleaved per element,
/// so values[flat * channels + c] is channel c of element `flat`.
struct ImageArray {
    Extents dims;
    unsigned channels = 1;
    std::vector<double> values;
    unsigned bit_depth = 8;

    static ImageArray zeros(Extents dims, unsigned channels = 1) {
        if (dims.empty()) {
            throw DomainError("image needs at least one axis");
        }
        for (auto e : dims) {
            if (e < 1) {
                throw DomainError("image extents must be >= 1");
            }
        }
        if (channels < 1) {
            throw DomainError("image needs at least one channel");
        }
        ImageArray img;
        img.values.assign(geqie::element_count(dims) * channels, 0.0);
        img.dims = std::move(dims);
        img.channels = channels;
        return img;
    }

    std::size_t element_count() const noexcept {
        return geqie::element_count(dims);
    }

    bool contains(std::span<const std::size_t> coords) const noexcept {
        if (coords.size() != dims.size()) {
            return false;
        }
        for (std::size_t i = 0; i < dims.size(); i++) {
            if (coords[i] >= dims[i]) {
                return false;
            }
        }
        return true;
    }

    std::size_t flat_index(std::span<const std::size_t> coords) const {
        if (!contains(coords)) {
            throw IndexError("coordinates outside image extents " + format_extents(dims));
        }
        std::size_t flat = 0;
        for (std::size_t i = 0; i < dims.size(); i++) {
            flat = flat * dims[i] + coords[i];
        }
        return flat;
    }

    std::span<const double> element(std::size_t flat) const {
        return std::span<const double>(values).subspan(flat * channels, channels);
    }
    double &at(std::size_t flat, unsigned channel) {
        return values[flat * channels + channel];
    }
    double at(std::size_t flat, unsigned channel) const {
        return values[flat * channels + channel];
    }

    void validate() const {
        if (dims.empty() || channels < 1) {
            throw DomainError("image has no axes or no channels");
        }
        if (values.size() != element_count() * channels) {
            throw DomainError("image value count does not match extents " + format_extents(dims));
        }
        for (double v : values) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw DomainError("image values must lie in [0, 1]");
            }
        }
    }

    friend bool operator==(const ImageArray &, const ImageArray &) = default;
};

inline uint8_t to_8bit(double v) {
    return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace geqie
