#pragma once

// Image similarity metrics. Images are compared on the 8-bit scale: values are quantized to
// round(255 v) before PCC and MSE/PSNR are computed.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "geqie/errors.hpp"
#include "geqie/image.hpp"

namespace geqie {

inline constexpr double kPeakValue = 255.0;
inline constexpr double kPsnrDisplayCap = 60.0;

struct MetricPair {
    double pcc = 0.0;
    double psnr_db = 0.0;  // +infinity for a perfect match
};

/// Pearson correlation. Returns 0 when either input has zero variance.
inline double pcc(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DomainError("pcc: length mismatch");
    }
    if (x.size() < 2) {
        throw DomainError("pcc: need at least two samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); i++) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); i++) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline double mse(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DomainError("mse: length mismatch");
    }
    if (x.empty()) {
        throw DomainError("mse: empty input");
    }
    double s = 0;
    for (std::size_t i = 0; i < x.size(); i++) {
        double d = x[i] - y[i];
        s += d * d;
    }
    return s / static_cast<double>(x.size());
}

inline double psnr_from_mse(double mse_value) {
    if (mse_value < 0.0) {
        throw DomainError("psnr: negative MSE");
    }
    if (mse_value == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 20.0 * std::log10(kPeakValue / std::sqrt(mse_value));
}

/// 20 log10(255 / sqrt(MSE)) on 0..255 data; +infinity when MSE = 0.
inline double psnr(std::span<const double> x, std::span<const double> y) {
    return psnr_from_mse(mse(x, y));
}

/// Plot/CSV display value: infinity and anything above 60 dB is shown as 60 dB.
inline double psnr_display_cap(double psnr_db) {
    return std::min(psnr_db, kPsnrDisplayCap);
}

inline std::vector<double> quantize_8bit(const ImageArray &image) {
    std::vector<double> out(image.values.size());
    for (std::size_t i = 0; i < out.size(); i++) {
        out[i] = static_cast<double>(to_8bit(image.values[i]));
    }
    return out;
}

inline MetricPair compare_images(const ImageArray &original, const ImageArray &retrieved) {
    if (original.dims != retrieved.dims || original.channels != retrieved.channels) {
        throw DomainError("cannot compare images of different shapes");
    }
    auto a = quantize_8bit(original);
    auto b = quantize_8bit(retrieved);
    return {pcc(a, b), psnr(a, b)};
}

}  // namespace geqie
