#pragma once

// The registry of concrete encoding models.
//
// Register layout inside the value register (bit 0 = least significant value qubit):
//   frqi, mfrqi, frqci  D=1   |cos θ, sin θ⟩
//   neqr, qualpi        D=8   the 8-bit value as a basis state
//   ifrqi               D=4   qubit j carries bit pair j of the 8-bit value at angle {0, π/6, π/3, π/2}
//   mcqi                D=3   (selector c, angle a) -> value index 2c + a; c = 0 R, 1 G, 2 B
//   ncqi                D=3q  R in the top q bits, then G, then B
//   qrci                D=3   (r, g, b) bits of one bit plane; R is the top bit. The 3-qubit plane tag
//                             sits above the position bits in the index register.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "geqie/errors.hpp"
#include "geqie/image.hpp"
#include "geqie/metrics.hpp"
#include "geqie/model.hpp"
#include "geqie/simcore.hpp"

namespace geqie {

enum class Family { Grayscale, RGB, Multidim };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::Grayscale:
            return "grayscale";
        case Family::RGB:
            return "rgb";
        case Family::Multidim:
            return "multidim";
    }
    return "?";
}

struct ExtraRegister {
    std::string name;
    unsigned qubits = 0;
};

struct MethodDescriptor {
    std::string name;
    Family family = Family::Grayscale;
    unsigned value_qubits = 0;
    unsigned layers = 1;
    unsigned channels = 1;
    unsigned bit_depth = 8;
    std::vector<ExtraRegister> extra_registers;
    /// Retrieval from exact (noise-free) probabilities reproduces representable inputs bit for bit.
    bool exact_under_ideal = false;
    std::string variant = "geqie-spec-v1";

    unsigned extra_qubits() const {
        unsigned s = 0;
        for (const auto &r : extra_registers) {
            s += r.qubits;
        }
        return s;
    }

    /// Total qubits = D + position qubits + extra registers.
    unsigned budget(std::span<const std::size_t> dims) const {
        unsigned pos = 0;
        for (auto p : padded_extents(dims)) {
            pos += static_cast<unsigned>(std::countr_zero(p));
        }
        return value_qubits + pos + extra_qubits();
    }
};

struct MethodOptions {
    /// Bits per channel for NCQI. Three keeps a 2x2 image at 11 qubits.
    unsigned ncqi_bits = 3;
};

inline const std::vector<std::string> &method_names() {
    static const std::vector<std::string> names = {"frqi", "neqr", "ifrqi", "qualpi", "frqci",
                                                   "mcqi", "ncqi", "qrci",  "mfrqi"};
    return names;
}

namespace detail {

inline constexpr double kHalfPi = std::numbers::pi / 2.0;

inline ValueState zero_state(std::size_t n) {
    return ValueState(n, Complex(0.0));
}

inline ValueState angle_state(double theta) {
    return {std::cos(theta), std::sin(theta)};
}

/// g = (2/π) asin(sqrt(P1)), with P1 = w1 / (w0 + w1); 0 if the position was never observed.
inline double decode_angle(double w0, double w1) {
    double n = w0 + w1;
    if (!(n > 0.0)) {
        return 0.0;
    }
    double p1 = std::clamp(w1 / n, 0.0, 1.0);
    return std::clamp(std::asin(std::sqrt(p1)) / kHalfPi, 0.0, 1.0);
}

/// Most frequent value at `index`; ties go to the smaller value. Returns -1 if nothing was observed.
inline long long majority_value(std::span<const double> w, const RegisterLayout &layout, uint64_t index) {
    uint64_t values = uint64_t{1} << layout.value_qubits;
    long long best = -1;
    double best_w = 0.0;
    for (uint64_t v = 0; v < values; v++) {
        double x = w[layout.basis_index(v, index)];
        if (x > best_w) {
            best_w = x;
            best = static_cast<long long>(v);
        }
    }
    return best;
}

inline unsigned to_levels(double v, unsigned bits) {
    double top = static_cast<double>((1u << bits) - 1);
    return static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * top));
}

inline XiFn row_major_xi() {
    return [](unsigned, unsigned, Coords c, const RegisterLayout &layout) { return layout.position_index(c); };
}

inline std::size_t flat_of(const ImageArray &image, Coords c) {
    return image.flat_index(c);
}

/// Calls body(flat, position) for every element of the unpadded raster.
template <typename Body>
void for_each_element(const RegisterLayout &layout, Body &&body) {
    std::size_t total = element_count(layout.dims);
    for (std::size_t flat = 0; flat < total; flat++) {
        body(flat, layout.position_of_element(flat));
    }
}

inline EncodingModel angle_model(const std::string &name) {
    EncodingModel m;
    m.name = name;
    m.value_qubits = 1;
    m.delta = [](unsigned, unsigned, Coords c, const ImageArray &img) {
        if (!img.contains(c)) {
            return zero_state(2);
        }
        return angle_state(kHalfPi * img.at(flat_of(img, c), 0));
    };
    m.xi = row_major_xi();
    m.retrieve = [](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 1);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            out.at(flat, 0) = decode_angle(w[layout.basis_index(0, pos)], w[layout.basis_index(1, pos)]);
        });
        return out;
    };
    return m;
}

inline EncodingModel basis_gray_model(const std::string &name) {
    EncodingModel m;
    m.name = name;
    m.value_qubits = 8;
    m.value_levels = 256;
    m.roundtrip_tolerance = 1e-12;
    m.delta = [](unsigned, unsigned, Coords c, const ImageArray &img) {
        ValueState v = zero_state(256);
        if (img.contains(c)) {
            v[to_levels(img.at(flat_of(img, c), 0), 8)] = 1.0;
        }
        return v;
    };
    m.xi = row_major_xi();
    m.retrieve = [](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 1);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            long long v = majority_value(w, layout, pos);
            out.at(flat, 0) = v < 0 ? 0.0 : static_cast<double>(v) / 255.0;
        });
        return out;
    };
    return m;
}

// IFRQI: bit pair b in {0,1,2,3} -> angle {0, π/6, π/3, π/2}, i.e. P1 in {0, 1/4, 3/4, 1}.
inline constexpr std::array<double, 4> kIfrqiAngles = {0.0, std::numbers::pi / 6.0, std::numbers::pi / 3.0,
                                                       std::numbers::pi / 2.0};
inline constexpr std::array<double, 3> kIfrqiThresholds = {0.125, 0.5, 0.875};

inline EncodingModel ifrqi_model() {
    EncodingModel m;
    m.name = "ifrqi";
    m.value_qubits = 4;
    m.value_levels = 256;
    m.roundtrip_tolerance = 1e-12;
    m.delta = [](unsigned, unsigned, Coords c, const ImageArray &img) {
        ValueState v = zero_state(16);
        if (!img.contains(c)) {
            return v;
        }
        unsigned g = to_levels(img.at(flat_of(img, c), 0), 8);
        std::array<double, 4> cs{}, sn{};
        for (unsigned j = 0; j < 4; j++) {
            double theta = kIfrqiAngles[(g >> (2 * j)) & 3u];
            cs[j] = std::cos(theta);
            sn[j] = std::sin(theta);
        }
        for (unsigned idx = 0; idx < 16; idx++) {
            double a = 1.0;
            for (unsigned j = 0; j < 4; j++) {
                a *= (idx >> j) & 1u ? sn[j] : cs[j];
            }
            v[idx] = a;
        }
        return v;
    };
    m.xi = row_major_xi();
    m.retrieve = [](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 1);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            double total = 0;
            std::array<double, 4> ones{};
            for (unsigned idx = 0; idx < 16; idx++) {
                double x = w[layout.basis_index(idx, pos)];
                total += x;
                for (unsigned j = 0; j < 4; j++) {
                    if ((idx >> j) & 1u) {
                        ones[j] += x;
                    }
                }
            }
            if (!(total > 0.0)) {
                return;
            }
            unsigned g = 0;
            for (unsigned j = 0; j < 4; j++) {
                double p1 = ones[j] / total;
                unsigned level = 0;
                while (level < 3 && p1 >= kIfrqiThresholds[level]) {
                    level++;
                }
                g |= level << (2 * j);
            }
            out.at(flat, 0) = static_cast<double>(g) / 255.0;
        });
        return out;
    };
    return m;
}

// FRQCI packs the three channels into one angle, θ = (π/2)(4R + 2G + B)/7. On the 8-bit grid the packed
// integer T = 4r + 2g + b spans 0..1785 and many triples share a T; decoding picks the triple with the
// largest red, then the largest green (most significant channel first).
inline constexpr double kFrqciPackedMax = 7.0 * 255.0;

inline std::array<unsigned, 3> frqci_unpack(unsigned packed) {
    unsigned r = std::min(255u, packed / 4);
    unsigned rest = packed - 4 * r;
    unsigned g = std::min(255u, rest / 2);
    unsigned b = std::min(255u, rest - 2 * g);
    return {r, g, b};
}

inline EncodingModel frqci_model() {
    EncodingModel m;
    m.name = "frqci";
    m.value_qubits = 1;
    m.channels = 3;
    // Lossy: the packing is not injective, so no per-channel round-trip bound applies.
    m.roundtrip_tolerance = 1.0;
    m.value_levels = 256;
    m.delta = [](unsigned, unsigned, Coords c, const ImageArray &img) {
        if (!img.contains(c)) {
            return zero_state(2);
        }
        auto p = img.element(flat_of(img, c));
        double s = (4.0 * p[0] + 2.0 * p[1] + p[2]) / 7.0;
        return angle_state(kHalfPi * s);
    };
    m.xi = row_major_xi();
    m.retrieve = [](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 3);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            double s = decode_angle(w[layout.basis_index(0, pos)], w[layout.basis_index(1, pos)]);
            auto rgb = frqci_unpack(static_cast<unsigned>(std::lround(s * kFrqciPackedMax)));
            for (unsigned ch = 0; ch < 3; ch++) {
                out.at(flat, ch) = rgb[ch] / 255.0;
            }
        });
        return out;
    };
    return m;
}

inline EncodingModel mcqi_model() {
    EncodingModel m;
    m.name = "mcqi";
    m.value_qubits = 3;
    m.channels = 3;
    m.delta = [](unsigned, unsigned, Coords c, const ImageArray &img) {
        ValueState v = zero_state(8);
        if (!img.contains(c)) {
            return v;
        }
        auto p = img.element(flat_of(img, c));
        const double amp = 1.0 / std::sqrt(3.0);
        for (unsigned ch = 0; ch < 3; ch++) {
            double theta = kHalfPi * p[ch];
            v[2 * ch] = amp * std::cos(theta);
            v[2 * ch + 1] = amp * std::sin(theta);
        }
        return v;
    };
    m.xi = row_major_xi();
    m.retrieve = [](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 3);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            for (unsigned ch = 0; ch < 3; ch++) {
                out.at(flat, ch) =
                    decode_angle(w[layout.basis_index(2 * ch, pos)], w[layout.basis_index(2 * ch + 1, pos)]);
            }
        });
        return out;
    };
    return m;
}

inline EncodingModel ncqi_model(unsigned q) {
    if (q < 1 || q > 8) {
        throw DomainError("ncqi bit depth must be in 1..8");
    }
    EncodingModel m;
    m.name = "ncqi";
    m.value_qubits = 3 * q;
    m.channels = 3;
    m.value_levels = 1u << q;
    m.roundtrip_tolerance = 1e-12;
    m.delta = [q](unsigned, unsigned, Coords c, const ImageArray &img) {
        ValueState v = zero_state(std::size_t{1} << (3 * q));
        if (!img.contains(c)) {
            return v;
        }
        auto p = img.element(flat_of(img, c));
        uint64_t idx = (uint64_t{to_levels(p[0], q)} << (2 * q)) | (uint64_t{to_levels(p[1], q)} << q) |
                       uint64_t{to_levels(p[2], q)};
        v[idx] = 1.0;
        return v;
    };
    m.xi = row_major_xi();
    m.retrieve = [q](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 3);
        out.bit_depth = q;
        const uint64_t mask = (uint64_t{1} << q) - 1;
        const double top = static_cast<double>(mask);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            long long v = majority_value(w, layout, pos);
            if (v < 0) {
                return;
            }
            auto u = static_cast<uint64_t>(v);
            out.at(flat, 0) = static_cast<double>((u >> (2 * q)) & mask) / top;
            out.at(flat, 1) = static_cast<double>((u >> q) & mask) / top;
            out.at(flat, 2) = static_cast<double>(u & mask) / top;
        });
        return out;
    };
    return m;
}

inline constexpr unsigned kQrciPlanes = 8;

inline EncodingModel qrci_model() {
    EncodingModel m;
    m.name = "qrci";
    m.layers = kQrciPlanes;
    m.value_qubits = 3;
    m.extra_qubits = 3;
    m.channels = 3;
    m.value_levels = 256;
    m.roundtrip_tolerance = 1e-12;
    // Each plane contributes 1/√8 so a pixel's eight layer terms together have unit norm.
    m.delta = [](unsigned, unsigned l, Coords c, const ImageArray &img) {
        ValueState v = zero_state(8);
        if (!img.contains(c)) {
            return v;
        }
        auto p = img.element(flat_of(img, c));
        unsigned idx = 0;
        for (unsigned ch = 0; ch < 3; ch++) {
            idx = (idx << 1) | ((to_levels(p[ch], 8) >> l) & 1u);
        }
        v[idx] = 1.0 / std::sqrt(static_cast<double>(kQrciPlanes));
        return v;
    };
    m.xi = [](unsigned, unsigned l, Coords c, const RegisterLayout &layout) {
        return (uint64_t{l} << layout.position_qubits) | layout.position_index(c);
    };
    m.retrieve = [](std::span<const std::vector<double>> weights, const RegisterLayout &layout) {
        const auto &w = weights[0];
        ImageArray out = ImageArray::zeros(layout.dims, 3);
        for_each_element(layout, [&](std::size_t flat, uint64_t pos) {
            std::array<unsigned, 3> rgb{};
            for (unsigned l = 0; l < kQrciPlanes; l++) {
                long long v = majority_value(w, layout, (uint64_t{l} << layout.position_qubits) | pos);
                if (v < 0) {
                    continue;
                }
                for (unsigned ch = 0; ch < 3; ch++) {
                    rgb[ch] |= ((static_cast<unsigned>(v) >> (2 - ch)) & 1u) << l;
                }
            }
            for (unsigned ch = 0; ch < 3; ch++) {
                out.at(flat, ch) = rgb[ch] / 255.0;
            }
        });
        return out;
    };
    return m;
}

}  // namespace detail

inline MethodDescriptor describe(const EncodingModel &model, Family family, bool exact, unsigned bit_depth) {
    MethodDescriptor d;
    d.name = model.name;
    d.family = family;
    d.value_qubits = model.value_qubits;
    d.layers = model.layers;
    d.channels = model.channels;
    d.bit_depth = bit_depth;
    d.exact_under_ideal = exact;
    if (model.extra_qubits) {
        d.extra_registers.push_back({"bit-plane", model.extra_qubits});
    }
    return d;
}

/// Builds the model for a registered method name; throws NotFoundError otherwise.
inline EncodingModel make_model(const std::string &name, const MethodOptions &options = {}) {
    if (name == "frqi" || name == "mfrqi") {
        return detail::angle_model(name);
    }
    if (name == "neqr" || name == "qualpi") {
        return detail::basis_gray_model(name);
    }
    if (name == "ifrqi") {
        return detail::ifrqi_model();
    }
    if (name == "frqci") {
        return detail::frqci_model();
    }
    if (name == "mcqi") {
        return detail::mcqi_model();
    }
    if (name == "ncqi") {
        return detail::ncqi_model(options.ncqi_bits);
    }
    if (name == "qrci") {
        return detail::qrci_model();
    }
    throw NotFoundError("unknown encoding method '" + name + "'");
}

inline MethodDescriptor lookup(const std::string &name, const MethodOptions &options = {}) {
    EncodingModel m = make_model(name, options);
    if (name == "frqi") {
        return describe(m, Family::Grayscale, false, 8);
    }
    if (name == "neqr" || name == "qualpi" || name == "ifrqi") {
        return describe(m, Family::Grayscale, true, 8);
    }
    if (name == "frqci" || name == "mcqi") {
        return describe(m, Family::RGB, false, 8);
    }
    if (name == "ncqi") {
        return describe(m, Family::RGB, true, options.ncqi_bits);
    }
    if (name == "qrci") {
        return describe(m, Family::RGB, true, 8);
    }
    return describe(m, Family::Multidim, false, 8);
}

inline std::vector<MethodDescriptor> registry_list(const MethodOptions &options = {}) {
    std::vector<MethodDescriptor> out;
    for (const auto &n : method_names()) {
        out.push_back(lookup(n, options));
    }
    return out;
}

inline void check_family(const MethodDescriptor &d, const ImageArray &image) {
    bool ok = false;
    switch (d.family) {
        case Family::Grayscale:
            ok = image.channels == 1 && image.dims.size() == 2;
            break;
        case Family::RGB:
            ok = image.channels == 3 && image.dims.size() == 2;
            break;
        case Family::Multidim:
            ok = image.channels == 1;
            break;
    }
    if (!ok) {
        throw DomainError("method '" + d.name + "' (" + to_string(d.family) + ") cannot encode a " +
                          std::to_string(image.channels) + "-channel " + std::to_string(image.dims.size()) +
                          "-axis image");
    }
}

inline StateVector encode(const std::string &method, const ImageArray &image, unsigned max_qubits = kStateMaxQubits,
                          const MethodOptions &options = {}) {
    MethodDescriptor d = lookup(method, options);
    check_family(d, image);
    return assemble_state(make_model(method, options), image, max_qubits);
}

/// Decodes from dense outcome weights (counts or exact probabilities) of length 2^budget.
inline ImageArray retrieve_weights(const std::string &method, std::span<const double> weights,
                                   std::span<const std::size_t> dims, const MethodOptions &options = {}) {
    EncodingModel m = make_model(method, options);
    RegisterLayout layout = make_layout(m, dims);
    if (weights.size() != basis_dim(layout.total_qubits())) {
        throw DomainError("outcome vector of length " + std::to_string(weights.size()) + " does not match the " +
                          std::to_string(layout.total_qubits()) + "-qubit register of '" + method + "' on " +
                          format_extents(dims));
    }
    std::vector<std::vector<double>> w{std::vector<double>(weights.begin(), weights.end())};
    return m.retrieve(w, layout);
}

inline ImageArray retrieve(const std::string &method, const CountsHistogram &counts, std::span<const std::size_t> dims,
                           const MethodOptions &options = {}) {
    unsigned need = lookup(method, options).budget(dims);
    if (counts.n_qubits() != need) {
        throw DomainError("counts cover " + std::to_string(counts.n_qubits()) + " qubits but '" + method + "' on " +
                          format_extents(dims) + " uses " + std::to_string(need));
    }
    return retrieve_weights(method, counts.weights(), dims, options);
}

struct RoundtripResult {
    ImageArray retrieved;
    MetricPair metrics;
    unsigned qubits = 0;
};

/// encode -> (noise) -> sample -> retrieve -> metrics. shots = 0 uses exact output probabilities.
inline RoundtripResult roundtrip(const std::string &method, const ImageArray &image, uint64_t shots,
                                 const NoiseSpec &noise, uint64_t seed, unsigned max_qubits = kStateMaxQubits,
                                 const MethodOptions &options = {}, unsigned threads = 1) {
    noise.validate();
    StateVector state = encode(method, image, max_qubits, options);
    std::vector<double> weights;
    if (shots == 0) {
        weights = noisy_probabilities(state, noise);
    } else {
        weights = simulate_counts(state, noise, shots, seed, threads).weights();
    }
    RoundtripResult r;
    r.qubits = state.n_qubits();
    r.retrieved = retrieve_weights(method, weights, image.dims, options);
    r.metrics = compare_images(image, r.retrieved);
    return r;
}

}  // namespace geqie
