#pragma once

// The general image-state model: a position map ξ and a value map δ summed over every coordinate
// (and every layer l) of a power-of-two padded grid,
//
//     |I⟩_k = 1/√(Π dims) Σ_coords Σ_l  δ_{k,l}(coords, p) ⊗ ξ_{k,l}(coords),
//
// with δ vanishing outside the true extents so that exactly Π dims terms survive.
//
// Register layout: the value register occupies the most significant qubits, the index register
// (position bits, then any method-specific extra register above them) the least significant ones.
// Positions are the row-major flattening of the coordinates over the padded extents.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "geqie/errors.hpp"
#include "geqie/image.hpp"
#include "geqie/rng.hpp"
#include "geqie/simcore.hpp"

namespace geqie {

using Coords = std::span<const std::size_t>;
/// Value-register state of length 2^D, or a single amplitude when D = 0.
using ValueState = std::vector<Complex>;

/// Rounds every extent up to the next power of two.
inline Extents padded_extents(std::span<const std::size_t> dims) {
    Extents out;
    out.reserve(dims.size());
    for (auto e : dims) {
        if (e < 1) {
            throw DomainError("extents must be >= 1");
        }
        out.push_back(std::bit_ceil(e));
    }
    return out;
}

struct RegisterLayout {
    Extents dims;
    Extents padded;
    unsigned position_qubits = 0;
    unsigned extra_qubits = 0;
    unsigned value_qubits = 0;

    unsigned index_qubits() const noexcept {
        return position_qubits + extra_qubits;
    }
    unsigned total_qubits() const noexcept {
        return value_qubits + index_qubits();
    }
    uint64_t position_count() const noexcept {
        return uint64_t{1} << position_qubits;
    }

    /// Row-major position over the padded grid (axis 0 in the most significant bits).
    uint64_t position_index(Coords coords) const {
        uint64_t pos = 0;
        for (std::size_t i = 0; i < padded.size(); i++) {
            pos = pos * padded[i] + coords[i];
        }
        return pos;
    }

    /// Position index of a flat element index of the unpadded raster.
    uint64_t position_of_element(std::size_t flat) const {
        std::vector<std::size_t> c(dims.size());
        for (std::size_t i = dims.size(); i-- > 0;) {
            c[i] = flat % dims[i];
            flat /= dims[i];
        }
        return position_index(c);
    }

    uint64_t basis_index(uint64_t value, uint64_t index) const noexcept {
        return (value << index_qubits()) | index;
    }
};

using DeltaFn = std::function<ValueState(unsigned k, unsigned l, Coords coords, const ImageArray &image)>;
using XiFn = std::function<uint64_t(unsigned k, unsigned l, Coords coords, const RegisterLayout &layout)>;
/// Decodes an image from per-component outcome weights (counts or exact probabilities).
using RetrieveFn =
    std::function<ImageArray(std::span<const std::vector<double>> weights, const RegisterLayout &layout)>;

/// Q = (K, L, D, {δ_{k,l}}, {ξ_{k,l}}) plus its retrieval procedure.
struct EncodingModel {
    std::string name;
    unsigned components = 1;     // K
    unsigned layers = 1;         // L
    unsigned value_qubits = 0;   // D
    unsigned extra_qubits = 0;   // auxiliary index register (e.g. a bit-plane tag)
    unsigned channels = 1;       // C
    DeltaFn delta;
    XiFn xi;
    RetrieveFn retrieve;
    /// Levels per channel that decode exactly (0 = continuous); drives the random images used by verify_model.
    unsigned value_levels = 0;
    /// Largest per-value error tolerated by the exact-probability round-trip check.
    double roundtrip_tolerance = 1e-9;

    std::size_t value_dim() const noexcept {
        return std::size_t{1} << value_qubits;
    }
};

inline RegisterLayout make_layout(const EncodingModel &model, std::span<const std::size_t> dims) {
    RegisterLayout layout;
    layout.dims.assign(dims.begin(), dims.end());
    layout.padded = padded_extents(dims);
    for (auto p : layout.padded) {
        layout.position_qubits += static_cast<unsigned>(std::countr_zero(p));
    }
    layout.extra_qubits = model.extra_qubits;
    layout.value_qubits = model.value_qubits;
    return layout;
}

inline unsigned qubit_budget(const EncodingModel &model, std::span<const std::size_t> dims) {
    return make_layout(model, dims).total_qubits();
}

namespace detail {

/// Calls body(coords) for every coordinate tuple of `extents` in row-major order.
template <typename Body>
void for_each_coordinate(std::span<const std::size_t> extents, Body &&body) {
    std::vector<std::size_t> c(extents.size(), 0);
    std::size_t total = element_count(extents);
    for (std::size_t n = 0; n < total; n++) {
        body(std::span<const std::size_t>(c));
        for (std::size_t i = extents.size(); i-- > 0;) {
            if (++c[i] < extents[i]) {
                break;
            }
            c[i] = 0;
        }
    }
}

inline void check_model_shape(const EncodingModel &model) {
    if (model.components < 1 || model.layers < 1 || model.channels < 1) {
        throw ModelError("model '" + model.name + "' needs K, L and C >= 1");
    }
    if (!model.delta || !model.xi) {
        throw ModelError("model '" + model.name + "' is missing its value or position map");
    }
}

}  // namespace detail

/// Builds component k of the image state.
///
/// D >= 1 normalizes by 1/√(Π dims), which yields a unit vector when each pixel's value state (summed
/// over layers) has unit norm. D = 0 is the amplitude-encoding limit: δ returns a scalar and the state
/// is normalized by its own L2 norm.
inline StateVector assemble_state(const EncodingModel &model, const ImageArray &image,
                                  unsigned max_qubits = kStateMaxQubits, unsigned component = 0) {
    detail::check_model_shape(model);
    image.validate();
    if (image.channels != model.channels) {
        throw DomainError("model '" + model.name + "' expects " + std::to_string(model.channels) +
                          " channel(s), image has " + std::to_string(image.channels));
    }
    if (component >= model.components) {
        throw IndexError("component index out of range");
    }
    RegisterLayout layout = make_layout(model, image.dims);
    unsigned total = layout.total_qubits();
    if (total > max_qubits) {
        throw CapacityError(total, max_qubits, "encoding '" + model.name + "' of " + format_extents(image.dims));
    }
    if (total < 1) {
        throw ModelError("model '" + model.name + "' produces an empty register");
    }
    const uint64_t index_dim = uint64_t{1} << layout.index_qubits();
    const std::size_t vdim = model.value_dim();
    std::vector<Complex> amps(basis_dim(total));
    std::vector<char> seen(index_dim);

    for (unsigned l = 0; l < model.layers; l++) {
        std::fill(seen.begin(), seen.end(), 0);
        detail::for_each_coordinate(layout.padded, [&](Coords coords) {
            ValueState v = model.delta(component, l, coords, image);
            if (v.size() != vdim) {
                throw ModelError("value map of '" + model.name + "' returned " + std::to_string(v.size()) +
                                 " amplitudes, expected " + std::to_string(vdim));
            }
            uint64_t idx = model.xi(component, l, coords, layout);
            if (idx >= index_dim) {
                throw ModelError("position map of '" + model.name + "' left the index register");
            }
            if (image.contains(coords)) {
                if (seen[idx]) {
                    throw ModelError("position map of '" + model.name + "' is not injective (index " +
                                     std::to_string(idx) + " reused in layer " + std::to_string(l) + ")");
                }
                seen[idx] = 1;
            }
            for (std::size_t val = 0; val < vdim; val++) {
                amps[layout.basis_index(val, idx)] += v[val];
            }
        });
    }

    if (model.value_qubits == 0) {
        double n2 = 0;
        for (const auto &a : amps) {
            n2 += std::norm(a);
        }
        if (n2 == 0.0) {
            throw DomainError("amplitude encoding of an all-zero image has no normalizable state");
        }
        double inv = 1.0 / std::sqrt(n2);
        for (auto &a : amps) {
            a *= inv;
        }
    } else {
        double inv = 1.0 / std::sqrt(static_cast<double>(image.element_count()));
        double n2 = 0;
        for (auto &a : amps) {
            a *= inv;
            n2 += std::norm(a);
        }
        if (std::abs(n2 - 1.0) > kNormTolerance) {
            throw ModelError("model '" + model.name + "' assembled a state of squared norm " + std::to_string(n2));
        }
    }
    return StateVector(total, std::move(amps));
}

/// All K components, each a separately normalized block.
inline std::vector<StateVector> assemble_components(const EncodingModel &model, const ImageArray &image,
                                                    unsigned max_qubits = kStateMaxQubits) {
    std::vector<StateVector> out;
    for (unsigned k = 0; k < model.components; k++) {
        out.push_back(assemble_state(model, image, max_qubits, k));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Unitary completion.

struct UnitaryMatrix {
    unsigned n_qubits = 0;
    std::vector<Complex> entries;  // row-major

    uint64_t dim() const noexcept {
        return basis_dim(n_qubits);
    }
    const Complex &operator()(uint64_t r, uint64_t c) const {
        return entries[r * dim() + c];
    }

    std::vector<Complex> column(uint64_t c) const {
        std::vector<Complex> out(dim());
        for (uint64_t r = 0; r < dim(); r++) {
            out[r] = (*this)(r, c);
        }
        return out;
    }

    /// max |(U†U - I)_ij|
    double unitarity_error() const {
        uint64_t d = dim();
        double worst = 0;
        for (uint64_t i = 0; i < d; i++) {
            for (uint64_t j = 0; j < d; j++) {
                Complex s = 0;
                for (uint64_t r = 0; r < d; r++) {
                    s += std::conj(entries[r * d + i]) * entries[r * d + j];
                }
                if (i == j) {
                    s -= 1.0;
                }
                worst = std::max(worst, std::abs(s));
            }
        }
        return worst;
    }
};

/// A unitary whose first column is `state`, built as a phased Householder reflection.
///
/// With φ = arg(ψ_0) and ψ' = e^{-iφ} ψ (so ψ'_0 ≥ 0), H = I - 2 v v† / (v† v) for v = e_0 - ψ' maps
/// e_0 to ψ', and U = e^{iφ} H. If ψ' = e_0 the reflection degenerates and H = I.
inline UnitaryMatrix completion_unitary(const StateVector &state) {
    if (std::abs(state.norm_squared() - 1.0) > kNormTolerance) {
        throw DomainError("completion requires a normalized state");
    }
    unsigned n = state.n_qubits();
    if (n > kDensityMaxQubits) {
        throw CapacityError(n, kDensityMaxQubits, "unitary completion");
    }
    uint64_t d = state.dim();
    auto a = state.amplitudes();
    Complex phase = std::abs(a[0]) > 0.0 ? a[0] / std::abs(a[0]) : Complex(1.0);
    std::vector<Complex> v(d);
    double vv = 0;
    for (uint64_t i = 0; i < d; i++) {
        v[i] = (i == 0 ? Complex(1.0) : Complex(0.0)) - std::conj(phase) * a[i];
        vv += std::norm(v[i]);
    }

    UnitaryMatrix u{n, std::vector<Complex>(d * d)};
    for (uint64_t r = 0; r < d; r++) {
        for (uint64_t c = 0; c < d; c++) {
            Complex h = (r == c) ? Complex(1.0) : Complex(0.0);
            if (vv > 1e-300) {
                h -= 2.0 * v[r] * std::conj(v[c]) / vv;
            }
            u.entries[r * d + c] = phase * h;
        }
    }
    return u;
}

// ---------------------------------------------------------------------------------------------
// Verification.

struct VerificationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerificationReport {
    std::string model;
    Extents dims;
    std::vector<VerificationCheck> checks;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.passed; });
    }
    const VerificationCheck *find(const std::string &name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }
};

/// Uniform random image; quantized to `levels` evenly spaced values when levels > 0.
inline ImageArray random_image(Extents dims, unsigned channels, uint64_t seed, unsigned levels = 0) {
    ImageArray img = ImageArray::zeros(std::move(dims), channels);
    CounterRng rng(seed);
    for (auto &v : img.values) {
        double u = rng.uniform();
        if (levels > 1) {
            v = std::floor(u * levels) / (levels - 1);
        } else {
            v = u;
        }
    }
    return img;
}

/// Runs the model's self-checks on `dims`: position-map injectivity over the padded grid, vanishing value
/// map outside the true extents, unit norm on a random image, and retrieval from exact probabilities.
inline VerificationReport verify_model(const EncodingModel &model, std::span<const std::size_t> dims,
                                       uint64_t seed = 0x5EED, unsigned max_qubits = kStateMaxQubits) {
    VerificationReport report;
    report.model = model.name;
    report.dims.assign(dims.begin(), dims.end());
    try {
        detail::check_model_shape(model);
    } catch (const Error &e) {
        report.checks.push_back({"model-shape", false, e.what()});
        return report;
    }
    RegisterLayout layout = make_layout(model, dims);
    if (layout.total_qubits() > max_qubits) {
        report.checks.push_back({"capacity", false,
                                 "requires " + std::to_string(layout.total_qubits()) + " qubits, cap is " +
                                     std::to_string(max_qubits)});
        return report;
    }
    ImageArray image = random_image(report.dims, model.channels, seed, model.value_levels);
    const uint64_t index_dim = uint64_t{1} << layout.index_qubits();

    {
        VerificationCheck check{"xi-injective", true, "injective over " + format_extents(layout.padded)};
        std::vector<char> seen(index_dim);
        for (unsigned k = 0; k < model.components && check.passed; k++) {
            for (unsigned l = 0; l < model.layers && check.passed; l++) {
                std::fill(seen.begin(), seen.end(), 0);
                detail::for_each_coordinate(layout.padded, [&](Coords c) {
                    if (!check.passed) {
                        return;
                    }
                    uint64_t idx = model.xi(k, l, c, layout);
                    if (idx >= index_dim) {
                        check = {"xi-injective", false, "index " + std::to_string(idx) + " outside the index register"};
                    } else if (seen[idx]) {
                        check = {"xi-injective", false,
                                 "index " + std::to_string(idx) + " hit twice (component " + std::to_string(k) +
                                     ", layer " + std::to_string(l) + ")"};
                    } else {
                        seen[idx] = 1;
                    }
                });
            }
        }
        report.checks.push_back(check);
    }

    {
        VerificationCheck check{"delta-out-of-range-zero", true, ""};
        std::size_t probed = 0;
        for (unsigned k = 0; k < model.components && check.passed; k++) {
            for (unsigned l = 0; l < model.layers && check.passed; l++) {
                detail::for_each_coordinate(layout.padded, [&](Coords c) {
                    if (!check.passed || image.contains(c)) {
                        return;
                    }
                    probed++;
                    for (const auto &a : model.delta(k, l, c, image)) {
                        if (a != Complex(0.0)) {
                            check = {"delta-out-of-range-zero", false, "nonzero value state outside the image"};
                            return;
                        }
                    }
                });
            }
        }
        if (check.passed) {
            check.detail = std::to_string(probed) + " padded coordinates probed";
        }
        report.checks.push_back(check);
    }

    std::vector<std::vector<double>> probabilities;
    {
        VerificationCheck check{"state-norm", true, ""};
        try {
            for (unsigned k = 0; k < model.components; k++) {
                StateVector s = assemble_state(model, image, max_qubits, k);
                check.detail = "|psi|^2 - 1 = " + std::to_string(s.norm_squared() - 1.0);
                probabilities.push_back(measure_probabilities(s));
            }
        } catch (const Error &e) {
            check = {"state-norm", false, e.what()};
        }
        report.checks.push_back(check);
    }

    if (model.retrieve) {
        VerificationCheck check{"roundtrip", false, "skipped: no state"};
        if (probabilities.size() == model.components) {
            try {
                ImageArray back = model.retrieve(probabilities, layout);
                if (back.values.size() != image.values.size()) {
                    check.detail = "retrieved image has the wrong shape";
                } else {
                    double worst = 0;
                    for (std::size_t i = 0; i < back.values.size(); i++) {
                        worst = std::max(worst, std::abs(back.values[i] - image.values[i]));
                    }
                    check.passed = worst <= model.roundtrip_tolerance;
                    check.detail = "max abs error " + std::to_string(worst) + " (tolerance " +
                                   std::to_string(model.roundtrip_tolerance) + ")";
                }
            } catch (const Error &e) {
                check.detail = e.what();
            }
        }
        report.checks.push_back(check);
    }
    return report;
}

}  // namespace geqie
