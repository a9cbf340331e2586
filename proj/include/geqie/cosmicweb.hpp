#pragma once

// Volumetric density grids from n-body point clouds: voxelization, invertible normalizations into
// [0, 1), spread statistics, and the MFRQI round trip.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "geqie/encodings.hpp"
#include "geqie/errors.hpp"
#include "geqie/metrics.hpp"
#include "geqie/rng.hpp"
#include "geqie/simcore.hpp"

namespace geqie {

struct PointCloud {
    std::vector<std::array<double, 3>> points;
    double box_size = 1.0;

    std::size_t count() const noexcept {
        return points.size();
    }

    void validate() const {
        if (!(box_size > 0.0)) {
            throw DomainError("box size must be positive");
        }
        for (const auto &p : points) {
            for (double x : p) {
                if (!(x >= 0.0 && x <= box_size)) {
                    throw DomainError("point coordinate " + std::to_string(x) + " outside [0, " +
                                      std::to_string(box_size) + "]");
                }
            }
        }
    }
};

enum class NormBase { E, Ten };
enum class NormStatistic { Mean, Median, MeanNonzeroSquared, MedianNonzeroSquared };

struct NormScheme {
    NormBase base = NormBase::E;
    NormStatistic statistic = NormStatistic::Mean;

    friend bool operator==(const NormScheme &, const NormScheme &) = default;
};

inline std::string to_string(const NormScheme &s) {
    std::string out = s.base == NormBase::E ? "e-" : "10-";
    switch (s.statistic) {
        case NormStatistic::Mean:
            return out + "mean";
        case NormStatistic::Median:
            return out + "median";
        case NormStatistic::MeanNonzeroSquared:
            return out + "mean-nonzero-sq";
        case NormStatistic::MedianNonzeroSquared:
            return out + "median-nonzero-sq";
    }
    return out + "?";
}

/// The six supported normalizations.
inline const std::vector<NormScheme> &shipped_schemes() {
    static const std::vector<NormScheme> schemes = {
        {NormBase::E, NormStatistic::Mean},
        {NormBase::E, NormStatistic::Median},
        {NormBase::Ten, NormStatistic::Mean},
        {NormBase::Ten, NormStatistic::Median},
        {NormBase::E, NormStatistic::MeanNonzeroSquared},
        {NormBase::E, NormStatistic::MedianNonzeroSquared},
    };
    return schemes;
}

inline NormScheme parse_norm_scheme(const std::string &text) {
    for (const auto &s : shipped_schemes()) {
        if (to_string(s) == text) {
            return s;
        }
    }
    throw DomainError("unknown normalization '" + text +
                      "' (expected e-mean, e-median, 10-mean, 10-median, e-mean-nonzero-sq or e-median-nonzero-sq)");
}

struct Normalization {
    NormScheme scheme;
    double scale = 1.0;
};

/// Cubic density grid, row-major (i, j, k) with k fastest.
struct VoxelGrid {
    std::size_t resolution = 0;
    std::vector<double> densities;
    std::optional<Normalization> normalization;

    std::size_t voxel_count() const noexcept {
        return densities.size();
    }
    std::size_t flat(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return (i * resolution + j) * resolution + k;
    }
    Extents extents() const {
        return {resolution, resolution, resolution};
    }

    void validate() const {
        if (resolution < 1 || densities.size() != resolution * resolution * resolution) {
            throw DomainError("voxel grid size does not match its resolution");
        }
        for (double v : densities) {
            if (!(v >= 0.0)) {
                throw DomainError("voxel densities must be non-negative");
            }
            if (normalization && !(v < 1.0)) {
                throw DomainError("normalized voxel values must lie in [0, 1)");
            }
        }
    }
};

/// Counts points per voxel. A coordinate equal to box_size falls in the last voxel.
inline VoxelGrid voxelize(const PointCloud &cloud, std::size_t resolution) {
    if (resolution < 2 || !std::has_single_bit(resolution)) {
        throw DomainError("voxel resolution must be a power of two >= 2");
    }
    if (cloud.points.empty()) {
        throw DomainError("cannot voxelize an empty point cloud");
    }
    cloud.validate();
    VoxelGrid grid;
    grid.resolution = resolution;
    grid.densities.assign(resolution * resolution * resolution, 0.0);
    const double scale = static_cast<double>(resolution) / cloud.box_size;
    auto bin = [&](double x) {
        return std::min(resolution - 1, static_cast<std::size_t>(std::floor(x * scale)));
    };
    for (const auto &p : cloud.points) {
        grid.densities[grid.flat(bin(p[0]), bin(p[1]), bin(p[2]))] += 1.0;
    }
    return grid;
}

namespace detail {

/// Lower median: element (n - 1) / 2 of the sorted values.
inline double lower_median(std::vector<double> values) {
    if (values.empty()) {
        return 0.0;
    }
    auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

inline double mean_of(const std::vector<double> &values) {
    if (values.empty()) {
        return 0.0;
    }
    double s = 0;
    for (double v : values) {
        s += v;
    }
    return s / static_cast<double>(values.size());
}

inline std::vector<double> nonzero(const std::vector<double> &values) {
    std::vector<double> out;
    std::copy_if(values.begin(), values.end(), std::back_inserter(out), [](double v) { return v != 0.0; });
    return out;
}

inline double log_base(NormBase base) {
    return base == NormBase::E ? 1.0 : std::numbers::ln10;
}

}  // namespace detail

/// The scale s in 1 - base^(-x/s) for a scheme.
inline double scale_statistic(const VoxelGrid &grid, NormStatistic statistic) {
    switch (statistic) {
        case NormStatistic::Mean:
            return detail::mean_of(grid.densities);
        case NormStatistic::Median:
            return detail::lower_median(grid.densities);
        case NormStatistic::MeanNonzeroSquared: {
            double m = detail::mean_of(detail::nonzero(grid.densities));
            return m * m;
        }
        case NormStatistic::MedianNonzeroSquared: {
            double m = detail::lower_median(detail::nonzero(grid.densities));
            return m * m;
        }
    }
    return 0.0;
}

inline double normalize_value(double x, const Normalization &n) {
    double v = -std::expm1(-x / n.scale * detail::log_base(n.scheme.base));
    return std::min(v, std::nextafter(1.0, 0.0));
}

inline constexpr double kSaturationClamp = 1.0 - 1e-12;

/// Inverse of normalize_value; v >= 1 (saturated sampling) is clamped to 1 - 1e-12 first.
inline double denormalize_value(double v, const Normalization &n) {
    v = std::clamp(v, 0.0, kSaturationClamp);
    return -n.scale * std::log1p(-v) / detail::log_base(n.scheme.base);
}

/// value = 1 - base^(-x / s); the scale s is kept in the grid metadata for inversion.
inline VoxelGrid normalize(const VoxelGrid &grid, const NormScheme &scheme) {
    if (grid.normalization) {
        throw DomainError("grid is already normalized");
    }
    grid.validate();
    double s = scale_statistic(grid, scheme.statistic);
    if (!(s > 0.0)) {
        throw DomainError("degenerate scale: " + to_string(scheme) + " statistic is zero");
    }
    VoxelGrid out;
    out.resolution = grid.resolution;
    out.normalization = Normalization{scheme, s};
    out.densities.resize(grid.densities.size());
    for (std::size_t i = 0; i < grid.densities.size(); i++) {
        out.densities[i] = normalize_value(grid.densities[i], *out.normalization);
    }
    return out;
}

inline VoxelGrid denormalize(const VoxelGrid &grid) {
    if (!grid.normalization) {
        throw DomainError("grid carries no normalization metadata");
    }
    VoxelGrid out;
    out.resolution = grid.resolution;
    out.densities.resize(grid.densities.size());
    for (std::size_t i = 0; i < grid.densities.size(); i++) {
        out.densities[i] = denormalize_value(grid.densities[i], *grid.normalization);
    }
    return out;
}

/// Population standard deviation over all voxels.
inline double spread_sigma(const VoxelGrid &grid) {
    if (grid.densities.empty()) {
        return 0.0;
    }
    double m = detail::mean_of(grid.densities);
    double s = 0;
    for (double v : grid.densities) {
        s += (v - m) * (v - m);
    }
    return std::sqrt(s / static_cast<double>(grid.densities.size()));
}

inline double zero_fraction(const VoxelGrid &grid) {
    if (grid.densities.empty()) {
        return 0.0;
    }
    auto zeros = std::count(grid.densities.begin(), grid.densities.end(), 0.0);
    return static_cast<double>(zeros) / static_cast<double>(grid.densities.size());
}

struct Histogram {
    std::vector<double> edges;  // bins + 1 edges
    std::vector<uint64_t> counts;
};

/// Equal-width bins over [0, 1] for normalized grids, [0, max] otherwise. The last bin is closed.
inline Histogram histogram(const VoxelGrid &grid, std::size_t bins) {
    if (bins < 2) {
        throw DomainError("histogram needs at least two bins");
    }
    double hi = 1.0;
    if (!grid.normalization) {
        double mx = grid.densities.empty() ? 0.0 : *std::max_element(grid.densities.begin(), grid.densities.end());
        hi = mx > 0.0 ? mx : 1.0;
    }
    Histogram h;
    h.counts.assign(bins, 0);
    for (std::size_t b = 0; b <= bins; b++) {
        h.edges.push_back(hi * static_cast<double>(b) / static_cast<double>(bins));
    }
    for (double v : grid.densities) {
        auto b = static_cast<std::size_t>(std::floor(v / hi * static_cast<double>(bins)));
        h.counts[std::min(bins - 1, b)]++;
    }
    return h;
}

// ---------------------------------------------------------------------------------------------
// Synthetic snapshot.

/// Gaussian-blob mixture over a uniform background in a periodic box.
///
/// The defaults give 10^5 points in a 200 Mpc/h box whose 16^3 grid, normalized with (e, median), has a
/// voxel spread of about 0.21, comparable to down-sampled n-body snapshots at that resolution.
struct SyntheticCloudParams {
    std::size_t count = 100000;
    double box_size = 200.0;  // Mpc/h
    double background_fraction = 0.15;
    std::size_t blobs = 12;
    double sigma_min = 25.0;  // blob radius range, Mpc/h
    double sigma_max = 40.0;
};

inline PointCloud synthetic_cloud(uint64_t seed, const SyntheticCloudParams &params = {}) {
    if (params.count == 0 || params.blobs == 0 || !(params.box_size > 0.0)) {
        throw DomainError("synthetic cloud needs points, blobs and a positive box");
    }
    CounterRng rng(derive_seed(seed, 0xC105u));
    const double box = params.box_size;

    std::vector<std::array<double, 3>> centers(params.blobs);
    std::vector<double> sigmas(params.blobs);
    std::vector<double> cdf(params.blobs);
    double acc = 0;
    for (std::size_t b = 0; b < params.blobs; b++) {
        for (auto &x : centers[b]) {
            x = rng.uniform() * box;
        }
        sigmas[b] = params.sigma_min + (params.sigma_max - params.sigma_min) * rng.uniform();
        acc += -std::log1p(-rng.uniform());  // Exp(1) weights -> flat Dirichlet
        cdf[b] = acc;
    }
    auto gaussian = [&rng]() {
        double u1 = rng.uniform();
        double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    };
    auto wrap = [box](double x) {
        double w = std::fmod(x, box);
        if (w < 0.0) {
            w += box;
        }
        return w >= box ? 0.0 : w;
    };

    PointCloud cloud;
    cloud.box_size = box;
    cloud.points.reserve(params.count);
    auto background = static_cast<std::size_t>(std::llround(params.background_fraction * params.count));
    for (std::size_t i = 0; i < params.count; i++) {
        std::array<double, 3> p{};
        if (i < background) {
            for (auto &x : p) {
                x = rng.uniform() * box;
            }
        } else {
            double u = rng.uniform() * acc;
            auto b = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
            b = std::min(b, params.blobs - 1);
            for (int a = 0; a < 3; a++) {
                p[a] = wrap(centers[b][a] + sigmas[b] * gaussian());
            }
        }
        cloud.points.push_back(p);
    }
    return cloud;
}

// ---------------------------------------------------------------------------------------------
// Round trip.

struct CosmicReport {
    double pcc_normalized = 0.0;
    double pcc_denormalized = 0.0;
    unsigned qubits = 0;
    VoxelGrid normalized;            // input after normalization
    VoxelGrid retrieved_normalized;  // decoded, still normalized
    VoxelGrid retrieved;             // decoded and de-normalized
};

/// normalize -> MFRQI encode -> sample (shots = 0: exact probabilities) -> retrieve -> denormalize.
inline CosmicReport cosmic_roundtrip(const VoxelGrid &grid, const NormScheme &scheme, uint64_t shots, uint64_t seed,
                                     unsigned max_qubits = 16, unsigned threads = 1) {
    CosmicReport report;
    report.normalized = normalize(grid, scheme);

    ImageArray image = ImageArray::zeros(grid.extents(), 1);
    image.values = report.normalized.densities;
    StateVector state = encode("mfrqi", image, max_qubits);
    report.qubits = state.n_qubits();

    std::vector<double> weights = measure_probabilities(state);
    if (shots > 0) {
        weights = sample_counts(weights, shots, seed, threads).weights();
    }
    ImageArray back = retrieve_weights("mfrqi", weights, image.dims);

    report.retrieved_normalized.resolution = grid.resolution;
    report.retrieved_normalized.normalization = report.normalized.normalization;
    report.retrieved_normalized.densities = back.values;
    for (auto &v : report.retrieved_normalized.densities) {
        v = std::min(v, kSaturationClamp);
    }
    report.retrieved = denormalize(report.retrieved_normalized);
    report.pcc_normalized = pcc(report.normalized.densities, report.retrieved_normalized.densities);
    report.pcc_denormalized = pcc(grid.densities, report.retrieved.densities);
    return report;
}

}  // namespace geqie
