#pragma once

// File formats. All binary formats are little-endian.
//
//   GQS1 statevector   "GQS1" | u32 n_qubits | 2^n x (f64 re, f64 im)
//   GQU1 unitary       "GQU1" | u32 n_qubits | u64 reserved (0) | 4^n x (f64 re, f64 im), row-major
//   GQV1 voxel grid    "GQV1" | u32 dims[3] | f64 values, row-major; metadata in "<path>.json"
//   GQP1 point cloud   "GQP1" | u32 reserved (0) | u64 count | f64 box_size | count x 3 x f32
//   ASCII point cloud  "x y z" per line ('#' comments); box size in the sidecar "<path>.json"
//   counts JSON        {"n_qubits": n, "shots": s, "counts": {"<bitstring>": c, ...}}
//                      bitstrings are most-significant qubit first. shots = 0 carries
//                      "probabilities" instead of "counts".

#include <array>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "geqie/cosmicweb.hpp"
#include "geqie/errors.hpp"
#include "geqie/image.hpp"
#include "geqie/model.hpp"
#include "geqie/simcore.hpp"

namespace geqie::io {

using json = nlohmann::json;

namespace detail {

template <typename T>
void put(std::string &out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes, bytes + sizeof(T));
    }
    out.append(bytes, sizeof(T));
}

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {
    }

    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > data_.size()) {
            throw ParseError("unexpected end of file");
        }
        char bytes[sizeof(T)];
        std::memcpy(bytes, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) {
            std::reverse(bytes, bytes + sizeof(T));
        }
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }

    void expect_magic(const char (&magic)[5]) {
        if (data_.size() < 4 || data_.compare(0, 4, magic, 4) != 0) {
            throw ParseError(std::string("missing magic '") + magic + "'");
        }
        pos_ = 4;
    }

    bool at_end() const noexcept {
        return pos_ == data_.size();
    }

private:
    std::string data_;
    std::size_t pos_ = 0;
};

inline void put_complex(std::string &out, Complex c) {
    put(out, c.real());
    put(out, c.imag());
}

}  // namespace detail

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::string &path, const std::string &bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

inline std::string sidecar_path(const std::string &path) {
    return path + ".json";
}

// ---------------------------------------------------------------------------------------------
// Netpbm (PGM P2/P5, PPM P3/P6), maxval 255 only.

inline ImageArray parse_netpbm(const std::string &data) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') {
                    pos++;
                }
            } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                pos++;
            } else {
                break;
            }
        }
    };
    auto token = [&] {
        skip_space();
        std::size_t start = pos;
        while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') {
            pos++;
        }
        if (start == pos) {
            throw ParseError("netpbm: truncated header or data");
        }
        return data.substr(start, pos - start);
    };
    auto number = [&] {
        std::string t = token();
        for (char ch : t) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) {
                throw ParseError("netpbm: expected a number, got '" + t + "'");
            }
        }
        if (t.size() > 9) {
            throw ParseError("netpbm: number too large");
        }
        return static_cast<std::size_t>(std::stoul(t));
    };

    std::string magic = token();
    unsigned channels;
    bool binary;
    if (magic == "P2" || magic == "P5") {
        channels = 1;
        binary = magic == "P5";
    } else if (magic == "P3" || magic == "P6") {
        channels = 3;
        binary = magic == "P6";
    } else {
        throw ParseError("netpbm: unsupported magic '" + magic + "'");
    }
    std::size_t width = number();
    std::size_t height = number();
    std::size_t maxval = number();
    if (width == 0 || height == 0) {
        throw ParseError("netpbm: zero image size");
    }
    if (maxval != 255) {
        throw ParseError("netpbm: maxval must be 255, got " + std::to_string(maxval));
    }
    ImageArray img = ImageArray::zeros({height, width}, channels);
    std::size_t n = img.values.size();
    if (binary) {
        if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
            throw ParseError("netpbm: missing separator before raster");
        }
        pos++;
        if (data.size() - pos < n) {
            throw ParseError("netpbm: truncated raster");
        }
        for (std::size_t i = 0; i < n; i++) {
            img.values[i] = static_cast<unsigned char>(data[pos + i]) / 255.0;
        }
    } else {
        for (std::size_t i = 0; i < n; i++) {
            std::size_t v = number();
            if (v > 255) {
                throw ParseError("netpbm: sample exceeds maxval");
            }
            img.values[i] = static_cast<double>(v) / 255.0;
        }
    }
    return img;
}

inline ImageArray read_netpbm(const std::string &path) {
    return parse_netpbm(read_file(path));
}

/// Binary P5/P6 by default, ASCII P2/P3 when `ascii` is set.
inline std::string format_netpbm(const ImageArray &image, bool ascii = false) {
    image.validate();
    if (image.dims.size() != 2 || (image.channels != 1 && image.channels != 3)) {
        throw DomainError("netpbm holds 2-D grayscale or RGB images only");
    }
    const bool gray = image.channels == 1;
    std::string out = ascii ? (gray ? "P2\n" : "P3\n") : (gray ? "P5\n" : "P6\n");
    out += std::to_string(image.dims[1]) + " " + std::to_string(image.dims[0]) + "\n255\n";
    if (ascii) {
        std::size_t per_row = image.dims[1] * image.channels;
        for (std::size_t i = 0; i < image.values.size(); i++) {
            out += std::to_string(to_8bit(image.values[i]));
            out += (i + 1) % per_row == 0 ? '\n' : ' ';
        }
    } else {
        for (double v : image.values) {
            out.push_back(static_cast<char>(to_8bit(v)));
        }
    }
    return out;
}

inline void write_netpbm(const std::string &path, const ImageArray &image, bool ascii = false) {
    write_file(path, format_netpbm(image, ascii));
}

// ---------------------------------------------------------------------------------------------
// Statevector and unitary.

inline std::string format_state(const StateVector &state) {
    std::string out = "GQS1";
    detail::put<uint32_t>(out, state.n_qubits());
    for (const auto &a : state.amplitudes()) {
        detail::put_complex(out, a);
    }
    return out;
}

inline StateVector parse_state(const std::string &data) {
    detail::Reader r(data);
    r.expect_magic("GQS1");
    auto n = r.get<uint32_t>();
    if (n < 1 || n > kStateMaxQubits) {
        throw ParseError("GQS1: unsupported qubit count " + std::to_string(n));
    }
    std::vector<Complex> amps(basis_dim(n));
    for (auto &a : amps) {
        double re = r.get<double>();
        double im = r.get<double>();
        a = {re, im};
    }
    if (!r.at_end()) {
        throw ParseError("GQS1: trailing bytes");
    }
    try {
        return StateVector(n, std::move(amps));
    } catch (const DomainError &e) {
        throw ParseError(std::string("GQS1: ") + e.what());
    }
}

inline void write_state(const std::string &path, const StateVector &state) {
    write_file(path, format_state(state));
}

inline StateVector read_state(const std::string &path) {
    return parse_state(read_file(path));
}

inline std::string format_unitary(const UnitaryMatrix &u) {
    std::string out = "GQU1";
    detail::put<uint32_t>(out, u.n_qubits);
    detail::put<uint64_t>(out, 0);
    for (const auto &e : u.entries) {
        detail::put_complex(out, e);
    }
    return out;
}

inline UnitaryMatrix parse_unitary(const std::string &data) {
    detail::Reader r(data);
    r.expect_magic("GQU1");
    UnitaryMatrix u;
    u.n_qubits = r.get<uint32_t>();
    r.get<uint64_t>();
    if (u.n_qubits < 1 || u.n_qubits > kDensityMaxQubits) {
        throw ParseError("GQU1: unsupported qubit count");
    }
    u.entries.resize(u.dim() * u.dim());
    for (auto &e : u.entries) {
        double re = r.get<double>();
        double im = r.get<double>();
        e = {re, im};
    }
    if (!r.at_end()) {
        throw ParseError("GQU1: trailing bytes");
    }
    return u;
}

inline constexpr unsigned kUnitaryJsonMaxQubits = 4;

/// {"n_qubits": n, "entries": [[[re, im], ...], ...]} (rows of columns), n <= 4.
inline json unitary_to_json(const UnitaryMatrix &u) {
    if (u.n_qubits > kUnitaryJsonMaxQubits) {
        throw CapacityError(u.n_qubits, kUnitaryJsonMaxQubits, "JSON unitary export");
    }
    json rows = json::array();
    for (uint64_t r = 0; r < u.dim(); r++) {
        json row = json::array();
        for (uint64_t c = 0; c < u.dim(); c++) {
            row.push_back({u(r, c).real(), u(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return {{"n_qubits", u.n_qubits}, {"entries", std::move(rows)}};
}

// ---------------------------------------------------------------------------------------------
// Counts / probabilities JSON.

inline std::string to_bitstring(uint64_t index, unsigned n_qubits) {
    std::string s(n_qubits, '0');
    for (unsigned q = 0; q < n_qubits; q++) {
        if ((index >> q) & 1u) {
            s[n_qubits - 1 - q] = '1';
        }
    }
    return s;
}

inline uint64_t from_bitstring(const std::string &bits, unsigned n_qubits) {
    if (bits.size() != n_qubits) {
        throw ParseError("bitstring '" + bits + "' does not have " + std::to_string(n_qubits) + " digits");
    }
    uint64_t index = 0;
    for (char ch : bits) {
        if (ch != '0' && ch != '1') {
            throw ParseError("bitstring '" + bits + "' contains a non-binary digit");
        }
        index = (index << 1) | static_cast<uint64_t>(ch == '1');
    }
    return index;
}

inline json counts_to_json(const CountsHistogram &h) {
    json counts = json::object();
    for (const auto &[k, v] : h.counts()) {
        counts[to_bitstring(k, h.n_qubits())] = v;
    }
    return {{"n_qubits", h.n_qubits()}, {"shots", h.shots()}, {"counts", std::move(counts)}};
}

/// The shots = 0 form: exact outcome probabilities (zero entries omitted).
inline json probabilities_to_json(std::span<const double> probs) {
    unsigned n = geqie::detail::log2_exact(probs.size());
    json p = json::object();
    for (uint64_t i = 0; i < probs.size(); i++) {
        if (probs[i] > 0.0) {
            p[to_bitstring(i, n)] = probs[i];
        }
    }
    return {{"n_qubits", n}, {"shots", 0}, {"probabilities", std::move(p)}};
}

/// Parsed counts or probabilities document.
struct OutcomeDocument {
    unsigned n_qubits = 0;
    uint64_t shots = 0;
    std::vector<double> weights;  // dense, length 2^n: counts, or probabilities when shots == 0

    CountsHistogram histogram() const {
        if (shots == 0) {
            throw DomainError("document holds exact probabilities, not counts");
        }
        std::map<uint64_t, uint64_t> counts;
        for (uint64_t i = 0; i < weights.size(); i++) {
            if (weights[i] > 0) {
                counts[i] = static_cast<uint64_t>(weights[i]);
            }
        }
        return CountsHistogram(n_qubits, std::move(counts), shots);
    }
};

inline OutcomeDocument parse_outcomes(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        throw ParseError(std::string("counts JSON: ") + e.what());
    }
    try {
        OutcomeDocument out;
        out.n_qubits = doc.at("n_qubits").get<unsigned>();
        out.shots = doc.at("shots").get<uint64_t>();
        if (out.n_qubits < 1 || out.n_qubits > kStateMaxQubits) {
            throw ParseError("counts JSON: unsupported qubit count");
        }
        out.weights.assign(basis_dim(out.n_qubits), 0.0);
        if (out.shots == 0) {
            double total = 0;
            for (const auto &[bits, p] : doc.at("probabilities").items()) {
                double v = p.get<double>();
                if (!(v >= 0.0)) {
                    throw ParseError("counts JSON: negative probability");
                }
                out.weights[from_bitstring(bits, out.n_qubits)] = v;
                total += v;
            }
            if (std::abs(total - 1.0) > kProbabilityTolerance) {
                throw ParseError("counts JSON: probabilities do not sum to 1");
            }
        } else {
            uint64_t total = 0;
            for (const auto &[bits, c] : doc.at("counts").items()) {
                auto v = c.get<uint64_t>();
                out.weights[from_bitstring(bits, out.n_qubits)] = static_cast<double>(v);
                total += v;
            }
            if (total != out.shots) {
                throw ParseError("counts JSON: counts sum to " + std::to_string(total) + ", shots = " +
                                 std::to_string(out.shots));
            }
        }
        return out;
    } catch (const json::exception &e) {
        throw ParseError(std::string("counts JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// Voxel grids.

inline json grid_metadata(const VoxelGrid &grid) {
    json meta = {{"format", "GQV1"}, {"dims", {grid.resolution, grid.resolution, grid.resolution}}};
    if (grid.normalization) {
        meta["normalization"] = {{"scheme", to_string(grid.normalization->scheme)},
                                 {"scale", grid.normalization->scale}};
    } else {
        meta["normalization"] = nullptr;
    }
    return meta;
}

inline void write_grid(const std::string &path, const VoxelGrid &grid) {
    grid.validate();
    std::string out = "GQV1";
    for (int a = 0; a < 3; a++) {
        detail::put<uint32_t>(out, static_cast<uint32_t>(grid.resolution));
    }
    for (double v : grid.densities) {
        detail::put(out, v);
    }
    write_file(path, out);
    write_file(sidecar_path(path), grid_metadata(grid).dump(2) + "\n");
}

inline VoxelGrid read_grid(const std::string &path) {
    detail::Reader r(read_file(path));
    r.expect_magic("GQV1");
    std::array<uint32_t, 3> dims{};
    for (auto &d : dims) {
        d = r.get<uint32_t>();
    }
    if (dims[0] != dims[1] || dims[1] != dims[2] || dims[0] == 0 || dims[0] > 1024) {
        throw ParseError("GQV1: only cubic grids up to 1024^3 are supported");
    }
    VoxelGrid grid;
    grid.resolution = dims[0];
    grid.densities.resize(grid.resolution * grid.resolution * grid.resolution);
    for (auto &v : grid.densities) {
        v = r.get<double>();
    }
    if (!r.at_end()) {
        throw ParseError("GQV1: trailing bytes");
    }
    std::ifstream side(sidecar_path(path));
    if (side) {
        try {
            json meta = json::parse(side);
            if (meta.contains("normalization") && !meta["normalization"].is_null()) {
                const auto &n = meta["normalization"];
                grid.normalization =
                    Normalization{parse_norm_scheme(n.at("scheme").get<std::string>()), n.at("scale").get<double>()};
            }
        } catch (const json::exception &e) {
            throw ParseError(std::string("GQV1 sidecar: ") + e.what());
        }
    }
    try {
        grid.validate();
    } catch (const DomainError &e) {
        throw ParseError(std::string("GQV1: ") + e.what());
    }
    return grid;
}

// ---------------------------------------------------------------------------------------------
// Point clouds.

inline void write_points_binary(const std::string &path, const PointCloud &cloud) {
    std::string out = "GQP1";
    detail::put<uint32_t>(out, 0);
    detail::put<uint64_t>(out, cloud.points.size());
    detail::put<double>(out, cloud.box_size);
    for (const auto &p : cloud.points) {
        for (double x : p) {
            detail::put<float>(out, static_cast<float>(x));
        }
    }
    write_file(path, out);
}

inline void write_points_ascii(const std::string &path, const PointCloud &cloud) {
    std::ostringstream os;
    os.precision(9);
    for (const auto &p : cloud.points) {
        os << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
    }
    write_file(path, os.str());
    write_file(sidecar_path(path), json{{"box_size", cloud.box_size}}.dump(2) + "\n");
}

/// Reads GQP1 when the file starts with the magic, the ASCII form (plus sidecar) otherwise.
inline PointCloud read_points(const std::string &path) {
    std::string data = read_file(path);
    PointCloud cloud;
    if (data.compare(0, 4, "GQP1") == 0) {
        detail::Reader r(std::move(data));
        r.expect_magic("GQP1");
        r.get<uint32_t>();
        auto count = r.get<uint64_t>();
        cloud.box_size = r.get<double>();
        cloud.points.reserve(count);
        for (uint64_t i = 0; i < count; i++) {
            std::array<double, 3> p{};
            for (auto &x : p) {
                x = r.get<float>();
            }
            cloud.points.push_back(p);
        }
    } else {
        std::ifstream side(sidecar_path(path));
        if (!side) {
            throw ParseError("ASCII point cloud needs a sidecar '" + sidecar_path(path) + "' with box_size");
        }
        try {
            cloud.box_size = json::parse(side).at("box_size").get<double>();
        } catch (const json::exception &e) {
            throw ParseError(std::string("point cloud sidecar: ") + e.what());
        }
        std::istringstream in(data);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            lineno++;
            auto hash = line.find('#');
            if (hash != std::string::npos) {
                line.resize(hash);
            }
            std::istringstream ls(line);
            std::array<double, 3> p{};
            if (!(ls >> p[0])) {
                continue;
            }
            std::string rest;
            if (!(ls >> p[1] >> p[2]) || (ls >> rest)) {
                throw ParseError("point cloud line " + std::to_string(lineno) + ": expected 'x y z'");
            }
            cloud.points.push_back(p);
        }
    }
    try {
        cloud.validate();
    } catch (const DomainError &e) {
        throw ParseError(std::string("point cloud: ") + e.what());
    }
    return cloud;
}

}  // namespace geqie::io
