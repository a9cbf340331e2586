// geqie: encode, simulate and retrieve quantum image encodings; run the benchmark matrix and the
// cosmic-web volumetric pipeline.
//
// Exit codes: 0 ok, 1 internal error, 2 bad input, 3 qubit cap exceeded.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geqie/geqie.hpp"

namespace {

using nlohmann::json;
using namespace geqie;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitCapacity = 3;

constexpr unsigned kDefaultMaxQubits = 12;

/// --max-qubits, else GEQIE_MAX_QUBITS, else 12.
unsigned resolve_cap(const std::optional<unsigned> &flag) {
    if (flag) {
        return *flag;
    }
    if (const char *env = std::getenv("GEQIE_MAX_QUBITS"); env && *env) {
        try {
            std::size_t used = 0;
            unsigned long v = std::stoul(env, &used);
            if (used == std::string(env).size() && v >= 1 && v <= kStateMaxQubits) {
                return static_cast<unsigned>(v);
            }
        } catch (const std::exception &) {
        }
        throw DomainError(std::string("GEQIE_MAX_QUBITS='") + env + "' is not an integer in [1, " +
                          std::to_string(kStateMaxQubits) + "]");
    }
    return kDefaultMaxQubits;
}

/// "4x4", "4,4" or "16x16x16".
Extents parse_dims(const std::string &text) {
    Extents dims;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, text.find(',') != std::string::npos ? ',' : 'x')) {
        try {
            std::size_t used = 0;
            unsigned long v = std::stoul(token, &used);
            if (used != token.size() || v == 0) {
                throw DomainError("");
            }
            dims.push_back(v);
        } catch (const std::exception &) {
            throw DomainError("bad dimensions '" + text + "' (expected e.g. 4x4)");
        }
    }
    if (dims.empty()) {
        throw DomainError("bad dimensions '" + text + "' (expected e.g. 4x4)");
    }
    return dims;
}

void emit_json(const json &doc, const std::string &path) {
    std::string text = doc.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        io::write_file(path, text);
    }
}

bool ends_with(const std::string &s, const std::string &suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Common {
    std::optional<unsigned> max_qubits;
    unsigned ncqi_bits = 3;

    void attach(CLI::App *cmd) {
        cmd->add_option("--max-qubits", max_qubits, "Qubit cap (default: $GEQIE_MAX_QUBITS or 12)")
            ->check(CLI::Range(1u, kStateMaxQubits));
        cmd->add_option("--ncqi-bits", ncqi_bits, "Bits per channel for ncqi")->check(CLI::Range(1u, 8u));
    }
    MethodOptions options() const {
        MethodOptions o;
        o.ncqi_bits = ncqi_bits;
        return o;
    }
};

// -------------------------------------------------------------------------------------------------

struct EncodeArgs {
    Common common;
    std::string method, input, output_state, output_unitary;
};

int run_encode(const EncodeArgs &a) {
    if (a.output_state.empty() && a.output_unitary.empty()) {
        throw DomainError("nothing to write: pass --output-state and/or --output-unitary");
    }
    unsigned cap = resolve_cap(a.common.max_qubits);
    ImageArray image = io::read_netpbm(a.input);
    StateVector state = encode(a.method, image, cap, a.common.options());
    if (!a.output_state.empty()) {
        io::write_state(a.output_state, state);
    }
    if (!a.output_unitary.empty()) {
        UnitaryMatrix u = completion_unitary(state);
        if (ends_with(a.output_unitary, ".json")) {
            io::write_file(a.output_unitary, io::unitary_to_json(u).dump() + "\n");
        } else {
            io::write_file(a.output_unitary, io::format_unitary(u));
        }
    }
    std::cerr << a.method << ": " << format_extents(image.dims) << " x " << image.channels << " -> "
              << state.n_qubits() << " qubits\n";
    return kExitOk;
}

// -------------------------------------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string state_path, method, input, output = "-", noise_mode;
    uint64_t shots = 1024;
    double lambda = 0.0;
    uint64_t seed = 0;
    unsigned threads = 1;
};

int run_simulate(const SimulateArgs &a) {
    unsigned cap = resolve_cap(a.common.max_qubits);
    std::optional<StateVector> state;
    if (!a.state_path.empty()) {
        if (!a.method.empty() || !a.input.empty()) {
            throw DomainError("pass either --state or --method with --input, not both");
        }
        state = io::read_state(a.state_path);
        if (state->n_qubits() > cap) {
            throw CapacityError(state->n_qubits(), cap, "state file");
        }
    } else {
        if (a.method.empty() || a.input.empty()) {
            throw DomainError("pass --state, or --method with --input");
        }
        state = encode(a.method, io::read_netpbm(a.input), cap, a.common.options());
    }

    NoiseSpec noise{a.lambda, a.noise_mode.empty() ? default_noise_mode(a.shots) : parse_noise_mode(a.noise_mode)};
    noise.validate();
    json doc;
    if (noise.mode == NoiseMode::Trajectories) {
        if (a.shots == 0) {
            throw DomainError("trajectories mode needs shots >= 1");
        }
        doc = io::counts_to_json(sample_counts_trajectories(*state, noise.lambda, a.shots, a.seed, a.threads));
    } else {
        if (state->n_qubits() > kDensityMaxQubits) {
            throw CapacityError(state->n_qubits(), kDensityMaxQubits,
                                to_string(noise.mode) + " noise builds a density matrix (use --noise-mode trajectories)");
        }
        auto probs = noisy_probabilities_dense(*state, noise);
        doc = a.shots == 0 ? io::probabilities_to_json(probs)
                           : io::counts_to_json(sample_counts(probs, a.shots, a.seed, a.threads));
    }
    emit_json(doc, a.output);
    return kExitOk;
}

// -------------------------------------------------------------------------------------------------

struct RetrieveArgs {
    Common common;
    std::string method, counts, dims, output;
    bool ascii = false;
};

int run_retrieve(const RetrieveArgs &a) {
    Extents dims = parse_dims(a.dims);
    io::OutcomeDocument doc = io::parse_outcomes(io::read_file(a.counts));
    unsigned need = lookup(a.method, a.common.options()).budget(dims);
    if (doc.n_qubits != need) {
        throw DomainError("counts cover " + std::to_string(doc.n_qubits) + " qubits but '" + a.method + "' on " +
                          format_extents(dims) + " uses " + std::to_string(need));
    }
    ImageArray image = retrieve_weights(a.method, doc.weights, dims, a.common.options());
    if (image.dims.size() != 2) {
        throw DomainError("retrieved image has " + std::to_string(image.dims.size()) +
                          " axes; PGM/PPM output needs 2");
    }
    io::write_netpbm(a.output, image, a.ascii);
    return kExitOk;
}

// -------------------------------------------------------------------------------------------------

struct BenchmarkArgs {
    Common common;
    std::string config, output_dir, noise_mode;
    std::vector<std::string> methods;
    std::vector<std::size_t> sizes;
    std::vector<double> lambdas;
    std::optional<std::size_t> images;
    std::optional<uint64_t> shots, seed;
    std::optional<unsigned> threads;
};

int run_benchmark_cmd(const BenchmarkArgs &a) {
    BenchmarkConfig c;
    if (!a.config.empty()) {
        json j;
        try {
            j = json::parse(io::read_file(a.config));
        } catch (const json::exception &e) {
            throw ParseError(std::string("benchmark config: ") + e.what());
        }
        c = parse_benchmark_config(j);
    }
    if (!a.methods.empty()) {
        c.methods = a.methods;
    }
    if (!a.sizes.empty()) {
        c.sizes = a.sizes;
    }
    if (!a.lambdas.empty()) {
        c.lambdas = a.lambdas;
    }
    if (a.images) {
        c.images_per_size = *a.images;
    }
    if (a.shots) {
        c.shots = *a.shots;
    }
    if (a.seed) {
        c.master_seed = *a.seed;
    }
    if (a.threads) {
        c.threads = *a.threads;
    }
    if (!a.noise_mode.empty()) {
        c.noise_mode = parse_noise_mode(a.noise_mode);
    }
    if (a.common.max_qubits || std::getenv("GEQIE_MAX_QUBITS")) {
        c.max_qubits = resolve_cap(a.common.max_qubits);
    }
    if (a.common.ncqi_bits != 3) {
        c.options.ncqi_bits = a.common.ncqi_bits;
    }
    for (const auto &m : c.methods) {
        if (lookup(m, c.options).family == Family::Multidim) {
            throw DomainError("method '" + m + "' is volumetric; the benchmark covers 2D images");
        }
    }
    for (double l : c.lambdas) {
        require_lambda(l);
    }

    auto records = run_benchmark(c);
    write_benchmark(a.output_dir, records);
    std::size_t skipped = 0;
    for (const auto &r : records) {
        skipped += r.skipped;
    }
    std::cerr << records.size() << " cells (" << skipped << " skipped), shots=" << c.shots
              << ", noise=" << to_string(c.resolved_noise_mode()) << ", written to " << a.output_dir << "\n";
    return kExitOk;
}

// -------------------------------------------------------------------------------------------------

struct VerifyArgs {
    Common common;
    std::string method, dims = "4x4";
    uint64_t seed = 0x5EED;
};

int run_verify(const VerifyArgs &a) {
    unsigned cap = resolve_cap(a.common.max_qubits);
    Extents dims = parse_dims(a.dims);
    EncodingModel model = make_model(a.method, a.common.options());
    VerificationReport report = verify_model(model, dims, a.seed, cap);
    for (const auto &c : report.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
    }
    if (const auto *cap_check = report.find("capacity"); cap_check && !cap_check->passed) {
        return kExitCapacity;
    }
    return report.passed() ? kExitOk : kExitInternal;
}

// -------------------------------------------------------------------------------------------------
// cosmic

struct SynthArgs {
    std::string output;
    uint64_t seed = 1;
    SyntheticCloudParams params;
    bool ascii = false;
};

int run_synth(const SynthArgs &a) {
    PointCloud cloud = synthetic_cloud(a.seed, a.params);
    if (a.ascii) {
        io::write_points_ascii(a.output, cloud);
    } else {
        io::write_points_binary(a.output, cloud);
    }
    return kExitOk;
}

struct VoxelizeArgs {
    std::string input, output;
    std::size_t resolution = 16;
};

int run_voxelize(const VoxelizeArgs &a) {
    VoxelGrid grid = voxelize(io::read_points(a.input), a.resolution);
    io::write_grid(a.output, grid);
    std::cerr << "voxels=" << grid.voxel_count() << " zero_fraction=" << zero_fraction(grid) << "\n";
    return kExitOk;
}

struct NormalizeArgs {
    std::string input, output, scheme = "e-median";
    bool inverse = false;
};

int run_normalize(const NormalizeArgs &a) {
    VoxelGrid grid = io::read_grid(a.input);
    VoxelGrid out = a.inverse ? denormalize(grid) : normalize(grid, parse_norm_scheme(a.scheme));
    io::write_grid(a.output, out);
    std::cerr << "sigma=" << spread_sigma(out) << "\n";
    return kExitOk;
}

struct HistogramArgs {
    std::string input, output = "-";
    std::size_t bins = 50;
};

int run_histogram(const HistogramArgs &a) {
    VoxelGrid grid = io::read_grid(a.input);
    Histogram h = histogram(grid, a.bins);
    json doc = {{"bins", a.bins},
                {"edges", h.edges},
                {"counts", h.counts},
                {"sigma", spread_sigma(grid)},
                {"zero_fraction", zero_fraction(grid)},
                {"normalized", grid.normalization.has_value()}};
    emit_json(doc, a.output);
    return kExitOk;
}

struct CosmicRoundtripArgs {
    Common common;
    std::string input, output_grid, report = "-", scheme = "e-median";
    uint64_t shots = uint64_t{1} << 20;
    uint64_t seed = 0;
    unsigned threads = 1;
};

int run_cosmic_roundtrip(const CosmicRoundtripArgs &a) {
    unsigned cap = a.common.max_qubits || std::getenv("GEQIE_MAX_QUBITS") ? resolve_cap(a.common.max_qubits) : 16;
    VoxelGrid grid = io::read_grid(a.input);
    CosmicReport r = cosmic_roundtrip(grid, parse_norm_scheme(a.scheme), a.shots, a.seed, cap, a.threads);
    if (!a.output_grid.empty()) {
        io::write_grid(a.output_grid, r.retrieved);
    }
    json doc = {{"scheme", a.scheme},
                {"resolution", grid.resolution},
                {"qubits", r.qubits},
                {"shots", a.shots},
                {"seed", a.seed},
                {"scale", r.normalized.normalization->scale},
                {"sigma_normalized", spread_sigma(r.normalized)},
                {"pcc_normalized", r.pcc_normalized},
                {"pcc_denormalized", r.pcc_denormalized}};
    emit_json(doc, a.report);
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum image encodings: simulation, retrieval and benchmarks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "geqie 1.0.0");

    EncodeArgs enc;
    auto *c_enc = app.add_subcommand("encode", "Encode a PGM/PPM image into a statevector and/or unitary");
    enc.common.attach(c_enc);
    c_enc->add_option("--method", enc.method, "Encoding method")->required();
    c_enc->add_option("--input", enc.input, "Input PGM/PPM")->required();
    c_enc->add_option("--output-state", enc.output_state, "GQS1 statevector output");
    c_enc->add_option("--output-unitary", enc.output_unitary, "Unitary output (GQU1, or JSON if it ends in .json)");

    SimulateArgs sim;
    auto *c_sim = app.add_subcommand("simulate", "Sample measurement counts under depolarizing noise");
    sim.common.attach(c_sim);
    c_sim->add_option("--state", sim.state_path, "GQS1 statevector input");
    c_sim->add_option("--method", sim.method, "Encoding method (with --input)");
    c_sim->add_option("--input", sim.input, "Input PGM/PPM (with --method)");
    c_sim->add_option("--shots", sim.shots, "Shots; 0 emits exact probabilities");
    c_sim->add_option("--lambda", sim.lambda, "Depolarizing strength in [0, 1]");
    c_sim->add_option("--noise-mode", sim.noise_mode, "global, per-qubit or trajectories");
    c_sim->add_option("--seed", sim.seed, "Sampling seed");
    c_sim->add_option("--threads", sim.threads, "Sampling threads")->check(CLI::Range(1u, 256u));
    c_sim->add_option("--output-counts", sim.output, "Counts JSON output ('-' for stdout)");

    RetrieveArgs ret;
    auto *c_ret = app.add_subcommand("retrieve", "Decode an image from counts or probabilities");
    ret.common.attach(c_ret);
    c_ret->add_option("--method", ret.method, "Encoding method")->required();
    c_ret->add_option("--counts", ret.counts, "Counts JSON")->required();
    c_ret->add_option("--dims", ret.dims, "Image size, e.g. 4x4 (height x width)")->required();
    c_ret->add_option("--output-image", ret.output, "Output PGM/PPM")->required();
    c_ret->add_flag("--ascii", ret.ascii, "Write P2/P3 instead of P5/P6");

    BenchmarkArgs bench;
    auto *c_bench = app.add_subcommand("benchmark", "Run the method x size x noise benchmark matrix");
    bench.common.attach(c_bench);
    c_bench->add_option("--config", bench.config, "JSON config; flags override it");
    c_bench->add_option("--output-dir", bench.output_dir, "Directory for the CSV outputs")->required();
    c_bench->add_option("--methods", bench.methods, "Methods")->delimiter(',');
    c_bench->add_option("--sizes", bench.sizes, "Image sizes")->delimiter(',');
    c_bench->add_option("--lambdas", bench.lambdas, "Noise strengths")->delimiter(',');
    c_bench->add_option("--images", bench.images, "Images per size");
    c_bench->add_option("--shots", bench.shots, "Shots per cell; 0 uses exact probabilities");
    c_bench->add_option("--seed", bench.seed, "Master seed");
    c_bench->add_option("--noise-mode", bench.noise_mode, "global, per-qubit or trajectories");
    c_bench->add_option("--threads", bench.threads, "Worker threads (0 = all cores)");

    VerifyArgs ver;
    auto *c_ver = app.add_subcommand("verify", "Check a method's model invariants");
    ver.common.attach(c_ver);
    c_ver->add_option("--method", ver.method, "Encoding method")->required();
    c_ver->add_option("--dims", ver.dims, "Image size, e.g. 4x4");
    c_ver->add_option("--seed", ver.seed, "Seed of the random test image");

    auto *c_cosmic = app.add_subcommand("cosmic", "Volumetric density grids from point clouds");
    c_cosmic->require_subcommand(1);

    SynthArgs syn;
    auto *c_syn = c_cosmic->add_subcommand("synth", "Generate the synthetic clustered point cloud");
    c_syn->add_option("--output", syn.output, "Output point cloud")->required();
    c_syn->add_option("--seed", syn.seed, "Seed");
    c_syn->add_option("--count", syn.params.count, "Number of points")->check(CLI::PositiveNumber);
    c_syn->add_option("--box-size", syn.params.box_size, "Box size (Mpc/h)")->check(CLI::PositiveNumber);
    c_syn->add_flag("--ascii", syn.ascii, "Write 'x y z' text plus sidecar instead of GQP1");

    VoxelizeArgs vox;
    auto *c_vox = c_cosmic->add_subcommand("voxelize", "Bin a point cloud into a density grid");
    c_vox->add_option("--input", vox.input, "Point cloud (GQP1 or ASCII)")->required();
    c_vox->add_option("--resolution", vox.resolution, "Voxels per axis (power of two)");
    c_vox->add_option("--output", vox.output, "GQV1 grid output")->required();

    NormalizeArgs nrm;
    auto *c_nrm = c_cosmic->add_subcommand("normalize", "Map densities into [0, 1)");
    c_nrm->add_option("--input", nrm.input, "GQV1 grid")->required();
    c_nrm->add_option("--scheme", nrm.scheme, "e-mean, e-median, 10-mean, 10-median, e-mean-nonzero-sq, "
                                              "e-median-nonzero-sq");
    c_nrm->add_option("--output", nrm.output, "GQV1 grid output")->required();
    c_nrm->add_flag("--inverse", nrm.inverse, "Undo the normalization recorded in the input's metadata");

    HistogramArgs hst;
    auto *c_hst = c_cosmic->add_subcommand("histogram", "Value histogram and spread of a grid");
    c_hst->add_option("--input", hst.input, "GQV1 grid")->required();
    c_hst->add_option("--bins", hst.bins, "Number of bins");
    c_hst->add_option("--output", hst.output, "JSON output ('-' for stdout)");

    CosmicRoundtripArgs crt;
    auto *c_crt = c_cosmic->add_subcommand("roundtrip", "Normalize, encode with mfrqi, sample, retrieve, denormalize");
    crt.common.attach(c_crt);
    c_crt->add_option("--input", crt.input, "Raw GQV1 grid")->required();
    c_crt->add_option("--scheme", crt.scheme, "Normalization scheme");
    c_crt->add_option("--shots", crt.shots, "Shots; 0 uses exact probabilities");
    c_crt->add_option("--seed", crt.seed, "Sampling seed");
    c_crt->add_option("--threads", crt.threads, "Sampling threads")->check(CLI::Range(1u, 256u));
    c_crt->add_option("--output-grid", crt.output_grid, "Retrieved, denormalized GQV1 grid");
    c_crt->add_option("--report", crt.report, "JSON report ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (*c_enc) {
            return run_encode(enc);
        }
        if (*c_sim) {
            return run_simulate(sim);
        }
        if (*c_ret) {
            return run_retrieve(ret);
        }
        if (*c_bench) {
            return run_benchmark_cmd(bench);
        }
        if (*c_ver) {
            return run_verify(ver);
        }
        if (*c_syn) {
            return run_synth(syn);
        }
        if (*c_vox) {
            return run_voxelize(vox);
        }
        if (*c_nrm) {
            return run_normalize(nrm);
        }
        if (*c_hst) {
            return run_histogram(hst);
        }
        if (*c_crt) {
            return run_cosmic_roundtrip(crt);
        }
    } catch (const CapacityError &e) {
        std::cerr << "geqie: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const ModelError &e) {
        std::cerr << "geqie: internal: " << e.what() << "\n";
        return kExitInternal;
    } catch (const Error &e) {
        std::cerr << "geqie: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "geqie: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::exception &e) {
        std::cerr << "geqie: internal: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
