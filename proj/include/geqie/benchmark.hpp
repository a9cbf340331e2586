#pragma once

// The method x size x noise benchmark matrix over seeded random images.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "geqie/encodings.hpp"
#include "geqie/io.hpp"
#include "geqie/metrics.hpp"
#include "geqie/rng.hpp"

namespace geqie {

struct BenchmarkConfig {
    std::vector<std::string> methods = {"frqi", "neqr", "ifrqi", "qualpi", "frqci", "mcqi", "ncqi", "qrci"};
    std::vector<std::size_t> sizes = {2, 4, 8};
    std::size_t images_per_size = 8;
    std::vector<double> lambdas = {0.0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0};
    uint64_t shots = uint64_t{1} << 14;  // 0 = exact probabilities
    unsigned max_qubits = 12;
    uint64_t master_seed = 20250101;
    std::optional<NoiseMode> noise_mode;  // default: trajectories with shots, global when exact
    unsigned threads = 0;                 // 0 = hardware concurrency
    MethodOptions options;

    NoiseMode resolved_noise_mode() const {
        return noise_mode.value_or(default_noise_mode(shots));
    }
};

struct BenchmarkRecord {
    std::string method;
    std::size_t size = 0;
    double lambda = 0.0;
    uint64_t shots = 0;
    std::size_t image_id = 0;
    unsigned qubits = 0;
    NoiseMode noise_mode = NoiseMode::Global;
    uint64_t seed = 0;
    double pcc = 0.0;
    double psnr_db = 0.0;
    bool skipped = false;
    std::string reason;
};

struct SummaryRow {
    std::string method;
    std::size_t size = 0;
    double lambda = 0.0;
    uint64_t shots = 0;
    std::size_t images = 0;   // records with metrics
    std::size_t skipped = 0;
    double mean_pcc = 0.0;
    double mean_psnr_db = 0.0;  // finite cells only; +inf if every cell was inf
    std::size_t psnr_inf_count = 0;
    double mean_psnr_display_db = 0.0;  // inf shown as 60 dB
};

inline uint64_t fnv1a(const std::string &s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001B3ULL;
    }
    return h;
}

/// Uniform 8-bit test image; the same (size, image_id) gives the same pixels for every method of a family.
inline ImageArray benchmark_image(uint64_t master_seed, std::size_t size, std::size_t image_id, unsigned channels) {
    uint64_t stream = derive_seed(derive_seed(master_seed, 0x1A6Eu), (uint64_t{size} << 32) | image_id);
    return random_image({size, size}, channels, stream, 256);
}

inline uint64_t cell_seed(uint64_t master_seed, const std::string &method, std::size_t size, std::size_t lambda_index,
                          std::size_t image_id) {
    uint64_t s = derive_seed(master_seed, fnv1a(method));
    s = derive_seed(s, size);
    s = derive_seed(s, lambda_index);
    return derive_seed(s, image_id);
}

inline std::vector<BenchmarkRecord> run_benchmark(const BenchmarkConfig &config) {
    struct Cell {
        BenchmarkRecord rec;
        MethodDescriptor desc;
    };
    const NoiseMode mode = config.resolved_noise_mode();
    std::vector<Cell> cells;
    for (const auto &method : config.methods) {
        MethodDescriptor desc = lookup(method, config.options);
        for (auto size : config.sizes) {
            for (std::size_t li = 0; li < config.lambdas.size(); li++) {
                require_lambda(config.lambdas[li]);
                for (std::size_t id = 0; id < config.images_per_size; id++) {
                    BenchmarkRecord r;
                    r.method = method;
                    r.size = size;
                    r.lambda = config.lambdas[li];
                    r.shots = config.shots;
                    r.image_id = id;
                    r.noise_mode = mode;
                    r.seed = cell_seed(config.master_seed, method, size, li, id);
                    Extents dims{size, size};
                    r.qubits = desc.budget(dims);
                    if (r.qubits > config.max_qubits) {
                        r.skipped = true;
                        r.reason = "requires " + std::to_string(r.qubits) + " qubits, cap is " +
                                   std::to_string(config.max_qubits);
                    }
                    cells.push_back({std::move(r), desc});
                }
            }
        }
    }

    auto run_cell = [&](Cell &cell) {
        auto &r = cell.rec;
        if (r.skipped) {
            return;
        }
        try {
            unsigned channels = cell.desc.channels;
            ImageArray image = benchmark_image(config.master_seed, r.size, r.image_id, channels);
            RoundtripResult res = roundtrip(r.method, image, r.shots, NoiseSpec{r.lambda, mode}, r.seed,
                                            config.max_qubits, config.options);
            r.pcc = res.metrics.pcc;
            r.psnr_db = res.metrics.psnr_db;
        } catch (const Error &e) {
            r.skipped = true;
            r.reason = e.what();
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            run_cell(cells[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; t++) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }

    std::vector<BenchmarkRecord> records;
    records.reserve(cells.size());
    for (auto &c : cells) {
        records.push_back(std::move(c.rec));
    }
    std::stable_sort(records.begin(), records.end(), [](const auto &a, const auto &b) {
        return std::tie(a.method, a.size, a.lambda, a.image_id) < std::tie(b.method, b.size, b.lambda, b.image_id);
    });
    return records;
}

/// Means per (method, size, λ). Records must be in canonical order (as returned by run_benchmark).
inline std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord> &records) {
    std::vector<SummaryRow> rows;
    for (std::size_t i = 0; i < records.size();) {
        std::size_t j = i;
        SummaryRow row;
        row.method = records[i].method;
        row.size = records[i].size;
        row.lambda = records[i].lambda;
        row.shots = records[i].shots;
        double pcc_sum = 0, psnr_sum = 0, display_sum = 0;
        std::size_t finite = 0;
        while (j < records.size() && records[j].method == row.method && records[j].size == row.size &&
               records[j].lambda == row.lambda) {
            const auto &r = records[j++];
            if (r.skipped) {
                row.skipped++;
                continue;
            }
            row.images++;
            pcc_sum += r.pcc;
            display_sum += psnr_display_cap(r.psnr_db);
            if (std::isinf(r.psnr_db)) {
                row.psnr_inf_count++;
            } else {
                psnr_sum += r.psnr_db;
                finite++;
            }
        }
        if (row.images) {
            row.mean_pcc = pcc_sum / static_cast<double>(row.images);
            row.mean_psnr_display_db = display_sum / static_cast<double>(row.images);
            row.mean_psnr_db = finite ? psnr_sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
        }
        rows.push_back(row);
        i = j;
    }
    return rows;
}

namespace detail {

inline std::string fmt_number(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// RFC 4180 quoting for fields that contain a comma, quote or newline.
inline std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? "\"\"" : std::string(1, c);
    }
    return out + "\"";
}

}  // namespace detail

inline std::string records_csv(const std::vector<BenchmarkRecord> &records) {
    std::string out = "method,size,lambda,shots,image_id,qubits,noise_mode,seed,pcc,psnr_db,skipped,reason\n";
    for (const auto &r : records) {
        out += r.method + "," + std::to_string(r.size) + "," + detail::fmt_number(r.lambda) + "," +
               std::to_string(r.shots) + "," + std::to_string(r.image_id) + "," + std::to_string(r.qubits) + "," +
               to_string(r.noise_mode) + "," + std::to_string(r.seed) + ",";
        if (r.skipped) {
            out += ",,1," + detail::csv_field(r.reason) + "\n";
        } else {
            out += detail::fmt_number(r.pcc) + "," + detail::fmt_number(r.psnr_db) + ",0,\n";
        }
    }
    return out;
}

inline std::string summary_csv(const std::vector<SummaryRow> &rows) {
    std::string out =
        "method,size,lambda,shots,images,skipped,mean_pcc,mean_psnr_db,psnr_inf_count,mean_psnr_display_db\n";
    for (const auto &r : rows) {
        out += r.method + "," + std::to_string(r.size) + "," + detail::fmt_number(r.lambda) + "," +
               std::to_string(r.shots) + "," + std::to_string(r.images) + "," + std::to_string(r.skipped) + ",";
        if (r.images == 0) {
            out += ",,,\n";
        } else {
            out += detail::fmt_number(r.mean_pcc) + "," + detail::fmt_number(r.mean_psnr_db) + "," +
                   std::to_string(r.psnr_inf_count) + "," + detail::fmt_number(r.mean_psnr_display_db) + "\n";
        }
    }
    return out;
}

/// One series per (method, size) with λ on the x axis; skipped cells are left out.
inline std::string plotdata_csv(const std::vector<SummaryRow> &rows) {
    std::string out = "series,method,size,lambda,pcc,psnr_display_db\n";
    for (const auto &r : rows) {
        if (r.images == 0) {
            continue;
        }
        out += r.method + "-" + std::to_string(r.size) + "x" + std::to_string(r.size) + "," + r.method + "," +
               std::to_string(r.size) + "," + detail::fmt_number(r.lambda) + "," + detail::fmt_number(r.mean_pcc) +
               "," + detail::fmt_number(r.mean_psnr_display_db) + "\n";
    }
    return out;
}

inline void write_benchmark(const std::string &dir, const std::vector<BenchmarkRecord> &records) {
    std::filesystem::create_directories(dir);
    auto rows = summarize(records);
    io::write_file(dir + "/records.csv", records_csv(records));
    io::write_file(dir + "/summary.csv", summary_csv(rows));
    io::write_file(dir + "/plotdata.csv", plotdata_csv(rows));
}

/// Reads a JSON config; absent keys keep their defaults.
inline BenchmarkConfig parse_benchmark_config(const nlohmann::json &j) {
    BenchmarkConfig c;
    try {
        if (j.contains("methods")) {
            c.methods = j["methods"].get<std::vector<std::string>>();
        }
        if (j.contains("sizes")) {
            c.sizes = j["sizes"].get<std::vector<std::size_t>>();
        }
        if (j.contains("images_per_size")) {
            c.images_per_size = j["images_per_size"].get<std::size_t>();
        }
        if (j.contains("lambdas")) {
            c.lambdas = j["lambdas"].get<std::vector<double>>();
        }
        if (j.contains("shots")) {
            c.shots = j["shots"].get<uint64_t>();
        }
        if (j.contains("max_qubits")) {
            c.max_qubits = j["max_qubits"].get<unsigned>();
        }
        if (j.contains("seed")) {
            c.master_seed = j["seed"].get<uint64_t>();
        }
        if (j.contains("noise_mode")) {
            c.noise_mode = parse_noise_mode(j["noise_mode"].get<std::string>());
        }
        if (j.contains("threads")) {
            c.threads = j["threads"].get<unsigned>();
        }
        if (j.contains("ncqi_bits")) {
            c.options.ncqi_bits = j["ncqi_bits"].get<unsigned>();
        }
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(std::string("benchmark config: ") + e.what());
    }
    for (const auto &m : c.methods) {
        lookup(m, c.options);
    }
    for (double l : c.lambdas) {
        require_lambda(l);
    }
    return c;
}

}  // namespace geqie
