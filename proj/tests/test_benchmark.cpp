#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "geqie/benchmark.hpp"

using namespace geqie;

namespace {

BenchmarkConfig small_config() {
    BenchmarkConfig c;
    c.sizes = {2, 4};
    c.images_per_size = 3;
    c.lambdas = {0.0, 0.5, 1.0};
    c.shots = 2048;
    c.threads = 3;
    return c;
}

}  // namespace

TEST(BenchmarkConfig, DefaultsFollowTheProtocol) {
    BenchmarkConfig c;
    EXPECT_EQ(c.sizes, (std::vector<std::size_t>{2, 4, 8}));
    EXPECT_EQ(c.images_per_size, 8u);
    EXPECT_EQ(c.lambdas, (std::vector<double>{0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0}));
    EXPECT_EQ(c.shots, 16384u);
    EXPECT_EQ(c.max_qubits, 12u);
    EXPECT_EQ(c.methods.size(), 8u);
    EXPECT_EQ(c.resolved_noise_mode(), NoiseMode::Trajectories);
    c.shots = 0;
    EXPECT_EQ(c.resolved_noise_mode(), NoiseMode::Global);
}

TEST(BenchmarkConfig, ParsesJsonAndRejectsBadValues) {
    auto c = parse_benchmark_config(nlohmann::json::parse(
        R"({"methods":["frqi"],"sizes":[2],"lambdas":[0,1],"shots":0,"seed":5,"noise_mode":"per-qubit"})"));
    EXPECT_EQ(c.methods, std::vector<std::string>{"frqi"});
    EXPECT_EQ(c.master_seed, 5u);
    EXPECT_EQ(c.resolved_noise_mode(), NoiseMode::PerQubit);
    EXPECT_THROW(parse_benchmark_config(nlohmann::json::parse(R"({"methods":["nope"]})")), NotFoundError);
    EXPECT_THROW(parse_benchmark_config(nlohmann::json::parse(R"({"lambdas":[1.5]})")), DomainError);
    EXPECT_THROW(parse_benchmark_config(nlohmann::json::parse(R"({"sizes":"big"})")), ParseError);
}

TEST(Benchmark, SkipSetIsDerivedFromTheCap) {
    BenchmarkConfig c;
    c.images_per_size = 1;
    c.lambdas = {0.0};
    c.shots = 0;
    auto records = run_benchmark(c);
    std::set<std::pair<std::string, std::size_t>> skipped;
    for (const auto &r : records) {
        EXPECT_EQ(r.qubits, lookup(r.method).budget(Extents{r.size, r.size}));
        if (r.skipped) {
            skipped.insert({r.method, r.size});
            EXPECT_NE(r.reason.find("qubits"), std::string::npos);
        }
    }
    std::set<std::pair<std::string, std::size_t>> want = {{"neqr", 8}, {"qualpi", 8}, {"ncqi", 4}, {"ncqi", 8}};
    EXPECT_EQ(skipped, want);

    c.max_qubits = 15;
    for (const auto &r : run_benchmark(c)) {
        EXPECT_FALSE(r.skipped) << r.method << " " << r.size;
    }
}

TEST(Benchmark, BasisMethodsArePerfectAtZeroNoise) {
    BenchmarkConfig c;
    c.methods = {"neqr", "qualpi", "ncqi", "qrci", "ifrqi"};
    c.lambdas = {0.0};
    c.shots = 0;
    for (const auto &r : run_benchmark(c)) {
        if (r.skipped) {
            continue;
        }
        if (r.method == "ncqi") {
            EXPECT_GT(r.pcc, 0.95);  // 3-bit channels against 8-bit originals
        } else {
            EXPECT_EQ(r.pcc, 1.0) << r.method;
            EXPECT_TRUE(std::isinf(r.psnr_db)) << r.method;
        }
    }
}

TEST(Benchmark, DeterministicAcrossRunsAndThreadCounts) {
    BenchmarkConfig c = small_config();
    std::string a = records_csv(run_benchmark(c));
    c.threads = 1;
    std::string b = records_csv(run_benchmark(c));
    EXPECT_EQ(a, b);
    c.master_seed++;
    EXPECT_NE(records_csv(run_benchmark(c)), a);
}

TEST(Benchmark, CanonicalOrder) {
    auto records = run_benchmark(small_config());
    for (std::size_t i = 1; i < records.size(); i++) {
        const auto &p = records[i - 1], &q = records[i];
        EXPECT_LE(std::tie(p.method, p.size, p.lambda, p.image_id), std::tie(q.method, q.size, q.lambda, q.image_id));
    }
}

TEST(Benchmark, SameImageAcrossMethodsOfAFamily) {
    EXPECT_EQ(benchmark_image(1, 4, 3, 1), benchmark_image(1, 4, 3, 1));
    EXPECT_NE(benchmark_image(1, 4, 3, 1), benchmark_image(1, 4, 2, 1));
    BenchmarkConfig c;
    c.methods = {"neqr", "qualpi"};
    c.sizes = {2};
    c.lambdas = {0.0, 0.2};
    c.shots = 0;
    c.noise_mode = NoiseMode::Global;
    auto records = run_benchmark(c);
    // neqr and qualpi share their parameterization, so identical images give identical metrics.
    std::size_t half = records.size() / 2;
    for (std::size_t i = 0; i < half; i++) {
        EXPECT_EQ(records[i].pcc, records[half + i].pcc);
        EXPECT_EQ(records[i].psnr_db, records[half + i].psnr_db);
    }
}

TEST(Summary, MeansMatchRecords) {
    auto records = run_benchmark(small_config());
    auto rows = summarize(records);
    for (const auto &row : rows) {
        double pcc_sum = 0, psnr_sum = 0, display_sum = 0;
        std::size_t n = 0, finite = 0, infs = 0, skipped = 0;
        for (const auto &r : records) {
            if (r.method != row.method || r.size != row.size || r.lambda != row.lambda) {
                continue;
            }
            if (r.skipped) {
                skipped++;
                continue;
            }
            n++;
            pcc_sum += r.pcc;
            display_sum += std::min(r.psnr_db, 60.0);
            if (std::isinf(r.psnr_db)) {
                infs++;
            } else {
                psnr_sum += r.psnr_db;
                finite++;
            }
        }
        EXPECT_EQ(row.images, n);
        EXPECT_EQ(row.skipped, skipped);
        EXPECT_EQ(row.psnr_inf_count, infs);
        if (n) {
            EXPECT_NEAR(row.mean_pcc, pcc_sum / n, 1e-12);
            EXPECT_NEAR(row.mean_psnr_display_db, display_sum / n, 1e-12);
            if (finite) {
                EXPECT_NEAR(row.mean_psnr_db, psnr_sum / finite, 1e-12);
            } else {
                EXPECT_TRUE(std::isinf(row.mean_psnr_db));
            }
        }
    }
}

TEST(Csv, SkippedRecordsCarryNoMetrics) {
    BenchmarkRecord r;
    r.method = "neqr";
    r.size = 8;
    r.skipped = true;
    r.reason = "requires 14 qubits, cap is 12";
    std::string csv = records_csv({r});
    EXPECT_NE(csv.find("neqr,8,0,0,0,0,global,0,,,1,\"requires 14 qubits, cap is 12\"\n"), std::string::npos);
}

TEST(Csv, InfinityIsWrittenAsInf) {
    BenchmarkRecord r;
    r.method = "neqr";
    r.size = 2;
    r.pcc = 1.0;
    r.psnr_db = std::numeric_limits<double>::infinity();
    EXPECT_NE(records_csv({r}).find(",1,inf,0,"), std::string::npos);
    auto rows = summarize({r});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NE(summary_csv(rows).find(",1,inf,1,60"), std::string::npos);
    EXPECT_NE(plotdata_csv(rows).find("neqr-2x2,neqr,2,0,1,60"), std::string::npos);
}
