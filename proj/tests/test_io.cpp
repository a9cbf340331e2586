#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "geqie/io.hpp"
#include "oracles.hpp"

using namespace geqie;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("geqie_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    std::string path(const std::string &name) const {
        return (dir_ / name).string();
    }
    fs::path dir_;
};

using IoFiles = TempDir;

}  // namespace

TEST(Netpbm, AsciiAndBinaryGrayParseEqual) {
    std::string p2 = "P2\n# comment\n3 2\n255\n0 1 2\n253 254 255\n";
    std::string p5 = "P5 3 2 255\n";
    for (int v : {0, 1, 2, 253, 254, 255}) {
        p5.push_back(static_cast<char>(v));
    }
    ImageArray a = io::parse_netpbm(p2);
    ImageArray b = io::parse_netpbm(p5);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.dims, (Extents{2, 3}));
    EXPECT_EQ(a.channels, 1u);
    EXPECT_DOUBLE_EQ(a.values[3], 253.0 / 255);
}

TEST(Netpbm, RandomPpmRoundTripsByteForByte) {
    ImageArray img = random_image({8, 8}, 3, 11, 256);
    std::string bytes = io::format_netpbm(img);
    ImageArray back = io::parse_netpbm(bytes);
    EXPECT_EQ(back, img);
    EXPECT_EQ(io::format_netpbm(back), bytes);
    EXPECT_EQ(io::parse_netpbm(io::format_netpbm(img, true)), img);
}

TEST(Netpbm, Errors) {
    EXPECT_THROW(io::parse_netpbm("P5 2 2 255\n\x01\x02"), ParseError);
    EXPECT_THROW(io::parse_netpbm("P2 2 2 255 1 2 3"), ParseError);
    EXPECT_THROW(io::parse_netpbm("P2 1 1 65535 1"), ParseError);
    EXPECT_THROW(io::parse_netpbm("P2 1 1 255 256"), ParseError);
    EXPECT_THROW(io::parse_netpbm("P7 1 1 255 1"), ParseError);
    EXPECT_THROW(io::parse_netpbm(""), ParseError);
}

TEST(StateFile, RoundTrip) {
    std::mt19937_64 gen(1);
    StateVector s = oracle::random_state(5, gen);
    std::string bytes = io::format_state(s);
    EXPECT_EQ(bytes.substr(0, 4), "GQS1");
    EXPECT_EQ(bytes.size(), 4u + 4u + 32u * 16u);
    StateVector back = io::parse_state(bytes);
    for (uint64_t i = 0; i < s.dim(); i++) {
        EXPECT_EQ(back[i], s[i]);
    }
    EXPECT_THROW(io::parse_state(bytes.substr(0, bytes.size() - 3)), ParseError);
    EXPECT_THROW(io::parse_state("GQS2" + bytes.substr(4)), ParseError);
}

TEST(UnitaryFile, RoundTripAndJson) {
    std::mt19937_64 gen(2);
    UnitaryMatrix u = completion_unitary(oracle::random_state(3, gen));
    UnitaryMatrix back = io::parse_unitary(io::format_unitary(u));
    EXPECT_EQ(back.entries, u.entries);
    auto j = io::unitary_to_json(u);
    EXPECT_EQ(j["n_qubits"], 3);
    EXPECT_EQ(j["entries"].size(), 8u);
    EXPECT_DOUBLE_EQ(j["entries"][1][0][0].get<double>(), u(1, 0).real());
    EXPECT_THROW(io::unitary_to_json(completion_unitary(StateVector::basis(5, 0))), CapacityError);
}

TEST(CountsJson, MostSignificantQubitFirst) {
    EXPECT_EQ(io::to_bitstring(1, 3), "001");
    EXPECT_EQ(io::to_bitstring(6, 3), "110");
    EXPECT_EQ(io::from_bitstring("110", 3), 6u);
    EXPECT_THROW(io::from_bitstring("12", 2), ParseError);
    EXPECT_THROW(io::from_bitstring("1", 2), ParseError);
}

TEST(CountsJson, RoundTrip) {
    CountsHistogram h(3, {{1, 10}, {6, 5}}, 15);
    auto doc = io::counts_to_json(h);
    EXPECT_EQ(doc.dump(), R"({"counts":{"001":10,"110":5},"n_qubits":3,"shots":15})");
    auto parsed = io::parse_outcomes(doc.dump());
    EXPECT_EQ(parsed.histogram(), h);
}

TEST(CountsJson, ProbabilitiesForm) {
    std::vector<double> p{0.25, 0.0, 0.75, 0.0};
    auto doc = io::probabilities_to_json(p);
    EXPECT_EQ(doc["shots"], 0);
    auto parsed = io::parse_outcomes(doc.dump());
    EXPECT_EQ(parsed.weights, p);
    EXPECT_THROW(parsed.histogram(), DomainError);
}

TEST(CountsJson, MalformedDocuments) {
    EXPECT_THROW(io::parse_outcomes("{not json"), ParseError);
    EXPECT_THROW(io::parse_outcomes(R"({"n_qubits":2,"shots":3,"counts":{"01":2}})"), ParseError);
    EXPECT_THROW(io::parse_outcomes(R"({"n_qubits":2,"shots":1,"counts":{"011":1}})"), ParseError);
    EXPECT_THROW(io::parse_outcomes(R"({"shots":1,"counts":{"01":1}})"), ParseError);
    EXPECT_THROW(io::parse_outcomes(R"({"n_qubits":1,"shots":0,"probabilities":{"0":0.5}})"), ParseError);
}

TEST_F(IoFiles, GridRoundTripWithMetadata) {
    VoxelGrid g;
    g.resolution = 4;
    for (int i = 0; i < 64; i++) {
        g.densities.push_back(i % 7);
    }
    io::write_grid(path("raw.gqv"), g);
    VoxelGrid raw = io::read_grid(path("raw.gqv"));
    EXPECT_EQ(raw.densities, g.densities);
    EXPECT_FALSE(raw.normalization.has_value());

    VoxelGrid n = normalize(g, {NormBase::Ten, NormStatistic::Median});
    io::write_grid(path("norm.gqv"), n);
    VoxelGrid back = io::read_grid(path("norm.gqv"));
    ASSERT_TRUE(back.normalization.has_value());
    EXPECT_EQ(to_string(back.normalization->scheme), "10-median");
    EXPECT_EQ(back.normalization->scale, n.normalization->scale);
    EXPECT_EQ(back.densities, n.densities);
    EXPECT_EQ(io::read_file(path("norm.gqv")).size(), 4u + 12u + 64u * 8u);
}

TEST_F(IoFiles, PointCloudsBinaryAndAscii) {
    PointCloud c;
    c.box_size = 50;
    c.points = {{0.5, 1.25, 49.0}, {10, 20, 30}, {50, 0, 25.5}};
    io::write_points_binary(path("p.gqp"), c);
    EXPECT_EQ(io::read_points(path("p.gqp")).points, c.points);
    EXPECT_EQ(io::read_file(path("p.gqp")).size(), 4u + 4u + 8u + 8u + 3u * 12u);

    io::write_points_ascii(path("p.txt"), c);
    PointCloud a = io::read_points(path("p.txt"));
    EXPECT_EQ(a.points, c.points);
    EXPECT_EQ(a.box_size, 50.0);

    io::write_file(path("bad.txt"), "1 2\n");
    io::write_file(path("bad.txt.json"), R"({"box_size": 10})");
    EXPECT_THROW(io::read_points(path("bad.txt")), ParseError);
    io::write_file(path("nosidecar.txt"), "1 2 3\n");
    EXPECT_THROW(io::read_points(path("nosidecar.txt")), ParseError);
}

TEST_F(IoFiles, MissingFileIsParseError) {
    EXPECT_THROW(io::read_netpbm(path("nope.pgm")), ParseError);
}
