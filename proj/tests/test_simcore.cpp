#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geqie/simcore.hpp"
#include "oracles.hpp"

using namespace geqie;
using Complex = std::complex<double>;

namespace {

const std::vector<double> kLambdaGrid = {0.0, 0.01, 0.1, 0.2, 0.5, 0.9, 1.0};

std::vector<double> normalized_weights(const CountsHistogram &h) {
    auto w = h.weights();
    for (auto &x : w) {
        x /= static_cast<double>(h.shots());
    }
    return w;
}

}  // namespace

TEST(StateVector, RejectsWrongLengthAndNorm) {
    EXPECT_THROW(StateVector(2, std::vector<Complex>(3)), DomainError);
    EXPECT_THROW(StateVector(1, {1.0, 1.0}), DomainError);
    EXPECT_NO_THROW(StateVector(1, {1.0, 0.0}));
}

TEST(StateVector, BasisState) {
    auto s = StateVector::basis(3, 5);
    EXPECT_EQ(s.dim(), 8u);
    EXPECT_EQ(s[5], Complex(1.0));
    EXPECT_THROW(StateVector::basis(2, 4), IndexError);
}

TEST(DensityMatrix, PureStateFromRandomVector) {
    std::mt19937_64 gen(1);
    auto rho = to_density(oracle::random_state(2, gen));
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
    EXPECT_TRUE(rho.is_positive_semidefinite());
}

TEST(DensityMatrix, ValidatesHermiticityTraceAndSize) {
    EXPECT_THROW(DensityMatrix(1, {0.5, 0.1, 0.2, 0.5}), DomainError);
    EXPECT_THROW(DensityMatrix(1, {0.6, 0.0, 0.0, 0.6}), DomainError);
    EXPECT_THROW(DensityMatrix(2, std::vector<Complex>(4)), DomainError);
    EXPECT_THROW(DensityMatrix::maximally_mixed(13), CapacityError);
}

TEST(GlobalDepolarizing, HandEvaluatedSingleQubit) {
    DensityMatrix rho(1, {1.0, 0.0, 0.0, 0.0});
    auto out = apply_global_depolarizing(rho, 0.5);
    EXPECT_NEAR(out(0, 0).real(), 0.75, 1e-15);
    EXPECT_NEAR(out(1, 1).real(), 0.25, 1e-15);
    EXPECT_NEAR(std::abs(out(0, 1)), 0.0, 1e-15);
}

TEST(GlobalDepolarizing, RejectsLambdaOutsideUnitInterval) {
    auto rho = DensityMatrix::maximally_mixed(1);
    EXPECT_THROW(apply_global_depolarizing(rho, -0.01), DomainError);
    EXPECT_THROW(apply_global_depolarizing(rho, 1.01), DomainError);
    EXPECT_THROW(apply_global_depolarizing(rho, std::nan("")), DomainError);
}

TEST(GlobalDepolarizing, PreservesHermiticityTraceAndPositivity) {
    std::mt19937_64 gen(2);
    for (unsigned n = 1; n <= 4; n++) {
        for (double lambda : kLambdaGrid) {
            auto out = apply_global_depolarizing(oracle::random_density(n, gen), lambda);
            EXPECT_LE(out.hermiticity_error(), 1e-12);
            EXPECT_NEAR(out.trace().real(), 1.0, 1e-12);
            EXPECT_TRUE(out.is_positive_semidefinite());
        }
    }
}

TEST(GlobalDepolarizing, DiagonalIdentity) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 40; trial++) {
        unsigned n = 1 + trial % 4;
        auto rho = oracle::random_density(n, gen);
        auto p = measure_probabilities(rho);
        for (double lambda : kLambdaGrid) {
            auto q = measure_probabilities(apply_global_depolarizing(rho, lambda));
            for (std::size_t i = 0; i < p.size(); i++) {
                EXPECT_NEAR(q[i], (1.0 - lambda) * p[i] + lambda / static_cast<double>(p.size()), 1e-10);
            }
        }
    }
}

TEST(LocalDepolarizing, HandEvaluatedPlusState) {
    DensityMatrix plus(1, {0.5, 0.5, 0.5, 0.5});
    auto out = apply_local_depolarizing(plus, 0.4, 0);
    EXPECT_NEAR(out(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(out(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(out(0, 1).real(), 0.3, 1e-15);
    EXPECT_NEAR(out(1, 0).real(), 0.3, 1e-15);
}

TEST(LocalDepolarizing, MatchesExplicitKrausSum) {
    std::mt19937_64 gen(4);
    for (unsigned n = 1; n <= 3; n++) {
        auto rho = oracle::random_density(n, gen);
        auto ref = oracle::to_matrix(rho);
        for (unsigned q = 0; q < n; q++) {
            for (double lambda : {0.1, 0.5, 1.0}) {
                auto got = oracle::to_matrix(apply_local_depolarizing(rho, lambda, q));
                auto want = oracle::depolarize_qubit(ref, lambda, q, n);
                EXPECT_LE(oracle::max_abs_difference(got, want), 1e-12) << "n=" << n << " q=" << q;
            }
        }
    }
}

TEST(LocalDepolarizing, QubitOutOfRange) {
    auto rho = DensityMatrix::maximally_mixed(2);
    EXPECT_THROW(apply_local_depolarizing(rho, 0.1, 2), IndexError);
}

TEST(LocalDepolarizing, DistinctQubitsCommute) {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; trial++) {
        auto rho = oracle::random_density(3, gen);
        double a = std::uniform_real_distribution<double>(0, 1)(gen);
        double b = std::uniform_real_distribution<double>(0, 1)(gen);
        auto ab = apply_local_depolarizing(apply_local_depolarizing(rho, a, 0), b, 2);
        auto ba = apply_local_depolarizing(apply_local_depolarizing(rho, b, 2), a, 0);
        EXPECT_LE(ab.max_abs_difference(ba), 1e-10);
    }
}

TEST(AllQubitDepolarizing, BellStateEqualsSequentialApplication) {
    const double h = 0.5;
    DensityMatrix bell(2, {h, 0, 0, h, 0, 0, 0, 0, 0, 0, 0, 0, h, 0, 0, h});
    auto all = apply_all_qubit_depolarizing(bell, 0.1);
    auto seq = apply_local_depolarizing(apply_local_depolarizing(bell, 0.1, 0), 0.1, 1);
    EXPECT_LE(all.max_abs_difference(seq), 1e-14);
}

TEST(AllQubitDepolarizing, FullStrengthGivesMaximallyMixed) {
    std::mt19937_64 gen(6);
    for (unsigned n = 1; n <= 4; n++) {
        auto out = apply_all_qubit_depolarizing(oracle::random_density(n, gen), 1.0);
        EXPECT_LE(out.max_abs_difference(DensityMatrix::maximally_mixed(n)), 1e-10);
    }
}

TEST(Measure, HandEvaluated) {
    const double r = 1.0 / std::sqrt(2.0);
    StateVector s(1, {Complex(r, 0), Complex(0, r)});
    auto p = measure_probabilities(s);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
    EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Measure, StateAndDensityAgree) {
    std::mt19937_64 gen(7);
    auto s = oracle::random_state(4, gen);
    auto a = measure_probabilities(s);
    auto b = measure_probabilities(to_density(s));
    for (std::size_t i = 0; i < a.size(); i++) {
        EXPECT_NEAR(a[i], b[i], 1e-14);
    }
}

TEST(NoisyProbabilities, DiagonalPathMatchesDensityPath) {
    std::mt19937_64 gen(8);
    for (unsigned n = 1; n <= 5; n++) {
        auto s = oracle::random_state(n, gen);
        for (auto mode : {NoiseMode::Global, NoiseMode::PerQubit}) {
            for (double lambda : kLambdaGrid) {
                auto fast = noisy_probabilities(s, {lambda, mode});
                auto dense = noisy_probabilities_dense(s, {lambda, mode});
                for (std::size_t i = 0; i < fast.size(); i++) {
                    EXPECT_NEAR(fast[i], dense[i], 1e-12);
                }
            }
        }
    }
}

TEST(NoiseMode, ParseRoundTrip) {
    for (auto m : {NoiseMode::Global, NoiseMode::PerQubit, NoiseMode::Trajectories}) {
        EXPECT_EQ(parse_noise_mode(to_string(m)), m);
    }
    EXPECT_THROW(parse_noise_mode("amplitude-damping"), DomainError);
}

TEST(SampleCounts, BinomialBound) {
    std::vector<double> p{0.5, 0.5};
    const uint64_t shots = 1000000;
    auto h = sample_counts(p, shots, 2024);
    EXPECT_EQ(h.shots(), shots);
    EXPECT_LE(std::abs(h.count(0) / static_cast<double>(shots) - 0.5), 0.002);
}

TEST(SampleCounts, ZeroShotsRejected) {
    std::vector<double> p{1.0, 0.0};
    EXPECT_THROW(sample_counts(p, 0, 1), DomainError);
}

TEST(SampleCounts, SeedDeterminismAndThreadIndependence) {
    std::mt19937_64 gen(9);
    auto p = measure_probabilities(oracle::random_state(5, gen));
    auto a = sample_counts(p, 50000, 77);
    auto b = sample_counts(p, 50000, 77);
    auto c = sample_counts(p, 50000, 77, 4);
    auto d = sample_counts(p, 50000, 78);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    EXPECT_FALSE(a == d);
}

TEST(SampleCounts, NeverProducesZeroProbabilityOutcomes) {
    std::vector<double> p{0.0, 0.3, 0.0, 0.7};
    auto h = sample_counts(p, 100000, 5);
    EXPECT_EQ(h.count(0), 0u);
    EXPECT_EQ(h.count(2), 0u);
}

TEST(Trajectories, NoiselessEqualsIdealSampling) {
    std::mt19937_64 gen(10);
    auto s = oracle::random_state(4, gen);
    EXPECT_EQ(sample_counts_trajectories(s, 0.0, 20000, 3), sample_counts(measure_probabilities(s), 20000, 3));
}

TEST(Trajectories, MatchDensityMatrixWithinTotalVariation) {
    std::mt19937_64 gen(11);
    for (unsigned n : {1u, 3u, 6u}) {
        auto s = oracle::random_state(n, gen);
        for (double lambda : {0.1, 0.5}) {
            auto h = sample_counts_trajectories(s, lambda, 1000000, 100 + n, 4);
            auto dense = noisy_probabilities_dense(s, {lambda, NoiseMode::PerQubit});
            EXPECT_LE(oracle::total_variation(normalized_weights(h), dense), 0.02) << "n=" << n << " λ=" << lambda;
        }
    }
}

TEST(Trajectories, ThreadIndependent) {
    std::mt19937_64 gen(12);
    auto s = oracle::random_state(3, gen);
    EXPECT_EQ(sample_counts_trajectories(s, 0.3, 30000, 9, 1), sample_counts_trajectories(s, 0.3, 30000, 9, 3));
}

TEST(CountsHistogram, ValidatesTotalsAndRange) {
    EXPECT_THROW(CountsHistogram(2, {{0, 3}, {1, 2}}, 6), DomainError);
    EXPECT_THROW(CountsHistogram(2, {{4, 1}}, 1), IndexError);
    CountsHistogram h(2, {{0, 0}, {3, 5}}, 5);
    EXPECT_EQ(h.counts().size(), 1u);
    EXPECT_EQ(h.count(3), 5u);
}

TEST(TotalVariation, HandEvaluated) {
    std::vector<double> p{0.5, 0.5, 0.0}, q{0.25, 0.25, 0.5};
    EXPECT_NEAR(total_variation_distance(p, q), 0.5, 1e-15);
}
