#pragma once

// Dense statevector / density-matrix simulation with depolarizing noise and seeded shot sampling.
//
// Bit convention: qubit q is bit q of the basis index (qubit 0 is the least significant bit).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "geqie/errors.hpp"
#include "geqie/rng.hpp"

namespace geqie {

using Complex = std::complex<double>;

inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kProbabilityTolerance = 1e-9;
inline constexpr double kPsdTolerance = 1e-9;
/// Largest register held as a dense 2^n x 2^n matrix (2^24 complex entries, about 268 MB).
inline constexpr unsigned kDensityMaxQubits = 12;
/// Largest register held as a dense statevector.
inline constexpr unsigned kStateMaxQubits = 28;

inline uint64_t basis_dim(unsigned n_qubits) {
    return uint64_t{1} << n_qubits;
}

inline void require_lambda(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError("depolarizing parameter must lie in [0, 1], got " + std::to_string(lambda));
    }
}

class StateVector {
public:
    StateVector(unsigned n_qubits, std::vector<Complex> amplitudes) : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
        if (n_qubits_ < 1 || n_qubits_ > kStateMaxQubits) {
            throw DomainError("statevector qubit count out of range: " + std::to_string(n_qubits_));
        }
        if (amps_.size() != basis_dim(n_qubits_)) {
            throw DomainError("statevector length " + std::to_string(amps_.size()) + " is not 2^" +
                              std::to_string(n_qubits_));
        }
        double n2 = norm_squared();
        if (std::abs(n2 - 1.0) > kNormTolerance) {
            throw DomainError("statevector is not normalized (|psi|^2 = " + std::to_string(n2) + ")");
        }
    }

    static StateVector basis(unsigned n_qubits, uint64_t index) {
        std::vector<Complex> amps(basis_dim(n_qubits));
        if (index >= amps.size()) {
            throw IndexError("basis index out of range");
        }
        amps[index] = 1.0;
        return StateVector(n_qubits, std::move(amps));
    }

    /// Rescales to unit norm; throws DomainError for the zero vector.
    static StateVector normalized(unsigned n_qubits, std::vector<Complex> amplitudes) {
        double n2 = 0;
        for (const auto &a : amplitudes) {
            n2 += std::norm(a);
        }
        if (n2 == 0.0) {
            throw DomainError("cannot normalize the zero vector");
        }
        double inv = 1.0 / std::sqrt(n2);
        for (auto &a : amplitudes) {
            a *= inv;
        }
        return StateVector(n_qubits, std::move(amplitudes));
    }

    unsigned n_qubits() const noexcept {
        return n_qubits_;
    }
    uint64_t dim() const noexcept {
        return amps_.size();
    }
    std::span<const Complex> amplitudes() const noexcept {
        return amps_;
    }
    const Complex &operator[](uint64_t i) const {
        return amps_[i];
    }
    double norm_squared() const noexcept {
        double s = 0;
        for (const auto &a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

private:
    unsigned n_qubits_;
    std::vector<Complex> amps_;
};

/// Row-major 2^n x 2^n complex matrix. Construction checks shape, Hermiticity and unit trace;
/// positivity is checked on demand by is_positive_semidefinite().
class DensityMatrix {
public:
    DensityMatrix(unsigned n_qubits, std::vector<Complex> entries) : n_qubits_(n_qubits), entries_(std::move(entries)) {
        if (n_qubits_ < 1 || n_qubits_ > kDensityMaxQubits) {
            throw CapacityError(n_qubits_, kDensityMaxQubits, "density matrix");
        }
        uint64_t d = dim();
        if (entries_.size() != d * d) {
            throw DomainError("density matrix has wrong number of entries");
        }
        if (hermiticity_error() > kNormTolerance) {
            throw DomainError("density matrix is not Hermitian");
        }
        if (std::abs(trace() - Complex(1.0)) > kNormTolerance) {
            throw DomainError("density matrix trace is not 1");
        }
    }

    static DensityMatrix maximally_mixed(unsigned n_qubits) {
        if (n_qubits < 1 || n_qubits > kDensityMaxQubits) {
            throw CapacityError(n_qubits, kDensityMaxQubits, "density matrix");
        }
        uint64_t d = basis_dim(n_qubits);
        std::vector<Complex> e(d * d);
        for (uint64_t i = 0; i < d; i++) {
            e[i * d + i] = 1.0 / static_cast<double>(d);
        }
        return DensityMatrix(n_qubits, std::move(e));
    }

    unsigned n_qubits() const noexcept {
        return n_qubits_;
    }
    uint64_t dim() const noexcept {
        return basis_dim(n_qubits_);
    }
    const Complex &operator()(uint64_t row, uint64_t col) const {
        return entries_[row * dim() + col];
    }
    std::span<const Complex> entries() const noexcept {
        return entries_;
    }

    Complex trace() const noexcept {
        Complex t = 0;
        uint64_t d = dim();
        for (uint64_t i = 0; i < d; i++) {
            t += entries_[i * d + i];
        }
        return t;
    }

    /// Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    double purity() const noexcept {
        double s = 0;
        for (const auto &e : entries_) {
            s += std::norm(e);
        }
        return s;
    }

    double hermiticity_error() const noexcept {
        uint64_t d = dim();
        double worst = 0;
        for (uint64_t r = 0; r < d; r++) {
            for (uint64_t c = r; c < d; c++) {
                worst = std::max(worst, std::abs(entries_[r * d + c] - std::conj(entries_[c * d + r])));
            }
        }
        return worst;
    }

    /// Cholesky factorization of rho + tol*I succeeds iff every eigenvalue of rho exceeds -tol.
    bool is_positive_semidefinite(double tol = kPsdTolerance) const {
        uint64_t d = dim();
        std::vector<Complex> l(d * d);
        for (uint64_t j = 0; j < d; j++) {
            double diag = entries_[j * d + j].real() + tol;
            for (uint64_t k = 0; k < j; k++) {
                diag -= std::norm(l[j * d + k]);
            }
            if (!(diag > 0.0)) {
                return false;
            }
            double ljj = std::sqrt(diag);
            l[j * d + j] = ljj;
            for (uint64_t i = j + 1; i < d; i++) {
                Complex s = entries_[i * d + j];
                for (uint64_t k = 0; k < j; k++) {
                    s -= l[i * d + k] * std::conj(l[j * d + k]);
                }
                l[i * d + j] = s / ljj;
            }
        }
        return true;
    }

    double max_abs_difference(const DensityMatrix &other) const {
        if (other.n_qubits_ != n_qubits_) {
            throw DomainError("density matrices have different sizes");
        }
        double worst = 0;
        for (size_t i = 0; i < entries_.size(); i++) {
            worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
        }
        return worst;
    }

private:
    unsigned n_qubits_;
    std::vector<Complex> entries_;
};

enum class NoiseMode { Global, PerQubit, Trajectories };

inline std::string to_string(NoiseMode mode) {
    switch (mode) {
        case NoiseMode::Global:
            return "global";
        case NoiseMode::PerQubit:
            return "perqubit";
        case NoiseMode::Trajectories:
            return "trajectories";
    }
    return "?";
}

inline NoiseMode parse_noise_mode(const std::string &text) {
    if (text == "global") {
        return NoiseMode::Global;
    }
    if (text == "perqubit" || text == "per-qubit") {
        return NoiseMode::PerQubit;
    }
    if (text == "trajectories") {
        return NoiseMode::Trajectories;
    }
    throw DomainError("unknown noise mode '" + text + "' (expected global, perqubit or trajectories)");
}

struct NoiseSpec {
    double lambda = 0.0;
    NoiseMode mode = NoiseMode::Global;

    void validate() const {
        require_lambda(lambda);
    }
};

/// Trajectories when shots are drawn, the global channel when exact probabilities are requested.
inline NoiseMode default_noise_mode(uint64_t shots) {
    return shots > 0 ? NoiseMode::Trajectories : NoiseMode::Global;
}

class CountsHistogram {
public:
    CountsHistogram(unsigned n_qubits, std::map<uint64_t, uint64_t> counts, uint64_t shots)
        : n_qubits_(n_qubits), counts_(std::move(counts)), shots_(shots) {
        if (shots_ < 1) {
            throw DomainError("histogram must hold at least one shot");
        }
        uint64_t total = 0;
        for (auto it = counts_.begin(); it != counts_.end();) {
            if (it->first >= basis_dim(n_qubits_)) {
                throw IndexError("outcome " + std::to_string(it->first) + " does not fit in " +
                                 std::to_string(n_qubits_) + " qubits");
            }
            total += it->second;
            it = it->second == 0 ? counts_.erase(it) : std::next(it);
        }
        if (total != shots_) {
            throw DomainError("histogram counts sum to " + std::to_string(total) + " but shots = " +
                              std::to_string(shots_));
        }
    }

    unsigned n_qubits() const noexcept {
        return n_qubits_;
    }
    uint64_t shots() const noexcept {
        return shots_;
    }
    const std::map<uint64_t, uint64_t> &counts() const noexcept {
        return counts_;
    }
    uint64_t count(uint64_t outcome) const {
        auto it = counts_.find(outcome);
        return it == counts_.end() ? 0 : it->second;
    }

    /// Dense per-outcome weights (raw counts as doubles).
    std::vector<double> weights() const {
        std::vector<double> w(basis_dim(n_qubits_));
        for (const auto &[k, v] : counts_) {
            w[k] = static_cast<double>(v);
        }
        return w;
    }

    /// Empirical distribution counts/shots.
    std::vector<double> frequencies() const {
        auto w = weights();
        for (auto &x : w) {
            x /= static_cast<double>(shots_);
        }
        return w;
    }

    friend bool operator==(const CountsHistogram &, const CountsHistogram &) = default;

private:
    unsigned n_qubits_;
    std::map<uint64_t, uint64_t> counts_;
    uint64_t shots_;
};

inline double total_variation_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw DomainError("distributions have different lengths");
    }
    double s = 0;
    for (size_t i = 0; i < p.size(); i++) {
        s += std::abs(p[i] - q[i]);
    }
    return 0.5 * s;
}

// ---------------------------------------------------------------------------------------------
// Channels.

inline DensityMatrix to_density(const StateVector &state) {
    if (state.n_qubits() > kDensityMaxQubits) {
        throw CapacityError(state.n_qubits(), kDensityMaxQubits, "density matrix");
    }
    uint64_t d = state.dim();
    std::vector<Complex> e(d * d);
    auto a = state.amplitudes();
    for (uint64_t r = 0; r < d; r++) {
        for (uint64_t c = 0; c < d; c++) {
            e[r * d + c] = a[r] * std::conj(a[c]);
        }
    }
    return DensityMatrix(state.n_qubits(), std::move(e));
}

/// E(rho) = (1 - lambda) rho + lambda Tr[rho] I / 2^n.
inline DensityMatrix apply_global_depolarizing(const DensityMatrix &rho, double lambda) {
    require_lambda(lambda);
    uint64_t d = rho.dim();
    Complex mixed = lambda * rho.trace() / static_cast<double>(d);
    std::vector<Complex> e(rho.entries().begin(), rho.entries().end());
    for (auto &x : e) {
        x *= (1.0 - lambda);
    }
    for (uint64_t i = 0; i < d; i++) {
        e[i * d + i] += mixed;
    }
    return DensityMatrix(rho.n_qubits(), std::move(e));
}

/// Single-qubit depolarizing channel on `qubit`, as the Kraus sum
///   (1 - 3λ/4) ρ + (λ/4) (XρX + YρY + ZρZ).
///
/// With a, b the target bits of row r and column c, and ρ̄ = ρ[r^m][c^m]:
///   XρX -> ρ̄,   YρY -> (-1)^(a+b) ρ̄,   ZρZ -> (-1)^(a+b) ρ[r][c].
inline DensityMatrix apply_local_depolarizing(const DensityMatrix &rho, double lambda, unsigned qubit) {
    require_lambda(lambda);
    if (qubit >= rho.n_qubits()) {
        throw IndexError("qubit " + std::to_string(qubit) + " out of range for " + std::to_string(rho.n_qubits()) +
                         "-qubit density matrix");
    }
    uint64_t d = rho.dim();
    uint64_t m = uint64_t{1} << qubit;
    double w_id = 1.0 - 0.75 * lambda;
    double w_pauli = 0.25 * lambda;
    auto src = rho.entries();
    std::vector<Complex> e(d * d);
    for (uint64_t r = 0; r < d; r++) {
        for (uint64_t c = 0; c < d; c++) {
            Complex self = src[r * d + c];
            Complex flipped = src[(r ^ m) * d + (c ^ m)];
            double sign = ((r ^ c) & m) ? -1.0 : 1.0;
            Complex x_term = flipped;
            Complex y_term = sign * flipped;
            Complex z_term = sign * self;
            e[r * d + c] = w_id * self + w_pauli * (x_term + y_term + z_term);
        }
    }
    return DensityMatrix(rho.n_qubits(), std::move(e));
}

inline DensityMatrix apply_all_qubit_depolarizing(const DensityMatrix &rho, double lambda) {
    require_lambda(lambda);
    DensityMatrix out = rho;
    for (unsigned q = 0; q < rho.n_qubits(); q++) {
        out = apply_local_depolarizing(out, lambda, q);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Measurement.

namespace detail {

inline std::vector<double> clamp_and_renormalize(std::vector<double> p) {
    double total = 0;
    for (auto &x : p) {
        if (x < 0.0) {
            x = 0.0;
        }
        total += x;
    }
    if (total <= 0.0) {
        throw DomainError("probability vector has no mass");
    }
    for (auto &x : p) {
        x /= total;
    }
    return p;
}

}  // namespace detail

inline std::vector<double> measure_probabilities(const StateVector &state) {
    std::vector<double> p(state.dim());
    auto a = state.amplitudes();
    for (uint64_t i = 0; i < p.size(); i++) {
        p[i] = std::norm(a[i]);
    }
    return detail::clamp_and_renormalize(std::move(p));
}

inline std::vector<double> measure_probabilities(const DensityMatrix &rho) {
    std::vector<double> p(rho.dim());
    for (uint64_t i = 0; i < p.size(); i++) {
        p[i] = rho(i, i).real();
    }
    return detail::clamp_and_renormalize(std::move(p));
}

/// Diagonal of the global channel: (1 - λ) p + λ / 2^n.
inline std::vector<double> global_depolarized_probabilities(std::span<const double> probs, double lambda) {
    require_lambda(lambda);
    std::vector<double> out(probs.begin(), probs.end());
    double floor = lambda / static_cast<double>(out.size());
    for (auto &x : out) {
        x = (1.0 - lambda) * x + floor;
    }
    return out;
}

/// Diagonal of the all-qubit channel. On computational-basis populations each single-qubit
/// depolarizer acts as a classical bit flip with probability λ/2 (the X and Y Kraus terms).
inline std::vector<double> local_depolarized_probabilities(std::span<const double> probs, double lambda) {
    require_lambda(lambda);
    std::vector<double> cur(probs.begin(), probs.end());
    if (cur.size() < 2 || (cur.size() & (cur.size() - 1)) != 0) {
        throw DomainError("probability vector length must be a power of two");
    }
    double flip = 0.5 * lambda;
    std::vector<double> next(cur.size());
    for (uint64_t m = 1; m < cur.size(); m <<= 1) {
        for (uint64_t i = 0; i < cur.size(); i++) {
            next[i] = (1.0 - flip) * cur[i] + flip * cur[i ^ m];
        }
        std::swap(cur, next);
    }
    return cur;
}

/// Exact noisy outcome distribution, propagated on the diagonal only (no 4^n matrix). Trajectory
/// mode has the per-qubit channel as its exact limit.
inline std::vector<double> noisy_probabilities(const StateVector &state, const NoiseSpec &noise) {
    noise.validate();
    auto p = measure_probabilities(state);
    if (noise.lambda == 0.0) {
        return p;
    }
    if (noise.mode == NoiseMode::Global) {
        return detail::clamp_and_renormalize(global_depolarized_probabilities(p, noise.lambda));
    }
    return detail::clamp_and_renormalize(local_depolarized_probabilities(p, noise.lambda));
}

/// Same distribution as noisy_probabilities(), computed through an explicit density matrix.
inline std::vector<double> noisy_probabilities_dense(const StateVector &state, const NoiseSpec &noise) {
    noise.validate();
    DensityMatrix rho = to_density(state);
    if (noise.mode == NoiseMode::Global) {
        return measure_probabilities(apply_global_depolarizing(rho, noise.lambda));
    }
    return measure_probabilities(apply_all_qubit_depolarizing(rho, noise.lambda));
}

// ---------------------------------------------------------------------------------------------
// Sampling.
//
// Shot s draws its outcome from uniform_at(seed, s); any extra randomness for that shot comes from
// the stream derive_seed(seed, s). A shot's result therefore depends only on (seed, s), which makes
// histograms independent of how shots are partitioned across workers.

namespace detail {

inline std::vector<double> cumulative(std::span<const double> probs) {
    if (probs.empty()) {
        throw DomainError("empty probability vector");
    }
    std::vector<double> cdf(probs.size());
    double acc = 0;
    for (size_t i = 0; i < probs.size(); i++) {
        if (!(probs[i] >= 0.0)) {
            throw DomainError("negative or NaN probability at index " + std::to_string(i));
        }
        acc += probs[i];
        cdf[i] = acc;
    }
    if (std::abs(acc - 1.0) > kProbabilityTolerance) {
        throw DomainError("probabilities sum to " + std::to_string(acc) + ", expected 1");
    }
    return cdf;
}

inline uint64_t draw_outcome(std::span<const double> cdf, double u) {
    double target = u * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    if (it == cdf.end()) {
        --it;
    }
    return static_cast<uint64_t>(it - cdf.begin());
}

inline unsigned log2_exact(size_t n) {
    if (n < 2 || (n & (n - 1)) != 0) {
        throw DomainError("probability vector length must be a power of two >= 2");
    }
    unsigned q = 0;
    while ((size_t{1} << q) < n) {
        q++;
    }
    return q;
}

/// Runs body(first, last, tally) over [0, shots) on `threads` workers and sums the tallies.
template <typename Body>
std::vector<uint64_t> parallel_tally(uint64_t shots, size_t outcomes, unsigned threads, Body body) {
    threads = std::max(1u, threads);
    if (threads == 1 || shots < 4096) {
        std::vector<uint64_t> tally(outcomes);
        body(uint64_t{0}, shots, tally);
        return tally;
    }
    std::vector<std::vector<uint64_t>> partial(threads, std::vector<uint64_t>(outcomes));
    std::vector<std::thread> pool;
    uint64_t chunk = (shots + threads - 1) / threads;
    for (unsigned t = 0; t < threads; t++) {
        uint64_t first = std::min(shots, t * chunk);
        uint64_t last = std::min(shots, first + chunk);
        pool.emplace_back([&, t, first, last] { body(first, last, partial[t]); });
    }
    for (auto &th : pool) {
        th.join();
    }
    std::vector<uint64_t> tally(outcomes);
    for (const auto &p : partial) {
        for (size_t i = 0; i < outcomes; i++) {
            tally[i] += p[i];
        }
    }
    return tally;
}

inline CountsHistogram to_histogram(unsigned n_qubits, const std::vector<uint64_t> &tally, uint64_t shots) {
    std::map<uint64_t, uint64_t> counts;
    for (uint64_t i = 0; i < tally.size(); i++) {
        if (tally[i] != 0) {
            counts.emplace_hint(counts.end(), i, tally[i]);
        }
    }
    return CountsHistogram(n_qubits, std::move(counts), shots);
}

}  // namespace detail

/// Multinomial draw of `shots` outcomes from `probs` (length 2^n).
inline CountsHistogram sample_counts(std::span<const double> probs, uint64_t shots, uint64_t seed,
                                     unsigned threads = 1) {
    if (shots == 0) {
        throw DomainError("shots must be >= 1");
    }
    unsigned n = detail::log2_exact(probs.size());
    auto cdf = detail::cumulative(probs);
    auto tally = detail::parallel_tally(shots, probs.size(), threads,
                                        [&](uint64_t first, uint64_t last, std::vector<uint64_t> &out) {
                                            for (uint64_t s = first; s < last; s++) {
                                                out[detail::draw_outcome(cdf, CounterRng::uniform_at(seed, s))]++;
                                            }
                                        });
    return detail::to_histogram(n, tally, shots);
}

/// Monte Carlo depolarizing trajectories.
///
/// Every shot inserts, independently on each qubit, X, Y or Z with probability λ/4 each (identity with
/// probability 1 - 3λ/4) after the ideal state, then measures. A Pauli P maps the outcome distribution
/// p(b) to p(b ^ x(P)), where x(P) marks the qubits on which P has an X component (X or Y); Z only
/// changes phases. So each shot samples b from the ideal distribution and XORs in the frame's X mask.
inline CountsHistogram sample_counts_trajectories(const StateVector &state, double lambda, uint64_t shots,
                                                  uint64_t seed, unsigned threads = 1) {
    require_lambda(lambda);
    if (shots == 0) {
        throw DomainError("shots must be >= 1");
    }
    auto probs = measure_probabilities(state);
    auto cdf = detail::cumulative(probs);
    unsigned n = state.n_qubits();
    double p_identity = 1.0 - 0.75 * lambda;
    double p_pauli = 0.25 * lambda;
    auto tally = detail::parallel_tally(
        shots, probs.size(), threads, [&](uint64_t first, uint64_t last, std::vector<uint64_t> &out) {
            for (uint64_t s = first; s < last; s++) {
                uint64_t outcome = detail::draw_outcome(cdf, CounterRng::uniform_at(seed, s));
                if (lambda > 0.0) {
                    CounterRng rng(derive_seed(seed, s));
                    for (unsigned q = 0; q < n; q++) {
                        double u = rng.uniform();
                        if (u < p_identity) {
                            continue;
                        }
                        // 0 = X, 1 = Y, 2 = Z
                        auto pauli = std::min(2, static_cast<int>((u - p_identity) / p_pauli));
                        if (pauli != 2) {
                            outcome ^= uint64_t{1} << q;
                        }
                    }
                }
                out[outcome]++;
            }
        });
    return detail::to_histogram(n, tally, shots);
}

/// Samples the noisy state under the requested noise mode. Global and PerQubit draw from the exact
/// channel output; Trajectories draws Pauli frames per shot.
inline CountsHistogram simulate_counts(const StateVector &state, const NoiseSpec &noise, uint64_t shots,
                                       uint64_t seed, unsigned threads = 1) {
    noise.validate();
    if (noise.mode == NoiseMode::Trajectories) {
        return sample_counts_trajectories(state, noise.lambda, shots, seed, threads);
    }
    return sample_counts(noisy_probabilities(state, noise), shots, seed, threads);
}

}  // namespace geqie
