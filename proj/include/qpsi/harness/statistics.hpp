#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qpsi/core/measurement.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/statevector.hpp"
#include "qpsi/qss/keygen.hpp"

namespace qpsi::harness {

// Tallies from repeatedly preparing the three-qubit key-distribution
// resource state and measuring it the way the key-generation phase does:
// the dealer always reads its qubit in Z, and each receiver picks Z or X
// uniformly at random.
struct ResourceStateStatistics {
    std::size_t shots = 0;

    // Rounds where both receivers chose Z. The dealer bit must equal the
    // XOR of the receiver bits in every such round.
    std::size_t zz_rounds = 0;
    std::size_t parity_violations = 0;
    // Joint dealer/receiver/receiver outcome, packed dealer-first.
    std::array<std::size_t, 8> zz_outcome_histogram{};

    // Rounds where both receivers chose X. The receiver bits must agree.
    std::size_t xx_rounds = 0;
    std::size_t equality_violations = 0;

    // Single-party Z marginals; each should be an unbiased coin.
    std::size_t tp_z_ones = 0;  // dealer measures Z every round
    std::size_t alice_z_rounds = 0;
    std::size_t alice_z_ones = 0;
    std::size_t bob_z_rounds = 0;
    std::size_t bob_z_ones = 0;
};

inline ResourceStateStatistics collect_resource_state_statistics(
    std::size_t shots, core::RandomStream& rng) {
    if (shots == 0) throw std::invalid_argument("shots must be positive");
    using core::MeasurementBasis;
    ResourceStateStatistics stats;
    stats.shots = shots;
    const core::StateVector resource = qss::prepare_psi();
    for (std::size_t shot = 0; shot < shots; ++shot) {
        const MeasurementBasis alice_basis =
            rng.bit() ? MeasurementBasis::X : MeasurementBasis::Z;
        const MeasurementBasis bob_basis =
            rng.bit() ? MeasurementBasis::X : MeasurementBasis::Z;

        auto after_tp =
            core::measure(resource, {0}, MeasurementBasis::Z, rng);
        const int tp_bit = after_tp.bits[0];
        auto after_alice = core::measure(after_tp.state, {1}, alice_basis, rng);
        const int alice_bit = after_alice.bits[0];
        auto after_bob = core::measure(after_alice.state, {2}, bob_basis, rng);
        const int bob_bit = after_bob.bits[0];

        stats.tp_z_ones += static_cast<std::size_t>(tp_bit);
        if (alice_basis == MeasurementBasis::Z) {
            stats.alice_z_rounds += 1;
            stats.alice_z_ones += static_cast<std::size_t>(alice_bit);
        }
        if (bob_basis == MeasurementBasis::Z) {
            stats.bob_z_rounds += 1;
            stats.bob_z_ones += static_cast<std::size_t>(bob_bit);
        }
        if (alice_basis == MeasurementBasis::Z &&
            bob_basis == MeasurementBasis::Z) {
            stats.zz_rounds += 1;
            stats.zz_outcome_histogram[static_cast<std::size_t>(
                (tp_bit << 2) | (alice_bit << 1) | bob_bit)] += 1;
            if ((alice_bit ^ bob_bit) != tp_bit) stats.parity_violations += 1;
        }
        if (alice_basis == MeasurementBasis::X &&
            bob_basis == MeasurementBasis::X) {
            stats.xx_rounds += 1;
            if (alice_bit != bob_bit) stats.equality_violations += 1;
        }
    }
    return stats;
}

// Pearson chi-square statistic of observed bin counts against a uniform
// expectation over the given bins.
inline double chi_square_uniform(const std::vector<std::size_t>& bins) {
    if (bins.size() < 2) {
        throw std::invalid_argument("chi-square needs at least two bins");
    }
    std::size_t total = 0;
    for (std::size_t b : bins) total += b;
    if (total == 0) throw std::invalid_argument("chi-square needs samples");
    const double expected =
        static_cast<double>(total) / static_cast<double>(bins.size());
    double chi = 0.0;
    for (std::size_t b : bins) {
        const double d = static_cast<double>(b) - expected;
        chi += d * d / expected;
    }
    return chi;
}

// Upper critical values of the chi-square distribution at significance
// 0.001, for the degrees of freedom used below.
inline constexpr double kChiSquareCriticalOneDof = 10.828;
inline constexpr double kChiSquareCriticalThreeDof = 16.266;

struct StatisticsVerdict {
    double tp_chi_square = 0.0;
    double alice_chi_square = 0.0;
    double bob_chi_square = 0.0;
    // Over the four even-parity dealer/receiver/receiver outcomes, the only
    // ones the resource state can produce.
    double zz_joint_chi_square = 0.0;
    bool correlations_exact = false;
    bool marginals_uniform = false;
    bool joint_uniform = false;

    bool all_pass() const {
        return correlations_exact && marginals_uniform && joint_uniform;
    }
};

inline StatisticsVerdict evaluate_statistics(
    const ResourceStateStatistics& s) {
    StatisticsVerdict v;
    v.tp_chi_square = chi_square_uniform({s.tp_z_ones, s.shots - s.tp_z_ones});
    v.alice_chi_square = chi_square_uniform(
        {s.alice_z_ones, s.alice_z_rounds - s.alice_z_ones});
    v.bob_chi_square =
        chi_square_uniform({s.bob_z_ones, s.bob_z_rounds - s.bob_z_ones});
    const auto& h = s.zz_outcome_histogram;
    v.zz_joint_chi_square = chi_square_uniform({h[0], h[3], h[5], h[6]});
    v.correlations_exact =
        s.parity_violations == 0 && s.equality_violations == 0;
    v.marginals_uniform = v.tp_chi_square < kChiSquareCriticalOneDof &&
                          v.alice_chi_square < kChiSquareCriticalOneDof &&
                          v.bob_chi_square < kChiSquareCriticalOneDof;
    v.joint_uniform = v.zz_joint_chi_square < kChiSquareCriticalThreeDof;
    return v;
}

}  // namespace qpsi::harness
