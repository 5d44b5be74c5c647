#include "qpsi/channel/analysis.hpp"
#include "qpsi/channel/decoy.hpp"
#include "qpsi/channel/transport.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

#include "qpsi/core/density.hpp"
#include "qpsi/core/gates.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/register.hpp"
#include "qpsi/core/statevector.hpp"

using namespace qpsi::channel;
using qpsi::core::apply;
using qpsi::core::apply_cnot;
using qpsi::core::DensityMatrix;
using qpsi::core::GateKind;
using qpsi::core::join;
using qpsi::core::kTol;
using qpsi::core::make_register;
using qpsi::core::max_amplitude_deviation;
using qpsi::core::measure_qubit;
using qpsi::core::MeasurementBasis;
using qpsi::core::QubitRef;
using qpsi::core::RandomStream;
using qpsi::core::RegisterPtr;
using qpsi::core::resolve;
using qpsi::core::StateVector;

namespace {

// Chi-square critical value, 3 degrees of freedom, alpha = 0.001.
constexpr double kChiSq3Dof = 16.266;

std::vector<QubitRef> fresh_payload(std::size_t n,
                                    std::vector<RegisterPtr>& keep_alive) {
    std::vector<QubitRef> payload;
    for (std::size_t i = 0; i < n; ++i) {
        RegisterPtr reg = make_register(StateVector::basis(1, i % 2));
        keep_alive.push_back(reg);
        payload.push_back(QubitRef{reg, 0});
    }
    return payload;
}

}  // namespace

TEST(Decoys, EmptyPlan) {
    RandomStream rng(1);
    EXPECT_TRUE(insert_decoys(8, 0, rng).empty());
}

TEST(Decoys, DeterministicForFixedSeed) {
    RandomStream a(33);
    RandomStream b(33);
    DecoyPlan plan_a = insert_decoys(4, 4, a);
    DecoyPlan plan_b = insert_decoys(4, 4, b);
    ASSERT_EQ(plan_a.size(), plan_b.size());
    for (std::size_t i = 0; i < plan_a.size(); ++i) {
        EXPECT_EQ(plan_a[i].position, plan_b[i].position);
        EXPECT_EQ(plan_a[i].label, plan_b[i].label);
    }
}

TEST(Decoys, PositionsDistinctSortedAndInRange) {
    RandomStream rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        DecoyPlan plan = insert_decoys(10, 6, rng);
        ASSERT_EQ(plan.size(), 6u);
        std::set<std::size_t> seen;
        std::size_t prev = 0;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            ASSERT_LT(plan[i].position, 16u);
            ASSERT_TRUE(seen.insert(plan[i].position).second);
            if (i > 0) ASSERT_GT(plan[i].position, prev);
            prev = plan[i].position;
        }
    }
}

TEST(Decoys, LabelHistogramUniform) {
    RandomStream rng(101);
    std::array<int, 4> counts{};
    const int total = 4096;
    int collected = 0;
    while (collected < total) {
        DecoyPlan plan = insert_decoys(8, 8, rng);
        for (const DecoySpec& spec : plan) {
            if (collected == total) break;
            counts[static_cast<int>(spec.label)] += 1;
            ++collected;
        }
    }
    const double expected = total / 4.0;
    double chi_sq = 0.0;
    for (int c : counts) {
        chi_sq += (c - expected) * (c - expected) / expected;
    }
    EXPECT_LT(chi_sq, kChiSq3Dof);
}

TEST(Decoys, PositionsCoverSequenceUniformly) {
    RandomStream rng(202);
    // 1 decoy among 4 slots, repeated; each slot should appear ~uniformly.
    std::array<int, 4> counts{};
    const int trials = 4096;
    for (int t = 0; t < trials; ++t) {
        DecoyPlan plan = insert_decoys(3, 1, rng);
        counts[plan[0].position] += 1;
    }
    const double expected = trials / 4.0;
    double chi_sq = 0.0;
    for (int c : counts) {
        chi_sq += (c - expected) * (c - expected) / expected;
    }
    EXPECT_LT(chi_sq, kChiSq3Dof);
}

TEST(Message, ComposePlacesDecoysAndKeepsPayloadOrder) {
    std::vector<RegisterPtr> keep_alive;
    std::vector<QubitRef> payload = fresh_payload(3, keep_alive);
    DecoyPlan plan = {{1, DecoyLabel::Plus}, {3, DecoyLabel::One}};
    QuantumMessage msg = compose_message(payload, plan);
    ASSERT_EQ(msg.qubits.size(), 5u);
    EXPECT_EQ(resolve(msg.qubits[0]).reg, resolve(payload[0]).reg);
    EXPECT_EQ(resolve(msg.qubits[2]).reg, resolve(payload[1]).reg);
    EXPECT_EQ(resolve(msg.qubits[4]).reg, resolve(payload[2]).reg);
    // Decoy at position 3 is |1>.
    auto decoy = resolve(msg.qubits[3]);
    EXPECT_NEAR(std::abs(decoy.reg->state().amp(1) - 1.0), 0.0, kTol);
}

TEST(Message, ComposeRejectsBadPlans) {
    std::vector<RegisterPtr> keep_alive;
    std::vector<QubitRef> payload = fresh_payload(2, keep_alive);
    EXPECT_THROW(compose_message(payload, {{5, DecoyLabel::Zero}}),
                 std::invalid_argument);
    EXPECT_THROW(
        compose_message(payload,
                        {{0, DecoyLabel::Zero}, {0, DecoyLabel::One}}),
        std::invalid_argument);
}

TEST(Channel, HonestTransmissionIsIdentity) {
    RandomStream rng(7);
    // Payload: two halves of a Bell pair plus a |1> qubit.
    RegisterPtr bell = make_register(StateVector(2));
    apply(QubitRef{bell, 0}, GateKind::H);
    apply_cnot(QubitRef{bell, 0}, QubitRef{bell, 1});
    StateVector before = bell->state();
    RegisterPtr lone = make_register(StateVector::basis("1"));

    std::vector<QubitRef> payload = {
        QubitRef{bell, 0}, QubitRef{bell, 1}, QubitRef{lone, 0}};
    DecoyPlan plan = insert_decoys(payload.size(), 3, rng);
    QuantumMessage msg = compose_message(payload, plan);

    AdversarySession nobody(AdversaryStrategy::none());
    msg = transmit(std::move(msg), nobody, rng);
    ChannelReport report = verify_decoys(msg, plan, rng);

    EXPECT_EQ(report.decoys_tested, 3u);
    EXPECT_EQ(report.decoys_wrong, 0u);
    EXPECT_NEAR(report.error_rate(), 0.0, kTol);
    ASSERT_EQ(msg.qubits.size(), 3u);
    EXPECT_EQ(resolve(msg.qubits[0]).reg, bell);
    EXPECT_EQ(resolve(msg.qubits[1]).reg, bell);
    EXPECT_NEAR(max_amplitude_deviation(bell->state(), before), 0.0, kTol);
}

TEST(Channel, EmptyReportErrorRateThrows) {
    ChannelReport report;
    EXPECT_THROW(report.error_rate(), std::logic_error);
}

TEST(Channel, VerifyRejectsMismatchedPlan) {
    RandomStream rng(3);
    std::vector<RegisterPtr> keep_alive;
    QuantumMessage msg =
        compose_message(fresh_payload(2, keep_alive), {{0, DecoyLabel::Zero}});
    DecoyPlan other = {{0, DecoyLabel::Zero}, {1, DecoyLabel::One}};
    EXPECT_THROW(verify_decoys(msg, other, rng), std::invalid_argument);
}

TEST(Channel, InterceptResendSampledRateNearQuarter) {
    RandomStream rng(404);
    int tested = 0;
    int wrong = 0;
    while (tested < 4096) {
        std::vector<RegisterPtr> keep_alive;
        std::vector<QubitRef> payload = fresh_payload(4, keep_alive);
        DecoyPlan plan = insert_decoys(payload.size(), 4, rng);
        QuantumMessage msg = compose_message(payload, plan);
        AdversarySession eve(AdversaryStrategy::intercept_resend());
        msg = transmit(std::move(msg), eve, rng);
        ChannelReport report = verify_decoys(msg, plan, rng);
        tested += static_cast<int>(report.decoys_tested);
        wrong += static_cast<int>(report.decoys_wrong);
    }
    const double rate = static_cast<double>(wrong) / tested;
    EXPECT_GT(rate, 0.21);
    EXPECT_LT(rate, 0.29);
}

TEST(Channel, InterceptResendOnPlusCheckedInXFailsHalfTheTime) {
    // Adversary measures a |+> decoy in Z and resends; the X-basis check
    // then fails with probability 1/2.
    RandomStream rng(505);
    int failures = 0;
    const int trials = 2048;
    for (int t = 0; t < trials; ++t) {
        RegisterPtr decoy = make_register(decoy_state(DecoyLabel::Plus));
        QubitRef q{decoy, 0};
        measure_qubit(q, MeasurementBasis::Z, rng);  // intercept + resend
        if (measure_qubit(q, MeasurementBasis::X, rng) !=
            decoy_expected_bit(DecoyLabel::Plus)) {
            ++failures;
        }
    }
    // Mean 1024, sigma ~22.6; allow slightly over three sigma.
    EXPECT_GT(failures, 950);
    EXPECT_LT(failures, 1100);
}

TEST(Channel, ConstrainedEntangleMeasureIsInvisibleAndUninformed) {
    RandomStream rng(606);
    for (int constant : {0, 1}) {
        AdversarySession eve(
            AdversaryStrategy::entangle_measure(constant, constant));
        int tested = 0;
        int wrong = 0;
        for (int round = 0; round < 64; ++round) {
            std::vector<RegisterPtr> keep_alive;
            std::vector<QubitRef> payload = fresh_payload(4, keep_alive);
            std::vector<StateVector> before;
            for (const QubitRef& q : payload) {
                before.push_back(resolve(q).reg->state());
            }
            DecoyPlan plan = insert_decoys(payload.size(), 4, rng);
            QuantumMessage msg = compose_message(payload, plan);
            msg = transmit(std::move(msg), eve, rng);
            ChannelReport report = verify_decoys(msg, plan, rng);
            tested += static_cast<int>(report.decoys_tested);
            wrong += static_cast<int>(report.decoys_wrong);
        }
        EXPECT_EQ(tested, 256);
        EXPECT_EQ(wrong, 0) << "constant " << constant;

        // Every retained ancilla is exactly |constant>, independent of what
        // was transmitted.
        const DensityMatrix want = qpsi::core::reduced_density(
            StateVector::basis(1, constant), {0});
        for (std::size_t i = 0; i < eve.ancillas().size(); ++i) {
            EXPECT_LT(qpsi::core::trace_distance_qubit(
                          eve.ancilla_density(i), want),
                      1e-12);
        }
    }
}

TEST(Channel, UnconstrainedEntangleMeasureTripsXBasisDecoys) {
    RandomStream rng(707);
    int z_tested = 0, z_wrong = 0, x_tested = 0, x_wrong = 0;
    for (int round = 0; round < 512; ++round) {
        std::vector<RegisterPtr> keep_alive;
        std::vector<QubitRef> payload = fresh_payload(2, keep_alive);
        DecoyPlan plan = insert_decoys(payload.size(), 4, rng);
        AdversarySession eve(AdversaryStrategy::entangle_measure(0, 1));
        QuantumMessage msg = compose_message(payload, plan);
        msg = transmit(std::move(msg), eve, rng);
        // Verify decoy by decoy so the failures can be split by basis.
        for (const DecoySpec& spec : plan) {
            const int bit = measure_qubit(msg.qubits[spec.position],
                                          decoy_basis(spec.label), rng);
            const bool fail = bit != decoy_expected_bit(spec.label);
            if (decoy_basis(spec.label) == MeasurementBasis::Z) {
                z_tested += 1;
                z_wrong += fail ? 1 : 0;
            } else {
                x_tested += 1;
                x_wrong += fail ? 1 : 0;
            }
        }
    }
    EXPECT_EQ(z_wrong, 0);
    ASSERT_GT(x_tested, 700);
    const double x_rate = static_cast<double>(x_wrong) / x_tested;
    EXPECT_GT(x_rate, 0.44);
    EXPECT_LT(x_rate, 0.56);
}

TEST(Analysis, InterceptResendExactQuarter) {
    for (DecoyLabel label : kAllDecoyLabels) {
        EXPECT_NEAR(intercept_resend_detection_probability(label), 0.25, kTol)
            << decoy_name(label);
    }
    EXPECT_NEAR(intercept_resend_detection_probability(), 0.25, kTol);
}

TEST(Analysis, EntangleMeasureExactRates) {
    // Constrained: invisible on every decoy state.
    EXPECT_NEAR(entangle_measure_detection_probability(0, 0), 0.0, kTol);
    EXPECT_NEAR(entangle_measure_detection_probability(1, 1), 0.0, kTol);

    // Unconstrained: Z-basis decoys never trip, X-basis decoys trip half
    // the time, so the average over the four states is 1/4.
    EXPECT_NEAR(
        entangle_measure_detection_probability(DecoyLabel::Zero, 0, 1), 0.0,
        kTol);
    EXPECT_NEAR(
        entangle_measure_detection_probability(DecoyLabel::One, 0, 1), 0.0,
        kTol);
    EXPECT_NEAR(
        entangle_measure_detection_probability(DecoyLabel::Plus, 0, 1), 0.5,
        kTol);
    EXPECT_NEAR(
        entangle_measure_detection_probability(DecoyLabel::Minus, 0, 1), 0.5,
        kTol);
    EXPECT_NEAR(entangle_measure_detection_probability(0, 1), 0.25, kTol);
}

TEST(Analysis, EntangleMeasureInformationGain) {
    // Constrained truth tables leave the ancilla independent of the input.
    EXPECT_LT(entangle_measure_ancilla_max_distance(0, 0), 1e-12);
    EXPECT_LT(entangle_measure_ancilla_max_distance(1, 1), 1e-12);
    // Unconstrained tables copy Z-basis information perfectly.
    EXPECT_NEAR(entangle_measure_ancilla_max_distance(0, 1), 1.0, kTol);
    EXPECT_NEAR(entangle_measure_ancilla_max_distance(1, 0), 1.0, kTol);
}
