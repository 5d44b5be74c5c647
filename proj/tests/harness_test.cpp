// Tests for the verification harness: the classical oracle the simulator is
// checked against, exact efficiency arithmetic, resource cross-checks, and
// the resource-state sampling statistics.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "qpsi/core/random.hpp"
#include "qpsi/encoding/sets.hpp"
#include "qpsi/harness/efficiency.hpp"
#include "qpsi/harness/oracle.hpp"
#include "qpsi/harness/statistics.hpp"
#include "qpsi/protocol/engine.hpp"

namespace {

using qpsi::core::RandomStream;
using qpsi::encoding::make_private_set;
using qpsi::encoding::PrivateSet;
using qpsi::harness::chi_square_uniform;
using qpsi::harness::classical_oracle;
using qpsi::harness::collect_resource_state_statistics;
using qpsi::harness::evaluate_statistics;
using qpsi::harness::make_rational;
using qpsi::harness::measured_efficiency;
using qpsi::harness::OracleAnswer;
using qpsi::harness::qubit_efficiency;
using qpsi::harness::Rational;
using qpsi::harness::to_double;
using qpsi::harness::verify_resources;
using qpsi::protocol::ProtocolResult;
using qpsi::protocol::run_multi_party;
using qpsi::protocol::run_two_party;
using qpsi::protocol::RunConfig;

TEST(ClassicalOracle, TwoPartyWorkedExample) {
    const OracleAnswer answer = classical_oracle(
        {make_private_set(5, {1, 2, 3}), make_private_set(5, {1, 2, 4})});
    EXPECT_EQ(answer.intersection_cardinality, 2u);
    EXPECT_EQ(answer.union_cardinality, 4u);
}

TEST(ClassicalOracle, ThreePartyWorkedExample) {
    const OracleAnswer answer = classical_oracle({
        make_private_set(7, {1, 2, 5}),
        make_private_set(7, {2, 3}),
        make_private_set(7, {2, 4, 5}),
    });
    EXPECT_EQ(answer.intersection_cardinality, 1u);
    EXPECT_EQ(answer.union_cardinality, 5u);
}

TEST(ClassicalOracle, DegenerateInputs) {
    const PrivateSet s = make_private_set(5, {0, 3});
    const OracleAnswer same = classical_oracle({s, s, s});
    EXPECT_EQ(same.intersection_cardinality, 2u);
    EXPECT_EQ(same.union_cardinality, 2u);

    const OracleAnswer disjoint = classical_oracle(
        {make_private_set(5, {0, 1}), make_private_set(5, {2, 3})});
    EXPECT_EQ(disjoint.intersection_cardinality, 0u);
    EXPECT_EQ(disjoint.union_cardinality, 4u);

    const OracleAnswer empty = classical_oracle(
        {make_private_set(5, {}), make_private_set(5, {1})});
    EXPECT_EQ(empty.intersection_cardinality, 0u);
    EXPECT_EQ(empty.union_cardinality, 1u);
}

TEST(ClassicalOracle, RejectsBadInput) {
    EXPECT_THROW(classical_oracle({}), std::invalid_argument);
    EXPECT_THROW(classical_oracle(
                     {make_private_set(5, {1}), make_private_set(7, {1})}),
                 std::invalid_argument);
}

TEST(Rationals, NormalizationAndEquality) {
    EXPECT_EQ(make_rational(10, 164).num, 5);
    EXPECT_EQ(make_rational(10, 164).den, 82);
    EXPECT_EQ(make_rational(0, 5).num, 0);
    EXPECT_EQ(make_rational(0, 5).den, 1);
    EXPECT_EQ(make_rational(1, -2).num, -1);
    EXPECT_EQ(make_rational(1, -2).den, 2);
    EXPECT_TRUE(make_rational(10, 164) == make_rational(5, 82));
    EXPECT_FALSE(make_rational(5, 82) == make_rational(5, 81));
    EXPECT_THROW(make_rational(1, 0), std::invalid_argument);
    EXPECT_NEAR(to_double(make_rational(5, 82)), 5.0 / 82.0, 1e-15);
}

TEST(QubitEfficiency, ClosedFormValues) {
    EXPECT_TRUE(qubit_efficiency(5, 2) == make_rational(5, 82));
    EXPECT_TRUE(qubit_efficiency(5, 3) == make_rational(5, 162));
    EXPECT_TRUE(qubit_efficiency(7, 2) == make_rational(7, 114));
    EXPECT_TRUE(qubit_efficiency(11, 5) == make_rational(11, 530));
    // Odd and even party counts sharing a group count share the figure.
    EXPECT_TRUE(qubit_efficiency(11, 3) == qubit_efficiency(11, 4));
    EXPECT_THROW(qubit_efficiency(1, 2), std::invalid_argument);
    EXPECT_THROW(qubit_efficiency(5, 1), std::invalid_argument);
}

TEST(QubitEfficiency, MeasuredRunsMatchTheFormula) {
    const ProtocolResult two = run_two_party(make_private_set(5, {1, 2, 3}),
                                             make_private_set(5, {1, 2, 4}),
                                             RunConfig{}, RandomStream(7));
    EXPECT_TRUE(measured_efficiency(two.resources, 5) ==
                qubit_efficiency(5, 2));
    EXPECT_TRUE(verify_resources(two, 5, 2));

    const ProtocolResult three = run_multi_party(
        {make_private_set(7, {1, 2, 5}), make_private_set(7, {2, 3}),
         make_private_set(7, {2, 4, 5})},
        RunConfig{}, RandomStream(11));
    EXPECT_TRUE(measured_efficiency(three.resources, 7) ==
                qubit_efficiency(7, 3));
    EXPECT_TRUE(verify_resources(three, 7, 3));
}

TEST(QubitEfficiency, VerifyResourcesCatchesTampering) {
    ProtocolResult run = run_two_party(make_private_set(5, {1, 2, 3}),
                                       make_private_set(5, {1, 2, 4}),
                                       RunConfig{}, RandomStream(7));
    ASSERT_TRUE(verify_resources(run, 5, 2));

    ProtocolResult wrong_core = run;
    wrong_core.resources.qubits_prepared_core += 1;
    EXPECT_FALSE(verify_resources(wrong_core, 5, 2));

    ProtocolResult wrong_output = run;
    wrong_output.resources.classical_bits_output = 3;
    EXPECT_FALSE(verify_resources(wrong_output, 5, 2));

    ProtocolResult undercounted_total = run;
    undercounted_total.resources.qubits_prepared_total =
        undercounted_total.resources.qubits_prepared_core - 1;
    EXPECT_FALSE(verify_resources(undercounted_total, 5, 2));

    ProtocolResult missing_payload = run;
    std::erase_if(missing_payload.transcript, [](const auto& event) {
        return event.phase == "payload";
    });
    EXPECT_FALSE(verify_resources(missing_payload, 5, 2));

    // A result sized for one group count fails verification against another.
    EXPECT_FALSE(verify_resources(run, 5, 3));
}

TEST(ChiSquare, HandComputedValues) {
    EXPECT_DOUBLE_EQ(chi_square_uniform({512, 512}), 0.0);
    // Expected 512 per bin; deviations of +-88 give 2*88^2/512 = 30.25.
    EXPECT_DOUBLE_EQ(chi_square_uniform({600, 424}), 30.25);
    EXPECT_DOUBLE_EQ(chi_square_uniform({1, 1, 1, 1}), 0.0);
    EXPECT_THROW(chi_square_uniform({}), std::invalid_argument);
    EXPECT_THROW(chi_square_uniform({5}), std::invalid_argument);
    EXPECT_THROW(chi_square_uniform({0, 0}), std::invalid_argument);
}

TEST(ResourceStateStatistics, CorrelationsHoldOverManyShots) {
    RandomStream rng(2026);
    const auto stats = collect_resource_state_statistics(2048, rng);

    EXPECT_EQ(stats.shots, 2048u);
    EXPECT_EQ(stats.parity_violations, 0u);
    EXPECT_EQ(stats.equality_violations, 0u);

    // Only even-parity dealer/receiver/receiver outcomes can occur.
    const auto& h = stats.zz_outcome_histogram;
    EXPECT_EQ(h[1], 0u);
    EXPECT_EQ(h[2], 0u);
    EXPECT_EQ(h[4], 0u);
    EXPECT_EQ(h[7], 0u);
    EXPECT_EQ(h[0] + h[3] + h[5] + h[6], stats.zz_rounds);

    // Basis choices are two fair coins: each same-basis bucket holds about
    // a quarter of the shots.
    EXPECT_GT(stats.zz_rounds, 410u);
    EXPECT_LT(stats.zz_rounds, 615u);
    EXPECT_GT(stats.xx_rounds, 410u);
    EXPECT_LT(stats.xx_rounds, 615u);
    EXPECT_LE(stats.zz_rounds, stats.alice_z_rounds);
    EXPECT_LE(stats.zz_rounds, stats.bob_z_rounds);

    const auto verdict = evaluate_statistics(stats);
    EXPECT_TRUE(verdict.correlations_exact);
    EXPECT_TRUE(verdict.marginals_uniform);
    EXPECT_TRUE(verdict.joint_uniform);
    EXPECT_TRUE(verdict.all_pass());
}

TEST(ResourceStateStatistics, RejectsZeroShots) {
    RandomStream rng(1);
    EXPECT_THROW(collect_resource_state_statistics(0, rng),
                 std::invalid_argument);
}

}  // namespace
