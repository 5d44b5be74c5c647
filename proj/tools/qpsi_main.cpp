// qpsi — command-line front end for the private set-cardinality simulator.
//
// Commands:
//   run           one full protocol execution, checked against the oracle
//   keygen-stats  resource-state measurement statistics over many shots
//   mixing-check  exact key-averaged density of every encrypted basis state
//   attack-sim    adversary detection, analytic and sampled, plus sessions
//   efficiency    closed-form qubit-efficiency table, verified by live runs
//
// Every command prints one JSON report (or a text digest with --format
// text) and exits 0 on success, 2 on configuration errors, 3 when the
// protocol aborted on an attack, and 4 when a verification check failed.
// Reports are byte-identical across reruns of the same configuration and
// seed, except for the timing_ms field.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpsi/channel/analysis.hpp"
#include "qpsi/channel/decoy.hpp"
#include "qpsi/channel/transport.hpp"
#include "qpsi/core/density.hpp"
#include "qpsi/core/random.hpp"
#include "qpsi/core/register.hpp"
#include "qpsi/core/statevector.hpp"
#include "qpsi/encoding/sets.hpp"
#include "qpsi/harness/efficiency.hpp"
#include "qpsi/harness/oracle.hpp"
#include "qpsi/harness/statistics.hpp"
#include "qpsi/protocol/engine.hpp"
#include "qpsi/qotp/pauli.hpp"
#include "qpsi/qss/errors.hpp"

namespace {

using json = nlohmann::ordered_json;
namespace qp = qpsi::protocol;
namespace qh = qpsi::harness;
namespace qc = qpsi::channel;

constexpr int kSchemaVersion = 1;
constexpr double kMixingTolerance = 1e-12;
// Fixed sample size of the per-decoy detection-rate estimate in attack-sim.
constexpr std::size_t kDecoyStreamSamples = 4096;

// Exit codes. 4 covers every "the simulation disagrees with theory" case:
// oracle mismatch, failed uniformity, failed mixing, efficiency mismatch.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;
constexpr int kExitVerification = 4;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Shared option state

struct CommonOptions {
    std::optional<std::size_t> q;
    std::vector<std::string> set_args;
    std::string sets_file;
    std::optional<std::size_t> delta;
    double test_fraction = 0.125;
    double threshold = 0.0;
    std::string adversary = "none";
    std::string f_table;
    std::optional<std::size_t> decoys_per_message;
    std::optional<std::uint64_t> seed;
    std::size_t shots = 0;  // per-command default applied later
    std::size_t parallel = 1;
    std::string report_path;
    std::string format = "json";
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("QPSI_SEED")) {
        std::uint64_t value = 0;
        const char* end = env + std::string_view(env).size();
        auto [ptr, ec] = std::from_chars(env, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw ConfigError("QPSI_SEED must be an unsigned integer");
        }
        return value;
    }
    return 0;
}

qpsi::channel::AdversaryStrategy resolve_adversary(const CommonOptions& opt) {
    if (opt.adversary == "none") {
        if (!opt.f_table.empty()) {
            throw ConfigError("--f only applies to entangle-measure");
        }
        return qc::AdversaryStrategy::none();
    }
    if (opt.adversary == "intercept-resend") {
        if (!opt.f_table.empty()) {
            throw ConfigError("--f only applies to entangle-measure");
        }
        return qc::AdversaryStrategy::intercept_resend();
    }
    if (opt.adversary == "entangle-measure") {
        int f0 = 0, f1 = 1;  // default: the detectable truth table
        if (!opt.f_table.empty()) {
            const auto comma = opt.f_table.find(',');
            if (comma == std::string::npos) {
                throw ConfigError("--f expects \"f0,f1\", e.g. \"0,1\"");
            }
            try {
                f0 = std::stoi(opt.f_table.substr(0, comma));
                f1 = std::stoi(opt.f_table.substr(comma + 1));
            } catch (const std::exception&) {
                throw ConfigError("--f expects \"f0,f1\", e.g. \"0,1\"");
            }
            if ((f0 != 0 && f0 != 1) || (f1 != 0 && f1 != 1)) {
                throw ConfigError("--f entries must be bits");
            }
        }
        return qc::AdversaryStrategy::entangle_measure(f0, f1);
    }
    throw ConfigError("unknown adversary: " + opt.adversary);
}

// Parses the input sets from --sets strings or --sets-file. The file may be
// a JSON array of arrays, or an object {"q": ..., "sets": [...]} that also
// pins the modulus.
std::vector<qpsi::encoding::PrivateSet> resolve_sets(const CommonOptions& opt,
                                                     std::size_t min_sets) {
    if (!opt.set_args.empty() && !opt.sets_file.empty()) {
        throw ConfigError("--sets and --sets-file are mutually exclusive");
    }
    std::optional<std::size_t> q = opt.q;
    json raw = json::array();
    if (!opt.sets_file.empty()) {
        std::ifstream in(opt.sets_file);
        if (!in) throw ConfigError("cannot open " + opt.sets_file);
        json file = json::parse(in, nullptr, false);
        if (file.is_discarded()) {
            throw ConfigError(opt.sets_file + " is not valid JSON");
        }
        if (file.is_object()) {
            if (!file.contains("sets")) {
                throw ConfigError(opt.sets_file + " lacks a \"sets\" key");
            }
            if (file.contains("q")) {
                const auto file_q = file["q"].get<std::size_t>();
                if (q && *q != file_q) {
                    throw ConfigError("--q disagrees with the sets file");
                }
                q = file_q;
            }
            raw = file["sets"];
        } else {
            raw = file;
        }
    } else {
        for (const std::string& arg : opt.set_args) {
            // main() shields bracketed tokens from the parser with quotes;
            // peel them off again.
            std::string text = arg;
            if (text.size() >= 2 && text.front() == '"' &&
                text.back() == '"') {
                text = text.substr(1, text.size() - 2);
            }
            json one = json::parse(text, nullptr, false);
            if (one.is_discarded() || !one.is_array()) {
                throw ConfigError("--sets entries must be JSON arrays: " +
                                  text);
            }
            raw.push_back(one);
        }
    }
    if (!q) throw ConfigError("--q is required");
    if (!raw.is_array() || raw.size() < min_sets) {
        throw ConfigError("need at least " + std::to_string(min_sets) +
                          " input sets");
    }
    std::vector<qpsi::encoding::PrivateSet> sets;
    sets.reserve(raw.size());
    for (const json& entry : raw) {
        if (!entry.is_array()) {
            throw ConfigError("each set must be a JSON array of integers");
        }
        std::vector<std::int64_t> elements;
        for (const json& e : entry) {
            if (!e.is_number_integer()) {
                throw ConfigError("set elements must be integers");
            }
            elements.push_back(e.get<std::int64_t>());
        }
        try {
            sets.push_back(qpsi::encoding::make_private_set(*q, elements));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(err.what());
        }
    }
    return sets;
}

qp::RunConfig resolve_run_config(const CommonOptions& opt) {
    if (opt.test_fraction < 0.0 || opt.test_fraction >= 1.0) {
        throw ConfigError("--test-fraction must lie in [0, 1)");
    }
    if (opt.threshold < 0.0 || opt.threshold >= 1.0) {
        throw ConfigError("--threshold must lie in [0, 1)");
    }
    qp::RunConfig config;
    config.delta = opt.delta;
    config.test_fraction = opt.test_fraction;
    config.error_threshold = opt.threshold;
    config.adversary = resolve_adversary(opt);
    config.decoys_per_message = opt.decoys_per_message;
    return config;
}

// ---------------------------------------------------------------------------
// JSON builders

json sets_json(const std::vector<qpsi::encoding::PrivateSet>& sets) {
    json out = json::array();
    for (const auto& s : sets) out.push_back(s.elements);
    return out;
}

json rational_json(const qh::Rational& r) {
    return {{"num", r.num}, {"den", r.den}, {"value", qh::to_double(r)}};
}

json counts_json(const qp::OutcomeCounts& c) {
    return {{"h1", c.h1},   {"h2", c.h2},   {"h3", c.h3},
            {"h4", c.h4},   {"h1p", c.h1p}, {"h2p", c.h2p}};
}

json resources_json(const qp::ResourceCounters& r) {
    return {{"qubits_prepared_core", r.qubits_prepared_core},
            {"qubits_prepared_total", r.qubits_prepared_total},
            {"classical_bits_output", r.classical_bits_output},
            {"messages_sent", r.messages_sent}};
}

json f_json(const qc::AdversaryStrategy& strategy) {
    if (strategy.kind != qc::AdversaryKind::EntangleMeasure) return nullptr;
    return json::array({strategy.f0, strategy.f1});
}

json channel_report_json(const qc::ChannelReport& r) {
    return {{"decoys_tested", r.decoys_tested},
            {"decoys_wrong", r.decoys_wrong}};
}

json keygen_json(const qpsi::qss::KeygenReport& r) {
    return {{"q", r.q},
            {"delta", r.delta},
            {"rounds_total", r.rounds_total},
            {"test_rounds", r.test_rounds},
            {"same_basis_test_rounds", r.same_basis_test_rounds},
            {"table1_violations", r.table1_violations},
            {"zz_key_rounds", r.zz_key_rounds},
            {"key_bits", r.key_bits}};
}

json group_json(const qp::GroupReport& g) {
    json masked_first = json::array();
    json masked_second = json::array();
    if (g.first_owner.masked_set) {
        masked_first = g.first_owner.masked_set->elements;
    }
    if (g.second_owner.masked_set) {
        masked_second = g.second_owner.masked_set->elements;
    }
    json codes = json::array();
    for (qp::MembershipCode code : g.codes) {
        codes.push_back(qp::membership_name(code));
    }
    return {{"group_index", g.group_index},
            {"first_party", g.first_party},
            {"second_party", g.second_party},
            {"keygen_attempts", g.keygen_attempts},
            {"binary_mask", g.binary_mask.bits},
            {"masked_first", masked_first},
            {"masked_second", masked_second},
            {"codes", codes},
            {"counts", counts_json(g.counts)}};
}

// The report envelope: every command fills the same ten top-level keys,
// with null for the sections it has no data for.
json make_envelope(const std::string& command) {
    json report;
    report["schema_version"] = kSchemaVersion;
    report["config"] = json{{"command", command}};
    report["result"] = nullptr;
    report["counts"] = nullptr;
    report["keygen_report"] = nullptr;
    report["channel_reports"] = nullptr;
    report["resources"] = nullptr;
    report["efficiency"] = nullptr;
    report["oracle"] = nullptr;
    report["timing_ms"] = 0;
    return report;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// Sorts object keys recursively so reruns serialize byte-identically; the
// builders above use insertion order only for readability.
json canonicalize(const json& value) {
    if (value.is_object()) {
        std::map<std::string, json> sorted;
        for (const auto& [key, child] : value.items()) {
            sorted[key] = canonicalize(child);
        }
        json out = json::object();
        for (const auto& [key, child] : sorted) out[key] = child;
        return out;
    }
    if (value.is_array()) {
        json out = json::array();
        for (const json& child : value) out.push_back(canonicalize(child));
        return out;
    }
    return value;
}

void emit_report(const json& report, const CommonOptions& opt,
                 const std::string& text_digest) {
    const json canonical = canonicalize(report);
    if (!opt.report_path.empty()) {
        std::ofstream out(opt.report_path);
        if (!out) throw ConfigError("cannot write " + opt.report_path);
        out << canonical.dump(2) << "\n";
    }
    if (opt.format == "text") {
        std::cout << text_digest;
    } else {
        std::cout << canonical.dump(2) << "\n";
    }
}

// ---------------------------------------------------------------------------
// run

int command_run(const CommonOptions& opt) {
    const Stopwatch clock;
    const auto sets = resolve_sets(opt, 2);
    const qp::RunConfig config = resolve_run_config(opt);
    const std::uint64_t seed = resolve_seed(opt.seed);
    const std::size_t q = sets.front().q;
    const std::size_t m = sets.size();

    json report = make_envelope("run");
    report["config"] = {{"command", "run"},
                        {"q", q},
                        {"sets", sets_json(sets)},
                        {"delta", opt.delta ? json(*opt.delta) : json()},
                        {"test_fraction", opt.test_fraction},
                        {"error_threshold", opt.threshold},
                        {"adversary", opt.adversary},
                        {"f", f_json(config.adversary)},
                        {"decoys_per_message",
                         opt.decoys_per_message ? json(*opt.decoys_per_message)
                                                : json()},
                        {"seed", seed}};

    qp::ProtocolResult result;
    try {
        const qpsi::core::RandomStream rng(seed);
        result = (m == 2) ? qp::run_two_party(sets[0], sets[1], config, rng)
                          : qp::run_multi_party(sets, config, rng);
    } catch (const qpsi::qss::ProtocolAbort& abort) {
        report["result"] = {{"aborted", true},
                            {"kind", abort.kind()},
                            {"what", abort.what()}};
        report["timing_ms"] = clock.elapsed_ms();
        emit_report(report, opt,
                    "aborted (" + abort.kind() + "): " + abort.what() + "\n");
        return kExitAbort;
    }

    json groups = json::array();
    json keygen_reports = json::array();
    json channel_reports = json::array();
    for (const qp::GroupReport& g : result.groups) {
        groups.push_back(group_json(g));
        json kg = keygen_json(g.keygen);
        kg["group_index"] = g.group_index;
        kg["attempts"] = g.keygen_attempts;
        keygen_reports.push_back(kg);
        channel_reports.push_back(
            {{"group_index", g.group_index},
             {"keygen_to_alice", channel_report_json(g.keygen.channel_to_alice)},
             {"keygen_to_bob", channel_report_json(g.keygen.channel_to_bob)},
             {"payload_from_first",
              channel_report_json(g.payload_from_first)},
             {"payload_from_second",
              channel_report_json(g.payload_from_second)}});
    }
    report["result"] = {
        {"aborted", false},
        {"intersection_cardinality", result.intersection_cardinality},
        {"union_cardinality", result.union_cardinality},
        {"multiplier", result.multiplier},
        {"groups", groups}};
    report["counts"] = counts_json(result.counts);
    report["keygen_report"] = keygen_reports;
    report["channel_reports"] = channel_reports;
    report["resources"] = resources_json(result.resources);

    const qh::Rational formula = qh::qubit_efficiency(q, m);
    const qh::Rational measured = qh::measured_efficiency(result.resources, q);
    const bool resources_ok = qh::verify_resources(result, q, m) &&
                              measured == formula;
    report["efficiency"] = {{"formula", rational_json(formula)},
                            {"measured", rational_json(measured)},
                            {"matches", resources_ok}};

    const qh::OracleAnswer oracle = qh::classical_oracle(sets);
    const bool agrees =
        oracle.intersection_cardinality == result.intersection_cardinality &&
        oracle.union_cardinality == result.union_cardinality;
    report["oracle"] = {
        {"intersection_cardinality", oracle.intersection_cardinality},
        {"union_cardinality", oracle.union_cardinality},
        {"agrees", agrees}};
    report["timing_ms"] = clock.elapsed_ms();

    const std::string count_line =
        (m == 2) ? "counts h1=" + std::to_string(result.counts.h1) +
                       " h2=" + std::to_string(result.counts.h2) +
                       " h3=" + std::to_string(result.counts.h3) +
                       " h4=" + std::to_string(result.counts.h4)
                 : "counts h1'=" + std::to_string(result.counts.h1p) +
                       " h2'=" + std::to_string(result.counts.h2p);
    std::string digest =
        "intersection " + std::to_string(result.intersection_cardinality) +
        ", union " + std::to_string(result.union_cardinality) + " (oracle " +
        (agrees ? "agrees" : "DISAGREES") + ")\n" + count_line +
        "\ncore qubits " +
        std::to_string(result.resources.qubits_prepared_core) +
        ", efficiency " + std::to_string(formula.num) + "/" +
        std::to_string(formula.den) + (resources_ok ? "" : " (MISMATCH)") +
        "\n";
    emit_report(report, opt, digest);
    return (agrees && resources_ok) ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// keygen-stats

int command_keygen_stats(const CommonOptions& opt) {
    const Stopwatch clock;
    const std::size_t shots = opt.shots ? opt.shots : 2048;
    const std::uint64_t seed = resolve_seed(opt.seed);

    json report = make_envelope("keygen-stats");
    report["config"] = {
        {"command", "keygen-stats"}, {"shots", shots}, {"seed", seed}};

    qpsi::core::RandomStream rng(seed);
    const auto stats = qh::collect_resource_state_statistics(shots, rng);
    const auto verdict = qh::evaluate_statistics(stats);

    json histogram = json::array();
    for (std::size_t count : stats.zz_outcome_histogram) {
        histogram.push_back(count);
    }
    report["result"] = {
        {"shots", stats.shots},
        {"zz_rounds", stats.zz_rounds},
        {"parity_violations", stats.parity_violations},
        // Joint dealer/receiver/receiver Z outcomes, dealer bit first.
        {"zz_outcome_histogram", histogram},
        {"xx_rounds", stats.xx_rounds},
        {"equality_violations", stats.equality_violations},
        {"marginals",
         {{"tp", {{"rounds", stats.shots}, {"ones", stats.tp_z_ones},
                  {"chi_square", verdict.tp_chi_square}}},
          {"alice", {{"rounds", stats.alice_z_rounds},
                     {"ones", stats.alice_z_ones},
                     {"chi_square", verdict.alice_chi_square}}},
          {"bob", {{"rounds", stats.bob_z_rounds},
                   {"ones", stats.bob_z_ones},
                   {"chi_square", verdict.bob_chi_square}}}}},
        {"zz_joint_chi_square", verdict.zz_joint_chi_square},
        {"chi_square_critical_1dof", qh::kChiSquareCriticalOneDof},
        {"chi_square_critical_3dof", qh::kChiSquareCriticalThreeDof},
        {"verdict",
         {{"correlations_exact", verdict.correlations_exact},
          {"marginals_uniform", verdict.marginals_uniform},
          {"joint_uniform", verdict.joint_uniform},
          {"all_pass", verdict.all_pass()}}}};
    report["timing_ms"] = clock.elapsed_ms();

    std::string digest =
        std::to_string(stats.shots) + " shots: " +
        std::to_string(stats.parity_violations) + " parity violations over " +
        std::to_string(stats.zz_rounds) + " Z-Z rounds, " +
        std::to_string(stats.equality_violations) +
        " equality violations over " + std::to_string(stats.xx_rounds) +
        " X-X rounds\nuniformity " +
        (verdict.all_pass() ? "passed" : "FAILED") + "\n";
    emit_report(report, opt, digest);
    return verdict.all_pass() ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// mixing-check

int command_mixing_check(const CommonOptions& opt) {
    const Stopwatch clock;
    json report = make_envelope("mixing-check");
    report["config"] = {{"command", "mixing-check"},
                        {"tolerance", kMixingTolerance}};

    const auto mixed = qpsi::core::DensityMatrix::maximally_mixed(4);
    json per_state = json::array();
    double worst = 0.0;
    for (std::uint64_t label = 0; label < 4; ++label) {
        const auto plain = qpsi::core::StateVector::basis(2, label);
        std::vector<std::pair<double, qpsi::core::StateVector>> ensemble;
        for (int a0 = 0; a0 < 2; ++a0)
            for (int b0 = 0; b0 < 2; ++b0)
                for (int a1 = 0; a1 < 2; ++a1)
                    for (int b1 = 0; b1 < 2; ++b1) {
                        ensemble.emplace_back(
                            1.0 / 16.0,
                            qpsi::qotp::encrypt(plain,
                                                {{a0, b0}, {a1, b1}},
                                                {0, 1}));
                    }
        const auto averaged = qpsi::core::average_density(ensemble);
        const double deviation =
            qpsi::core::max_entry_deviation(averaged, mixed);
        worst = std::max(worst, deviation);
        per_state.push_back(
            {{"basis_state", label}, {"max_deviation", deviation}});
    }
    const bool passed = worst < kMixingTolerance;
    report["result"] = {{"per_state", per_state},
                        {"max_deviation", worst},
                        {"passed", passed}};
    report["timing_ms"] = clock.elapsed_ms();

    std::string digest = "key-averaged deviation from I/4: " +
                         std::to_string(worst) +
                         (passed ? " (passed)" : " (FAILED)") + "\n";
    emit_report(report, opt, digest);
    return passed ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// attack-sim

struct SessionTally {
    std::size_t completed = 0;
    std::size_t aborted = 0;
    std::size_t oracle_mismatches = 0;
    std::map<std::string, std::size_t> abort_kinds;
    std::map<std::string, std::size_t> abort_channels;
};

int command_attack_sim(const CommonOptions& opt) {
    const Stopwatch clock;
    CommonOptions effective = opt;
    if (effective.set_args.empty() && effective.sets_file.empty()) {
        effective.q = effective.q.value_or(5);
        effective.set_args = {"[1,2,3]", "[1,2,4]"};
    }
    const auto sets = resolve_sets(effective, 2);
    const qp::RunConfig config = resolve_run_config(opt);
    const std::uint64_t seed = resolve_seed(opt.seed);
    const std::size_t shots = opt.shots ? opt.shots : 64;
    const std::size_t parallel = std::max<std::size_t>(opt.parallel, 1);
    const auto strategy = config.adversary;

    json report = make_envelope("attack-sim");
    report["config"] = {{"command", "attack-sim"},
                        {"q", sets.front().q},
                        {"sets", sets_json(sets)},
                        {"adversary", opt.adversary},
                        {"f", f_json(strategy)},
                        {"error_threshold", opt.threshold},
                        {"decoys_per_message",
                         opt.decoys_per_message ? json(*opt.decoys_per_message)
                                                : json()},
                        {"shots", shots},
                        {"parallel", parallel},
                        {"seed", seed}};

    // Exact per-decoy detection probabilities by enumeration.
    json per_label = json::object();
    double average_detection = 0.0;
    for (qc::DecoyLabel label : qc::kAllDecoyLabels) {
        double p = 0.0;
        switch (strategy.kind) {
            case qc::AdversaryKind::None:
                p = 0.0;
                break;
            case qc::AdversaryKind::InterceptResend:
                p = qc::intercept_resend_detection_probability(label);
                break;
            case qc::AdversaryKind::EntangleMeasure:
                p = qc::entangle_measure_detection_probability(
                    label, strategy.f0, strategy.f1);
                break;
        }
        per_label[qc::decoy_name(label)] = p;
        average_detection += p / 4.0;
    }
    json analytic = {{"per_decoy_detection", per_label},
                     {"average_detection", average_detection}};
    if (strategy.kind == qc::AdversaryKind::EntangleMeasure) {
        analytic["ancilla_max_trace_distance"] =
            qc::entangle_measure_ancilla_max_distance(strategy.f0,
                                                      strategy.f1);
    }

    // Sampled detection rate over a stream of independent decoys.
    qpsi::core::RandomStream master(seed);
    std::size_t stream_wrong = 0;
    {
        auto decoy_rng = master.fork("decoy-stream");
        for (std::size_t i = 0; i < kDecoyStreamSamples; ++i) {
            const auto label =
                qc::kAllDecoyLabels[decoy_rng.integer(4)];
            qc::AdversarySession session(strategy);
            auto reg = qpsi::core::make_register(qc::decoy_state(label));
            const qpsi::core::QubitRef qubit{reg, 0};
            session.touch_qubit(qubit, decoy_rng);
            const int bit = qpsi::core::measure_qubit(
                qubit, qc::decoy_basis(label), decoy_rng);
            if (bit != qc::decoy_expected_bit(label)) stream_wrong += 1;
        }
    }
    json sampled = {
        {"decoys_sampled", kDecoyStreamSamples},
        {"decoys_wrong", stream_wrong},
        {"rate", static_cast<double>(stream_wrong) /
                     static_cast<double>(kDecoyStreamSamples)}};

    // Full protocol sessions on independent per-shot streams. The worker
    // pool writes into per-shot slots, so the tally is identical for any
    // --parallel value.
    std::vector<int> outcome(shots, 0);  // 0 ok, 1 abort, 2 oracle mismatch
    std::vector<std::string> abort_kind(shots);
    std::vector<std::string> abort_channel(shots);
    const auto oracle = qh::classical_oracle(sets);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= shots) return;
            const auto shot_rng =
                master.fork("session-" + std::to_string(i));
            try {
                const auto result =
                    qp::run_two_party(sets[0], sets[1], config, shot_rng);
                const bool agrees =
                    result.intersection_cardinality ==
                        oracle.intersection_cardinality &&
                    result.union_cardinality == oracle.union_cardinality;
                outcome[i] = agrees ? 0 : 2;
            } catch (const qpsi::qss::AbortEavesdropping& abort) {
                outcome[i] = 1;
                abort_kind[i] = abort.kind();
                abort_channel[i] = abort.channel_name();
            } catch (const qpsi::qss::ProtocolAbort& abort) {
                outcome[i] = 1;
                abort_kind[i] = abort.kind();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < parallel; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();

    SessionTally tally;
    for (std::size_t i = 0; i < shots; ++i) {
        if (outcome[i] == 1) {
            tally.aborted += 1;
            tally.abort_kinds[abort_kind[i]] += 1;
            if (!abort_channel[i].empty()) {
                tally.abort_channels[abort_channel[i]] += 1;
            }
        } else {
            tally.completed += 1;
            if (outcome[i] == 2) tally.oracle_mismatches += 1;
        }
    }

    report["result"] = {
        {"analytic", analytic},
        {"decoy_stream", sampled},
        {"sessions",
         {{"shots", shots},
          {"completed", tally.completed},
          {"aborted", tally.aborted},
          {"abort_rate",
           static_cast<double>(tally.aborted) / static_cast<double>(shots)},
          {"abort_kinds", tally.abort_kinds},
          {"abort_channels", tally.abort_channels},
          {"oracle_mismatches", tally.oracle_mismatches}}}};
    report["oracle"] = {
        {"intersection_cardinality", oracle.intersection_cardinality},
        {"union_cardinality", oracle.union_cardinality},
        {"agrees", tally.oracle_mismatches == 0}};
    report["timing_ms"] = clock.elapsed_ms();

    std::string digest =
        "analytic detection/decoy " + std::to_string(average_detection) +
        ", sampled " +
        std::to_string(static_cast<double>(stream_wrong) /
                       static_cast<double>(kDecoyStreamSamples)) + "\n" +
        std::to_string(tally.aborted) + "/" + std::to_string(shots) +
        " sessions aborted\n";
    emit_report(report, opt, digest);
    return tally.oracle_mismatches == 0 ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// efficiency

int command_efficiency(const CommonOptions& opt,
                       const std::vector<std::size_t>& q_values,
                       const std::vector<std::size_t>& m_values) {
    const Stopwatch clock;
    const std::uint64_t seed = resolve_seed(opt.seed);
    json report = make_envelope("efficiency");
    report["config"] = {{"command", "efficiency"},
                        {"q", q_values},
                        {"parties", m_values},
                        {"seed", seed}};

    const qpsi::core::RandomStream master(seed);
    json table = json::array();
    bool all_match = true;
    std::string digest;
    for (std::size_t q : q_values) {
        for (std::size_t m : m_values) {
            const qh::Rational formula = qh::qubit_efficiency(q, m);
            // A live honest run with simple staggered sets; any inputs give
            // the same resource counts.
            std::vector<qpsi::encoding::PrivateSet> sets;
            for (std::size_t p = 0; p < m; ++p) {
                std::vector<std::int64_t> elements;
                for (std::size_t j = 0; j < 3 && j < q; ++j) {
                    elements.push_back(
                        static_cast<std::int64_t>((p + j) % q));
                }
                sets.push_back(qpsi::encoding::make_private_set(q, elements));
            }
            const auto rng = master.fork("efficiency-" + std::to_string(q) +
                                         "-" + std::to_string(m));
            const auto result =
                qp::run_multi_party(sets, qp::RunConfig{}, rng);
            const qh::Rational measured =
                qh::measured_efficiency(result.resources, q);
            const bool matches =
                measured == formula && qh::verify_resources(result, q, m);
            all_match = all_match && matches;
            table.push_back(
                {{"q", q},
                 {"parties", m},
                 {"formula", rational_json(formula)},
                 {"measured", rational_json(measured)},
                 {"core_qubits", result.resources.qubits_prepared_core},
                 {"matches", matches}});
            digest += "q=" + std::to_string(q) + " m=" + std::to_string(m) +
                      ": " + std::to_string(formula.num) + "/" +
                      std::to_string(formula.den) +
                      (matches ? "" : " (MISMATCH)") + "\n";
        }
    }
    report["result"] = {{"table", table}, {"all_match", all_match}};
    report["efficiency"] = {{"all_match", all_match}};
    report["timing_ms"] = clock.elapsed_ms();
    emit_report(report, opt, digest);
    return all_match ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator of a third-party-assisted quantum "
                 "protocol for private set intersection and union "
                 "cardinalities"};
    app.require_subcommand(1);

    CommonOptions opt;
    std::vector<std::size_t> q_values{5, 7, 11};
    std::vector<std::size_t> m_values{2, 3, 4, 5};

    auto add_common = [&](CLI::App* cmd, bool with_sets) {
        if (with_sets) {
            cmd->add_option("--q", opt.q, "modulus of the element domain");
            cmd->add_option("--sets", opt.set_args,
                            "input sets as JSON arrays, e.g. \"[1,2,3]\"");
            cmd->add_option("--sets-file", opt.sets_file,
                            "JSON file: array of arrays, or "
                            "{\"q\":...,\"sets\":[...]}");
            cmd->add_option("--delta", opt.delta,
                            "extra key-generation rounds beyond 4q");
            cmd->add_option("--test-fraction", opt.test_fraction,
                            "fraction of key rounds sacrificed to testing");
            cmd->add_option("--threshold", opt.threshold,
                            "tolerated decoy/test error rate before abort");
            cmd->add_option("--adversary", opt.adversary,
                            "none | intercept-resend | entangle-measure")
                ->check(CLI::IsMember(
                    {"none", "intercept-resend", "entangle-measure"}));
            cmd->add_option("--f", opt.f_table,
                            "entangle-measure truth table \"f0,f1\"");
            cmd->add_option("--decoys-per-message", opt.decoys_per_message,
                            "decoys per quantum message (default: payload "
                            "length)");
        }
        cmd->add_option("--seed", opt.seed,
                        "PRNG seed (falls back to QPSI_SEED, then 0)");
        cmd->add_option("--report", opt.report_path,
                        "also write the JSON report to this file");
        cmd->add_option("--format", opt.format, "stdout format")
            ->check(CLI::IsMember({"json", "text"}));
    };

    CLI::App* run = app.add_subcommand(
        "run", "one full protocol execution, checked against the oracle");
    add_common(run, true);

    CLI::App* keygen = app.add_subcommand(
        "keygen-stats",
        "resource-state measurement statistics over many shots");
    keygen->add_option("--shots", opt.shots, "rounds to sample (default 2048)");
    add_common(keygen, false);

    CLI::App* mixing = app.add_subcommand(
        "mixing-check",
        "exact key-averaged density of every encrypted basis state");
    add_common(mixing, false);

    CLI::App* attack = app.add_subcommand(
        "attack-sim",
        "adversary detection: analytic, sampled decoys, full sessions");
    attack->add_option("--shots", opt.shots,
                       "protocol sessions to run (default 64)");
    attack->add_option("--parallel", opt.parallel,
                       "worker threads for the session sweep");
    add_common(attack, true);

    CLI::App* efficiency = app.add_subcommand(
        "efficiency", "closed-form qubit-efficiency table with live checks");
    efficiency->add_option("--q", q_values, "moduli to tabulate");
    efficiency->add_option("--parties", m_values, "party counts to tabulate");
    efficiency->add_option("--seed", opt.seed,
                           "PRNG seed (falls back to QPSI_SEED, then 0)");
    efficiency->add_option("--report", opt.report_path,
                           "also write the JSON report to this file");
    efficiency->add_option("--format", opt.format, "stdout format")
        ->check(CLI::IsMember({"json", "text"}));

    // The parser treats a bare "[a,b,c]" token as a list to explode into
    // separate values, which would destroy the set boundaries of
    // --sets "[1,2,3]" "[1,2,4]". Quote such tokens before parsing (the
    // value reader strips the quotes again); parse(vector) expects the
    // arguments reversed.
    app.name("qpsi");
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = argc - 1; i > 0; --i) {
        std::string arg = argv[i];
        if (arg.size() >= 2 && arg.front() == '[' && arg.back() == ']') {
            arg = "\"" + arg + "\"";
        } else if (arg.rfind("--", 0) == 0) {
            const auto eq = arg.find("=[");
            if (eq != std::string::npos && arg.back() == ']') {
                arg = arg.substr(0, eq + 1) + "\"" + arg.substr(eq + 1) +
                      "\"";
            }
        }
        args.push_back(std::move(arg));
    }
    try {
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return command_run(opt);
        if (keygen->parsed()) return command_keygen_stats(opt);
        if (mixing->parsed()) return command_mixing_check(opt);
        if (attack->parsed()) return command_attack_sim(opt);
        if (efficiency->parsed()) {
            return command_efficiency(opt, q_values, m_values);
        }
    } catch (const ConfigError& error) {
        std::cerr << "config error: " << error.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& error) {
        std::cerr << "config error: " << error.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& error) {
        std::cerr << "internal error: " << error.what() << "\n";
        return 1;
    }
    return kExitConfig;
}
