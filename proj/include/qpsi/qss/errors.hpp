#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "qpsi/channel/transport.hpp"

namespace qpsi::qss {

// Base for every security-motivated protocol termination. Callers that need
// the category for reporting use kind(); the what() string is for humans.
class ProtocolAbort : public std::runtime_error {
public:
    ProtocolAbort(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

// Decoy check on a channel exceeded the error threshold.
class AbortEavesdropping : public ProtocolAbort {
public:
    AbortEavesdropping(std::string channel_name, channel::ChannelReport report)
        : ProtocolAbort("eavesdropping",
                        "decoy check failed on channel " + channel_name +
                            ": " + std::to_string(report.decoys_wrong) + "/" +
                            std::to_string(report.decoys_tested) +
                            " decoys wrong"),
          channel_name_(std::move(channel_name)),
          report_(report) {}

    const std::string& channel_name() const { return channel_name_; }
    const channel::ChannelReport& report() const { return report_; }

private:
    std::string channel_name_;
    channel::ChannelReport report_;
};

// Correlation checks on test rounds exceeded the error threshold.
class AbortDishonestTP : public ProtocolAbort {
public:
    AbortDishonestTP(std::size_t violations, std::size_t tested)
        : ProtocolAbort("dishonest-tp",
                        "correlation test failed: " +
                            std::to_string(violations) + "/" +
                            std::to_string(tested) + " test rounds violated"),
          violations_(violations),
          tested_(tested) {}

    std::size_t violations() const { return violations_; }
    std::size_t tested() const { return tested_; }

private:
    std::size_t violations_;
    std::size_t tested_;
};

// Too few rounds survived testing to extract the full key. The caller may
// rerun with a larger round surplus.
class InsufficientKeyBits : public ProtocolAbort {
public:
    InsufficientKeyBits(std::size_t available, std::size_t needed)
        : ProtocolAbort("insufficient-key-bits",
                        "only " + std::to_string(available) +
                            " usable key rounds for " +
                            std::to_string(needed) + " required bits"),
          available_(available),
          needed_(needed) {}

    std::size_t available() const { return available_; }
    std::size_t needed() const { return needed_; }

private:
    std::size_t available_;
    std::size_t needed_;
};

}  // namespace qpsi::qss
