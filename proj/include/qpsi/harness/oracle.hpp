#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <set>
#include <stdexcept>
#include <vector>

#include "qpsi/encoding/sets.hpp"

namespace qpsi::harness {

struct OracleAnswer {
    std::size_t intersection_cardinality = 0;
    std::size_t union_cardinality = 0;
};

// Ground truth the protocol is checked against: an exact classical fold of
// set intersection and union cardinalities over all parties.
inline OracleAnswer classical_oracle(
    const std::vector<encoding::PrivateSet>& sets) {
    if (sets.empty()) {
        throw std::invalid_argument("oracle needs at least one set");
    }
    const std::size_t q = sets.front().q;
    for (const encoding::PrivateSet& s : sets) {
        if (s.q != q) {
            throw std::invalid_argument("sets must share a common modulus");
        }
    }
    std::set<std::uint64_t> inter = sets.front().elements;
    std::set<std::uint64_t> uni = sets.front().elements;
    for (std::size_t i = 1; i < sets.size(); ++i) {
        std::set<std::uint64_t> next;
        std::set_intersection(inter.begin(), inter.end(),
                              sets[i].elements.begin(),
                              sets[i].elements.end(),
                              std::inserter(next, next.begin()));
        inter = std::move(next);
        uni.insert(sets[i].elements.begin(), sets[i].elements.end());
    }
    return OracleAnswer{inter.size(), uni.size()};
}

}  // namespace qpsi::harness
