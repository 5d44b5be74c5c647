#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

namespace qpsi::encoding {

// A private input set: a subset of Z_q.
struct PrivateSet {
    std::size_t q = 0;
    std::set<std::uint64_t> elements;
};

inline PrivateSet make_private_set(std::size_t q,
                                   const std::vector<std::int64_t>& elements) {
    if (q < 2) throw std::invalid_argument("modulus must be at least 2");
    PrivateSet s;
    s.q = q;
    for (std::int64_t e : elements) {
        if (e < 0 || static_cast<std::uint64_t>(e) >= q) {
            throw std::invalid_argument("set element out of [0, q)");
        }
        if (!s.elements.insert(static_cast<std::uint64_t>(e)).second) {
            throw std::invalid_argument("duplicate set element");
        }
    }
    return s;
}

// A multiplicatively masked set {k*x mod q}.
struct MaskedSet {
    std::size_t q = 0;
    std::set<std::uint64_t> elements;

    bool contains(std::uint64_t value) const {
        return elements.count(value) != 0;
    }
};

// Raised when a multiplier would not be a bijection on Z_q; masking with it
// can merge elements and silently corrupt every cardinality downstream.
class NonInvertibleMultiplier : public std::invalid_argument {
public:
    NonInvertibleMultiplier(std::uint64_t k, std::size_t q)
        : std::invalid_argument("multiplier " + std::to_string(k) +
                                " is not invertible mod " + std::to_string(q)) {
    }
};

inline MaskedSet mask_set(const PrivateSet& s, std::uint64_t k) {
    if (s.q < 2) throw std::invalid_argument("modulus must be at least 2");
    if (std::gcd(k, static_cast<std::uint64_t>(s.q)) != 1) {
        throw NonInvertibleMultiplier(k, s.q);
    }
    MaskedSet masked;
    masked.q = s.q;
    for (std::uint64_t x : s.elements) {
        masked.elements.insert((k * x) % s.q);
    }
    return masked;
}

}  // namespace qpsi::encoding
