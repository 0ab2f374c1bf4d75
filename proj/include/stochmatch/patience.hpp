#pragma once

#include <cassert>
#include <compare>
#include <string>

#include "stochmatch/errors.hpp"

namespace stochmatch {

// Per-vertex probe budget: a positive integer or infinity.
class Patience {
public:
    static Patience finite(int value) {
        if (value < 1) {
            throw ValidationError("patience must be a positive integer, got " +
                                  std::to_string(value));
        }
        return Patience(value);
    }
    static Patience infinite() { return Patience(kInfinite); }

    bool is_infinite() const { return value_ == kInfinite; }

    int value() const {
        assert(!is_infinite());
        return value_;
    }

    // True when the budget admits at least k probes.
    bool at_least(int k) const { return is_infinite() || value_ >= k; }

    std::string to_string() const { return is_infinite() ? "inf" : std::to_string(value_); }

    friend bool operator==(const Patience&, const Patience&) = default;

private:
    static constexpr int kInfinite = -1;
    explicit Patience(int v) : value_(v) {}
    int value_;
};

}  // namespace stochmatch
