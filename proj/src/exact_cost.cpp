#include "tnc/exact_cost.hpp"

#include <algorithm>
#include <cmath>

namespace tnc {

double ExactCost::log2() const {
    if (value_ == 0) return -INFINITY;
    // split into high and low words so large values keep full double precision
    const auto hi = static_cast<std::uint64_t>(value_ >> 64);
    const auto lo = static_cast<std::uint64_t>(value_);
    if (hi == 0) return std::log2(static_cast<double>(lo));
    return std::log2(static_cast<double>(hi) * 18446744073709551616.0 + static_cast<double>(lo));
}

std::string ExactCost::to_string() const {
    if (value_ == 0) return "0";
    std::string out;
    value_type v = value_;
    while (v != 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

ExactCost ExactCost::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty integer");
    ExactCost r;
    for (char c : text) {
        if (c < '0' || c > '9') throw std::invalid_argument("not a decimal integer: " + text);
        r = r * ExactCost(10) + ExactCost(static_cast<std::uint64_t>(c - '0'));
    }
    return r;
}

ExactCost ExactCost::pow2(unsigned k) {
    if (k >= 128) throw std::overflow_error("2^k exceeds 128 bits");
    return from_raw(value_type{1} << k);
}

std::string to_string(ExactCost c) { return c.to_string(); }

}  // namespace tnc
