#ifndef TNC_EXACT_COST_HPP
#define TNC_EXACT_COST_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace tnc {

/// Unsigned 128-bit integer with overflow-checked arithmetic.
///
/// All time and space costs are products of bond dimensions; keeping them as
/// exact integers means comparisons never depend on floating-point rounding.
/// Arithmetic that would leave the 128-bit range throws std::overflow_error.
class ExactCost {
public:
    __extension__ using value_type = unsigned __int128;

    constexpr ExactCost() noexcept = default;
    constexpr ExactCost(std::uint64_t v) noexcept : value_(v) {}  // NOLINT(implicit)

    static constexpr ExactCost from_raw(value_type v) noexcept {
        ExactCost c;
        c.value_ = v;
        return c;
    }

    constexpr value_type raw() const noexcept { return value_; }

    friend ExactCost operator+(ExactCost a, ExactCost b) {
        value_type r;
        if (__builtin_add_overflow(a.value_, b.value_, &r))
            throw std::overflow_error("exact cost overflow in addition");
        return from_raw(r);
    }
    friend ExactCost operator*(ExactCost a, ExactCost b) {
        value_type r;
        if (__builtin_mul_overflow(a.value_, b.value_, &r))
            throw std::overflow_error("exact cost overflow in multiplication");
        return from_raw(r);
    }
    friend ExactCost operator-(ExactCost a, ExactCost b) {
        if (b.value_ > a.value_) throw std::underflow_error("exact cost underflow");
        return from_raw(a.value_ - b.value_);
    }
    /// Exact division; throws if b does not divide a.
    friend ExactCost operator/(ExactCost a, ExactCost b) {
        if (b.value_ == 0) throw std::domain_error("exact cost division by zero");
        if (a.value_ % b.value_ != 0) throw std::domain_error("inexact cost division");
        return from_raw(a.value_ / b.value_);
    }
    ExactCost& operator+=(ExactCost b) { return *this = *this + b; }
    ExactCost& operator*=(ExactCost b) { return *this = *this * b; }

    friend constexpr bool operator==(ExactCost a, ExactCost b) noexcept { return a.value_ == b.value_; }
    friend constexpr std::strong_ordering operator<=>(ExactCost a, ExactCost b) noexcept {
        return a.value_ <=> b.value_;
    }

    double log2() const;
    std::string to_string() const;
    static ExactCost parse(const std::string& text);

    /// 2^k, for small integer exponents.
    static ExactCost pow2(unsigned k);

private:
    value_type value_ = 0;
};

std::string to_string(ExactCost c);

}  // namespace tnc

#endif
