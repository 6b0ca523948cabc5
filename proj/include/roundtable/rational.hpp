#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace roundtable {

/// Exact fraction over 64-bit integers, always stored in lowest terms with a
/// positive denominator. Arithmetic that would overflow throws
/// std::overflow_error instead of wrapping.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den = 1);

    [[nodiscard]] std::int64_t num() const noexcept { return num_; }
    [[nodiscard]] std::int64_t den() const noexcept { return den_; }
    [[nodiscard]] double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// "num/den", e.g. "3/2" or "2/1".
    [[nodiscard]] std::string str() const;
    static Rational parse(const std::string& text);

    Rational& operator+=(const Rational& rhs);
    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace roundtable
