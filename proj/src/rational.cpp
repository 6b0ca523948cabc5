#include "roundtable/rational.hpp"

#include <limits>
#include <numeric>

namespace roundtable {
namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error("rational overflow");
    }
    return static_cast<std::int64_t>(v);
}

Wide gcd_wide(Wide a, Wide b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        Wide t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Wide n = num, d = den;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    Wide g = gcd_wide(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = narrow(n);
    den_ = narrow(d);
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(std::stoll(text));
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("malformed rational '" + text + "'");
    }
}

Rational& Rational::operator+=(const Rational& rhs) {
    Wide n = Wide(num_) * rhs.den_ + Wide(rhs.num_) * den_;
    Wide d = Wide(den_) * rhs.den_;
    Wide g = gcd_wide(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num_ = narrow(n);
    den_ = narrow(d);
    return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
    Wide lhs = Wide(a.num_) * b.den_;
    Wide rhs = Wide(b.num_) * a.den_;
    if (lhs < rhs) return std::strong_ordering::less;
    if (lhs > rhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace roundtable
