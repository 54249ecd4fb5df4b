#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace slowmate {

using BigInt = boost::multiprecision::cpp_int;

// An angle in [0,1) measured in full turns, kept as a reduced fraction.
class RationalAngle {
public:
    RationalAngle() : num_(0), den_(1) {}

    RationalAngle(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den))
    {
        if (den_ <= 0) throw std::invalid_argument("RationalAngle: denominator must be positive");
        num_ %= den_;
        if (num_ < 0) num_ += den_;
        const BigInt g = boost::multiprecision::gcd(num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
        if (num_ == 0) den_ = 1;
    }

    RationalAngle(std::int64_t num, std::int64_t den) : RationalAngle(BigInt(num), BigInt(den)) {}

    // accepts "p/q" or a bare integer
    static RationalAngle parse(const std::string& s)
    {
        const auto slash = s.find('/');
        try {
            if (slash == std::string::npos) return RationalAngle(BigInt(s), BigInt(1));
            return RationalAngle(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("RationalAngle: cannot parse '" + s + "'");
        }
    }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }

    RationalAngle doubled() const { return RationalAngle(num_ * 2, den_); }
    RationalAngle negated() const { return RationalAngle(-num_, den_); }
    RationalAngle shifted_half() const { return RationalAngle(num_ * 2 + den_, den_ * 2); }

    // the two preimages under doubling: theta/2 and (theta+1)/2
    RationalAngle half_low() const { return RationalAngle(num_, den_ * 2); }
    RationalAngle half_high() const { return RationalAngle(num_ + den_, den_ * 2); }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    long double to_real() const { return static_cast<long double>(num_) / static_cast<long double>(den_); }

    std::string str() const { return num_.str() + "/" + den_.str(); }

    friend bool operator==(const RationalAngle& a, const RationalAngle& b)
    {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend std::strong_ordering operator<=>(const RationalAngle& a, const RationalAngle& b)
    {
        const BigInt l = a.num_ * b.den_, r = b.num_ * a.den_;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const RationalAngle& a) { return os << a.str(); }

private:
    BigInt num_, den_;
};

} // namespace slowmate
