#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "sphere.hpp"

namespace slowmate {

// Minimum chordal separation for three points to define a Mobius map.
inline constexpr double kTripleSeparation = 1e-12;

// Points closer than this are equal up to rounding of the stored coordinates.
inline constexpr double kCoincide = 64.0 * std::numeric_limits<Real>::epsilon();

// m(w) = (a w + b) / (c w + d), stored with max |coefficient| = 1.
class MobiusMap {
public:
    MobiusMap() : MobiusMap(1.0, 0.0, 0.0, 1.0) {}

    MobiusMap(Complex a, Complex b, Complex c, Complex d)
    {
        const Real s = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
        if (!(s > 0.0L) || !std::isfinite(s)) throw std::invalid_argument("MobiusMap: bad coefficients");
        a /= s; b /= s; c /= s; d /= s;
        if (std::abs(a * d - b * c) <= 1e-300L) throw std::invalid_argument("MobiusMap: singular");
        k_ = {a, b, c, d};
    }

    Complex a() const { return k_[0]; }
    Complex b() const { return k_[1]; }
    Complex c() const { return k_[2]; }
    Complex d() const { return k_[3]; }
    const std::array<Complex, 4>& coefficients() const { return k_; }

    SpherePoint operator()(const SpherePoint& w) const
    {
        if (w.is_infinity()) return ratio(k_[0], k_[2]);
        const Complex z = w.value();
        // evaluate near infinity in the 1/z chart to keep precision
        if (std::abs(z) > 1.0L) {
            const Complex u = 1.0L / z;
            return ratio(k_[0] + k_[1] * u, k_[2] + k_[3] * u);
        }
        return ratio(k_[0] * z + k_[1], k_[2] * z + k_[3]);
    }

    MobiusMap inverse() const { return MobiusMap(k_[3], -k_[1], -k_[2], k_[0]); }

    MobiusMap compose(const MobiusMap& inner) const
    {
        const auto& g = inner.k_;
        return MobiusMap(k_[0] * g[0] + k_[1] * g[2], k_[0] * g[1] + k_[1] * g[3],
                         k_[2] * g[0] + k_[3] * g[2], k_[2] * g[1] + k_[3] * g[3]);
    }

private:
    static SpherePoint ratio(Complex num, Complex den)
    {
        if (den == Complex(0.0)) return SpherePoint::infinity();
        return SpherePoint(num / den);
    }

    std::array<Complex, 4> k_;
};

// Unique m with m(inf) = alpha, m(0) = beta, m(1) = gamma.
inline MobiusMap mobius_from_three(const SpherePoint& alpha, const SpherePoint& beta, const SpherePoint& gamma)
{
    if (chordal_distance(alpha, beta) <= kTripleSeparation || chordal_distance(alpha, gamma) <= kTripleSeparation ||
        chordal_distance(beta, gamma) <= kTripleSeparation)
        throw DegenerateTriple("mobius_from_three: points not distinct");
    if (alpha.is_infinity()) return MobiusMap(gamma.value() - beta.value(), beta.value(), 0.0, 1.0);
    if (beta.is_infinity()) return MobiusMap(alpha.value(), gamma.value() - alpha.value(), 1.0, 0.0);
    if (gamma.is_infinity()) return MobiusMap(alpha.value(), -beta.value(), 1.0, -1.0);
    const Complex a = alpha.value(), b = beta.value(), g = gamma.value();
    return MobiusMap(a * (g - b), b * (a - g), g - b, a - g);
}

// f(z) = m(z^d), the normal form of a degree-d map with critical points 0 and infinity.
struct BicriticalMap {
    int degree = 2;
    MobiusMap m;

    SpherePoint operator()(const SpherePoint& z) const
    {
        if (z.is_infinity()) return m(z);
        return m(SpherePoint(std::pow(z.value(), degree)));
    }
};

// Solves m(w) = target for the m of mobius_from_three(x_alpha, x_beta, x_gamma).
// Infinite coordinates cancel exactly. A target on x_beta gives 0 and one on x_alpha gives infinity,
// where "on" means within kCoincide: below that the difference is rounding noise, and its square
// root would leak into the result at the sqrt(epsilon) level.
inline SpherePoint pullback_radicand(const SpherePoint& xa, const SpherePoint& xb, const SpherePoint& xg,
                                     const SpherePoint& target)
{
    if (chordal_distance(target, xb) <= kCoincide) return SpherePoint(Complex(0.0));
    if (chordal_distance(target, xa) <= kCoincide) return SpherePoint::infinity();
    if (chordal_distance(xa, xb) <= kTripleSeparation || chordal_distance(xa, xg) <= kTripleSeparation ||
        chordal_distance(xb, xg) <= kTripleSeparation)
        throw DegenerateTriple("pullback_radicand: pins not distinct");
    auto quotient = [](Complex n, Complex d) {
        return d == Complex(0.0) ? SpherePoint::infinity() : SpherePoint(n / d);
    };
    if (xa.is_infinity()) return quotient(target.value() - xb.value(), xg.value() - xb.value());
    if (xb.is_infinity()) return quotient(xg.value() - xa.value(), target.value() - xa.value());
    if (xg.is_infinity() && target.is_infinity()) return SpherePoint(Complex(1.0));
    if (xg.is_infinity()) return quotient(target.value() - xb.value(), target.value() - xa.value());
    if (target.is_infinity()) return quotient(xg.value() - xa.value(), xg.value() - xb.value());
    const Complex a = xa.value(), b = xb.value(), g = xg.value(), t = target.value();
    const Complex r = ((g - a) / (g - b)) * ((t - b) / (t - a));
    return SpherePoint(r);
}

} // namespace slowmate
