#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace slowmate {

// Coordinates are kept in extended precision: near a degenerating limit f' grows like the
// inverse distance between critical values, and double rounding of a stored point alone
// would show up as a visible forward residual.
using Real = long double;
using Complex = std::complex<Real>;

// A point of the Riemann sphere. Infinity is stored explicitly, never as a huge number.
class SpherePoint {
public:
    constexpr SpherePoint() = default;

    SpherePoint(Complex z) : z_(z)
    {
        if (std::isnan(z.real()) || std::isnan(z.imag()))
            throw std::domain_error("SpherePoint: NaN coordinate");
        if (std::isinf(z.real()) || std::isinf(z.imag())) {
            inf_ = true;
            z_ = 0.0L;
        }
    }

    SpherePoint(Real x) : SpherePoint(Complex(x, 0.0L)) {}
    SpherePoint(std::complex<double> z) : SpherePoint(Complex(z)) {}

    static SpherePoint infinity()
    {
        SpherePoint p;
        p.inf_ = true;
        return p;
    }

    bool is_infinity() const { return inf_; }

    // only meaningful for finite points
    Complex value() const { return z_; }

    // 1/z with 0 <-> infinity
    SpherePoint reciprocal() const
    {
        if (inf_) return SpherePoint(Complex(0.0L));
        if (z_ == Complex(0.0L)) return infinity();
        return SpherePoint(1.0L / z_);
    }

    friend bool operator==(const SpherePoint& a, const SpherePoint& b)
    {
        if (a.inf_ || b.inf_) return a.inf_ == b.inf_;
        return a.z_ == b.z_;
    }

private:
    bool inf_ = false;
    Complex z_{0.0L, 0.0L};
};

// Chordal metric, values in [0, 2].
inline double chordal_distance(const SpherePoint& a, const SpherePoint& b)
{
    if (a.is_infinity() && b.is_infinity()) return 0.0;
    if (a.is_infinity()) return static_cast<double>(2.0L / std::sqrt(1.0L + std::norm(b.value())));
    if (b.is_infinity()) return static_cast<double>(2.0L / std::sqrt(1.0L + std::norm(a.value())));
    const Complex z = a.value(), w = b.value();
    // scale large inputs so |z|^2 does not overflow
    const Real az = std::abs(z), aw = std::abs(w);
    if (az > 1e150L || aw > 1e150L) return chordal_distance(a.reciprocal(), b.reciprocal());
    return static_cast<double>(2.0L * std::abs(z - w) / std::sqrt((1.0L + az * az) * (1.0L + aw * aw)));
}

// Linear blend of two sphere points; through 1/z when either end is infinite.
inline SpherePoint blend(const SpherePoint& a, const SpherePoint& b, double s_)
{
    const Real s = s_;
    if (a == b) return a;
    if (!a.is_infinity() && !b.is_infinity()) return SpherePoint(a.value() + s * (b.value() - a.value()));
    const SpherePoint ra = a.reciprocal(), rb = b.reciprocal();
    if (ra.is_infinity() || rb.is_infinity()) return s < 0.5 ? a : b; // 0 against infinity: no chart holds both
    return SpherePoint(ra.value() + s * (rb.value() - ra.value())).reciprocal();
}

} // namespace slowmate
