#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "sphere.hpp"

namespace slowmate {

struct RootChoice {
    SpherePoint value;
    // d(prev, chosen) / d(prev, nearest rejected branch); 0 when no real choice exists
    double ambiguity = 0.0;
};

// All d-th roots of a finite nonzero radicand, principal root first.
inline std::vector<Complex> roots_of(Complex r, int d)
{
    std::vector<Complex> out;
    out.reserve(d);
    if (d == 2) {
        const Complex s = std::sqrt(r);
        return {s, -s};
    }
    const Real mod = std::pow(std::abs(r), 1.0L / d);
    const Real arg = std::arg(r) / d;
    for (int k = 0; k < d; ++k) out.push_back(std::polar(mod, arg + 2.0L * std::numbers::pi_v<Real> * k / d));
    return out;
}

// Picks the d-th root of the radicand nearest to prev. Branches closer together than
// branch_floor (chordal) are numerically the same point, so the choice counts as unambiguous.
inline RootChoice nearest_root(const SpherePoint& prev, const SpherePoint& radicand, int d = 2,
                               double branch_floor = 1e-7)
{
    if (radicand.is_infinity()) return {SpherePoint::infinity(), 0.0};
    const Complex r = radicand.value();
    if (r == Complex(0.0L)) return {SpherePoint(Complex(0.0L)), 0.0};
    const auto cands = roots_of(r, d);
    std::size_t best = 0;
    double d1 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cands.size(); ++k) {
        const double dk = chordal_distance(prev, cands[k]);
        if (dk < d1) { d1 = dk; best = k; }
    }
    double d2 = std::numeric_limits<double>::infinity(), sep = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cands.size(); ++k) {
        if (k == best) continue;
        d2 = std::min(d2, chordal_distance(prev, cands[k]));
        sep = std::min(sep, chordal_distance(cands[best], cands[k]));
    }
    double amb = 0.0;
    if (sep >= branch_floor) amb = d2 > 0.0 ? d1 / d2 : 1.0;
    return {SpherePoint(cands[best]), amb};
}

inline SpherePoint continuous_root(const SpherePoint& prev, const SpherePoint& radicand, int d = 2,
                                   double rho = 0.75, double branch_floor = 1e-7)
{
    const RootChoice c = nearest_root(prev, radicand, d, branch_floor);
    if (c.ambiguity > rho) throw BranchAmbiguity("continuous_root: ambiguous branch", c.ambiguity);
    return c.value;
}

} // namespace slowmate
