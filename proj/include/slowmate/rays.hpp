#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "angles/orbit.hpp"
#include "core/errors.hpp"
#include "core/sphere.hpp"

namespace slowmate {

struct RayOptions {
    int depth = 40;      // potential halvings below g0
    double g0 = 2.0;     // starting potential
    int samples = 8;     // points per halving
    bool refine = true;  // Newton-polish the landing point
};

struct ExternalRay {
    RationalAngle angle;
    std::vector<Complex> points; // from potential g0 down to the landing point
    Complex landing;
};

namespace detail {

inline Real turns(const RationalAngle& a) { return a.to_real(); }

// point of potential g on the ray of angle a, by pulling back from far out where the
// Boettcher map is the identity to double precision
inline Complex ray_point(Complex c, Real a, Real g)
{
    int m = 0;
    while (std::ldexp(g, m) < 24.0L) ++m;
    Real ang = std::fmod(std::ldexp(a, m), 1.0L);
    Complex z = std::exp(Complex(std::ldexp(g, m), 2.0L * std::numbers::pi_v<Real> * ang));
    for (int k = m - 1; k >= 0; --k) {
        ang = std::fmod(std::ldexp(a, k), 1.0L);
        const Complex w = std::sqrt(z - c);
        const Complex target = std::polar(1.0L, 2.0L * std::numbers::pi_v<Real> * ang);
        z = std::abs(w / std::abs(w) - target) <= std::abs(-w / std::abs(w) - target) ? w : -w;
    }
    return z;
}

} // namespace detail

// Root of f^{k+p}(z) = f^k(z) near z, by Newton.
inline Complex refine_landing(Complex c, Complex z, int k, int p, int max_iter = 60)
{
    for (int it = 0; it < max_iter; ++it) {
        Complex w = z, dw = 1.0L, wk = z, dwk = 1.0L;
        for (int i = 1; i <= k + p; ++i) {
            dw = 2.0L * w * dw;
            w = w * w + c;
            if (i == k) { wk = w; dwk = dw; }
        }
        const Complex g = w - wk, dg = dw - dwk;
        if (dg == Complex(0.0)) break;
        const Complex step = g / dg;
        z -= step;
        if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(z))) break;
    }
    return z;
}

// Traces the rays of the whole doubling orbit of theta level by level: the level-m piece of
// angle a is the square-root pullback of the level-(m-1) piece of 2a, continued from where the
// ray of a currently ends. Returns the ray of theta with its landing point refined.
inline ExternalRay trace_external_ray(Complex c, const RationalAngle& theta, const RayOptions& opt = {})
{
    const AngleOrbit orb = angle_orbit(theta);
    const auto& A = orb.angles;
    const std::size_t L = A.size();
    std::vector<std::size_t> next(L);
    for (std::size_t i = 0; i < L; ++i) next[i] = i + 1 < L ? i + 1 : static_cast<std::size_t>(orb.preperiod);

    std::vector<std::vector<Complex>> piece(L), ray(L);
    for (std::size_t i = 0; i < L; ++i)
        for (int s = 0; s <= opt.samples; ++s)
            piece[i].push_back(detail::ray_point(c, detail::turns(A[i]), Real(opt.g0) * std::exp2(-Real(s) / opt.samples)));
    for (std::size_t i = 0; i < L; ++i) ray[i] = piece[i];

    auto descend = [&](int levels) {
        for (int m = 1; m <= levels; ++m) {
            std::vector<std::vector<Complex>> fresh(L);
            for (std::size_t i = 0; i < L; ++i) {
                Complex prev = ray[i].back();
                const auto& src = piece[next[i]];
                for (std::size_t s = 1; s < src.size(); ++s) {
                    const Complex w = std::sqrt(src[s] - c);
                    prev = std::abs(w - prev) <= std::abs(-w - prev) ? w : -w;
                    if (!std::isfinite(prev.real()) || !std::isfinite(prev.imag()))
                        throw RayTraceFailure("trace_external_ray: non-finite point");
                    fresh[i].push_back(prev);
                }
            }
            for (std::size_t i = 0; i < L; ++i) {
                ray[i].insert(ray[i].end(), fresh[i].begin(), fresh[i].end());
                fresh[i].insert(fresh[i].begin(), ray[i][ray[i].size() - fresh[i].size() - 1]);
                piece[i] = std::move(fresh[i]);
            }
        }
    };
    descend(opt.depth);

    ExternalRay out;
    out.angle = theta;
    if (!opt.refine) {
        out.points = std::move(ray[0]);
        out.landing = out.points.back();
        return out;
    }
    // weakly repelling landing points are approached slowly; go deeper before giving up
    for (int extra = 0;; ++extra) {
        out.landing = refine_landing(c, ray[0].back(), orb.preperiod, orb.period);
        if (std::abs(out.landing - ray[0].back()) < 1e-2L) break;
        if (extra == 3) throw RayTraceFailure("trace_external_ray: landing refinement diverged");
        descend(opt.depth);
    }
    out.points = std::move(ray[0]);
    out.points.push_back(out.landing);
    return out;
}

// repelling fixed point where the ray of angle 0 lands
inline Complex beta_fixed_point(Complex c) { return 0.5L + std::sqrt(0.25L - c); }

struct TreePoint {
    RationalAngle angle;
    Complex z;
    std::size_t image; // index of the point with the doubled angle
};

// Landing points of the rays j/2^m, m <= depth: 2^depth points, beta first.
// Each level takes the square root whose sign matches the traced ray of that angle.
inline std::vector<TreePoint> beta_tree(Complex c, int depth, const RayOptions& ropt = {30, 2.0, 4, false})
{
    std::vector<TreePoint> out;
    std::map<RationalAngle, std::size_t> index;
    out.push_back({RationalAngle(), beta_fixed_point(c), 0});
    index[RationalAngle()] = 0;
    for (int m = 1; m <= depth; ++m) {
        const std::int64_t den = std::int64_t(1) << m;
        for (std::int64_t j = 1; j < den; j += 2) {
            const RationalAngle a(j, den);
            const std::size_t img = index.at(a.doubled());
            const Complex w = std::sqrt(out[img].z - c);
            Complex guess = trace_external_ray(c, a, ropt).landing;
            if (std::abs(w) < 1e-3L * (1.0L + std::abs(guess))) guess = w; // both roots coincide
            const Complex z = std::abs(w - guess) <= std::abs(-w - guess) ? w : -w;
            index[a] = out.size();
            out.push_back({a, z, img});
        }
    }
    return out;
}

} // namespace slowmate
