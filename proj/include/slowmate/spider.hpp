#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "angles/orbit.hpp"
#include "angles/rational_angle.hpp"
#include "engine/run.hpp"

namespace slowmate {

// Orbit c, f(c), ..., f^{n-1}(c) of f(z) = z^2 + c.
inline std::vector<Complex> critical_orbit(Complex c, int n)
{
    std::vector<Complex> out;
    Complex z = c;
    for (int i = 0; i < n; ++i) {
        out.push_back(z);
        z = z * z + c;
    }
    return out;
}

// |f^{k+p+1}(0) - f^{k+1}(0)|: zero when c has preperiod k and period p.
inline double orbit_residual(Complex c, int k, int p)
{
    const auto z = critical_orbit(c, k + p + 1);
    return std::abs(z[k + p] - z[k]);
}

// Newton on f^p(0) = 0 (k = 0) or f^{k+p+1}(0) = f^{k+1}(0).
inline Complex refine_parameter(Complex c, int k, int p, int max_iter = 60)
{
    for (int it = 0; it < max_iter; ++it) {
        Complex z = 0.0, dz = 0.0, zk = 0.0, dzk = 0.0;
        const int n = k == 0 ? p : k + p + 1;
        for (int i = 1; i <= n; ++i) {
            dz = 2.0L * z * dz + 1.0L;
            z = z * z + c;
            if (i == k + 1) { zk = z; dzk = dz; }
        }
        const Complex g = k == 0 ? z : z - zk;
        const Complex dg = k == 0 ? dz : dz - dzk;
        if (dg == Complex(0.0)) break;
        const Complex step = g / dg;
        c -= step;
        if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(c))) break;
    }
    return c;
}

// Marked points x_1..x_{k+p} start on the unit circle at angles 2^{j-1} theta. x_1 walks out
// from 0 on [0,1]; for periodic theta x_p walks into 0 at the same time.
inline PathState spider_init(const RationalAngle& theta, int steps = 64)
{
    if (theta == RationalAngle()) throw std::invalid_argument("spider: angle must lie in (0,1)");
    const AngleOrbit orb = angle_orbit(theta);
    const int L = static_cast<int>(orb.angles.size());
    PathState s(2, steps, MonicPins{0});
    for (int i = 0; i < L; ++i) {
        const Complex e = std::polar(1.0L, 2.0L * std::numbers::pi_v<Real> * orb.angles[i].to_real());
        std::vector<SpherePoint> xs(steps + 1);
        for (int j = 0; j <= steps; ++j) {
            const Real t = static_cast<Real>(j) / steps;
            Complex z = e;
            if (i == 0) z = t * e;
            else if (orb.preperiod == 0 && i == L - 1) z = (1.0L - t) * e;
            xs[j] = SpherePoint(z);
        }
        s.add_point(std::move(xs), i + 1 < L ? i + 1 : orb.preperiod);
    }
    return s;
}

struct SpiderResult {
    RationalAngle angle;
    AngleOrbit orbit;
    RunResult run;
    std::optional<Complex> c;          // limit of x_1
    std::optional<Complex> refined;    // c after Newton polishing
    int preperiod = 0, period = 0;     // of c's point orbit, after collisions
    double residual = 0.0;
};

// Preperiod and period of the cluster sequence x_1 -> x_2 -> ...
inline std::pair<int, int> point_orbit_type(const Partition& part, const std::vector<std::size_t>& image)
{
    std::vector<std::size_t> cluster(image.size());
    for (std::size_t c = 0; c < part.size(); ++c)
        for (std::size_t i : part[c]) cluster[i] = c;
    std::map<std::size_t, int> first;
    std::size_t i = 0;
    int step = 0;
    while (!first.count(cluster[i])) {
        first[cluster[i]] = step++;
        i = image[i];
    }
    return {first[cluster[i]], step - first[cluster[i]]};
}

inline SpiderResult spider_run(const RationalAngle& theta, const EngineOptions& opt = {}, const Observer& observe = {})
{
    SpiderResult out{theta, angle_orbit(theta), run(spider_init(theta, opt.steps), opt, observe), {}, {}, 0, 0, 0.0};
    if (out.run.status != Status::Converged || out.run.limits[0].is_infinity()) return out;
    const Complex c = out.run.limits[0].value();
    out.c = c;
    out.preperiod = out.orbit.preperiod;
    out.period = out.orbit.period;
    if (out.run.collisions) {
        const auto [k, p] = point_orbit_type(*out.run.collisions, out.run.state.images());
        out.preperiod = k;
        out.period = p;
    }
    out.residual = orbit_residual(c, out.preperiod, out.period);
    const Complex r = refine_parameter(c, out.preperiod, out.period);
    if (std::abs(r - c) < 1e-6) out.refined = r;
    else out.run.warnings.push_back("spider: Newton polishing left the basin, keeping the raw limit");
    return out;
}

} // namespace slowmate
