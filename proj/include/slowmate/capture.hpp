#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mating.hpp"
#include "rays.hpp"

namespace slowmate {

struct CaptureSpec {
    PolynomialSide p;
    RationalAngle theta; // the captured critical value runs in along this ray
    RayOptions ray;
    EngineOptions engine;
};

struct CaptureResult {
    RunResult run;
    MatingLayout layout;
    ExternalRay ray;             // in the original coordinate of z^2 + c
    std::vector<Complex> orbit;  // z_1, z_2, ... before scaling
};

namespace detail {

// Chordal-arclength sampling of the path infinity -> q_0 -> ... -> q_m. The first leg is
// straight in the 1/z chart.
inline std::vector<SpherePoint> sample_capture_path(const std::vector<Complex>& q, int steps)
{
    std::vector<SpherePoint> nodes{SpherePoint::infinity()};
    for (const auto& z : q) nodes.emplace_back(z);
    std::vector<double> cum{0.0};
    for (std::size_t k = 1; k < nodes.size(); ++k) cum.push_back(cum.back() + chordal_distance(nodes[k - 1], nodes[k]));
    std::vector<SpherePoint> out(steps + 1);
    std::size_t seg = 1;
    for (int j = 0; j <= steps; ++j) {
        const double s = cum.back() * j / steps;
        while (seg + 1 < nodes.size() && cum[seg] < s) ++seg;
        const double len = cum[seg] - cum[seg - 1];
        const double u = len > 0.0 ? std::clamp((s - cum[seg - 1]) / len, 0.0, 1.0) : 1.0;
        out[j] = j == steps ? nodes.back() : blend(nodes[seg - 1], nodes[seg], u);
    }
    return out;
}

} // namespace detail

// Marked points: 0 (critical, pinned), infinity (critical, pinned), beta -> 1 (pinned), the
// postcritical orbit of z^2 + c and the orbit z_1, z_2, ... of the landing point of theta.
// Everything is divided by beta. On [0,1] only z_1 moves, in from infinity along the ray.
inline PathState capture_init(const CaptureSpec& s, MatingLayout* layout = nullptr, ExternalRay* ray_out = nullptr,
                              std::vector<Complex>* orbit_out = nullptr)
{
    const Complex c = s.p.c, beta = beta_fixed_point(c);
    const ExternalRay ray = trace_external_ray(c, s.theta, s.ray);
    const Real tol = 1e-7L;
    const int N = s.engine.steps;
    auto close = [&](Complex a, Complex b) { return std::abs(a - b) < tol * (1.0L + std::abs(a)); };

    // postcritical points; a point equal to beta is the pin itself
    const int np = static_cast<int>(s.p.orbit.size()) - (s.p.periodic() ? 1 : 0);
    MatingLayout lay;
    PathState st(2, N, ThreePointPins{1, 0, 2});
    auto constant = [&](SpherePoint v) { return std::vector<SpherePoint>(N + 1, v); };

    std::vector<Complex> zs{ray.landing};
    for (const auto& q : s.p.orbit)
        if (close(zs[0], q)) throw std::invalid_argument("capture: landing point is postcritical");
    if (close(zs[0], beta)) throw std::invalid_argument("capture: landing point is beta");

    // the orbit of z_1 until it meets the postcritical set, beta or itself
    std::optional<std::size_t> hit_p, hit_z;
    bool hit_beta = false;
    for (int guard = 0; guard < 64; ++guard) {
        const Complex w = zs.back() * zs.back() + c;
        if (close(w, beta)) { hit_beta = true; break; }
        for (int i = 0; i < np && !hit_p; ++i)
            if (close(w, s.p.orbit[i])) hit_p = i;
        if (s.p.periodic() && close(w, 0.0L)) hit_p = np; // the critical point
        if (hit_p) break;
        for (std::size_t k = 0; k < zs.size() && !hit_z; ++k)
            if (close(w, zs[k])) hit_z = k;
        if (hit_z) break;
        zs.push_back(w);
    }
    if (!hit_p && !hit_z && !hit_beta) throw std::invalid_argument("capture: landing orbit does not close up");

    std::vector<std::size_t> idx_p(np), idx_z(zs.size());
    std::size_t next = 3;
    for (int i = 0; i < np; ++i) idx_p[i] = close(s.p.orbit[i], beta) ? 2 : next++;
    for (std::size_t k = 0; k < zs.size(); ++k) idx_z[k] = next++;

    auto p_image = [&](int i) -> std::size_t {
        if (i + 1 < np) return idx_p[i + 1];
        return s.p.periodic() ? 0 : idx_p[s.p.preperiod];
    };
    st.add_point(constant(Complex(0.0L)), np > 0 ? idx_p[0] : 0);
    st.add_point(constant(SpherePoint::infinity()), idx_z[0]);
    st.add_point(constant(Complex(1.0L)), 2);
    lay.labels = {{PointKind::Critical, Side::P, 0, {}}, {PointKind::Critical, Side::Q, 0, {}},
                  {PointKind::Equator, Side::P, 0, {}}};
    for (int i = 0; i < np; ++i) {
        if (idx_p[i] == 2) continue;
        st.add_point(constant(SpherePoint(s.p.orbit[i] / beta)), p_image(i));
        lay.labels.push_back({PointKind::Orbit, Side::P, i + 1, {}});
    }

    std::vector<Complex> path;
    for (const auto& q : ray.points) path.push_back(q / beta);
    const auto moving = detail::sample_capture_path(path, N);
    for (std::size_t k = 0; k < zs.size(); ++k) {
        std::size_t img;
        if (k + 1 < zs.size()) img = idx_z[k + 1];
        else if (hit_beta) img = 2;
        else if (hit_p) img = *hit_p == static_cast<std::size_t>(np) ? 0 : idx_p[*hit_p];
        else img = idx_z[*hit_z];
        st.add_point(k == 0 ? moving : constant(SpherePoint(zs[k] / beta)), img);
        lay.labels.push_back({PointKind::Captured, Side::Q, static_cast<int>(k + 1), {}});
    }

    // the ray must keep clear of every other marked point
    for (std::size_t i = 0; i < st.marked_count(); ++i) {
        if (i == 1 || i == idx_z[0]) continue;
        const SpherePoint m = st.samples(i).front();
        for (std::size_t k = 0; k + 1 < path.size(); ++k)
            if (chordal_distance(SpherePoint(path[k]), m) < 1e-4)
                throw PathTooClose("capture: ray passes within 1e-4 of marked point " + lay.labels[i].name());
    }
    if (layout) *layout = std::move(lay);
    if (ray_out) *ray_out = ray;
    if (orbit_out) *orbit_out = zs;
    return st;
}

inline CaptureResult capture_run(const CaptureSpec& s, const Observer& observe = {})
{
    CaptureResult out;
    PathState init = capture_init(s, &out.layout, &out.ray, &out.orbit);
    out.run = run(std::move(init), s.engine, observe);
    return out;
}

} // namespace slowmate
