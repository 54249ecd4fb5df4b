#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "angles/ray_classes.hpp"
#include "angles/wake.hpp"
#include "engine/run.hpp"
#include "rays.hpp"
#include "spider.hpp"

namespace slowmate {

// One polynomial z^2 + c with postcritically finite c.
struct PolynomialSide {
    Complex c;
    std::optional<RationalAngle> angle;
    int preperiod = 0; // of the point orbit c, f(c), ...
    int period = 1;
    std::vector<Complex> orbit; // c, f(c), ..., preperiod + period entries

    bool periodic() const { return preperiod == 0; }
};

inline PolynomialSide side_from_parameter(Complex c, int preperiod, int period)
{
    if (period < 1 || preperiod < 0) throw std::invalid_argument("side: bad orbit type");
    return {c, std::nullopt, preperiod, period, critical_orbit(c, preperiod + period)};
}

// Runs the spider for theta, merges colliding legs and polishes c.
inline PolynomialSide side_from_angle(const RationalAngle& theta, const EngineOptions& opt = {})
{
    const SpiderResult sr = spider_run(theta, opt);
    if (sr.run.status != Status::Converged || !sr.c)
        throw NonConvergent("side_from_angle: spider did not converge for " + theta.str());
    PolynomialSide s = side_from_parameter(sr.refined ? *sr.refined : *sr.c, sr.preperiod, sr.period);
    s.angle = theta;
    return s;
}

enum class PointKind { Critical, Equator, Orbit, Tracked, Captured };

struct PointLabel {
    PointKind kind;
    Side side;
    int index = 0;                      // 1-based orbit index, or tree index for tracked points
    std::optional<RationalAngle> angle; // tracked points only

    std::string name() const
    {
        switch (kind) {
        case PointKind::Critical: return side == Side::P ? "critP" : "critQ";
        case PointKind::Equator: return "one";
        case PointKind::Orbit: return (side == Side::P ? "x" : "y") + std::to_string(index);
        case PointKind::Tracked: return (side == Side::P ? "tP" : "tQ") + std::to_string(index);
        case PointKind::Captured: return "z" + std::to_string(index);
        }
        return "?";
    }
};

struct MatingSpec {
    PolynomialSide p, q;
    double r1 = std::exp(2.0);
    bool large_r1 = false; // drop the O(1/R^2) corrections (only honoured for R1 >= 1e10)
    bool force = false;    // run conjugate-limb pairs anyway
    int tracked_depth = 0; // beta-tree depth on each side, 0 for none
    EngineOptions engine;
};

struct MatingLayout {
    std::vector<PointLabel> labels;
    std::vector<std::string> warnings;
};

// R_t = R1^(2^(1-t)); exactly R1 at t = 1.
inline Real radius_at(Real r1, Real t) { return std::pow(r1, std::exp2(1.0L - t)); }

// Initial path on [0,1]: x-points shrink in, y-points come in from infinity, with the
// corrections that make the t = 1 configuration the pullback of the t = 0 one.
inline Complex initial_x(const MatingSpec& s, Complex z, Real t)
{
    const Real r1 = s.r1, rt = radius_at(r1, t), r4 = r1 * r1 * r1 * r1;
    if (s.large_r1 && r1 >= 1e10L) return z / rt;
    const Complex p = s.p.c, q = s.q.c;
    const Complex pref = (1.0L + (1.0L - t) * q / (r1 * r1)) / (1.0L + (1.0L - t) * p / (r1 * r1));
    return pref * (z / rt) / (1.0L + (1.0L - t) * (q / r4) * (z - p));
}

inline SpherePoint initial_y(const MatingSpec& s, Complex z, Real t)
{
    if (z == Complex(0.0L)) return SpherePoint::infinity();
    const Real r1 = s.r1, rt = radius_at(r1, t), r4 = r1 * r1 * r1 * r1;
    if (s.large_r1 && r1 >= 1e10L) return SpherePoint(rt / z);
    const Complex p = s.p.c, q = s.q.c;
    const Complex pref = (1.0L + (1.0L - t) * q / (r1 * r1)) / (1.0L + (1.0L - t) * p / (r1 * r1));
    return SpherePoint(pref * rt * (1.0L + (1.0L - t) * (p / r4) * (z - q)) / z);
}

// Marked points: critP (pinned 0), critQ (pinned infinity), one (pinned 1), x_i, y_i.
// A periodic side drops its last orbit point, which is the critical point itself.
inline PathState mating_init(const MatingSpec& s, MatingLayout* layout = nullptr)
{
    if (!(s.r1 > 1.0)) throw std::invalid_argument("mating: R1 must exceed 1");
    if (s.p.angle && s.q.angle && conjugate_limbs(*s.p.angle, *s.q.angle) && !s.force)
        throw ConjugateLimbs("mating: " + s.p.angle->str() + " and " + s.q.angle->str() + " lie in conjugate limbs");
    MatingLayout lay;
    if (s.r1 < 5.0) lay.warnings.push_back("mating: R1 < 5, initial path may be inaccurate");
    if (s.p.angle && s.q.angle && conjugate_limbs(*s.p.angle, *s.q.angle))
        lay.warnings.push_back("mating: conjugate limbs, expect degeneration");

    const int N = s.engine.steps;
    PathState st(2, N, ThreePointPins{1, 0, 2});
    const int nx = static_cast<int>(s.p.orbit.size()) - (s.p.periodic() ? 1 : 0);
    const int ny = static_cast<int>(s.q.orbit.size()) - (s.q.periodic() ? 1 : 0);
    const std::size_t x0 = 3, y0 = 3 + nx;
    auto x_image = [&](int i) -> std::size_t { // image of x_{i+1}, 0-based i
        if (i + 1 < nx) return x0 + i + 1;
        return s.p.periodic() ? 0 : x0 + s.p.preperiod;
    };
    auto y_image = [&](int i) -> std::size_t {
        if (i + 1 < ny) return y0 + i + 1;
        return s.q.periodic() ? 1 : y0 + s.q.preperiod;
    };
    auto constant = [&](SpherePoint v) { return std::vector<SpherePoint>(N + 1, v); };
    st.add_point(constant(Complex(0.0)), nx > 0 ? x0 : 0);
    st.add_point(constant(SpherePoint::infinity()), ny > 0 ? y0 : 1);
    st.add_point(constant(Complex(1.0)), 2);
    lay.labels = {{PointKind::Critical, Side::P, 0, {}}, {PointKind::Critical, Side::Q, 0, {}},
                  {PointKind::Equator, Side::P, 0, {}}};
    auto x_path = [&](Complex z) {
        std::vector<SpherePoint> v(N + 1);
        for (int j = 0; j <= N; ++j) v[j] = SpherePoint(initial_x(s, z, Real(j) / N));
        return v;
    };
    auto y_path = [&](Complex z) {
        std::vector<SpherePoint> v(N + 1);
        for (int j = 0; j <= N; ++j) v[j] = initial_y(s, z, Real(j) / N);
        return v;
    };
    for (int i = 0; i < nx; ++i) {
        st.add_point(x_path(s.p.orbit[i]), x_image(i));
        lay.labels.push_back({PointKind::Orbit, Side::P, i + 1, {}});
    }
    for (int i = 0; i < ny; ++i) {
        st.add_point(y_path(s.q.orbit[i]), y_image(i));
        lay.labels.push_back({PointKind::Orbit, Side::Q, i + 1, {}});
    }
    if (s.tracked_depth > 0) {
        for (Side side : {Side::P, Side::Q}) {
            const auto tree = beta_tree(side == Side::P ? s.p.c : s.q.c, s.tracked_depth);
            const std::size_t base = st.size();
            for (std::size_t k = 0; k < tree.size(); ++k) {
                st.add_point(side == Side::P ? x_path(tree[k].z) : y_path(tree[k].z), base + tree[k].image, true);
                lay.labels.push_back({PointKind::Tracked, side, static_cast<int>(k), tree[k].angle});
            }
        }
    }
    if (layout) *layout = std::move(lay);
    return st;
}

// Tagged angles whose rays land at each marked point; empty for points inside Fatou components.
inline std::vector<std::vector<TaggedAngle>> point_angles(const MatingSpec& s, const MatingLayout& lay)
{
    std::vector<std::vector<TaggedAngle>> out;
    for (const auto& l : lay.labels) {
        const PolynomialSide& side = l.side == Side::P ? s.p : s.q;
        std::vector<TaggedAngle> a;
        switch (l.kind) {
        case PointKind::Equator: a.push_back({Side::P, RationalAngle()}); break;
        case PointKind::Tracked: a.push_back({l.side, *l.angle}); break;
        case PointKind::Captured: break;
        case PointKind::Critical:
            if (!side.periodic() && side.angle)
                a = {{l.side, side.angle->half_low()}, {l.side, side.angle->half_high()}};
            break;
        case PointKind::Orbit:
            if (!side.periodic() && side.angle) {
                RationalAngle t = *side.angle;
                for (int i = 1; i < l.index; ++i) t = t.doubled();
                a.push_back({l.side, t});
            }
            break;
        }
        out.push_back(std::move(a));
    }
    return out;
}

// Expected collision pattern from ray equivalence. Points without angles stay alone.
inline Partition oracle_partition(const MatingSpec& s, const MatingLayout& lay, std::size_t count)
{
    if (!s.p.angle || !s.q.angle) throw std::invalid_argument("oracle_partition: both angles required");
    const auto pa = point_angles(s, lay);
    std::vector<TaggedAngle> all;
    for (std::size_t i = 0; i < count; ++i) all.insert(all.end(), pa[i].begin(), pa[i].end());
    const RayClassPartition classes = ray_classes(*s.p.angle, *s.q.angle, all);
    std::map<TaggedAngle, std::size_t> cls;
    for (std::size_t k = 0; k < classes.size(); ++k)
        for (const auto& t : classes[k]) cls[t] = k;
    std::map<long, std::vector<std::size_t>> groups;
    long solo = -1;
    for (std::size_t i = 0; i < count; ++i)
        groups[pa[i].empty() ? solo-- : static_cast<long>(cls.at(pa[i].front()))].push_back(i);
    Partition out;
    for (auto& [k, g] : groups) out.push_back(g);
    std::sort(out.begin(), out.end());
    return out;
}

inline Partition canonical(Partition p)
{
    for (auto& g : p) std::sort(g.begin(), g.end());
    std::sort(p.begin(), p.end());
    return p;
}

struct MatingResult {
    RunResult run;
    MatingLayout layout;
    std::optional<MobiusMap> rescaled; // conjugated by z -> z / f(infinity), so that f(infinity) = 1
    Complex scale = 1.0L;              // f(infinity) in the f(1) = 1 normalization
    std::optional<Partition> oracle;
    std::optional<bool> oracle_match;
    std::vector<std::string> warnings;

    std::optional<SpherePoint> rescaled_limit(std::size_t i) const
    {
        if (!rescaled) return std::nullopt;
        const SpherePoint z = run.limits[i];
        return z.is_infinity() ? z : SpherePoint(z.value() / scale);
    }
};

// f(z) = m(z^2) conjugated by z -> z/s gives m'(w) = m(s^2 w) / s.
inline MobiusMap rescale(const MobiusMap& m, Complex s)
{
    return MobiusMap(m.a() * s * s, m.b(), m.c() * s * s * s, m.d() * s);
}

inline MatingResult mating_run(const MatingSpec& s, const Observer& observe = {})
{
    MatingResult out;
    PathState init = mating_init(s, &out.layout);
    out.warnings = out.layout.warnings;
    out.run = run(std::move(init), s.engine, observe);
    if (out.run.map) {
        const SpherePoint finf = (*out.run.map)(SpherePoint::infinity());
        if (!finf.is_infinity() && std::abs(finf.value()) > 1e-12L) {
            out.scale = finf.value();
            out.rescaled = rescale(out.run.map->m, out.scale);
        }
    }
    if (out.run.status == Status::Converged && s.p.angle && s.q.angle) {
        try {
            out.oracle = oracle_partition(s, out.layout, out.run.state.marked_count());
            if (out.run.collisions) out.oracle_match = canonical(*out.run.collisions) == *out.oracle;
        } catch (const CyclicClass& e) {
            out.warnings.push_back(e.what());
        }
    }
    return out;
}

} // namespace slowmate
