#pragma once

#include <algorithm>
#include <complex>
#include <exception>
#include <thread>
#include <vector>

#include "../core/errors.hpp"
#include "../core/mobius.hpp"
#include "../core/roots.hpp"
#include "path_state.hpp"

namespace slowmate {

struct EngineOptions {
    int steps = 64;            // samples per unit window
    double tol = 1e-10;        // convergence: window arc length
    double tol_degen = 1e-8;   // f(0) and f(infinity) merging
    double tol_collide = 1e-6;
    double tol_cycle = 1e-6;
    int k_max = 8;             // longest detected cycle
    int max_iter = 200;
    double rho = 0.75;         // branch ambiguity threshold
    int max_depth = 20;        // local subdivision limit
    double proximity = 1e-3;   // radicand this close to 0 or infinity also subdivides
    int proximity_depth = 3;
    double branch_floor = 1e-7;
    unsigned threads = 1;
};

struct StepStats {
    double max_ambiguity = 0.0;
    int max_depth = 0;
    long subdivisions = 0;
    double max_reconstruction = 0.0; // chordal |f(new) - old| over accepted samples
};

namespace detail {

// what the pullback at one sample depends on
struct SampleConfig {
    SpherePoint a, b, g; // f(infinity), f(0), f(1); b alone is c in the monic form
    SpherePoint target;
};

inline SampleConfig blend(const SampleConfig& x, const SampleConfig& y, double s)
{
    return {slowmate::blend(x.a, y.a, s), slowmate::blend(x.b, y.b, s), slowmate::blend(x.g, y.g, s),
            slowmate::blend(x.target, y.target, s)};
}

class Puller {
public:
    Puller(const PathState& old, const EngineOptions& opt) : old_(old), opt_(opt)
    {
        monic_ = std::holds_alternative<MonicPins>(old.normalization());
    }

    SampleConfig config(std::size_t i, int j) const
    {
        SampleConfig c;
        if (const auto* p = std::get_if<ThreePointPins>(&old_.normalization())) {
            c.a = old_.samples(old_.image(p->infinity))[j];
            c.b = old_.samples(old_.image(p->zero))[j];
            c.g = old_.samples(old_.image(p->one))[j];
        } else {
            c.b = old_.samples(std::get<MonicPins>(old_.normalization()).critical_value)[j];
        }
        c.target = old_.samples(old_.image(i))[j];
        return c;
    }

    SpherePoint radicand(const SampleConfig& c) const
    {
        if (!monic_) return pullback_radicand(c.a, c.b, c.g, c.target);
        if (c.b.is_infinity()) throw DegenerateTriple("pullback: critical value at infinity");
        if (c.target.is_infinity()) return SpherePoint::infinity();
        if (chordal_distance(c.target, c.b) <= kCoincide) return SpherePoint(Complex(0.0));
        return SpherePoint(c.target.value() - c.b.value());
    }

    // Root at cfg_b continued from prev, which sits over cfg_a. Halves the step on ambiguity.
    SpherePoint track(const SpherePoint& prev, const SampleConfig& ca, const SampleConfig& cb, int depth,
                      StepStats& st) const
    {
        const SpherePoint r = radicand(cb);
        const RootChoice ch = nearest_root(prev, r, old_.degree(), opt_.branch_floor);
        bool near = false;
        if (!(r.is_infinity() || r.value() == Complex(0.0)) && depth < opt_.proximity_depth)
            near = chordal_distance(r, Complex(0.0)) < opt_.proximity ||
                   chordal_distance(r, SpherePoint::infinity()) < opt_.proximity;
        if (ch.ambiguity <= opt_.rho && !near) {
            st.max_ambiguity = std::max(st.max_ambiguity, ch.ambiguity);
            st.max_depth = std::max(st.max_depth, depth);
            return ch.value;
        }
        if (depth >= opt_.max_depth) throw BranchAmbiguity("pullback: subdivision limit reached", ch.ambiguity);
        ++st.subdivisions;
        const SampleConfig cm = blend(ca, cb, 0.5);
        const SpherePoint mid = track(prev, ca, cm, depth + 1, st);
        return track(mid, cm, cb, depth + 1, st);
    }

    std::vector<SpherePoint> row(std::size_t i, StepStats& st) const
    {
        const int N = old_.steps();
        std::vector<SpherePoint> out(N + 1);
        SampleConfig prev_cfg = config(i, 0);
        const RootChoice first = nearest_root(old_.samples(i)[N], radicand(prev_cfg), old_.degree(), opt_.branch_floor);
        if (first.ambiguity > opt_.rho) throw BranchAmbiguity("pullback: window seam ambiguous", first.ambiguity);
        out[0] = first.value;
        for (int j = 1; j <= N; ++j) {
            const SampleConfig cfg = config(i, j);
            out[j] = track(out[j - 1], prev_cfg, cfg, 0, st);
            prev_cfg = cfg;
        }
        return out;
    }

private:
    const PathState& old_;
    const EngineOptions& opt_;
    bool monic_ = false;
};

using LComplex = Complex;

inline LComplex widen(const SpherePoint& p) { return {p.value().real(), p.value().imag()}; }

// chordal |f(z) - target| at sample j, evaluated in extended precision: near degeneration the
// map is badly conditioned and a double evaluation alone would dominate the residual
inline double reconstruction_error(const PathState& old, int j, const SpherePoint& z, const SpherePoint& target)
{
    if (z.is_infinity()) return chordal_distance(old.map_at(j)(z), target);
    LComplex w = widen(z);
    for (int k = 1; k < old.degree(); ++k) w *= widen(z);
    SpherePoint fz;
    if (const auto* p = std::get_if<ThreePointPins>(&old.normalization())) {
        const SpherePoint A = old.samples(old.image(p->infinity))[j], B = old.samples(old.image(p->zero))[j],
                          G = old.samples(old.image(p->one))[j];
        LComplex num, den;
        if (A.is_infinity()) { num = (widen(G) - widen(B)) * w + widen(B); den = 1.0L; }
        else if (B.is_infinity()) { num = widen(A) * w + (widen(G) - widen(A)); den = w; }
        else if (G.is_infinity()) { num = widen(A) * w - widen(B); den = w - 1.0L; }
        else {
            const LComplex a = widen(A), b = widen(B), g = widen(G);
            num = a * (g - b) * w + b * (a - g);
            den = (g - b) * w + (a - g);
        }
        if (den == LComplex(0.0L)) fz = SpherePoint::infinity();
        else {
            const LComplex q = num / den;
            fz = SpherePoint(q);
        }
    } else {
        const LComplex q = w + widen(old.samples(std::get<MonicPins>(old.normalization()).critical_value)[j]);
        fz = SpherePoint(q);
    }
    return chordal_distance(fz, target);
}

} // namespace detail

// One unit of the iteration: every non-pinned point is lifted through the current map.
// Pins are copied bit for bit. Rows are independent, so they may be split across threads.
inline PathState pullback_step(const PathState& old, const EngineOptions& opt, StepStats& stats)
{
    PathState next = old;
    next.set_time(old.time() + 1);
    detail::Puller puller(old, opt);
    const std::size_t n = old.size();
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < n; ++i)
        if (!old.pinned(i)) work.push_back(i);

    const unsigned nt = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(work.size())));
    std::vector<StepStats> part(nt);
    std::vector<std::exception_ptr> errs(nt);
    auto job = [&](unsigned t) {
        try {
            for (std::size_t k = t; k < work.size(); k += nt) next.samples(work[k]) = puller.row(work[k], part[t]);
        } catch (...) {
            errs[t] = std::current_exception();
        }
    };
    if (nt == 1) {
        job(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(job, t);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    for (const auto& p : part) {
        stats.max_ambiguity = std::max(stats.max_ambiguity, p.max_ambiguity);
        stats.max_depth = std::max(stats.max_depth, p.max_depth);
        stats.subdivisions += p.subdivisions;
    }

    // every accepted sample must map back onto the old window
    for (int j = 0; j <= old.steps(); ++j)
        for (std::size_t i : work)
            stats.max_reconstruction = std::max(
                stats.max_reconstruction,
                detail::reconstruction_error(old, j, next.samples(i)[j], old.samples(old.image(i))[j]));
    return next;
}

} // namespace slowmate
