#pragma once

#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "../core/errors.hpp"
#include "path_state.hpp"
#include "pullback.hpp"

namespace slowmate {

enum class Status { Converged, Degenerate, CycleDetected, MaxIter, HomotopyFailure };

inline const char* to_string(Status s)
{
    switch (s) {
    case Status::Converged: return "Converged";
    case Status::Degenerate: return "Degenerate";
    case Status::CycleDetected: return "CycleDetected";
    case Status::MaxIter: return "MaxIter";
    case Status::HomotopyFailure: return "HomotopyFailure";
    }
    return "?";
}

using Partition = std::vector<std::vector<std::size_t>>;

// Single-linkage clusters of points closer than tol. Pairs in [tol, 10 tol) are neither
// clearly together nor clearly apart, and raise AmbiguousClustering.
inline Partition detect_collisions(const std::vector<SpherePoint>& pts, double tol = 1e-6)
{
    const std::size_t n = pts.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    bool ambiguous = false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = chordal_distance(pts[i], pts[j]);
            if (d < tol) parent[find(i)] = find(j);
            else if (d < 10.0 * tol) ambiguous = true;
        }
    Partition out;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) { slot[r] = static_cast<long>(out.size()); out.emplace_back(); }
        out[slot[r]].push_back(i);
    }
    if (ambiguous) throw AmbiguousClustering("detect_collisions: distances between tol and 10 tol");
    return out;
}

struct RunResult {
    Status status = Status::MaxIter;
    int cycle_period = 0;
    int iterations = 0;
    PathState state;
    std::vector<SpherePoint> limits;     // marked points at the end of the last window
    std::optional<BicriticalMap> map;    // map fixing the final configuration
    std::optional<Partition> collisions; // on convergence
    std::vector<double> measures;        // convergence measure per unit
    int settle_units = 0;                // extra units spent letting tracked points converge
    StepStats stats;
    std::vector<std::string> warnings;
};

using Observer = std::function<void(const PathState&, int iteration, double measure)>;

// Largest chordal arc length over the window among marked points.
inline double convergence_measure(const PathState& s)
{
    double m = 0.0;
    for (std::size_t i = 0; i < s.marked_count(); ++i) {
        const auto& x = s.samples(i);
        double len = 0.0;
        for (std::size_t j = 0; j + 1 < x.size(); ++j) len += chordal_distance(x[j], x[j + 1]);
        m = std::max(m, len);
    }
    return m;
}

// Same measure over tracked points only.
inline double tracked_measure(const PathState& s)
{
    double m = 0.0;
    for (std::size_t i = s.marked_count(); i < s.size(); ++i) {
        const auto& x = s.samples(i);
        double len = 0.0;
        for (std::size_t j = 0; j + 1 < x.size(); ++j) len += chordal_distance(x[j], x[j + 1]);
        m = std::max(m, len);
    }
    return m;
}

// Smallest P in [2, k_max] with the newest configuration back within tol of the one P units
// earlier while the P configurations inside the loop stay well apart. Slow spirals toward a
// fixed point fail the second test.
inline int detect_cycle(const std::deque<std::vector<SpherePoint>>& hist, const EngineOptions& opt)
{
    const int h = static_cast<int>(hist.size());
    const double apart = std::sqrt(opt.tol_cycle);
    for (int P = 2; P <= opt.k_max && P < h; ++P) {
        if (config_distance(hist[h - 1], hist[h - 1 - P]) >= opt.tol_cycle) continue;
        bool distinct = true;
        for (int a = 0; a < P && distinct; ++a)
            for (int b = a + 1; b < P && distinct; ++b)
                distinct = config_distance(hist[h - 1 - a], hist[h - 1 - b]) >= apart;
        if (distinct) return P;
    }
    return 0;
}

inline RunResult run(PathState state, const EngineOptions& opt, const Observer& observe = {})
{
    state.validate();
    RunResult res{Status::MaxIter, 0, 0, state, {}, {}, {}, {}, 0, {}, {}};
    std::deque<std::vector<SpherePoint>> hist;
    hist.push_back(state.endpoint());
    auto degenerate = [&](const PathState& s) {
        const int N = s.steps();
        return chordal_distance(s.critical_image_zero(N), s.critical_image_infinity(N)) < opt.tol_degen;
    };
    for (int it = 1; it <= opt.max_iter; ++it) {
        try {
            state = pullback_step(state, opt, res.stats);
        } catch (const BranchAmbiguity& e) {
            res.status = Status::HomotopyFailure;
            res.warnings.push_back(e.what());
            res.iterations = it - 1;
            break;
        } catch (const DegenerateTriple& e) {
            res.status = Status::Degenerate;
            res.warnings.push_back(e.what());
            res.iterations = it - 1;
            break;
        }
        res.iterations = it;
        const double m = convergence_measure(state);
        res.measures.push_back(m);
        hist.push_back(state.endpoint());
        if (static_cast<int>(hist.size()) > opt.k_max + 1) hist.pop_front();
        if (observe) observe(state, it, m);
        if (m < opt.tol) { res.status = Status::Converged; break; }
        if (degenerate(state)) { res.status = Status::Degenerate; break; }
        if (const int P = detect_cycle(hist, opt)) {
            res.status = Status::CycleDetected;
            res.cycle_period = P;
            break;
        }
    }
    // The marked points stop moving first; tracked points keep contracting under the now fixed
    // map, so give them the remaining unit budget to settle before reading their limits.
    if (res.status == Status::Converged && state.size() > state.marked_count()) {
        try {
            while (tracked_measure(state) >= opt.tol && res.iterations + res.settle_units < opt.max_iter) {
                state = pullback_step(state, opt, res.stats);
                ++res.settle_units;
                if (observe) observe(state, res.iterations + res.settle_units, convergence_measure(state));
            }
        } catch (const std::exception& e) {
            res.warnings.push_back(std::string("tracked settling stopped: ") + e.what());
        }
        if (tracked_measure(state) >= opt.tol) res.warnings.push_back("tracked points still moving at max_iter");
    }
    res.state = state;
    res.limits = state.endpoint();
    if (res.status != Status::Degenerate) {
        try {
            res.map = state.map_at(state.steps());
        } catch (const DegenerateTriple&) {
        }
    }
    if (res.status == Status::Converged) {
        try {
            res.collisions = detect_collisions(res.limits, opt.tol_collide);
        } catch (const AmbiguousClustering& e) {
            res.warnings.push_back(e.what());
        }
    }
    return res;
}

} // namespace slowmate
