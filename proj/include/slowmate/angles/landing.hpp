#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orbit.hpp"
#include "rational_angle.hpp"

namespace slowmate {

inline constexpr int kMaxCompanionPeriod = 16;

namespace detail {

// angle num / (2^n - 1)
struct PeriodicAngle {
    std::uint64_t num;
    int n;
};

inline bool less(const PeriodicAngle& a, const PeriodicAngle& b)
{
    using u128 = unsigned __int128;
    return u128(a.num) * ((u128(1) << b.n) - 1) < u128(b.num) * ((u128(1) << a.n) - 1);
}

inline bool same(const PeriodicAngle& a, const PeriodicAngle& b) { return !less(a, b) && !less(b, a); }

inline bool strictly_between(const PeriodicAngle& x, const PeriodicAngle& a, const PeriodicAngle& b)
{
    return less(a, x) && less(x, b);
}

inline bool crosses(const std::pair<PeriodicAngle, PeriodicAngle>& c, const PeriodicAngle& a,
                    const PeriodicAngle& b)
{
    if (same(c.first, a) || same(c.first, b) || same(c.second, a) || same(c.second, b)) return false;
    return strictly_between(c.first, a, b) != strictly_between(c.second, a, b);
}

inline int exact_period(std::uint64_t num, int n)
{
    const std::uint64_t M = (std::uint64_t(1) << n) - 1;
    std::uint64_t x = num;
    for (int k = 1; k <= n; ++k) {
        x = (2 * x) % M;
        if (x == num) return k;
    }
    return n;
}

// Parameter-ray pairing of all periodic angles up to period n_max:
// for each period, the smallest free angle joins the next free angle of the same period
// whose chord crosses nothing drawn so far.
inline const std::vector<std::pair<PeriodicAngle, PeriodicAngle>>& periodic_pairing(int n_max)
{
    static std::mutex mu;
    static std::map<int, std::vector<std::pair<PeriodicAngle, PeriodicAngle>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n_max); it != cache.end()) return it->second;
    std::vector<std::pair<PeriodicAngle, PeriodicAngle>> chords;
    for (int n = 2; n <= n_max; ++n) {
        const std::uint64_t M = (std::uint64_t(1) << n) - 1;
        std::vector<PeriodicAngle> free;
        for (std::uint64_t j = 1; j < M; ++j)
            if (exact_period(j, n) == n) free.push_back({j, n});
        std::vector<char> used(free.size(), 0);
        for (std::size_t i = 0; i < free.size(); ++i) {
            if (used[i]) continue;
            for (std::size_t j = i + 1; j < free.size(); ++j) {
                if (used[j]) continue;
                bool ok = true;
                for (const auto& c : chords)
                    if (crosses(c, free[i], free[j])) { ok = false; break; }
                if (!ok) continue;
                used[i] = used[j] = 1;
                chords.push_back({free[i], free[j]});
                break;
            }
            if (!used[i]) throw std::logic_error("periodic_pairing: unmatched angle");
        }
    }
    return cache.emplace(n_max, std::move(chords)).first->second;
}

inline bool in_closed_arc(const RationalAngle& t, const RationalAngle& from, const RationalAngle& to)
{
    if (from <= to) return from <= t && t <= to;
    return t >= from || t <= to;
}

inline bool in_open_arc(const RationalAngle& t, const RationalAngle& from, const RationalAngle& to)
{
    if (from <= to) return from < t && t < to;
    return t > from || t < to;
}

using Compatible = std::function<bool(const RationalAngle&, const RationalAngle&)>;

// a ~ b iff every forward image pair is compatible, stopping once the pair repeats, merges,
// or reaches the identified leaf `base`.
inline bool walk_together(const RationalAngle& a, const RationalAngle& b, const Compatible& compatible,
                          const std::pair<RationalAngle, RationalAngle>* base)
{
    std::set<std::pair<RationalAngle, RationalAngle>> seen;
    RationalAngle u = std::min(a, b), v = std::max(a, b);
    while (true) {
        if (u == v) return true;
        if (base && u == base->first && v == base->second) return true;
        if (!seen.emplace(u, v).second) return true;
        if (!compatible(u, v)) return false;
        RationalAngle nu = u.doubled(), nv = v.doubled();
        u = std::min(nu, nv);
        v = std::max(nu, nv);
    }
}

// Critical fiber for a set of critical-value angles: both halves of each, sorted. Two angles are
// compatible when both lie in the fiber or both lie in one closed arc between neighbouring fiber
// angles. A single critical-value angle gives the two closed halves of its diameter.
inline Compatible fiber_rule(const std::vector<RationalAngle>& values)
{
    std::vector<RationalAngle> f;
    for (const auto& t : values) {
        f.push_back(t.half_low());
        f.push_back(t.half_high());
    }
    std::sort(f.begin(), f.end());
    return [f](const RationalAngle& u, const RationalAngle& v) {
        const bool fu = std::binary_search(f.begin(), f.end(), u), fv = std::binary_search(f.begin(), f.end(), v);
        if (fu && fv) return true;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const RationalAngle& from = f[k];
            const RationalAngle& to = f[(k + 1) % f.size()];
            if (in_closed_arc(u, from, to) && in_closed_arc(v, from, to)) return true;
        }
        return false;
    };
}

inline constexpr std::int64_t kMaxFiberDenominator = 1 << 16;

// All external angles of the Misiurewicz parameter with strictly preperiodic angle theta_c.
// They share its orbit type; grow the set from {theta_c} by adding every candidate that lands
// with theta_c under the current fiber until nothing changes.
inline const std::vector<RationalAngle>& critical_value_angles(const RationalAngle& theta_c)
{
    static std::mutex mu;
    static std::map<RationalAngle, std::vector<RationalAngle>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(theta_c); it != cache.end()) return it->second;
    }
    const OrbitType t = orbit_type(theta_c);
    const BigInt den = (BigInt(1) << t.preperiod) * ((BigInt(1) << t.period) - 1);
    std::vector<RationalAngle> values{theta_c};
    if (den <= kMaxFiberDenominator) {
        std::vector<RationalAngle> cand;
        for (BigInt k = 1; k < den; ++k) {
            const RationalAngle a(k, den);
            if (a != theta_c && orbit_type(a) == t) cand.push_back(a);
        }
        while (true) {
            const Compatible rule = fiber_rule(values);
            std::vector<RationalAngle> next{theta_c};
            for (const auto& a : cand)
                if (walk_together(a, theta_c, rule, nullptr)) next.push_back(a);
            std::sort(next.begin(), next.end());
            if (next == values) break;
            values = std::move(next);
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(theta_c, std::move(values)).first->second;
}

} // namespace detail

// The other parameter ray landing with a periodic theta at the root of its hyperbolic component.
inline RationalAngle companion_angle(const RationalAngle& theta)
{
    const auto t = orbit_type(theta);
    if (t.preperiod != 0 || theta == RationalAngle()) throw std::invalid_argument("companion_angle: need periodic theta != 0");
    if (t.period > kMaxCompanionPeriod) throw std::invalid_argument("companion_angle: period too large");
    const int n = t.period;
    const BigInt M = (BigInt(1) << n) - 1;
    const auto num = static_cast<std::uint64_t>(theta.num() * (M / theta.den()));
    for (const auto& c : detail::periodic_pairing(n)) {
        if (c.first.n != n) continue;
        if (c.first.num == num) return RationalAngle(BigInt(c.second.num), M);
        if (c.second.num == num) return RationalAngle(BigInt(c.first.num), M);
    }
    throw std::logic_error("companion_angle: not found");
}

// Whether dynamic rays a and b land at the same point of the Julia set of the
// postcritically finite parameter with external angle theta_c.
//
// Strictly preperiodic theta_c: collect every angle of the critical value; their halves form the
// critical fiber. a ~ b iff their forward images always share a closed arc between neighbouring
// fiber angles, or both sit in the fiber. With one angle this is the pair of closed halves cut by
// the diameter {theta_c/2, (theta_c+1)/2}.
// Periodic theta_c: the characteristic leaf {theta_c, companion} pulls back to two major leaves
// bounding the critical gap. a ~ b iff their images always lie together in the closure of one
// side region, or together inside one open strip arc of the gap.
inline bool lands_together(const RationalAngle& a, const RationalAngle& b, const RationalAngle& theta_c)
{
    if (a == b) return true;
    if (theta_c == RationalAngle()) return false;
    const auto tc = orbit_type(theta_c);
    using detail::in_closed_arc;
    using detail::in_open_arc;

    if (tc.preperiod > 0) return detail::walk_together(a, b, detail::fiber_rule(detail::critical_value_angles(theta_c)), nullptr);

    const RationalAngle other = companion_angle(theta_c);
    const RationalAngle lo = std::min(theta_c, other), hi = std::max(theta_c, other);
    const std::pair<RationalAngle, RationalAngle> base{lo, hi};
    const RationalAngle lo0 = lo.half_low(), lo1 = lo.half_high(), hi0 = hi.half_low(), hi1 = hi.half_high();
    const detail::Compatible compatible = [=](const RationalAngle& u, const RationalAngle& v) {
        return (in_closed_arc(u, hi0, lo1) && in_closed_arc(v, hi0, lo1)) ||
               (in_closed_arc(u, hi1, lo0) && in_closed_arc(v, hi1, lo0)) ||
               (in_open_arc(u, lo0, hi0) && in_open_arc(v, lo0, hi0)) ||
               (in_open_arc(u, lo1, hi1) && in_open_arc(v, lo1, hi1));
    };
    return detail::walk_together(a, b, compatible, &base);
}

} // namespace slowmate
