#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "orbit.hpp"
#include "rational_angle.hpp"

namespace slowmate {

// Wake of the p/q limb of the main cardioid, bounded by the two parameter rays lower < upper.
struct Wake {
    int p = 0;
    int q = 0;
    RationalAngle lower, upper;

    bool contains(const RationalAngle& t) const { return lower <= t && t <= upper; }
};

inline constexpr int kMaxWakeDenominator = 24;

// All wakes with denominator q, indexed by numerator order.
// A period-q cycle has rotation number p/q when doubling shifts its sorted points by p;
// the wake is the shortest gap of that cycle.
inline std::vector<Wake> wakes_of_denominator(int q)
{
    if (q < 2 || q > kMaxWakeDenominator) throw std::invalid_argument("wakes_of_denominator: q out of range");
    const std::uint64_t M = (std::uint64_t(1) << q) - 1;
    std::vector<char> seen(M, 0);
    std::vector<Wake> out;
    for (std::uint64_t n = 1; n < M; ++n) {
        if (seen[n]) continue;
        std::vector<std::uint64_t> cyc;
        std::uint64_t x = n;
        do {
            seen[x] = 1;
            cyc.push_back(x);
            x = (2 * x) % M;
        } while (x != n);
        if (static_cast<int>(cyc.size()) != q) continue;
        std::vector<std::uint64_t> sorted = cyc;
        std::sort(sorted.begin(), sorted.end());
        auto index_of = [&](std::uint64_t v) {
            return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
        };
        const int shift = index_of((2 * sorted[0]) % M);
        bool rotation = true;
        for (int i = 0; i < q && rotation; ++i) rotation = index_of((2 * sorted[i]) % M) == (i + shift) % q;
        if (!rotation || std::gcd(shift, q) != 1) continue;
        int best = 0;
        std::uint64_t gap = M;
        for (int i = 0; i + 1 < q; ++i)
            if (sorted[i + 1] - sorted[i] < gap) { gap = sorted[i + 1] - sorted[i]; best = i; }
        Wake w;
        w.p = shift;
        w.q = q;
        w.lower = RationalAngle(static_cast<std::int64_t>(sorted[best]), static_cast<std::int64_t>(M));
        w.upper = RationalAngle(static_cast<std::int64_t>(sorted[best + 1]), static_cast<std::int64_t>(M));
        out.push_back(w);
    }
    std::sort(out.begin(), out.end(), [](const Wake& a, const Wake& b) { return a.p < b.p; });
    return out;
}

inline Wake wake(int p, int q)
{
    if (q < 2 || p < 1 || p >= q || std::gcd(p, q) != 1) throw std::invalid_argument("wake: need 0 < p < q, gcd 1");
    for (const auto& w : wakes_of_denominator(q))
        if (w.p == p) return w;
    throw std::logic_error("wake: rotation cycle not found");
}

// Primary limb whose wake contains theta, searching q <= preperiod + period.
inline std::optional<Wake> limb_of(const RationalAngle& theta, int q_max = 0)
{
    if (q_max <= 0) {
        const auto t = orbit_type(theta);
        q_max = t.preperiod + t.period;
    }
    q_max = std::min(q_max, kMaxWakeDenominator);
    for (int q = 2; q <= q_max; ++q)
        for (const auto& w : wakes_of_denominator(q))
            if (w.contains(theta)) return w;
    return std::nullopt;
}

// True when -theta_q lies in the wake of the limb containing theta_p; such matings are obstructed.
inline bool conjugate_limbs(const RationalAngle& theta_p, const RationalAngle& theta_q)
{
    const auto w = limb_of(theta_p);
    return w && w->contains(theta_q.negated());
}

} // namespace slowmate
