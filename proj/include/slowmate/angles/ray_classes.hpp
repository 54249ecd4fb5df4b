#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "../core/errors.hpp"
#include "landing.hpp"
#include "orbit.hpp"

namespace slowmate {

enum class Side { P, Q };

inline Side other(Side s) { return s == Side::P ? Side::Q : Side::P; }

struct TaggedAngle {
    Side side;
    RationalAngle angle;

    friend bool operator==(const TaggedAngle&, const TaggedAngle&) = default;
    friend bool operator<(const TaggedAngle& a, const TaggedAngle& b)
    {
        if (a.side != b.side) return a.side < b.side;
        return a.angle < b.angle;
    }
};

using RayClassPartition = std::vector<std::vector<TaggedAngle>>;

inline constexpr int kMaxClassDenominatorBits = 22;

namespace detail {

// every angle with the given preperiod and period
inline std::vector<RationalAngle> angles_of_type(OrbitType t)
{
    if (t.preperiod + t.period > kMaxClassDenominatorBits) throw std::invalid_argument("ray_classes: denominator too large");
    const std::int64_t den = (std::int64_t(1) << t.preperiod) * ((std::int64_t(1) << t.period) - 1);
    std::vector<RationalAngle> out;
    for (std::int64_t j = 0; j < den; ++j) {
        RationalAngle a(j, den);
        if (orbit_type(a) == t) out.push_back(a);
    }
    return out;
}

} // namespace detail

// Closure of (P, a) ~ (Q, -a) together with same-side landing, restricted to the given angles.
// Throws CyclicClass when the landing graph of some class contains a loop, which happens
// exactly for conjugate-limb pairs where the mating is obstructed.
inline RayClassPartition ray_classes(const RationalAngle& theta_p, const RationalAngle& theta_q,
                                     const std::vector<TaggedAngle>& angles)
{
    // landing group on one side, as the smallest angle of the group
    std::map<TaggedAngle, RationalAngle> group_of;
    std::map<std::pair<int, std::pair<int, int>>, std::vector<RationalAngle>> candidates;
    auto group = [&](const TaggedAngle& ta) -> std::vector<RationalAngle> {
        const RationalAngle& tc = ta.side == Side::P ? theta_p : theta_q;
        const OrbitType t = orbit_type(ta.angle);
        auto key = std::make_pair(int(ta.side), std::make_pair(t.preperiod, t.period));
        auto& cands = candidates[key];
        if (cands.empty()) cands = detail::angles_of_type(t);
        std::vector<RationalAngle> g;
        for (const auto& b : cands)
            if (lands_together(ta.angle, b, tc)) g.push_back(b);
        return g;
    };

    // breadth-first closure; nodes are tagged angles, edges either landing or conjugation
    std::map<TaggedAngle, int> id;
    std::vector<TaggedAngle> nodes;
    std::vector<int> parent;
    auto add = [&](const TaggedAngle& t) {
        auto [it, fresh] = id.emplace(t, static_cast<int>(nodes.size()));
        if (fresh) { nodes.push_back(t); parent.push_back(it->second); }
        return std::make_pair(it->second, fresh);
    };
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

    std::vector<int> queue;
    for (const auto& t : angles) {
        auto [i, fresh] = add(t);
        if (fresh) queue.push_back(i);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const TaggedAngle t = nodes[queue[head]];
        if (group_of.count(t)) continue;
        const auto g = group(t);
        for (const auto& b : g) {
            TaggedAngle tb{t.side, b};
            group_of[tb] = g.front();
            auto [j, fresh] = add(tb);
            unite(queue[head], j);
            if (fresh) queue.push_back(j);
        }
        for (const auto& b : g) {
            auto [k, fresh] = add({other(t.side), b.negated()});
            unite(queue[head], k);
            if (fresh) queue.push_back(k);
        }
    }

    // loop check: per component, landing groups are vertices and P-angles are edges
    std::map<int, std::set<std::pair<int, RationalAngle>>> verts;
    std::map<int, int> edges;
    for (const auto& [t, g] : group_of) {
        const int root = find(id[t]);
        verts[root].insert({int(t.side), g});
        if (t.side == Side::P) ++edges[root];
    }
    for (const auto& [root, v] : verts)
        if (edges[root] >= static_cast<int>(v.size()))
            throw CyclicClass("ray_classes: landing graph has a loop (conjugate limbs)");

    std::map<int, std::vector<TaggedAngle>> by_root;
    for (const auto& t : angles) by_root[find(id[t])].push_back(t);
    RayClassPartition out;
    for (auto& [root, cls] : by_root) {
        std::sort(cls.begin(), cls.end());
        cls.erase(std::unique(cls.begin(), cls.end()), cls.end());
        out.push_back(cls);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace slowmate
