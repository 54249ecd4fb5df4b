#pragma once

#include <map>
#include <vector>

#include "rational_angle.hpp"

namespace slowmate {

struct AngleOrbit {
    std::vector<RationalAngle> angles; // theta, 2 theta, ... up to the first repeat (exclusive)
    int preperiod = 0;
    int period = 0;
};

inline AngleOrbit angle_orbit(const RationalAngle& theta)
{
    AngleOrbit out;
    std::map<RationalAngle, int> seen;
    RationalAngle a = theta;
    while (!seen.count(a)) {
        seen.emplace(a, static_cast<int>(out.angles.size()));
        out.angles.push_back(a);
        a = a.doubled();
    }
    out.preperiod = seen[a];
    out.period = static_cast<int>(out.angles.size()) - out.preperiod;
    return out;
}

struct OrbitType {
    int preperiod = 0;
    int period = 0;
    friend bool operator==(const OrbitType&, const OrbitType&) = default;
};

// Preperiod and period read off the denominator 2^k m, m odd.
inline OrbitType orbit_type(const RationalAngle& theta)
{
    BigInt m = theta.den();
    int k = 0;
    while (m % 2 == 0) { m /= 2; ++k; }
    int p = 1;
    if (m > 1) {
        BigInt r = BigInt(2) % m;
        while (r != 1) { r = (r * 2) % m; ++p; }
    }
    return {k, p};
}

} // namespace slowmate
