// Mates the rabbit with the basilica and prints the limiting map.
#include <iostream>

#include "slowmate/mating.hpp"

int main()
{
    using namespace slowmate;
    MatingSpec spec;
    spec.p = side_from_angle(RationalAngle(1, 7));
    spec.q = side_from_angle(RationalAngle(1, 3));
    const MatingResult r = mating_run(spec);
    std::cout << to_string(r.run.status) << " after " << r.run.iterations << " units\n";
    if (r.rescaled) {
        const auto& k = r.rescaled->coefficients();
        std::cout << "f(z) = (" << k[0] / k[0] << " z^2 + " << k[1] / k[0] << ") / (" << k[2] / k[0] << " z^2 + "
                  << k[3] / k[0] << ")\n";
    }
}
