#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slowmate {

struct DegenerateTriple : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// nearest and next-nearest root branches are too close to tell apart
struct BranchAmbiguity : std::runtime_error {
    double ratio;
    BranchAmbiguity(const std::string& what, double r) : std::runtime_error(what), ratio(r) {}
};

struct AmbiguousClustering : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CyclicClass : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConjugateLimbs : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RayTraceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PathTooClose : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace slowmate
