#include <gtest/gtest.h>

#include "slowmate/mating.hpp"

using namespace slowmate;

namespace {


// R_t with R1 = e
Real radius(Real t) { return std::exp(std::exp2(1.0L - t)); }

// Basilica self-mating by hand: critP, critQ, one, x1 = -1/R_t, y1 = -R_t on [0,1].
PathState basilica_window(int N)
{
    PathState s(2, N, ThreePointPins{1, 0, 2});
    auto constant = [&](SpherePoint z) { return std::vector<SpherePoint>(N + 1, z); };
    std::vector<SpherePoint> x(N + 1), y(N + 1);
    for (int j = 0; j <= N; ++j) {
        const Real t = Real(j) / N;
        x[j] = SpherePoint(Complex(-1.0L / radius(t)));
        y[j] = SpherePoint(Complex(-radius(t)));
    }
    s.add_point(constant(Complex(0.0L)), 3);
    s.add_point(constant(SpherePoint::infinity()), 4);
    s.add_point(constant(Complex(1.0L)), 2);
    s.add_point(x, 0);
    s.add_point(y, 1);
    return s;
}

MatingSpec rabbit_basilica(int depth = 0)
{
    MatingSpec s;
    s.p = side_from_parameter(Complex(0.0L, 1.0L), 1, 2);
    s.q = side_from_parameter(Complex(-1.0L), 0, 2);
    s.tracked_depth = depth;
    return s;
}

Complex value(const SpherePoint& p) { return p.value(); }

} // namespace

TEST(PathState, RejectsInconsistentSetup)
{
    PathState s(2, 4, ThreePointPins{0, 1, 2});
    EXPECT_THROW(s.add_point(std::vector<SpherePoint>(3), 0), std::invalid_argument);
    s.add_point(std::vector<SpherePoint>(5, SpherePoint::infinity()), 0);
    s.add_point(std::vector<SpherePoint>(5, Complex(0.0L)), 1);
    EXPECT_THROW(s.validate(), std::invalid_argument); // pin 'one' missing
    s.add_point(std::vector<SpherePoint>(5, Complex(1.0L)), 7);
    EXPECT_THROW(s.validate(), std::invalid_argument); // image out of range
    EXPECT_THROW(PathState(1, 4, MonicPins{}), std::invalid_argument);
}

TEST(Pullback, BasilicaExplicitSolutionContinues)
{
    const int N = 64;
    PathState s = basilica_window(N);
    StepStats st;
    for (int n = 1; n <= 3; ++n) {
        s = pullback_step(s, EngineOptions{}, st);
        for (int j = 0; j <= N; ++j) {
            const Real t = n + Real(j) / N;
            EXPECT_LT(std::abs(value(s.samples(3)[j]) + 1.0L / radius(t)), 1e-12L) << n << " " << j;
            EXPECT_LT(std::abs(value(s.samples(4)[j]) + radius(t)), 1e-12L * radius(t)) << n << " " << j;
        }
    }
    EXPECT_LT(st.max_reconstruction, 1e-12);
    EXPECT_EQ(s.time(), 3);
}

TEST(Pullback, FixedConfigurationIsUnchanged)
{
    // z^2 - 1 with marked points c = -1 and f(c) = 0
    PathState s(2, 16, MonicPins{0});
    s.add_point(std::vector<SpherePoint>(17, Complex(-1.0L)), 1);
    s.add_point(std::vector<SpherePoint>(17, Complex(0.0L)), 0);
    StepStats st;
    const PathState next = pullback_step(s, EngineOptions{}, st);
    for (std::size_t i = 0; i < 2; ++i)
        for (int j = 0; j <= 16; ++j) EXPECT_LT(chordal_distance(next.samples(i)[j], s.samples(i)[j]), 1e-15);
    EXPECT_DOUBLE_EQ(convergence_measure(next), 0.0);
    const RunResult r = run(s, EngineOptions{});
    EXPECT_EQ(r.status, Status::Converged);
    EXPECT_EQ(r.iterations, 1);
}

TEST(Pullback, PinsStayBitIdentical)
{
    PathState s = mating_init(rabbit_basilica(3));
    const PathState s0 = s;
    StepStats st;
    for (int n = 0; n < 10; ++n) {
        s = pullback_step(s, EngineOptions{}, st);
        for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.samples(i), s0.samples(i));
    }
    for (const auto& z : s.samples(0)) EXPECT_EQ(z, SpherePoint(Complex(0.0L)));
    for (const auto& z : s.samples(1)) EXPECT_TRUE(z.is_infinity());
    for (const auto& z : s.samples(2)) EXPECT_EQ(z, SpherePoint(Complex(1.0L)));
}

TEST(Pullback, WindowInvariantsAndReconstruction)
{
    PathState s = mating_init(rabbit_basilica(3));
    StepStats st;
    for (int n = 0; n < 20; ++n) {
        s = pullback_step(s, EngineOptions{}, st);
        for (std::size_t i = 0; i < s.size(); ++i) {
            // seamless windows and small steps
            for (int j = 0; j < s.steps(); ++j) EXPECT_LT(chordal_distance(s.samples(i)[j], s.samples(i)[j + 1]), 0.5);
        }
        for (int j = 0; j <= s.steps(); ++j) {
            EXPECT_GT(chordal_distance(s.samples(0)[j], s.samples(1)[j]), kTripleSeparation);
        }
    }
    EXPECT_LT(st.max_reconstruction, 1e-9);
}

TEST(Pullback, ThreadCountDoesNotChangeResults)
{
    const PathState init = mating_init(rabbit_basilica(4));
    EngineOptions one, many;
    many.threads = 4;
    PathState a = init, b = init;
    StepStats sa, sb;
    for (int n = 0; n < 8; ++n) {
        a = pullback_step(a, one, sa);
        b = pullback_step(b, many, sb);
    }
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.samples(i), b.samples(i)) << i;
    EXPECT_EQ(sa.subdivisions, sb.subdivisions);
    EXPECT_EQ(sa.max_ambiguity, sb.max_ambiguity);
}

TEST(Pullback, StrictBranchThresholdFailsTheHomotopy)
{
    EngineOptions opt;
    opt.rho = 0.0;
    opt.max_depth = 4;
    const RunResult r = run(mating_init(rabbit_basilica()), opt);
    EXPECT_EQ(r.status, Status::HomotopyFailure);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Collisions, Examples)
{
    const Partition p = detect_collisions({Complex(-2.0L), Complex(2.0L), Complex(2.0L + 1e-9L)});
    EXPECT_EQ(p, (Partition{{0}, {1, 2}}));
    EXPECT_EQ(detect_collisions({Complex(0.0L), Complex(1.0L), SpherePoint::infinity()}), (Partition{{0}, {1}, {2}}));
    EXPECT_EQ(detect_collisions({Complex(0.0L), Complex(2e-7L), Complex(4e-7L)}, 1e-6), (Partition{{0, 1, 2}}));
    // a single-linkage chain whose ends sit more than tol apart is flagged, not merged silently
    EXPECT_THROW(detect_collisions({Complex(0.0L), Complex(4e-7L), Complex(8e-7L)}, 1e-6), AmbiguousClustering);
    EXPECT_EQ(detect_collisions({SpherePoint::infinity(), Complex(1e9L), Complex(0.5L)}, 1e-6), (Partition{{0, 1}, {2}}));
}

TEST(Collisions, AmbiguousBandThrows)
{
    EXPECT_THROW(detect_collisions({Complex(0.0L), Complex(5e-6L)}, 1e-6), AmbiguousClustering);
    EXPECT_NO_THROW(detect_collisions({Complex(0.0L), Complex(6e-5L)}, 1e-6));
}

TEST(Cycles, SyntheticHistories)
{
    EngineOptions opt;
    auto cfg = [](Complex z) { return std::vector<SpherePoint>{Complex(0.0L), SpherePoint::infinity(), z}; };
    const std::vector<Complex> loop{Complex(0.5L), Complex(0.0L, 0.5L), Complex(-0.5L), Complex(0.0L, -0.5L)};

    std::deque<std::vector<SpherePoint>> four;
    for (int n = 0; n < 9; ++n) four.push_back(cfg(loop[n % 4]));
    EXPECT_EQ(detect_cycle(four, opt), 4);

    std::deque<std::vector<SpherePoint>> two;
    for (int n = 0; n < 9; ++n) two.push_back(cfg(loop[n % 2]));
    EXPECT_EQ(detect_cycle(two, opt), 2);

    // a fixed point is not a cycle
    std::deque<std::vector<SpherePoint>> still(9, cfg(Complex(0.3L)));
    EXPECT_EQ(detect_cycle(still, opt), 0);

    // slow spiral into a fixed point, quarter turn per step
    std::deque<std::vector<SpherePoint>> spiral;
    Complex z = 1e-6L;
    for (int n = 0; n < 9; ++n) {
        spiral.push_back(cfg(Complex(0.3L) + z));
        z *= Complex(0.0L, 0.9L);
    }
    EXPECT_EQ(detect_cycle(spiral, opt), 0);

    // too short to tell
    std::deque<std::vector<SpherePoint>> brief{cfg(loop[0]), cfg(loop[1])};
    EXPECT_EQ(detect_cycle(brief, opt), 0);
}

TEST(Run, BasilicaDegenerates)
{
    const RunResult r = run(basilica_window(64), EngineOptions{});
    EXPECT_EQ(r.status, Status::Degenerate);
    EXPECT_FALSE(r.map.has_value());
    // the critical values f(0) = x1 and f(infinity) = y1 both approach -1
    EXPECT_LT(chordal_distance(r.limits[3], Complex(-1.0L)), 1e-6);
    EXPECT_LT(chordal_distance(r.limits[4], Complex(-1.0L)), 1e-6);
    // the measure stays away from zero until degeneration
    for (double m : r.measures) EXPECT_GT(m, 1e-9);
}

TEST(Run, ObserverSeesEveryUnit)
{
    EngineOptions opt;
    opt.max_iter = 5;
    int calls = 0, last = 0;
    const RunResult r = run(mating_init(rabbit_basilica()), opt, [&](const PathState& s, int it, double m) {
        ++calls;
        last = it;
        EXPECT_EQ(s.time(), it);
        EXPECT_GE(m, 0.0);
    });
    EXPECT_EQ(r.status, Status::MaxIter);
    EXPECT_EQ(calls, 5);
    EXPECT_EQ(last, 5);
    EXPECT_EQ(r.measures.size(), 5u);
}

TEST(Run, StatusNames)
{
    EXPECT_STREQ(to_string(Status::Converged), "Converged");
    EXPECT_STREQ(to_string(Status::CycleDetected), "CycleDetected");
    EXPECT_STREQ(to_string(Status::HomotopyFailure), "HomotopyFailure");
}
