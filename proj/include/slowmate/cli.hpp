#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capture.hpp"
#include "entropy.hpp"
#include "mating.hpp"
#include "render.hpp"
#include "spider.hpp"

namespace slowmate::cli {

using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kDegenerate = 2, kCycle = 3, kStalled = 4 };

inline int exit_code(Status s)
{
    switch (s) {
    case Status::Converged: return kOk;
    case Status::Degenerate: return kDegenerate;
    case Status::CycleDetected: return kCycle;
    default: return kStalled;
    }
}

inline json point_json(const SpherePoint& p)
{
    if (p.is_infinity()) return "inf";
    return json::array({static_cast<double>(p.value().real()), static_cast<double>(p.value().imag())});
}

inline json complex_json(Complex z) { return point_json(SpherePoint(z)); }

inline json mobius_json(const MobiusMap& m)
{
    // scaled so the first nonzero coefficient is 1
    const auto& k = m.coefficients();
    const Complex lead = k[0] != Complex(0.0L) ? k[0] : k[1];
    json a = json::array();
    for (const auto& c : k) a.push_back(complex_json(c / lead));
    return a;
}

inline Complex parse_complex(const std::string& s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("expected re,im but got '" + s + "'");
    return {std::stold(s.substr(0, comma)), std::stold(s.substr(comma + 1))};
}

struct EngineFlags {
    int steps = 64, k_max = 8, max_iter = 200;
    double tol = 1e-10, tol_degen = 1e-8, tol_collide = 1e-6, tol_cycle = 1e-6, rho = 0.75;
    unsigned threads = 1;

    void attach(CLI::App* app)
    {
        app->add_option("--steps", steps, "samples per unit window")->check(CLI::PositiveNumber);
        app->add_option("--tol", tol, "convergence tolerance");
        app->add_option("--tol-degen", tol_degen);
        app->add_option("--tol-collide", tol_collide);
        app->add_option("--tol-cycle", tol_cycle);
        app->add_option("--k-max", k_max, "longest cycle to detect");
        app->add_option("--max-iter", max_iter)->check(CLI::PositiveNumber);
        app->add_option("--rho", rho, "branch ambiguity threshold");
        app->add_option("--threads", threads);
    }

    EngineOptions options() const
    {
        EngineOptions o;
        o.steps = steps;
        o.tol = tol;
        o.tol_degen = tol_degen;
        o.tol_collide = tol_collide;
        o.tol_cycle = tol_cycle;
        o.k_max = k_max;
        o.max_iter = max_iter;
        o.rho = rho;
        o.threads = threads;
        return o;
    }

    json echo() const
    {
        return {{"steps", steps}, {"tol", tol}, {"tol_degen", tol_degen}, {"tol_collide", tol_collide},
                {"tol_cycle", tol_cycle}, {"k_max", k_max}, {"max_iter", max_iter}, {"rho", rho}};
    }
};

// One side given either by an angle or by an explicit parameter with its orbit type.
struct SideFlags {
    std::string angle, param, type;
    std::optional<double> re, im;

    void attach(CLI::App* app, const std::string& name)
    {
        app->add_option("--" + name + ",--theta-" + name, angle, "external angle p/q");
        app->add_option("--" + name + "-param", param, "explicit parameter re,im");
        app->add_option("--" + name + "-re", re);
        app->add_option("--" + name + "-im", im);
        app->add_option("--" + name + "-type", type, "preperiod,period for an explicit parameter");
    }

    PolynomialSide build(const EngineOptions& spider_opt) const
    {
        if (!angle.empty()) return side_from_angle(RationalAngle::parse(angle), spider_opt);
        std::string param = this->param;
        if (param.empty() && (re || im)) param = std::to_string(re.value_or(0.0)) + "," + std::to_string(im.value_or(0.0));
        if (param.empty() || type.empty()) throw std::invalid_argument("need an angle or a parameter with its type");
        const auto comma = type.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("type must be preperiod,period");
        return side_from_parameter(parse_complex(param), std::stoi(type.substr(0, comma)), std::stoi(type.substr(comma + 1)));
    }

    json echo() const
    {
        json j;
        if (!angle.empty()) j["angle"] = angle;
        if (!param.empty()) j["param"] = param;
        if (re) j["re"] = *re;
        if (im) j["im"] = *im;
        if (!type.empty()) j["type"] = type;
        return j;
    }
};

inline void write_trace_row(std::ostream& os, const PathState& s, const std::vector<PointLabel>* labels)
{
    for (std::size_t i = 0; i < s.marked_count(); ++i) {
        const SpherePoint z = s.samples(i).back();
        os << s.time() + 1 << "," << (labels ? (*labels)[i].name() : "x" + std::to_string(i + 1)) << ",";
        if (z.is_infinity()) os << "inf,inf\n";
        else os << static_cast<double>(z.value().real()) << "," << static_cast<double>(z.value().imag()) << "\n";
    }
}

inline json run_json(const RunResult& r, const std::vector<PointLabel>* labels)
{
    json j;
    j["status"] = to_string(r.status);
    j["iterations"] = r.iterations;
    j["settle_units"] = r.settle_units;
    if (r.status == Status::CycleDetected) j["cycle_period"] = r.cycle_period;
    if (r.map) {
        const bool three = std::holds_alternative<ThreePointPins>(r.state.normalization());
        j["map"] = {{"normalization", three ? "f(0), f(infinity), f(1) pinned" : "monic"},
                    {"degree", r.map->degree},
                    {"mobius", mobius_json(r.map->m)}};
    }
    auto name = [&](std::size_t i) { return labels ? (*labels)[i].name() : "x" + std::to_string(i + 1); };
    json pts = json::array();
    for (std::size_t i = 0; i < r.limits.size(); ++i) pts.push_back({{"name", name(i)}, {"limit", point_json(r.limits[i])}});
    j["marked_points"] = pts;
    if (r.collisions) {
        json c = json::array();
        for (const auto& g : *r.collisions) {
            json names = json::array();
            for (auto i : g) names.push_back(name(i));
            c.push_back(names);
        }
        j["collisions"] = c;
    }
    j["diagnostics"] = {{"convergence", r.measures},
                        {"max_ambiguity", r.stats.max_ambiguity},
                        {"max_reconstruction", r.stats.max_reconstruction},
                        {"subdivisions", r.stats.subdivisions},
                        {"warnings", r.warnings}};
    return j;
}

// Parses argv, runs one subcommand and prints a JSON envelope. Returns the process exit code.
inline int dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"slow mating: spiders, matings, captures, core entropy and frame rendering"};
    app.require_subcommand(1);
    EngineFlags eng;
    std::string trace_path;

    auto* spider = app.add_subcommand("spider", "parameter of z^2 + c from an external angle");
    std::string spider_angle;
    spider->add_option("--angle,--theta", spider_angle, "external angle p/q")->required();
    eng.attach(spider);
    spider->add_option("--trace,--emit-trace", trace_path, "CSV of marked points per unit");

    auto* mate = app.add_subcommand("mate", "slow mating of two postcritically finite polynomials");
    SideFlags fp, fq;
    fp.attach(mate, "p");
    fq.attach(mate, "q");
    double r1 = std::exp(2.0);
    bool force = false, large_r1 = false;
    mate->add_option("--r1", r1, "equator radius at t = 1");
    mate->add_flag("--force", force, "run conjugate-limb pairs anyway");
    mate->add_flag("--large-r1", large_r1, "drop O(1/R^2) corrections (R1 >= 1e10)");
    eng.attach(mate);
    mate->add_option("--trace,--emit-trace", trace_path, "CSV of marked points per unit");

    auto* capture = app.add_subcommand("capture", "precapture path along an external ray");
    SideFlags fb;
    fb.attach(capture, "base");
    std::string capture_angle;
    capture->add_option("--angle,--theta-ray", capture_angle, "ray angle p/q")->required();
    int ray_depth = RayOptions{}.depth;
    std::string ray_path;
    capture->add_option("--depth", ray_depth, "ray tracing depth (potential halvings)");
    capture->add_option("--emit-ray", ray_path, "CSV of the traced ray");
    eng.attach(capture);
    capture->add_option("--trace,--emit-trace", trace_path, "CSV of marked points per unit");

    auto* entropy = app.add_subcommand("entropy", "core entropy from an angle or a transition matrix");
    std::string entropy_angle, matrix_path;
    entropy->add_option("--angle,--theta", entropy_angle, "external angle p/q");
    entropy->add_option("--matrix", matrix_path, "JSON file {\"n\":..,\"rows\":[[..]..]}");

    auto* render = app.add_subcommand("render", "PPM frames of a mating with tracked points");
    SideFlags rp, rq;
    rp.attach(render, "p");
    rq.attach(render, "q");
    int depth = 6;
    FrameSpec fs;
    std::string size = "800x800", center = "0,0", out_dir = "frames";
    render->add_option("--depth", depth, "beta-tree depth per side");
    render->add_option("--fps", fs.fps);
    render->add_option("--units", fs.units);
    render->add_option("--size", size, "WxH");
    render->add_option("--center", center, "re,im");
    render->add_option("--half-width", fs.half_width);
    render->add_option("--out", out_dir, "output directory");
    render->add_flag("--force", force);
    eng.attach(render);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    std::ofstream trace;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        if (!trace) { err << "cannot open " << trace_path << "\n"; return kUsage; }
        trace << "t,point,re,im\n";
        trace.precision(17);
    }
    const EngineOptions opt = eng.options();
    json env;
    int code = kOk;
    try {
        if (*spider) {
            const RationalAngle theta = RationalAngle::parse(spider_angle);
            env["command"] = "spider";
            env["config"] = {{"angle", theta.str()}, {"engine", eng.echo()}};
            Observer obs;
            if (trace.is_open()) obs = [&](const PathState& s, int, double) { write_trace_row(trace, s, nullptr); };
            const SpiderResult r = spider_run(theta, opt, obs);
            json body = run_json(r.run, nullptr);
            env.update(body);
            if (r.c) {
                env["c"] = complex_json(*r.c);
                if (r.refined) env["c_refined"] = complex_json(*r.refined);
                env["preperiod"] = r.preperiod;
                env["period"] = r.period;
                env["residual"] = r.residual;
            }
            code = exit_code(r.run.status);
        } else if (*mate) {
            env["command"] = "mate";
            env["config"] = {{"p", fp.echo()}, {"q", fq.echo()}, {"r1", r1}, {"force", force},
                             {"large_r1", large_r1}, {"engine", eng.echo()}};
            MatingSpec s;
            s.p = fp.build(EngineOptions{});
            s.q = fq.build(EngineOptions{});
            s.r1 = r1;
            s.force = force;
            s.large_r1 = large_r1;
            s.engine = opt;
            MatingLayout lay;
            Observer obs;
            if (trace.is_open()) obs = [&](const PathState& st, int, double) { write_trace_row(trace, st, &lay.labels); };
            lay = MatingLayout{};
            mating_init(s, &lay); // fixes the labels for the trace before running
            const MatingResult r = mating_run(s, obs);
            env.update(run_json(r.run, &r.layout.labels));
            if (r.rescaled) {
                env["map_rescaled"] = {{"normalization", "f(infinity)=1"}, {"mobius", mobius_json(*r.rescaled)}};
                for (std::size_t i = 0; i < r.run.limits.size(); ++i)
                    env["marked_points"][i]["rescaled"] = point_json(*r.rescaled_limit(i));
            }
            if (r.oracle_match) env["oracle_match"] = *r.oracle_match;
            for (const auto& w : r.warnings) env["diagnostics"]["warnings"].push_back(w);
            code = exit_code(r.run.status);
        } else if (*capture) {
            env["command"] = "capture";
            env["config"] = {{"base", fb.echo()}, {"angle", capture_angle}, {"depth", ray_depth}, {"engine", eng.echo()}};
            CaptureSpec s;
            s.p = fb.build(EngineOptions{});
            s.theta = RationalAngle::parse(capture_angle);
            s.ray.depth = ray_depth;
            s.engine = opt;
            MatingLayout lay;
            capture_init(s, &lay);
            Observer obs;
            if (trace.is_open()) obs = [&](const PathState& st, int, double) { write_trace_row(trace, st, &lay.labels); };
            const CaptureResult r = capture_run(s, obs);
            env.update(run_json(r.run, &r.layout.labels));
            env["landing"] = complex_json(r.ray.landing);
            if (!ray_path.empty()) {
                std::ofstream rs(ray_path);
                if (!rs) throw IoError("cannot open " + ray_path);
                rs.precision(17);
                rs << "index,re,im\n";
                for (std::size_t k = 0; k < r.ray.points.size(); ++k)
                    rs << k << "," << static_cast<double>(r.ray.points[k].real()) << "," << static_cast<double>(r.ray.points[k].imag()) << "\n";
            }
            code = exit_code(r.run.status);
        } else if (*entropy) {
            env["command"] = "entropy";
            if (!entropy_angle.empty() == !matrix_path.empty()) throw std::invalid_argument("give exactly one of --angle, --matrix");
            if (!entropy_angle.empty()) {
                const RationalAngle theta = RationalAngle::parse(entropy_angle);
                env["config"] = {{"angle", theta.str()}};
                const EntropyResult r = core_entropy(theta);
                env["lambda"] = r.lambda;
                env["entropy"] = r.entropy;
                env["reducible"] = r.reducible;
                env["matrix"] = r.matrix.rows();
            } else {
                std::ifstream is(matrix_path);
                if (!is) throw IoError("cannot open " + matrix_path);
                const json mj = json::parse(is);
                const auto rows = mj.at("rows").get<std::vector<std::vector<std::int64_t>>>();
                if (mj.contains("n") && mj.at("n").get<std::size_t>() != rows.size())
                    throw std::invalid_argument("matrix: n does not match the row count");
                const NonnegMatrix m(rows);
                env["config"] = {{"matrix", mj}};
                const double l = leading_eigenvalue(m);
                env["lambda"] = l;
                env["entropy"] = std::log(std::max(l, 1.0));
                env["reducible"] = !irreducible(m);
            }
            env["status"] = "Converged";
        } else if (*render) {
            env["command"] = "render";
            const auto x = size.find('x');
            if (x == std::string::npos) throw std::invalid_argument("size must be WxH");
            fs.width = std::stoi(size.substr(0, x));
            fs.height = std::stoi(size.substr(x + 1));
            fs.center = parse_complex(center);
            fs.out_dir = out_dir;
            env["config"] = {{"p", rp.echo()}, {"q", rq.echo()}, {"depth", depth}, {"fps", fs.fps},
                             {"units", fs.units}, {"size", size}, {"center", center},
                             {"half_width", fs.half_width}, {"out", out_dir}, {"engine", eng.echo()}};
            MatingSpec s;
            s.p = rp.build(EngineOptions{});
            s.q = rq.build(EngineOptions{});
            s.force = force;
            s.tracked_depth = depth;
            s.engine = opt;
            const RenderResult r = emit_frames(s, fs);
            env["status"] = to_string(r.run.status);
            env["iterations"] = r.run.iterations;
            env["frames"] = r.frames;
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kStalled;
    } catch (const ConjugateLimbs& e) {
        err << "error: " << e.what() << " (pass --force to run anyway)\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NonConvergent& e) {
        err << "error: " << e.what() << "\n";
        return kStalled;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kStalled;
    }
    out << env.dump(2) << "\n";
    return code;
}

} // namespace slowmate::cli
