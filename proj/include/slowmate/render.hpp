#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "mating.hpp"

namespace slowmate {

struct FrameSpec {
    int width = 800, height = 800;
    int fps = 25;
    int units = 30;          // frames cover t in [0, units]
    Complex center = 0.0L;
    double half_width = 2.5;
    std::filesystem::path out_dir = "frames";
};

using Rgb = std::array<std::uint8_t, 3>;

struct Dot {
    SpherePoint z;
    Rgb color;
};

inline constexpr Rgb kSideP{40, 90, 255};
inline constexpr Rgb kSideQ{255, 60, 40};
inline constexpr Rgb kMarked{255, 255, 255};

// 1-pixel dots, colors added with saturation; y grows upward in the plane
inline std::vector<std::uint8_t> rasterize(const std::vector<Dot>& dots, const FrameSpec& f)
{
    std::vector<std::uint8_t> img(std::size_t(f.width) * f.height * 3, 0);
    const double hh = f.half_width * f.height / f.width;
    const double x0 = static_cast<double>(f.center.real()) - f.half_width;
    const double y1 = static_cast<double>(f.center.imag()) + hh;
    for (const auto& d : dots) {
        if (d.z.is_infinity()) continue;
        const double px = (static_cast<double>(d.z.value().real()) - x0) / (2.0 * f.half_width) * f.width;
        const double py = (y1 - static_cast<double>(d.z.value().imag())) / (2.0 * hh) * f.height;
        if (!(px >= 0.0 && px < f.width && py >= 0.0 && py < f.height)) continue;
        const std::size_t at = (std::size_t(py) * f.width + std::size_t(px)) * 3;
        for (int k = 0; k < 3; ++k) img[at + k] = static_cast<std::uint8_t>(std::min(255, img[at + k] + d.color[k]));
    }
    return img;
}

inline void write_ppm(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& rgb)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string());
    os << "P6\n" << width << " " << height << "\n255\n";
    os.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!os) throw IoError("write failed for " + path.string());
}

inline std::string frame_name(int k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%05d.ppm", k);
    return buf;
}

struct RenderResult {
    int frames = 0;
    RunResult run;
    MatingLayout layout;
    std::vector<SpherePoint> final_points; // every point, marked and tracked, at t = units
};

// Runs the mating with beta-trees attached and writes fps frames per unit window, sampling
// the stored window by linear interpolation. Once the run stops the last window is held.
inline RenderResult emit_frames(MatingSpec spec, const FrameSpec& f)
{
    if (f.width < 16 || f.height < 16 || f.fps <= 0 || f.units <= 0 || !(f.half_width > 0.0))
        throw std::invalid_argument("emit_frames: bad frame spec");
    if (f.fps > spec.engine.steps) throw std::invalid_argument("emit_frames: more frames per unit than samples");
    std::error_code ec;
    std::filesystem::create_directories(f.out_dir, ec);
    if (ec) throw IoError("cannot create " + f.out_dir.string());

    RenderResult out;
    PathState state = mating_init(spec, &out.layout);
    auto dots_at = [&](const PathState& s, double frac) {
        std::vector<Dot> d;
        d.reserve(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Rgb col = !s.tracked(i) ? kMarked : out.layout.labels[i].side == Side::P ? kSideP : kSideQ;
            d.push_back({s.at(i, frac), col});
        }
        // marked points on top: draw them last so saturation keeps them white
        std::stable_partition(d.begin(), d.end(), [](const Dot& x) { return x.color != kMarked; });
        return d;
    };
    auto emit_window = [&](const PathState& s) {
        for (int k = 0; k < f.fps; ++k)
            write_ppm(f.out_dir / frame_name(out.frames++), f.width, f.height,
                      rasterize(dots_at(s, double(k) / f.fps), f));
    };

    emit_window(state);
    spec.engine.max_iter = f.units - 1;
    PathState last = state;
    out.run = run(state, spec.engine, [&](const PathState& s, int, double) {
        emit_window(s);
        last = s;
    });
    // hold the final window after the run stops early
    for (int u = last.time() + 1; u < f.units; ++u) {
        PathState held = last;
        for (std::size_t i = 0; i < held.size(); ++i)
            std::fill(held.samples(i).begin(), held.samples(i).end(), last.samples(i).back());
        emit_window(held);
        last = held;
    }
    write_ppm(f.out_dir / frame_name(out.frames++), f.width, f.height, rasterize(dots_at(last, 1.0), f));
    for (std::size_t i = 0; i < last.size(); ++i) out.final_points.push_back(last.samples(i).back());
    return out;
}

} // namespace slowmate
