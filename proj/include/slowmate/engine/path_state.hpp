#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include "../core/mobius.hpp"
#include "../core/sphere.hpp"

namespace slowmate {

// Marked points pinned at infinity, 0 and 1; the map sends them to the images of those points.
struct ThreePointPins {
    std::size_t infinity = 0, zero = 0, one = 0;
};

// f(z) = z^d + c with c read from one marked point (the critical value).
struct MonicPins {
    std::size_t critical_value = 0;
};

using Normalization = std::variant<ThreePointPins, MonicPins>;

// Samples of every marked or tracked point over the unit window [time, time + 1].
class PathState {
public:
    PathState() : PathState(2, 64, MonicPins{}) {}

    PathState(int degree, int steps, Normalization norm) : degree_(degree), steps_(steps), norm_(norm)
    {
        if (degree < 2) throw std::invalid_argument("PathState: degree must be >= 2");
        if (steps < 1) throw std::invalid_argument("PathState: need at least one step");
    }

    // Marked points first, tracked points after. Returns the index of the new point.
    std::size_t add_point(std::vector<SpherePoint> samples, std::size_t image, bool tracked = false)
    {
        if (static_cast<int>(samples.size()) != steps_ + 1) throw std::invalid_argument("PathState: wrong sample count");
        if (!tracked && marked_ != samples_.size()) throw std::invalid_argument("PathState: marked point after tracked");
        samples_.push_back(std::move(samples));
        image_.push_back(image);
        if (!tracked) ++marked_;
        return samples_.size() - 1;
    }

    // checks that images are in range and marked points map to marked points
    void validate() const
    {
        for (std::size_t i = 0; i < size(); ++i) {
            if (image_[i] >= size()) throw std::invalid_argument("PathState: image index out of range");
            if (i < marked_ && image_[i] >= marked_) throw std::invalid_argument("PathState: marked image is tracked");
        }
        if (const auto* p = std::get_if<ThreePointPins>(&norm_)) {
            if (p->infinity >= marked_ || p->zero >= marked_ || p->one >= marked_)
                throw std::invalid_argument("PathState: pin index out of range");
        } else if (std::get<MonicPins>(norm_).critical_value >= marked_) {
            throw std::invalid_argument("PathState: critical value index out of range");
        }
    }

    int degree() const { return degree_; }
    int steps() const { return steps_; }
    int time() const { return time_; }
    void set_time(int t) { time_ = t; }
    const Normalization& normalization() const { return norm_; }

    std::size_t size() const { return samples_.size(); }
    std::size_t marked_count() const { return marked_; }
    bool tracked(std::size_t i) const { return i >= marked_; }
    std::size_t image(std::size_t i) const { return image_[i]; }
    const std::vector<std::size_t>& images() const { return image_; }

    const std::vector<SpherePoint>& samples(std::size_t i) const { return samples_[i]; }
    std::vector<SpherePoint>& samples(std::size_t i) { return samples_[i]; }

    bool pinned(std::size_t i) const
    {
        if (const auto* p = std::get_if<ThreePointPins>(&norm_)) return i == p->infinity || i == p->zero || i == p->one;
        return false;
    }

    // position at window fraction s in [0,1], linear between samples
    SpherePoint at(std::size_t i, double s) const
    {
        const double x = std::clamp(s, 0.0, 1.0) * steps_;
        const int j = std::min(static_cast<int>(std::floor(x)), steps_ - 1);
        return blend(samples_[i][j], samples_[i][j + 1], x - j);
    }

    // configuration of marked points at the end of the window
    std::vector<SpherePoint> endpoint() const
    {
        std::vector<SpherePoint> out;
        for (std::size_t i = 0; i < marked_; ++i) out.push_back(samples_[i].back());
        return out;
    }

    // f(infinity), f(0) at sample j for the map pulling this window back one unit
    SpherePoint critical_image_infinity(int j) const
    {
        if (const auto* p = std::get_if<ThreePointPins>(&norm_)) return samples_[image_[p->infinity]][j];
        return SpherePoint::infinity();
    }
    SpherePoint critical_image_zero(int j) const
    {
        if (const auto* p = std::get_if<ThreePointPins>(&norm_)) return samples_[image_[p->zero]][j];
        return samples_[std::get<MonicPins>(norm_).critical_value][j];
    }

    // The map f with f(new point i) = this window's point image(i) at sample j.
    BicriticalMap map_at(int j) const
    {
        if (const auto* p = std::get_if<ThreePointPins>(&norm_))
            return {degree_, mobius_from_three(samples_[image_[p->infinity]][j], samples_[image_[p->zero]][j],
                                               samples_[image_[p->one]][j])};
        const SpherePoint c = samples_[std::get<MonicPins>(norm_).critical_value][j];
        if (c.is_infinity()) throw DegenerateTriple("PathState: critical value at infinity");
        return {degree_, MobiusMap(1.0, c.value(), 0.0, 1.0)};
    }

private:
    int degree_;
    int steps_;
    int time_ = 0;
    Normalization norm_;
    std::size_t marked_ = 0;
    std::vector<std::vector<SpherePoint>> samples_;
    std::vector<std::size_t> image_;
};

// Largest chordal distance between matching entries.
inline double config_distance(const std::vector<SpherePoint>& a, const std::vector<SpherePoint>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d = std::max(d, chordal_distance(a[i], b[i]));
    return d;
}

} // namespace slowmate
