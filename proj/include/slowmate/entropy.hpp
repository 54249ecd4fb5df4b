#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "angles/orbit.hpp"
#include "core/errors.hpp"

namespace slowmate {

class NonnegMatrix {
public:
    NonnegMatrix() = default;

    explicit NonnegMatrix(std::vector<std::vector<std::int64_t>> rows) : rows_(std::move(rows))
    {
        for (const auto& r : rows_) {
            if (r.size() != rows_.size()) throw std::invalid_argument("NonnegMatrix: not square");
            for (auto v : r)
                if (v < 0) throw std::invalid_argument("NonnegMatrix: negative entry");
        }
    }

    std::size_t size() const { return rows_.size(); }
    std::int64_t operator()(std::size_t i, std::size_t j) const { return rows_[i][j]; }
    const std::vector<std::vector<std::int64_t>>& rows() const { return rows_; }

    NonnegMatrix transposed() const
    {
        std::vector<std::vector<std::int64_t>> t(size(), std::vector<std::int64_t>(size()));
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j) t[j][i] = rows_[i][j];
        return NonnegMatrix(std::move(t));
    }

    friend bool operator==(const NonnegMatrix&, const NonnegMatrix&) = default;

private:
    std::vector<std::vector<std::int64_t>> rows_;
};

inline bool transpose_relation(const NonnegMatrix& a, const NonnegMatrix& m)
{
    return a.size() == m.size() && a.transposed() == m;
}

// Strongly connected components (Tarjan), each sorted.
inline std::vector<std::vector<std::size_t>> strong_components(const NonnegMatrix& m)
{
    const std::size_t n = m.size();
    std::vector<long> index(n, -1), low(n, 0);
    std::vector<char> on(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> out;
    long counter = 0;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on[v] = 1;
        for (std::size_t w = 0; w < n; ++w) {
            if (!m(v, w)) continue;
            if (index[w] < 0) { visit(w); low[v] = std::min(low[v], low[w]); }
            else if (on[w]) low[v] = std::min(low[v], index[w]);
        }
        if (low[v] == index[v]) {
            std::vector<std::size_t> comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = 0;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            out.push_back(comp);
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    std::sort(out.begin(), out.end());
    return out;
}

inline bool irreducible(const NonnegMatrix& m) { return m.size() > 0 && strong_components(m).size() == 1; }

namespace detail {

inline NonnegMatrix submatrix(const NonnegMatrix& m, const std::vector<std::size_t>& idx)
{
    std::vector<std::vector<std::int64_t>> r(idx.size(), std::vector<std::int64_t>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) r[i][j] = m(idx[i], idx[j]);
    return NonnegMatrix(std::move(r));
}

// det(x I - B) by partial-pivot elimination
inline long double char_poly_at(const NonnegMatrix& b, long double x)
{
    const std::size_t n = b.size();
    std::vector<std::vector<long double>> a(n, std::vector<long double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a[i][j] = (i == j ? x : 0.0L) - static_cast<long double>(b(i, j));
    long double det = 1.0L;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(a[i][k]) > std::fabs(a[piv][k])) piv = i;
        if (a[piv][k] == 0.0L) return 0.0L;
        if (piv != k) { std::swap(a[piv], a[k]); det = -det; }
        det *= a[k][k];
        for (std::size_t i = k + 1; i < n; ++i) {
            const long double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
        }
    }
    return det;
}

// Perron root of an irreducible block as the largest sign change of its characteristic
// polynomial, scanned down from the max row sum. Only for small blocks.
inline double perron_by_bisection(const NonnegMatrix& b)
{
    if (b.size() > 12) throw NonConvergent("leading_eigenvalue: no fallback above n = 12");
    long double hi = 0.0L;
    for (const auto& r : b.rows()) {
        long double s = 0.0L;
        for (auto v : r) s += v;
        hi = std::max(hi, s);
    }
    if (char_poly_at(b, hi) == 0.0L) return static_cast<double>(hi);
    const long double h = std::max(hi, 1.0L) * 1e-4L;
    long double lo = hi;
    while (lo > 0.0L && char_poly_at(b, lo) > 0.0L) lo -= h;
    long double up = lo + h;
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + up);
        (char_poly_at(b, mid) > 0.0L ? up : lo) = mid;
    }
    return static_cast<double>(0.5L * (lo + up));
}

// Shifted power iteration on B + I, max-norm, all-ones start. B + I is primitive for any
// irreducible B, so the iteration converges even when B itself is periodic.
inline double perron_block(const NonnegMatrix& b, double tol, long max_iter)
{
    const std::size_t n = b.size();
    if (n == 1) return static_cast<double>(b(0, 0));
    std::vector<long double> v(n, 1.0L), w(n);
    for (long it = 0; it < max_iter; ++it) {
        long double norm = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double s = v[i];
            for (std::size_t j = 0; j < n; ++j) s += b(i, j) * v[j];
            w[i] = s;
            norm = std::max(norm, std::fabs(s));
        }
        const long double lambda = norm - 1.0L;
        for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
        // residual of B w = lambda w in the max norm
        long double res = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double s = 0.0L;
            for (std::size_t j = 0; j < n; ++j) s += b(i, j) * w[j];
            res = std::max(res, std::fabs(s - lambda * w[i]));
        }
        v.swap(w);
        if (res < tol) return static_cast<double>(lambda);
    }
    throw NonConvergent("leading_eigenvalue: power iteration did not settle");
}

} // namespace detail

// Spectral radius of a nonnegative integer matrix: the largest Perron root over the
// irreducible diagonal blocks.
inline double leading_eigenvalue(const NonnegMatrix& m, double tol = 1e-8, long max_iter = 100000)
{
    if (m.size() == 0) throw std::invalid_argument("leading_eigenvalue: empty matrix");
    double best = 0.0;
    for (const auto& comp : strong_components(m)) {
        const NonnegMatrix b = detail::submatrix(m, comp);
        double r;
        try {
            r = detail::perron_block(b, tol, max_iter);
        } catch (const NonConvergent&) {
            r = detail::perron_by_bisection(b);
        }
        best = std::max(best, r);
    }
    return best;
}

struct EntropyResult {
    double lambda = 0.0;
    double entropy = 0.0; // log lambda
    NonnegMatrix matrix;
    std::vector<std::pair<RationalAngle, RationalAngle>> states;
    bool reducible = false;
};

// Transition system on unordered pairs of postcritical angles. The diameter
// {theta/2, (theta+1)/2} cuts the circle; a pair on one side (or touching the diameter)
// maps to its doubled pair, a pair split by it maps to the two pairs joining theta with
// the doubled endpoints. Pairs that collapse to a point are dropped.
inline EntropyResult core_entropy(const RationalAngle& theta)
{
    const AngleOrbit orb = angle_orbit(theta);
    std::vector<RationalAngle> A = orb.angles;
    std::sort(A.begin(), A.end());
    const RationalAngle d0 = theta.half_low(), d1 = theta.half_high();
    auto strictly_inside = [&](const RationalAngle& x) { return d0 < x && x < d1; };
    auto on_diameter = [&](const RationalAngle& x) { return x == d0 || x == d1; };

    EntropyResult out;
    std::map<std::pair<RationalAngle, RationalAngle>, std::size_t> id;
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = i + 1; j < A.size(); ++j) {
            id[{A[i], A[j]}] = out.states.size();
            out.states.push_back({A[i], A[j]});
        }
    const std::size_t n = out.states.size();
    std::vector<std::vector<std::int64_t>> rows(n, std::vector<std::int64_t>(n, 0));
    auto add = [&](std::size_t from, RationalAngle a, RationalAngle b) {
        if (a == b) return;
        if (b < a) std::swap(a, b);
        rows[from][id.at({a, b})] += 1;
    };
    for (std::size_t s = 0; s < n; ++s) {
        const auto& [x, y] = out.states[s];
        const RationalAngle x2 = x.doubled(), y2 = y.doubled();
        if (on_diameter(x) || on_diameter(y) || strictly_inside(x) == strictly_inside(y)) {
            add(s, x2, y2);
        } else {
            add(s, theta, x2);
            add(s, theta, y2);
        }
    }
    out.matrix = NonnegMatrix(std::move(rows));
    out.lambda = n ? leading_eigenvalue(out.matrix) : 1.0;
    out.lambda = std::max(out.lambda, 1.0);
    out.entropy = std::log(out.lambda);
    out.reducible = n > 0 && !irreducible(out.matrix);
    return out;
}

} // namespace slowmate
