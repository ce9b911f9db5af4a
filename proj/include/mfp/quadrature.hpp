#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

#include "mfp/core.hpp"

namespace mfp {

struct QuadOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_intervals = 4000;
};

template <class V>
struct QuadResult {
    V value{};
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> gk_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class V>
struct Segment {
    double a, b;
    V value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class V, class F>
Segment<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const V fc = f(c);
    V kron = fc * gk_wk[7];
    V gauss = fc * gk_wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk_x[j];
        const V f1 = f(c - dx);
        const V f2 = f(c + dx);
        kron += (f1 + f2) * gk_wk[j];
        if (j % 2 == 1) gauss += (f1 + f2) * gk_wg[j / 2];
    }
    using std::abs;
    return {a, b, kron * h, abs((kron - gauss) * h)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature over the union of the cells
/// [breaks[i], breaks[i+1]]. V may be double or Complex.
template <class V, class F>
QuadResult<V> integrate_cells(F&& f, const std::vector<double>& breaks,
                              const QuadOptions& opt = {}) {
    QuadResult<V> out;
    if (breaks.size() < 2) return out;
    std::priority_queue<detail::Segment<V>> heap;
    V total{};
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto seg = detail::gk15<V>(f, breaks[i], breaks[i + 1]);
        total += seg.value;
        err += seg.error;
        heap.push(seg);
        out.evaluations += 15;
    }
    using std::abs;
    while (!heap.empty() && err > std::max(opt.abs_tol, opt.rel_tol * abs(total))) {
        if (int(heap.size()) >= opt.max_intervals)
            throw QuadratureError("interval budget exhausted, error estimate " +
                                  std::to_string(err));
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval cannot be split further in double precision.
            throw QuadratureError("interval collapsed at " + std::to_string(mid));
        }
        auto left = detail::gk15<V>(f, worst.a, mid);
        auto right = detail::gk15<V>(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum in a fixed order so the result does not depend on heap history.
    std::vector<detail::Segment<V>> segs;
    segs.reserve(heap.size());
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(),
              [](const auto& x, const auto& y) { return x.a < y.a; });
    V sum{};
    double esum = 0.0;
    for (const auto& s : segs) {
        sum += s.value;
        esum += s.error;
    }
    out.value = sum;
    out.error = esum;
    return out;
}

template <class V, class F>
QuadResult<V> integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    return integrate_cells<V>(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

}  // namespace mfp
