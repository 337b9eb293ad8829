#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "expklms/error.hpp"

namespace expklms {

struct QuadratureResult {
    double value;
    double error_estimate;
    std::size_t intervals;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod quadrature: the segment with the largest
// error estimate is bisected until the summed estimate drops below abs_tol.
// Orientation is respected, so integrate(f, b, a) == -integrate(f, a, b).
template <class F>
QuadratureResult integrate(F f, double a, double b, double abs_tol,
                           std::size_t max_intervals = 1'000'000) {
    if (a == b) return {0.0, 0.0, 0};
    const double sign = a < b ? 1.0 : -1.0;
    if (sign < 0) std::swap(a, b);

    std::priority_queue<detail::Segment> heap;
    auto first = detail::gauss_kronrod15(f, a, b);
    double total = first.value;
    double error = first.error;
    heap.push(first);

    while (error > abs_tol) {
        if (heap.size() >= max_intervals) {
            throw NumericalError("quadrature: tolerance " + std::to_string(abs_tol) +
                                 " not reached within " + std::to_string(max_intervals) +
                                 " intervals (error estimate " + std::to_string(error) + ")");
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gauss_kronrod15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Running sums drift; resynchronise now and then.
        if (heap.size() % 64 == 0) {
            auto copy = heap;
            total = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }
    return {sign * total, error, heap.size()};
}

}  // namespace expklms
