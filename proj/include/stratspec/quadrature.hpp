#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "stratspec/common.hpp"

namespace stratspec {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    auto integrate(F&& f) const -> decltype(f(0.0) * 0.0) {
        decltype(f(0.0) * 0.0) acc{};
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
// Accurate to machine precision for n up to a few hundred.
inline const QuadRule& gauss_legendre(std::size_t n) {
    static thread_local std::vector<QuadRule> cache;
    if (cache.size() <= n) cache.resize(n + 1);
    QuadRule& rule = cache[n];
    if (rule.nodes.size() == n) return rule;

    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

// Composite Gauss-Legendre rule on [a,b]: panels never longer than
// max_panel, never fewer than min_panels, split so that the interior
// breakpoints (profile jumps, window edges) are panel boundaries.
inline QuadRule composite_gl(double a, double b, double max_panel,
                             std::size_t nodes_per_panel = 16,
                             const std::vector<double>& breakpoints = {}) {
    QuadRule out;
    if (!(b > a)) return out;
    std::vector<double> edges{a, b};
    for (double c : breakpoints)
        if (c > a && c < b) edges.push_back(c);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const QuadRule& base = gauss_legendre(nodes_per_panel);
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        double lo = edges[e], hi = edges[e + 1];
        std::size_t parts = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil((hi - lo) / max_panel)));
        double h = (hi - lo) / static_cast<double>(parts);
        for (std::size_t p = 0; p < parts; ++p) {
            double c0 = lo + h * static_cast<double>(p);
            for (std::size_t i = 0; i < base.size(); ++i) {
                out.nodes.push_back(c0 + 0.5 * h * (base.nodes[i] + 1.0));
                out.weights.push_back(0.5 * h * base.weights[i]);
            }
        }
    }
    return out;
}

// Bisection refined by a secant polish. f must change sign on [lo,hi].
template <class F>
double bisect_root(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw nonconvergence_error("bisect_root: no sign change on bracket", lo, hi);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter && (hi - lo) > tol; ++it) {
        mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // One secant step sharpens the bisection estimate when f is smooth.
    double denom = fhi - flo;
    if (denom != 0.0) {
        double s = hi - fhi * (hi - lo) / denom;
        if (s > lo && s < hi) {
            double fs = f(s);
            if (std::abs(fs) <= std::min(std::abs(flo), std::abs(fhi))) return s;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace stratspec
