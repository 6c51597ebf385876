#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "stratspec/common.hpp"

namespace stratspec {

// Discrete Cauchy integral of f over a circle, normalized by the circle
// length and the largest sampled |f|. Vanishes (to trapezoid accuracy,
// which is spectral for analytic f) iff f is analytic inside.
inline double cauchy_circle_residual(const std::function<cplx(cplx)>& f,
                                     cplx center, double radius,
                                     std::size_t n = 64) {
    cplx acc = 0.0;
    double fmax = 0.0;
    const double dtheta = 2.0 * pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        double th = dtheta * static_cast<double>(j);
        cplx e = std::polar(1.0, th);
        cplx z = center + radius * e;
        cplx fz = f(z);
        acc += fz * (cplx(0.0, 1.0) * radius * e) * dtheta;
        fmax = std::max(fmax, std::abs(fz));
    }
    if (fmax == 0.0) return 0.0;
    return std::abs(acc) / (2.0 * pi * radius * fmax);
}

struct Rect {
    double re_lo, re_hi, im_lo, im_hi;

    cplx corner(int k) const {
        switch (k & 3) {
            case 0: return {re_lo, im_lo};
            case 1: return {re_hi, im_lo};
            case 2: return {re_hi, im_hi};
            default: return {re_lo, im_hi};
        }
    }
    bool contains(cplx z) const {
        return z.real() >= re_lo && z.real() <= re_hi && z.imag() >= im_lo &&
               z.imag() <= im_hi;
    }
    double diameter() const { return std::hypot(re_hi - re_lo, im_hi - im_lo); }
};

// Winding number of f along the rectangle boundary via phase tracking.
// Segments are refined until consecutive phase steps stay below pi/2;
// throws if refinement bottoms out (f has a zero on or too near the edge).
inline int winding_number(const std::function<cplx(cplx)>& f, const Rect& r,
                          std::size_t init_per_edge = 32, int max_depth = 24) {
    double total = 0.0;
    for (int edge = 0; edge < 4; ++edge) {
        cplx a = r.corner(edge), b = r.corner(edge + 1);
        struct Seg {
            cplx za, zb;
            cplx fa, fb;
            int depth;
        };
        std::vector<Seg> stack;
        cplx prev = a;
        cplx fprev = f(a);
        for (std::size_t j = 1; j <= init_per_edge; ++j) {
            cplx z = a + (b - a) * (static_cast<double>(j) /
                                    static_cast<double>(init_per_edge));
            stack.push_back({prev, z, fprev, f(z), 0});
            prev = z;
            fprev = stack.back().fb;
        }
        // Depth-first refinement, accumulating arg increments in order.
        std::vector<Seg> work(stack.rbegin(), stack.rend());
        while (!work.empty()) {
            Seg s = work.back();
            work.pop_back();
            if (std::abs(s.fa) == 0.0 || std::abs(s.fb) == 0.0)
                throw nonconvergence_error("winding_number: zero on contour");
            double darg = std::arg(s.fb / s.fa);
            if (std::abs(darg) < 0.5 * pi) {
                total += darg;
                continue;
            }
            if (s.depth >= max_depth)
                throw nonconvergence_error("winding_number: refinement exhausted");
            cplx zm = 0.5 * (s.za + s.zb);
            cplx fm = f(zm);
            work.push_back({zm, s.zb, fm, s.fb, s.depth + 1});
            work.push_back({s.za, zm, s.fa, fm, s.depth + 1});
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

}  // namespace stratspec
