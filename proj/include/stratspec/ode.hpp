#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "stratspec/common.hpp"
#include "stratspec/contour.hpp"
#include "stratspec/profile.hpp"
#include "stratspec/quadrature.hpp"
#include "stratspec/two_layer.hpp"

namespace stratspec {

struct Mat2c {
    cplx a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};

    cplx det() const { return a11 * a22 - a12 * a21; }

    // this * other (apply `other` first when acting on column states)
    Mat2c operator*(const Mat2c& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
};

struct State2c {
    cplx u{0.0}, du{0.0};
};

inline State2c apply(const Mat2c& m, const State2c& s) {
    return {m.a11 * s.u + m.a12 * s.du, m.a21 * s.u + m.a22 * s.du};
}

namespace detail {

// cos(g*h) and sin(g*h)/g with g = sqrt(z), as entire functions of z.
// Both depend on z only through even powers of g, so no branch is involved.
// Near g*h = 0 the direct formulas cancel; a short series takes over.
inline void cos_sinc(cplx z, double h, cplx& c, cplx& s) {
    cplx w = z * h * h;
    if (std::abs(w) < 1e-8) {
        c = 1.0 + w * (-0.5 + w * (1.0 / 24.0 - w / 720.0));
        s = h * (1.0 + w * (-1.0 / 6.0 + w * (1.0 / 120.0 - w / 5040.0)));
        return;
    }
    cplx g = std::sqrt(z);
    c = std::cos(g * h);
    s = std::sin(g * h) / g;
}

// Transfer of (u, u') across a constant-coefficient piece of length h with
// u'' = -z u. Determinant is identically 1.
inline Mat2c piece_transfer(cplx z, double h) {
    cplx c, s;
    cos_sinc(z, h, c, s);
    return {c, s, -z * s, c};
}

}  // namespace detail

// Per-piece record of a solution on the stratified interval: value and
// derivative at the left end of each piece, plus the local coefficient.
struct PieceState {
    double from, to;
    cplx z;  // lambda + K^2 on the piece
    State2c at_from;
};

inline std::vector<PieceState> propagate_pieces(const StratifiedProfile& p,
                                                cplx lambda, State2c start,
                                                State2c* final_state = nullptr) {
    std::vector<PieceState> states;
    states.reserve(p.pieces.size());
    State2c s = start;
    for (const auto& piece : p.pieces) {
        cplx z = lambda + piece.k_sq;
        states.push_back({piece.from, piece.to, z, s});
        s = apply(detail::piece_transfer(z, piece.to - piece.from), s);
    }
    if (final_state) *final_state = s;
    return states;
}

// Evaluate (u, u') at interior x from per-piece records.
inline State2c interior_state(const std::vector<PieceState>& states, double x) {
    for (const auto& ps : states) {
        if (x >= ps.from && x <= ps.to) {
            if (x == ps.from) return ps.at_from;
            return apply(detail::piece_transfer(ps.z, x - ps.from), ps.at_from);
        }
    }
    throw std::domain_error("interior_state: x outside the stratified interval");
}

struct CanonicalSample {
    double x;
    cplx c, c_prime, s, s_prime;
};

// The canonical pair c, s: solutions of -u'' - (K^2 + lambda) u = 0 with
// c(x-) = 1, c'(x-) = 0 and s(x-) = 0, s'(x-) = 1. Entire in lambda.
struct CanonicalSolutionPair {
    cplx lambda;
    std::vector<CanonicalSample> samples;
    Mat2c transfer_matrix;  // maps (u, u') at x- to x+; det = 1

    std::vector<PieceState> c_states, s_states;
};

inline CanonicalSolutionPair canonical_solutions(cplx lambda,
                                                 const StratifiedProfile& p,
                                                 std::size_t samples_per_piece = 9) {
    CanonicalSolutionPair out;
    out.lambda = lambda;
    State2c c_end{1.0, 0.0}, s_end{0.0, 1.0};
    out.c_states = propagate_pieces(p, lambda, {1.0, 0.0}, &c_end);
    out.s_states = propagate_pieces(p, lambda, {0.0, 1.0}, &s_end);
    out.transfer_matrix = {c_end.u, s_end.u, c_end.du, s_end.du};

    auto push = [&](double x) {
        State2c c = p.pieces.empty() ? State2c{1.0, 0.0} : interior_state(out.c_states, x);
        State2c s = p.pieces.empty() ? State2c{0.0, 1.0} : interior_state(out.s_states, x);
        out.samples.push_back({x, c.u, c.du, s.u, s.du});
    };
    if (p.pieces.empty()) {
        push(p.x_minus);
    } else {
        for (const auto& piece : p.pieces) {
            std::size_t n = std::max<std::size_t>(2, samples_per_piece);
            for (std::size_t i = 0; i + 1 < n; ++i) {
                double t = static_cast<double>(i) / static_cast<double>(n - 1);
                push(piece.from + t * (piece.to - piece.from));
            }
        }
        push(p.x_plus);
    }
    return out;
}

// Robin-system matrix determinant for the generalized eigenfunctions. Its
// zeros in the cut plane (all off the real spectral intervals) are the
// scattering resonances.
inline cplx robin_determinant(cplx lambda, const StratifiedProfile& p) {
    const cplx I(0.0, 1.0);
    cplx bm = beta(lambda, p.k_minus_sq);
    cplx bp = beta(lambda, p.k_plus_sq);
    State2c c_end{1.0, 0.0}, s_end{0.0, 1.0};
    propagate_pieces(p, lambda, {1.0, 0.0}, &c_end);
    propagate_pieces(p, lambda, {0.0, 1.0}, &s_end);
    // rows: value/derivative combination at x- acting on (A,B) with
    // psi = A s + B c, then the outgoing Robin combination at x+.
    cplx m11 = 1.0, m12 = I * bm;
    cplx m21 = s_end.du - I * bp * s_end.u;
    cplx m22 = c_end.du - I * bp * c_end.u;
    return m11 * m22 - m12 * m21;
}

// Generalized eigenfunction on a general stratified profile: interior
// expansion psi = A s + B c, exterior plane-wave form with coefficients R, T.
struct GeneralizedEigenfunction {
    cplx lambda;
    Branch side = Branch::plus;
    cplx A{0.0}, B{0.0};
    cplx R{0.0}, T{0.0};

    double x_minus = 0.0, x_plus = 0.0;
    cplx beta_minus{0.0}, beta_plus{0.0};
    std::vector<PieceState> states;  // psi itself, piece by piece

    cplx value(double x) const {
        const cplx I(0.0, 1.0);
        if (side == Branch::plus) {
            if (x > x_plus)
                return std::exp(-I * beta_plus * x) + R * std::exp(I * beta_plus * x);
            if (x < x_minus) return T * std::exp(-I * beta_minus * x);
        } else {
            if (x < x_minus)
                return std::exp(I * beta_minus * x) + R * std::exp(-I * beta_minus * x);
            if (x > x_plus) return T * std::exp(I * beta_plus * x);
        }
        if (states.empty()) return boundary_value(x);
        return interior_state(states, x).u;
    }

    cplx derivative(double x) const {
        const cplx I(0.0, 1.0);
        if (side == Branch::plus) {
            if (x > x_plus)
                return -I * beta_plus * std::exp(-I * beta_plus * x) +
                       I * beta_plus * R * std::exp(I * beta_plus * x);
            if (x < x_minus) return -I * beta_minus * T * std::exp(-I * beta_minus * x);
        } else {
            if (x < x_minus)
                return I * beta_minus * std::exp(I * beta_minus * x) -
                       I * beta_minus * R * std::exp(-I * beta_minus * x);
            if (x > x_plus) return I * beta_plus * T * std::exp(I * beta_plus * x);
        }
        if (states.empty()) return boundary_derivative(x);
        return interior_state(states, x).du;
    }

  private:
    // Empty stratified interval (x- = x+): evaluate the exterior form from
    // the appropriate one-sided limit.
    cplx boundary_value(double x) const {
        const cplx I(0.0, 1.0);
        if (side == Branch::plus) return T * std::exp(-I * beta_minus * x);
        return T * std::exp(I * beta_plus * x);
    }
    cplx boundary_derivative(double x) const {
        const cplx I(0.0, 1.0);
        if (side == Branch::plus) return -I * beta_minus * T * std::exp(-I * beta_minus * x);
        return I * beta_plus * T * std::exp(I * beta_plus * x);
    }
};

inline GeneralizedEigenfunction assemble_eigenfunction(cplx lambda, Branch side,
                                                       const StratifiedProfile& p) {
    const cplx I(0.0, 1.0);
    GeneralizedEigenfunction out;
    out.lambda = lambda;
    out.side = side;
    out.x_minus = p.x_minus;
    out.x_plus = p.x_plus;
    out.beta_minus = beta(lambda, p.k_minus_sq);
    out.beta_plus = beta(lambda, p.k_plus_sq);

    State2c c_end{1.0, 0.0}, s_end{0.0, 1.0};
    propagate_pieces(p, lambda, {1.0, 0.0}, &c_end);
    propagate_pieces(p, lambda, {0.0, 1.0}, &s_end);

    const cplx m11 = 1.0, m12 = I * out.beta_minus;
    const cplx m21 = s_end.du - I * out.beta_plus * s_end.u;
    const cplx m22 = c_end.du - I * out.beta_plus * c_end.u;
    const cplx det = m11 * m22 - m12 * m21;
    const double scale = std::abs(m11 * m22) + std::abs(m12 * m21) + 1e-300;
    if (std::abs(det) < 1e-13 * scale)
        throw robin_pole_error("assemble_eigenfunction: singular Robin system", det);

    cplx r1, r2;
    if (side == Branch::plus) {
        r1 = 0.0;
        r2 = -2.0 * I * out.beta_plus * std::exp(-I * out.beta_plus * p.x_plus);
    } else {
        r1 = 2.0 * I * out.beta_minus * std::exp(I * out.beta_minus * p.x_minus);
        r2 = 0.0;
    }
    out.A = (r1 * m22 - m12 * r2) / det;
    out.B = (m11 * r2 - r1 * m21) / det;

    State2c end;
    out.states = propagate_pieces(p, lambda, {out.B, out.A}, &end);
    const cplx psi_minus = out.B;  // psi(x-) = B, psi'(x-) = A
    const cplx psi_plus = p.pieces.empty() ? out.B : end.u;

    if (side == Branch::plus) {
        out.T = psi_minus * std::exp(I * out.beta_minus * p.x_minus);
        out.R = (psi_plus - std::exp(-I * out.beta_plus * p.x_plus)) *
                std::exp(-I * out.beta_plus * p.x_plus);
    } else {
        out.R = (psi_minus - std::exp(I * out.beta_minus * p.x_minus)) *
                std::exp(I * out.beta_minus * p.x_minus);
        out.T = psi_plus * std::exp(-I * out.beta_plus * p.x_plus);
    }
    return out;
}

// Shooting dispersion function for guided modes: start from the decaying
// left tail, propagate across the stratified interval, and measure the
// mismatch with the decaying right tail. Real-valued on the search window.
inline double guided_dispersion(double lambda, const StratifiedProfile& p) {
    double km = std::sqrt(std::max(0.0, -lambda - p.k_minus_sq));
    double kp = std::sqrt(std::max(0.0, -lambda - p.k_plus_sq));
    State2c end{1.0, km};
    if (!p.pieces.empty()) propagate_pieces(p, lambda, {1.0, km}, &end);
    return (end.du + kp * end.u).real();
}

struct GuidedMode {
    double lambda = 0.0;
    double kappa_minus = 0.0, kappa_plus = 0.0;  // exterior decay rates
    double norm = 1.0;                           // L2 norm after normalization
    double x_minus = 0.0, x_plus = 0.0;
    std::vector<PieceState> states;  // normalized psi on the interval
    double psi_at_minus = 0.0, psi_at_plus = 0.0;

    double value(double x) const {
        if (x < x_minus) return psi_at_minus * std::exp(kappa_minus * (x - x_minus));
        if (x > x_plus) return psi_at_plus * std::exp(-kappa_plus * (x - x_plus));
        if (states.empty()) return psi_at_minus;
        return interior_state(states, x).u.real();
    }

    std::vector<std::pair<double, double>> sample(std::size_t n) const {
        std::vector<std::pair<double, double>> out;
        double pad_l = 4.0 / kappa_minus, pad_r = 4.0 / kappa_plus;
        double lo = x_minus - pad_l, hi = x_plus + pad_r;
        for (std::size_t i = 0; i < n; ++i) {
            double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            out.emplace_back(x, value(x));
        }
        return out;
    }
};

namespace detail {

inline GuidedMode build_mode(double lambda, const StratifiedProfile& p) {
    GuidedMode m;
    m.lambda = lambda;
    m.kappa_minus = std::sqrt(-lambda - p.k_minus_sq);
    m.kappa_plus = std::sqrt(-lambda - p.k_plus_sq);
    m.x_minus = p.x_minus;
    m.x_plus = p.x_plus;
    State2c end{1.0, m.kappa_minus};
    m.states = propagate_pieces(p, lambda, {1.0, m.kappa_minus}, &end);
    m.psi_at_minus = 1.0;
    m.psi_at_plus = p.pieces.empty() ? 1.0 : end.u.real();

    // Interior mass by panel quadrature plus exact exponential tails.
    double interior = 0.0;
    for (const auto& piece : p.pieces) {
        double wavelen = 2.0 * pi / std::sqrt(std::max(1.0, std::abs(piece.k_sq + lambda)));
        QuadRule rule = composite_gl(piece.from, piece.to,
                                     std::min(piece.to - piece.from, 0.25 * wavelen), 16);
        for (std::size_t i = 0; i < rule.size(); ++i) {
            double v = interior_state(m.states, rule.nodes[i]).u.real();
            interior += rule.weights[i] * v * v;
        }
    }
    double tails = m.psi_at_minus * m.psi_at_minus / (2.0 * m.kappa_minus) +
                   m.psi_at_plus * m.psi_at_plus / (2.0 * m.kappa_plus);
    double scale = 1.0 / std::sqrt(interior + tails);
    for (auto& ps : m.states) {
        ps.at_from.u *= scale;
        ps.at_from.du *= scale;
    }
    m.psi_at_minus *= scale;
    m.psi_at_plus *= scale;
    m.norm = 1.0;
    return m;
}

}  // namespace detail

// Guided (trapped transverse) modes: L2 eigenfunctions with eigenvalues in
// the window (-k_M^2, -max(k-^2, k+^2)). Bracketing by sign changes of the
// dispersion function on a uniform grid, then bisection.
inline std::vector<GuidedMode> find_guided_modes(const StratifiedProfile& p,
                                                 double tol = 1e-12,
                                                 std::size_t grid_points = 2048) {
    std::vector<GuidedMode> modes;
    double hi = -std::max(p.k_minus_sq, p.k_plus_sq);
    double lo = -p.k_M_sq;
    if (!(hi > lo)) return modes;
    double pad = 1e-9 * (hi - lo);
    lo += pad;
    hi -= pad;
    auto D = [&](double lam) { return guided_dispersion(lam, p); };
    double prev = D(lo);
    double prev_x = lo;
    for (std::size_t i = 1; i < grid_points; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        double cur = D(x);
        if (prev == 0.0) {
            modes.push_back(detail::build_mode(prev_x, p));
        } else if ((prev > 0) != (cur > 0)) {
            double root = bisect_root(D, prev_x, x, tol * (hi - lo));
            modes.push_back(detail::build_mode(root, p));
        }
        prev = cur;
        prev_x = x;
    }
    std::sort(modes.begin(), modes.end(),
              [](const GuidedMode& a, const GuidedMode& b) { return a.lambda < b.lambda; });
    return modes;
}

// Sufficient-condition check for at least one guided mode (equal exteriors):
// the mean of K^2 - k^2 over the stratified interval must be positive.
inline bool check_existence_condition(const StratifiedProfile& p) {
    if (p.k_minus_sq != p.k_plus_sq)
        throw not_applicable_error(
            "check_existence_condition: requires equal exterior wavenumbers");
    double integral = 0.0;
    for (const auto& piece : p.pieces)
        integral += (piece.k_sq - p.k_plus_sq) * (piece.to - piece.from);
    return integral > 0.0;
}

namespace detail {

inline cplx polish_newton(const std::function<cplx(cplx)>& f, cplx z0, double tol,
                          int iters = 60) {
    cplx z = z0;
    for (int i = 0; i < iters; ++i) {
        cplx fz = f(z);
        double h = 1e-7 * (1.0 + std::abs(z));
        cplx df = (f(z + h) - f(z - h)) / (2.0 * h);
        if (std::abs(df) == 0.0) break;
        cplx step = fz / df;
        z -= step;
        if (std::abs(step) < tol * (1.0 + std::abs(z))) break;
    }
    return z;
}

}  // namespace detail

// Scattering resonances: zeros of the Robin determinant inside a rectangle
// of the cut plane. Argument-principle counting on subdivided rectangles,
// then Newton polishing. Contours crossing a zero are retried after a small
// deterministic perturbation.
inline std::vector<cplx> find_resonances(const StratifiedProfile& p, Rect region,
                                         double min_box = 1e-3, double tol = 1e-9) {
    double cut = -std::min(p.k_minus_sq, p.k_plus_sq);
    bool touches_cut = region.im_lo < 1e-6 && region.im_hi > -1e-6 && region.re_lo <= cut;
    if (touches_cut)
        throw std::domain_error(
            "find_resonances: region must avoid a 1e-6 tube around the branch cut");

    auto f = [&](cplx z) { return robin_determinant(z, p); };

    auto count_windings = [&](const Rect& r) {
        Rect probe = r;
        for (int attempt = 0;; ++attempt) {
            try {
                return winding_number(f, probe);
            } catch (const nonconvergence_error&) {
                if (attempt >= 5) throw;
                double bump = 3e-6 * (1 << attempt) * (probe.diameter() + 1.0);
                probe.re_lo -= bump;
                probe.re_hi += bump;
                probe.im_lo -= bump;
                probe.im_hi += bump;
                if (probe.im_lo < 1e-6 && probe.im_hi > -1e-6 && probe.re_lo <= cut)
                    throw;
            }
        }
    };

    std::vector<cplx> roots;
    auto try_add = [&](cplx root) {
        if (std::abs(f(root)) > tol) return false;
        if (!region.contains(root)) return true;  // sibling box owns it
        for (cplx known : roots)
            if (std::abs(known - root) < 1e3 * tol * (1.0 + std::abs(root))) return true;
        roots.push_back(root);
        return true;
    };

    std::vector<Rect> stack{region};
    while (!stack.empty()) {
        Rect r = stack.back();
        stack.pop_back();
        int n = count_windings(r);
        if (n == 0) continue;
        cplx center(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
        if (n == 1 && r.diameter() <= min_box) {
            if (try_add(detail::polish_newton(f, center, 1e-3 * tol))) continue;
            if (r.diameter() < 1e-3 * min_box)
                throw nonconvergence_error("find_resonances: polish failed to converge");
        }
        if (n > 1 && r.diameter() < 1e-3 * min_box) {
            // unresolvable cluster or multiple zero at this resolution
            if (try_add(detail::polish_newton(f, center, 1e-3 * tol))) continue;
            throw nonconvergence_error("find_resonances: zero cluster below resolution");
        }
        double rm = 0.5 * (r.re_lo + r.re_hi), im = 0.5 * (r.im_lo + r.im_hi);
        stack.push_back({r.re_lo, rm, r.im_lo, im});
        stack.push_back({rm, r.re_hi, r.im_lo, im});
        stack.push_back({r.re_lo, rm, im, r.im_hi});
        stack.push_back({rm, r.re_hi, im, r.im_hi});
    }
    std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

}  // namespace stratspec
