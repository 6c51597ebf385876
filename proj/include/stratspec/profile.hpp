#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stratspec/common.hpp"

namespace stratspec {

// One-dimensional squared-wavenumber profile K^2(x): piecewise constant on
// [x_minus, x_plus], constant outside. Exterior constants must be positive;
// interior values may be negative (damping layers are allowed).
struct StratifiedProfile {
    struct Piece {
        double from, to, k_sq;
    };

    std::vector<Piece> pieces;  // ordered, tiling [x_minus, x_plus]
    double x_minus = 0.0;
    double x_plus = 0.0;
    double k_minus_sq = 1.0;
    double k_plus_sq = 1.0;
    double k_M_sq = 1.0;  // sup of K^2 over the inhomogeneous interval

    bool homogeneous() const {
        if (k_minus_sq != k_plus_sq) return false;
        for (const auto& p : pieces)
            if (p.k_sq != k_plus_sq) return false;
        return true;
    }

    // Jump convention: right-continuous, so a query at a piece boundary
    // returns the value on the right.
    double k_sq_at(double x) const {
        if (x < x_minus) return k_minus_sq;
        if (x >= x_plus) return k_plus_sq;
        for (const auto& p : pieces)
            if (x >= p.from && x < p.to) return p.k_sq;
        return k_plus_sq;
    }

    // All breakpoints of K^2 (piece boundaries), useful to align quadrature
    // panels with the discontinuities.
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (const auto& p : pieces) b.push_back(p.from);
        if (!pieces.empty()) b.push_back(pieces.back().to);
        if (b.empty() && x_minus == x_plus) b.push_back(x_minus);
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }
};

inline StratifiedProfile make_two_layer(double k_minus, double k_plus) {
    if (!(k_minus > 0.0) || !(k_plus > 0.0))
        throw invalid_profile_error("make_two_layer: wavenumbers must be positive");
    StratifiedProfile p;
    p.x_minus = p.x_plus = 0.0;
    p.k_minus_sq = k_minus * k_minus;
    p.k_plus_sq = k_plus * k_plus;
    p.k_M_sq = std::max(p.k_minus_sq, p.k_plus_sq);
    return p;
}

inline StratifiedProfile make_homogeneous(double k) { return make_two_layer(k, k); }

// General piecewise-constant profile. Pieces must tile an interval with no
// gaps or overlaps; exterior squared wavenumbers must be positive.
inline StratifiedProfile make_piecewise(std::vector<StratifiedProfile::Piece> pieces,
                                        double k_minus_sq, double k_plus_sq) {
    if (!(k_minus_sq > 0.0) || !(k_plus_sq > 0.0))
        throw invalid_profile_error("make_piecewise: exterior k^2 must be positive");
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.from < b.from; });
    StratifiedProfile p;
    if (pieces.empty()) {
        p.x_minus = p.x_plus = 0.0;
        p.k_minus_sq = k_minus_sq;
        p.k_plus_sq = k_plus_sq;
        p.k_M_sq = std::max(k_minus_sq, k_plus_sq);
        return p;
    }
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& q = pieces[i];
        if (!(q.to > q.from) || !std::isfinite(q.k_sq))
            throw invalid_profile_error("make_piecewise: bad piece");
        if (i > 0 && std::abs(pieces[i - 1].to - q.from) > 1e-12 * (1.0 + std::abs(q.from)))
            throw invalid_profile_error("make_piecewise: pieces leave a gap or overlap");
    }
    p.pieces = std::move(pieces);
    p.x_minus = p.pieces.front().from;
    p.x_plus = p.pieces.back().to;
    p.k_minus_sq = k_minus_sq;
    p.k_plus_sq = k_plus_sq;
    p.k_M_sq = p.pieces.front().k_sq;
    for (const auto& q : p.pieces) p.k_M_sq = std::max(p.k_M_sq, q.k_sq);
    return p;
}

// Symmetric square well: exterior k^2, interior k^2 + depth on [-l/2, l/2].
inline StratifiedProfile make_square_well(double exterior_k_sq, double depth,
                                          double length) {
    if (!(exterior_k_sq > 0.0))
        throw invalid_profile_error("make_square_well: exterior k^2 must be positive");
    if (!(length > 0.0))
        throw invalid_profile_error("make_square_well: length must be positive");
    return make_piecewise({{-0.5 * length, 0.5 * length, exterior_k_sq + depth}},
                          exterior_k_sq, exterior_k_sq);
}

inline double evaluate_k_sq(const StratifiedProfile& p, double x) {
    return p.k_sq_at(x);
}

// Mirror x -> -x. Exterior constants and pieces swap sides.
inline StratifiedProfile mirror(const StratifiedProfile& p) {
    StratifiedProfile m;
    m.x_minus = -p.x_plus;
    m.x_plus = -p.x_minus;
    m.k_minus_sq = p.k_plus_sq;
    m.k_plus_sq = p.k_minus_sq;
    m.k_M_sq = p.k_M_sq;
    for (auto it = p.pieces.rbegin(); it != p.pieces.rend(); ++it)
        m.pieces.push_back({-it->to, -it->from, it->k_sq});
    return m;
}

enum class Side { west, north, east };

// Placement of a stratified half-plane in the global frame: local axes are
// rotated by theta about (center_x, center_y), and the trace line sits at
// local height 0 while the half-plane extends down to -epsilon.
struct HalfPlaneGeometry {
    double theta = 0.0;
    double center_x = 0.0;
    double center_y = 0.0;
    double epsilon = 0.1;
};

// Trace-line offset: a tenth of the shortest wavelength of the profile.
// Anything positive works; this keeps the trace line well inside the
// half-plane at every wavenumber the profile carries.
inline double default_epsilon(const StratifiedProfile& p) {
    double k_sq = std::max({p.k_M_sq, p.k_minus_sq, p.k_plus_sq, 1e-12});
    return 0.1 / std::sqrt(k_sq);
}

inline void validate_geometry(const HalfPlaneGeometry& g, Side side) {
    if (!(g.epsilon > 0.0))
        throw invalid_profile_error("geometry: epsilon must be positive");
    switch (side) {
        case Side::north:
            if (g.theta != 0.0)
                throw invalid_profile_error("geometry: north frame must have theta = 0");
            break;
        case Side::west:
            if (!(g.theta >= 0.5 * pi && g.theta < pi))
                throw invalid_profile_error("geometry: west angle must lie in [pi/2, pi)");
            break;
        case Side::east:
            if (!(g.theta > -pi && g.theta <= -0.5 * pi))
                throw invalid_profile_error("geometry: east angle must lie in (-pi, -pi/2]");
            break;
    }
}

// Global (x,y) -> local (X,Y) of a rotated frame.
inline std::pair<double, double> to_local(const HalfPlaneGeometry& g, double x,
                                          double y) {
    double c = std::cos(g.theta), s = std::sin(g.theta);
    double dx = x - g.center_x, dy = y - g.center_y;
    return {c * dx + s * dy, -s * dx + c * dy};
}

}  // namespace stratspec
