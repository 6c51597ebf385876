#pragma once

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "stratspec/common.hpp"
#include "stratspec/gft.hpp"
#include "stratspec/profile.hpp"

namespace stratspec {

// Smooth compactly supported density bump on a spectral branch, supported
// strictly inside (0, infinity). Two shapes:
//  - smooth: the standard exp(-1/(1-s^2)) wall-to-wall bump;
//  - windowed_gaussian: a Gaussian with edges at 6.5 sigma, closed off by a
//    C-infinity window that only acts below the 4e-8 level of the peak. Its
//    trace decays like a genuine Gaussian down to that floor, which the
//    hard-edged bump cannot do (its trace decays subexponentially).
struct DensityBump {
    enum class Kind { smooth, windowed_gaussian };

    Branch branch = Branch::plus;
    double lo = 1.0, hi = 4.0;
    cplx amplitude = 1.0;
    Kind kind = Kind::smooth;

    cplx operator()(double lambda) const {
        if (lambda <= lo || lambda >= hi) return {0.0, 0.0};
        double s = (2.0 * lambda - (lo + hi)) / (hi - lo);
        if (kind == Kind::smooth)
            return amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
        double sigma = (hi - lo) / 13.0;
        double center = 0.5 * (lo + hi);
        double d = (lambda - center) / sigma;
        double g = std::exp(-0.5 * d * d);
        double a = std::abs(s);
        double w = 1.0;
        if (a > 0.85) {
            auto ramp = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
            double t = (1.0 - a) / 0.15;  // 1 at the plateau edge, 0 at support end
            w = ramp(t) / (ramp(t) + ramp(1.0 - t));
        }
        return amplitude * g * w;
    }
};

struct BumpGrid {
    std::size_t panels_per_bump = 24;
    std::size_t nodes_per_panel = 12;
};

// An L2 Helmholtz solution in a stratified half-plane, stored losslessly as
// the spectrum of its trace on the line Y = 0. Point components are absent
// (guided modes never contribute) and the continuous components live on
// lambda > 0, so every modal term decays as exp(-sqrt(lambda) Y).
struct HalfPlaneField {
    StratifiedProfile profile;
    HalfPlaneGeometry geometry;
    SpectralCoefficients trace_spectrum;

    struct EvalCache {
        std::vector<GeneralizedEigenfunction> minus_evals, plus_evals;
    };
    std::shared_ptr<const EvalCache> cache;

    void build_cache() {
        auto c = std::make_shared<EvalCache>();
        c->minus_evals = detail::node_eigenfunctions(trace_spectrum.minus, profile);
        c->plus_evals = detail::node_eigenfunctions(trace_spectrum.plus, profile);
        cache = std::move(c);
    }

    const std::vector<GeneralizedEigenfunction>& evals(Branch b) const {
        return b == Branch::plus ? cache->plus_evals : cache->minus_evals;
    }

    double abs_mass() const {
        return trace_spectrum.minus.abs_mass() + trace_spectrum.plus.abs_mass();
    }

    bool zero() const {
        return trace_spectrum.minus.size() == 0 && trace_spectrum.plus.size() == 0;
    }
};

// The modal superposition at local coordinates (x, y). With a compactly
// supported density every term is entire in (x, y), so the sum extends below
// the trace line as well; it is the half-plane representation only for y >= 0.
inline cplx evaluate_extension(const HalfPlaneField& field, double x, double y) {
    cplx acc = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const SpectralDensity& d = field.trace_spectrum.density(b);
        const auto& evals = field.evals(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double damp = std::sqrt(d.nodes[i]) * y;
            acc += d.weights[i] * d.values[i] * evals[i].value(x) * std::exp(-damp);
        }
    }
    return acc;
}

// Evaluate the half-plane representation at local coordinates (x, y), y >= 0.
inline cplx evaluate_representation(const HalfPlaneField& field, double x, double y) {
    if (y < 0.0)
        throw std::domain_error("evaluate_representation: y must be nonnegative");
    return evaluate_extension(field, x, y);
}

// Build a valid half-plane field from explicit density bumps.
inline HalfPlaneField synthesize_solution(const std::vector<DensityBump>& bumps,
                                          const StratifiedProfile& profile,
                                          const HalfPlaneGeometry& geometry,
                                          const BumpGrid& grid = {}) {
    HalfPlaneField field;
    field.profile = profile;
    field.geometry = geometry;
    for (Branch b : {Branch::minus, Branch::plus}) {
        SpectralDensity d;
        d.branch = b;
        d.k_sq = (b == Branch::plus) ? profile.k_plus_sq : profile.k_minus_sq;
        std::vector<double> edges;
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& bump : bumps) {
            if (bump.branch != b) continue;
            if (!(bump.lo > 0.0) || !(bump.hi > bump.lo))
                throw invalid_density_error(
                    "synthesize_solution: bump support must lie strictly inside (0, inf)");
            if (!any) {
                lo = bump.lo;
                hi = bump.hi;
                any = true;
            } else {
                lo = std::min(lo, bump.lo);
                hi = std::max(hi, bump.hi);
            }
            edges.push_back(bump.lo);
            edges.push_back(bump.hi);
        }
        if (any) {
            double max_panel = (hi - lo) / static_cast<double>(grid.panels_per_bump);
            QuadRule rule = composite_gl(lo, hi, max_panel, grid.nodes_per_panel, edges);
            d.nodes = rule.nodes;
            d.weights.resize(rule.size());
            d.values.resize(rule.size());
            for (std::size_t i = 0; i < rule.size(); ++i) {
                double lam = rule.nodes[i];
                d.weights[i] = rule.weights[i] / (4.0 * pi * std::sqrt(lam + d.k_sq));
                cplx v = 0.0;
                for (const auto& bump : bumps)
                    if (bump.branch == b) v += bump(lam);
                d.values[i] = v;
            }
        }
        field.trace_spectrum.density(b) = std::move(d);
    }
    field.build_cache();
    return field;
}

struct TraceDiagnostics {
    double continuous_leakage = 0.0;  // L2 fraction of density mass on lambda <= 0
    double point_leakage = 0.0;       // L2 fraction carried by guided modes
    double threshold = 1e-6;
    bool valid = false;
};

// Transform a trace sampled on the line Y = 0 and measure how far it is from
// the trace of an L2 half-plane solution: a valid trace has no guided-mode
// component and no continuous component at lambda <= 0. The leakage is
// reported, not enforced.
inline HalfPlaneField spectral_trace(const CompactFunction& phi,
                                     const StratifiedProfile& profile,
                                     const HalfPlaneGeometry& geometry,
                                     const GftGrid& grid, TraceDiagnostics* diag = nullptr,
                                     double threshold = 1e-6) {
    HalfPlaneField field;
    field.profile = profile;
    field.geometry = geometry;
    field.trace_spectrum = forward(phi, profile, grid);

    double total = field.trace_spectrum.norm_sq();
    double bad_cont = 0.0, bad_point = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const SpectralDensity& d = field.trace_spectrum.density(b);
        for (std::size_t i = 0; i < d.size(); ++i)
            if (d.nodes[i] <= 0.0) bad_cont += d.weights[i] * std::norm(d.values[i]);
    }
    for (cplx c : field.trace_spectrum.point) bad_point += std::norm(c);
    if (diag) {
        diag->continuous_leakage = total > 0.0 ? bad_cont / total : 0.0;
        diag->point_leakage = total > 0.0 ? bad_point / total : 0.0;
        diag->threshold = threshold;
        diag->valid = diag->continuous_leakage < threshold && diag->point_leakage < threshold;
    }
    field.build_cache();
    return field;
}

struct RayIntegral {
    double value = 0.0;
    double tail_bound = 0.0;
    bool converged = false;
};

// L1 norm of the field along the ray (t cos a, t sin a), t in (0, t_max],
// with a certified bound on the discarded tail: each modal term decays like
// exp(-sqrt(lambda) t sin a), so the remainder is bounded by
// 2 sum_pm int |phi^pm| e^{-sqrt(lambda) t_max sin a} / (sqrt(lambda) sin a) rho dlambda.
inline RayIntegral ray_l1_norm(const HalfPlaneField& field, double alpha, double t_max,
                               double tail_tol = 1e-8) {
    if (!(alpha > 0.0 && alpha < pi))
        throw std::domain_error("ray_l1_norm: alpha must lie strictly inside (0, pi)");
    RayIntegral out;
    if (field.zero()) {
        out.converged = true;
        return out;
    }

    double lam_hi = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const auto& d = field.trace_spectrum.density(b);
        for (double lam : d.nodes) lam_hi = std::max(lam_hi, lam);
    }
    double k_fast = std::sqrt(lam_hi + detail::fastest_k_sq(field.profile)) + std::sqrt(lam_hi);
    QuadRule rule = composite_gl(0.0, t_max, 2.0 * pi / (4.0 * k_fast), 16);
    double ca = std::cos(alpha), sa = std::sin(alpha);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double t = rule.nodes[i];
        out.value += rule.weights[i] *
                     std::abs(evaluate_representation(field, t * ca, t * sa));
    }

    for (Branch b : {Branch::minus, Branch::plus}) {
        const auto& d = field.trace_spectrum.density(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double sl = std::sqrt(d.nodes[i]);
            out.tail_bound += 2.0 * d.weights[i] * std::abs(d.values[i]) *
                              std::exp(-sl * t_max * sa) / (sl * sa);
        }
    }
    out.converged = out.tail_bound < tail_tol * (1.0 + out.value);
    return out;
}

}  // namespace stratspec
