#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "stratspec/common.hpp"
#include "stratspec/ode.hpp"
#include "stratspec/profile.hpp"
#include "stratspec/quadrature.hpp"
#include "stratspec/two_layer.hpp"

namespace stratspec {

// A function of x with compact numerical support [lo, hi]; zero outside.
struct CompactFunction {
    std::function<cplx(double)> f;
    double lo = 0.0, hi = 0.0;

    cplx operator()(double x) const {
        if (x < lo || x > hi) return {0.0, 0.0};
        return f(x);
    }
};

inline CompactFunction gaussian_packet(double center, double sigma, double wavenumber = 0.0,
                                       cplx amplitude = 1.0, double support_sigmas = 10.0) {
    CompactFunction g;
    g.lo = center - support_sigmas * sigma;
    g.hi = center + support_sigmas * sigma;
    g.f = [=](double x) {
        double s = (x - center) / sigma;
        return amplitude * std::exp(cplx(-0.5 * s * s, wavenumber * x));
    };
    return g;
}

// Sampled spectral density on one branch with quadrature baked in: the
// weights already include the measure rho dlambda, so weighted sums of the
// stored values discretize integrals over the branch interval.
struct SpectralDensity {
    Branch branch = Branch::plus;
    double k_sq = 1.0;  // exterior squared wavenumber of this branch
    std::vector<double> nodes;
    std::vector<cplx> values;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    double energy() const {
        double e = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            e += weights[i] * std::norm(values[i]);
        return e;
    }
    double abs_mass() const {
        double m = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            m += weights[i] * std::abs(values[i]);
        return m;
    }
    // Sum of w * lambda^s * |value| over nodes with lambda > 0.
    double weighted_abs_mass(double s) const {
        double m = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] > 0.0)
                m += weights[i] * std::pow(nodes[i], s) * std::abs(values[i]);
        return m;
    }
};

struct SpectralCoefficients {
    SpectralDensity minus, plus;
    std::vector<cplx> point;  // guided-mode coefficients

    double norm_sq() const {
        double n = minus.energy() + plus.energy();
        for (cplx c : point) n += std::norm(c);
        return n;
    }
    const SpectralDensity& density(Branch b) const {
        return b == Branch::plus ? plus : minus;
    }
    SpectralDensity& density(Branch b) { return b == Branch::plus ? plus : minus; }
};

// Quadrature controls for the transform. The spectral grid lives in the
// edge-regular variable t = sqrt(lambda + k^2), where rho dlambda = dt/(2 pi):
// the inverse-square-root edge singularity of rho is removed exactly.
struct GftGrid {
    // The spectral tail of a transform decays only algebraically when the
    // profile has interfaces (the eigenfunctions are C^1 but not C^2 there),
    // so the truncation window dominates the default error budget.
    double lambda_max = 600.0;
    std::size_t spectral_panels = 48;
    std::size_t spectral_nodes = 12;
    double x_panel_fraction = 0.2;  // panel length vs fastest transverse wavelength
    std::size_t x_nodes = 16;
    std::optional<std::pair<double, double>> x_window;  // declared truncation window
    unsigned threads = 1;

    // Refine both the truncation window and the panel density; the window
    // grows quadratically so one refinement step gains at least two orders
    // against the algebraic tail.
    GftGrid refined(double factor) const {
        GftGrid g = *this;
        g.lambda_max = lambda_max * factor * factor;
        g.spectral_panels = static_cast<std::size_t>(std::ceil(spectral_panels * factor));
        g.x_panel_fraction = x_panel_fraction / factor;
        return g;
    }
};

struct ForwardDiagnostics {
    bool truncated = false;
    double tail_mass = 0.0;  // |phi| mass outside the declared window
};

// Spectral grid of one branch. The density is smooth in the edge variable
// t = sqrt(lambda + k^2) except at the other exterior's branch point
// lambda = -k_other^2, where the other transverse wavenumber switches
// between real and imaginary. When that point lies inside the branch
// interval, the grid is built in three sections, each parameterized by the
// locally regular variable: own t near the own edge, the other side's decay
// rate kappa just below the interior break, and the other side's t above it.
inline SpectralDensity make_spectral_grid(Branch b, double k_sq, double k_other_sq,
                                          const GftGrid& g) {
    SpectralDensity d;
    d.branch = b;
    d.k_sq = k_sq;
    std::vector<std::pair<double, double>> lamw;  // (lambda, weight incl. rho)
    auto panels = [&](double frac) {
        return std::max<std::size_t>(2, static_cast<std::size_t>(
                                            std::ceil(g.spectral_panels * frac)));
    };
    if (k_other_sq >= k_sq - 1e-14) {
        double t_max = std::sqrt(g.lambda_max + k_sq);
        QuadRule r = composite_gl(0.0, t_max, t_max / static_cast<double>(g.spectral_panels),
                                  g.spectral_nodes);
        for (std::size_t i = 0; i < r.size(); ++i) {
            double t = r.nodes[i];
            lamw.emplace_back(t * t - k_sq, r.weights[i] / (2.0 * pi));
        }
    } else {
        double lam_mid = -0.5 * (k_sq + k_other_sq);
        // own-edge section: lambda in (-k^2, lam_mid], variable t
        {
            double t_hi = std::sqrt(lam_mid + k_sq);
            QuadRule r = composite_gl(0.0, t_hi, t_hi / static_cast<double>(panels(0.25)),
                                      g.spectral_nodes);
            for (std::size_t i = 0; i < r.size(); ++i) {
                double t = r.nodes[i];
                lamw.emplace_back(t * t - k_sq, r.weights[i] / (2.0 * pi));
            }
        }
        // below the interior break: variable kappa = sqrt(-lambda - k_other^2)
        {
            double kap_hi = std::sqrt(-lam_mid - k_other_sq);
            QuadRule r = composite_gl(0.0, kap_hi, kap_hi / static_cast<double>(panels(0.25)),
                                      g.spectral_nodes);
            for (std::size_t i = 0; i < r.size(); ++i) {
                double kap = r.nodes[i];
                double lam = -k_other_sq - kap * kap;
                double beta_own = std::sqrt(lam + k_sq);
                lamw.emplace_back(lam, r.weights[i] * 2.0 * kap / (4.0 * pi * beta_own));
            }
        }
        // above the interior break: variable tau = sqrt(lambda + k_other^2)
        {
            double tau_hi = std::sqrt(g.lambda_max + k_other_sq);
            QuadRule r = composite_gl(0.0, tau_hi, tau_hi / static_cast<double>(panels(1.0)),
                                      g.spectral_nodes);
            for (std::size_t i = 0; i < r.size(); ++i) {
                double tau = r.nodes[i];
                double lam = tau * tau - k_other_sq;
                double beta_own = std::sqrt(lam + k_sq);
                lamw.emplace_back(lam, r.weights[i] * 2.0 * tau / (4.0 * pi * beta_own));
            }
        }
        std::sort(lamw.begin(), lamw.end());
    }
    d.nodes.reserve(lamw.size());
    d.weights.reserve(lamw.size());
    for (auto [lam, w] : lamw) {
        d.nodes.push_back(lam);
        d.weights.push_back(w);
    }
    d.values.assign(lamw.size(), cplx(0.0, 0.0));
    return d;
}

namespace detail {

inline double fastest_k_sq(const StratifiedProfile& p) {
    return std::max({p.k_M_sq, p.k_minus_sq, p.k_plus_sq, 0.0});
}

inline QuadRule x_rule(const CompactFunction& phi, const StratifiedProfile& p,
                       const GftGrid& g) {
    double lo = phi.lo, hi = phi.hi;
    if (g.x_window) {
        lo = std::max(lo, g.x_window->first);
        hi = std::min(hi, g.x_window->second);
    }
    double k_fast = std::sqrt(g.lambda_max + fastest_k_sq(p));
    double max_panel = g.x_panel_fraction * 2.0 * pi / k_fast;
    return composite_gl(lo, hi, max_panel, g.x_nodes, p.breakpoints());
}

// Eigenfunction evaluators at every node of a density grid.
inline std::vector<GeneralizedEigenfunction> node_eigenfunctions(
    const SpectralDensity& d, const StratifiedProfile& p) {
    std::vector<GeneralizedEigenfunction> evals;
    evals.reserve(d.size());
    for (double lam : d.nodes)
        evals.push_back(assemble_eigenfunction(cplx(lam, 0.0), d.branch, p));
    return evals;
}

}  // namespace detail

// Forward transform: project onto the conjugated generalized eigenfunctions
// and, when the profile traps modes, onto the guided modes.
inline SpectralCoefficients forward(const CompactFunction& phi, const StratifiedProfile& p,
                                    const GftGrid& grid,
                                    const std::vector<GuidedMode>* modes = nullptr,
                                    ForwardDiagnostics* diag = nullptr) {
    SpectralCoefficients out;
    out.minus = make_spectral_grid(Branch::minus, p.k_minus_sq, p.k_plus_sq, grid);
    out.plus = make_spectral_grid(Branch::plus, p.k_plus_sq, p.k_minus_sq, grid);

    if (diag) {
        *diag = {};
        if (grid.x_window) {
            auto [wl, wh] = *grid.x_window;
            if (phi.lo < wl || phi.hi > wh) {
                diag->truncated = true;
                double mass = 0.0;
                if (phi.lo < wl) {
                    QuadRule r = composite_gl(phi.lo, wl, (wl - phi.lo) / 32.0, 12);
                    for (std::size_t i = 0; i < r.size(); ++i)
                        mass += r.weights[i] * std::abs(phi(r.nodes[i]));
                }
                if (phi.hi > wh) {
                    QuadRule r = composite_gl(wh, phi.hi, (phi.hi - wh) / 32.0, 12);
                    for (std::size_t i = 0; i < r.size(); ++i)
                        mass += r.weights[i] * std::abs(phi(r.nodes[i]));
                }
                diag->tail_mass = mass;
            }
        }
    }

    QuadRule xr = detail::x_rule(phi, p, grid);
    std::vector<cplx> phi_vals(xr.size());
    for (std::size_t i = 0; i < xr.size(); ++i) phi_vals[i] = phi(xr.nodes[i]);

    for (SpectralDensity* d : {&out.minus, &out.plus}) {
        auto evals = detail::node_eigenfunctions(*d, p);
        parallel_for(d->size(), grid.threads, [&](std::size_t j) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < xr.size(); ++i)
                acc += xr.weights[i] * phi_vals[i] * std::conj(evals[j].value(xr.nodes[i]));
            d->values[j] = acc;
        });
    }

    std::vector<GuidedMode> local_modes;
    if (!modes) {
        local_modes = find_guided_modes(p);
        modes = &local_modes;
    }
    out.point.reserve(modes->size());
    for (const auto& m : *modes) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < xr.size(); ++i)
            acc += xr.weights[i] * phi_vals[i] * m.value(xr.nodes[i]);
        out.point.push_back(acc);
    }
    return out;
}

// Inverse transform at the given x locations.
inline std::vector<cplx> inverse(const SpectralCoefficients& coeffs,
                                 const StratifiedProfile& p,
                                 const std::vector<double>& x_grid,
                                 const std::vector<GuidedMode>* modes = nullptr,
                                 unsigned threads = 1) {
    for (const SpectralDensity* d : {&coeffs.minus, &coeffs.plus})
        if (!std::isfinite(d->abs_mass()))
            throw std::domain_error("inverse: density is not numerically integrable");

    std::vector<GuidedMode> local_modes;
    bool need_modes = false;
    for (cplx c : coeffs.point)
        if (c != cplx(0.0, 0.0)) need_modes = true;
    if (need_modes && !modes) {
        local_modes = find_guided_modes(p);
        modes = &local_modes;
    }
    if (need_modes && modes->size() < coeffs.point.size())
        throw precondition_error("inverse: point coefficients without matching modes");

    std::vector<cplx> out(x_grid.size(), cplx(0.0, 0.0));
    for (const SpectralDensity* d : {&coeffs.minus, &coeffs.plus}) {
        auto evals = detail::node_eigenfunctions(*d, p);
        parallel_for(x_grid.size(), threads, [&](std::size_t i) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < d->size(); ++j)
                acc += d->weights[j] * d->values[j] * evals[j].value(x_grid[i]);
            out[i] += acc;
        });
    }
    if (need_modes)
        for (std::size_t n = 0; n < coeffs.point.size(); ++n)
            for (std::size_t i = 0; i < x_grid.size(); ++i)
                out[i] += coeffs.point[n] * (*modes)[n].value(x_grid[i]);
    return out;
}

inline double norm_sq_x(const CompactFunction& phi, const StratifiedProfile& p,
                        const GftGrid& grid) {
    QuadRule xr = detail::x_rule(phi, p, grid);
    double n = 0.0;
    for (std::size_t i = 0; i < xr.size(); ++i)
        n += xr.weights[i] * std::norm(phi(xr.nodes[i]));
    return n;
}

// |  ||phi||^2 - ||F phi||^2  | / ||phi||^2
inline double plancherel_check(const CompactFunction& phi, const StratifiedProfile& p,
                               const GftGrid& grid,
                               const std::vector<GuidedMode>* modes = nullptr) {
    double nx = norm_sq_x(phi, p, grid);
    if (nx == 0.0)
        throw std::domain_error("plancherel_check: zero input");
    SpectralCoefficients c = forward(phi, p, grid, modes);
    return std::abs(nx - c.norm_sq()) / nx;
}

// Relative spectral-space distance between F(A phi) and lambda * F(phi).
// A phi = -phi'' - K^2 phi is taken from the supplied callable when given,
// otherwise from high-order finite differences (which requires the support
// of phi to stay clear of profile jumps).
inline double diagonalization_check(const CompactFunction& phi, const StratifiedProfile& p,
                                    const GftGrid& grid,
                                    const std::function<cplx(double)>* analytic_Aphi = nullptr,
                                    const std::vector<GuidedMode>* modes = nullptr) {
    CompactFunction Aphi;
    Aphi.lo = phi.lo;
    Aphi.hi = phi.hi;
    if (analytic_Aphi) {
        auto fn = *analytic_Aphi;
        Aphi.f = fn;
    } else {
        double h = (phi.hi - phi.lo) / 8192.0;
        for (double b : p.breakpoints())
            if (b > phi.lo - 2.0 * h && b < phi.hi + 2.0 * h)
                throw precondition_error(
                    "diagonalization_check: support touches a profile jump; "
                    "supply A phi analytically");
        auto base = phi;
        Aphi.f = [base, &p, h](double x) {
            cplx d2 = (-base(x - 2.0 * h) + 16.0 * base(x - h) - 30.0 * base(x) +
                       16.0 * base(x + h) - base(x + 2.0 * h)) /
                      (12.0 * h * h);
            return -d2 - p.k_sq_at(x) * base(x);
        };
    }

    std::vector<GuidedMode> local_modes;
    if (!modes) {
        local_modes = find_guided_modes(p);
        modes = &local_modes;
    }
    SpectralCoefficients fa = forward(Aphi, p, grid, modes);
    SpectralCoefficients f = forward(phi, p, grid, modes);

    double num = 0.0, den = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const auto& da = fa.density(b);
        const auto& df = f.density(b);
        for (std::size_t i = 0; i < da.size(); ++i) {
            cplx want = da.nodes[i] * df.values[i];
            num += da.weights[i] * std::norm(da.values[i] - want);
            den += da.weights[i] * std::norm(want);
        }
    }
    for (std::size_t n = 0; n < fa.point.size(); ++n) {
        cplx want = (*modes)[n].lambda * f.point[n];
        num += std::norm(fa.point[n] - want);
        den += std::norm(want);
    }
    if (den == 0.0)
        throw std::domain_error("diagonalization_check: zero transform");
    return std::sqrt(num / den);
}

}  // namespace stratspec
