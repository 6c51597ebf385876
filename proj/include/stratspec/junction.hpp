#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "stratspec/common.hpp"
#include "stratspec/contour.hpp"
#include "stratspec/gft.hpp"
#include "stratspec/halfplane.hpp"
#include "stratspec/ode.hpp"
#include "stratspec/profile.hpp"

namespace stratspec {

enum class JunctionKind { right_angle, general_angle };

struct HalfPlaneSpec {
    HalfPlaneGeometry geometry;
    StratifiedProfile profile;
};

// Three stratified half-planes forming a junction. The north frame is the
// global one; west and east frames are rotated about their centers. The
// stratification interfaces meet the trace lines at the rotation centers.
struct JunctionConfig {
    HalfPlaneSpec west, north, east;
    JunctionKind kind = JunctionKind::right_angle;

    // Intersections of the west/east trace lines with the north trace line.
    double a_NW() const {
        return west.geometry.center_x -
               west.geometry.center_y / std::tan(west.geometry.theta);
    }
    double a_NE() const {
        return east.geometry.center_x -
               east.geometry.center_y / std::tan(east.geometry.theta);
    }
};

inline std::pair<double, double> local_coordinates(const JunctionConfig& cfg, Side j,
                                                   double x, double y) {
    switch (j) {
        case Side::west: return to_local(cfg.west.geometry, x, y);
        case Side::east: return to_local(cfg.east.geometry, x, y);
        default: return {x, y};
    }
}

inline std::vector<std::string> check_compatibility(const JunctionConfig& cfg) {
    std::vector<std::string> v;
    const double tol = 1e-12;
    auto eq = [&](double a, double b) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); };

    if (cfg.north.geometry.theta != 0.0) v.push_back("north frame must have theta = 0");
    double tw = cfg.west.geometry.theta, te = cfg.east.geometry.theta;
    if (!(tw >= 0.5 * pi - tol && tw < pi)) v.push_back("west angle outside [pi/2, pi)");
    if (!(te > -pi && te <= -0.5 * pi + tol)) v.push_back("east angle outside (-pi, -pi/2]");
    bool right = eq(tw, 0.5 * pi) && eq(te, -0.5 * pi);
    if (right != (cfg.kind == JunctionKind::right_angle))
        v.push_back("declared junction kind does not match the angles");

    if (!eq(cfg.west.profile.k_plus_sq, cfg.north.profile.k_minus_sq))
        v.push_back("west k+^2 must equal north k-^2");
    if (!eq(cfg.east.profile.k_minus_sq, cfg.north.profile.k_plus_sq))
        v.push_back("east k-^2 must equal north k+^2");
    if (cfg.kind == JunctionKind::general_angle &&
        !eq(cfg.west.profile.k_minus_sq, cfg.east.profile.k_plus_sq))
        v.push_back("west k-^2 must equal east k+^2 at a general-angle junction");

    // Stratification bands must avoid the pairwise overlap wedges: the north
    // band sits between the trace intersections, and along the north trace
    // the west/east local abscissae stay outside their bands.
    double anw = cfg.a_NW(), ane = cfg.a_NE();
    if (!(cfg.north.profile.x_minus >= anw && cfg.north.profile.x_plus <= ane))
        v.push_back("north stratification band must lie inside [a_NW, a_NE]");
    double xw_at_anw = -cfg.west.geometry.center_y / std::sin(tw);
    if (!(xw_at_anw >= cfg.west.profile.x_plus))
        v.push_back("west stratification band intersects the north trace line");
    double xe_at_ane = -cfg.east.geometry.center_y / std::sin(te);
    if (!(xe_at_ane <= cfg.east.profile.x_minus))
        v.push_back("east stratification band intersects the north trace line");
    return v;
}

// Split a trace on the north line into west, middle and east segments whose
// transforms add up to the transform of the whole.
inline std::array<CompactFunction, 3> split_trace(const CompactFunction& phi_n,
                                                  double a_left, double a_right) {
    if (!(a_left < a_right))
        throw std::domain_error("split_trace: split points must satisfy a_left < a_right");
    CompactFunction left = phi_n, mid = phi_n, right = phi_n;
    left.hi = std::min(phi_n.hi, a_left);
    left.lo = std::min(phi_n.lo, left.hi);
    mid.lo = std::max(phi_n.lo, a_left);
    mid.hi = std::min(phi_n.hi, a_right);
    if (mid.hi < mid.lo) mid.hi = mid.lo;
    right.lo = std::max(phi_n.lo, a_right);
    right.hi = std::max(phi_n.hi, right.lo);
    return {left, mid, right};
}

// D^{pm}(lambda, mu): denominators of the general-angle transfer kernels.
// D^- never vanishes on the cut plane; the zero locus of D^+ is the
// analyticity curve parameterized by mu.
inline cplx denominator_D(int sign, cplx lambda, double mu, double theta,
                          double k_n_minus_sq) {
    const cplx I(0.0, 1.0);
    double bmu = std::sqrt(mu + k_n_minus_sq);
    cplx bl = beta(lambda, k_n_minus_sq);
    return std::sqrt(mu) * std::sin(theta) +
           static_cast<double>(sign) * I * bmu * std::cos(theta) + I * bl;
}

enum class CurveKind { lambda_NW, lambda_NE_plus, lambda_NE_minus };

struct CurveSample {
    CurveKind which;
    double mu;
    cplx lambda;
    double touch_point;  // curve value at mu = 0, always real
};

inline double touch_point(double theta, double k_sq) {
    double s = std::sin(theta);
    return -k_sq * s * s;
}

inline cplx curve_point(CurveKind which, double theta, double k_sq, double mu) {
    double re = mu * std::cos(2.0 * theta) - k_sq * std::sin(theta) * std::sin(theta);
    double im = mu == 0.0 ? 0.0 : std::sqrt(mu) * std::sqrt(mu + k_sq) * std::sin(2.0 * theta);
    switch (which) {
        case CurveKind::lambda_NW: return {re, -im};
        case CurveKind::lambda_NE_plus: return {re, im};
        default: return {re, -im};
    }
}

// Sample the analyticity curve(s) of one side. West yields the single curve
// reaching the real axis at -k^2 sin^2(theta); east yields the conjugate pair.
inline std::vector<CurveSample> analyticity_curves(Side side, double theta, double k_sq,
                                                   const std::vector<double>& mu_grid) {
    std::vector<CurveSample> out;
    double tp = touch_point(theta, k_sq);
    for (double mu : mu_grid) {
        if (mu < 0.0) throw std::domain_error("analyticity_curves: mu must be >= 0");
        if (side == Side::west) {
            out.push_back({CurveKind::lambda_NW, mu,
                           curve_point(CurveKind::lambda_NW, theta, k_sq, mu), tp});
        } else {
            out.push_back({CurveKind::lambda_NE_plus, mu,
                           curve_point(CurveKind::lambda_NE_plus, theta, k_sq, mu), tp});
            out.push_back({CurveKind::lambda_NE_minus, mu,
                           curve_point(CurveKind::lambda_NE_minus, theta, k_sq, mu), tp});
        }
    }
    return out;
}

struct TransferDiagnostics {
    bool near_curve = false;
    double curve_distance = std::numeric_limits<double>::infinity();
};

namespace detail {

inline void require_in_DN(cplx lambda, const StratifiedProfile& north) {
    if (!in_continuation_domain(lambda, north.k_minus_sq, north.k_plus_sq))
        throw std::domain_error("transfer: lambda lies on the north branch cut");
}

struct NorthData {
    cplx T, R, beta_minus, beta_plus;
};

inline NorthData north_data(cplx lambda, const StratifiedProfile& north) {
    GeneralizedEigenfunction e = assemble_eigenfunction(lambda, Branch::plus, north);
    return {e.T, e.R, e.beta_minus, e.beta_plus};
}

}  // namespace detail

// Right-angle transfer of the west trace spectrum into the west part of the
// north-plus spectral component. Exact identity with the direct half-line
// integral for real lambda in the common reality interval, and the analytic
// continuation of it elsewhere in the cut plane.
inline cplx transfer_right_angle(const HalfPlaneField& west, const JunctionConfig& cfg,
                                 cplx lambda) {
    detail::require_in_DN(lambda, cfg.north.profile);
    const cplx I(0.0, 1.0);
    auto nd = detail::north_data(lambda, cfg.north.profile);
    double a_w = cfg.west.geometry.center_x;
    double x0 = -cfg.west.geometry.center_y;  // west abscissa of the north trace line
    cplx acc = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const SpectralDensity& d = west.trace_spectrum.density(b);
        const auto& evals = west.evals(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            cplx denom = std::sqrt(d.nodes[i]) + I * nd.beta_minus;
            acc += d.weights[i] * d.values[i] * evals[i].value(x0) / denom;
        }
    }
    return nd.T * std::exp(I * nd.beta_minus * a_w) * acc;
}

// Right-angle transfer of the east trace spectrum into the east part of the
// north-plus spectral component.
inline cplx transfer_right_angle_east(const HalfPlaneField& east, const JunctionConfig& cfg,
                                      cplx lambda) {
    detail::require_in_DN(lambda, cfg.north.profile);
    const cplx I(0.0, 1.0);
    auto nd = detail::north_data(lambda, cfg.north.profile);
    double a_e = cfg.east.geometry.center_x;
    double x0 = cfg.east.geometry.center_y;  // east abscissa of the north trace line
    cplx e_plus = std::exp(I * nd.beta_plus * a_e);
    cplx e_minus = std::exp(-I * nd.beta_plus * a_e);
    cplx acc = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const SpectralDensity& d = east.trace_spectrum.density(b);
        const auto& evals = east.evals(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double smu = std::sqrt(d.nodes[i]);
            cplx kernel = e_plus / (smu - I * nd.beta_plus) +
                          nd.R * e_minus / (smu + I * nd.beta_plus);
            acc += d.weights[i] * d.values[i] * evals[i].value(x0) * kernel;
        }
    }
    return acc;
}

// General-angle west transfer with the A^{pm}(lambda, mu) kernels. The
// denominators D^{pm} couple the west spectral parameter mu with lambda;
// lambda values close to the D^+ zero curve are flagged, not rejected.
inline cplx transfer_general(const HalfPlaneField& west, const JunctionConfig& cfg,
                             cplx lambda, TransferDiagnostics* diag = nullptr) {
    detail::require_in_DN(lambda, cfg.north.profile);
    const cplx I(0.0, 1.0);
    auto nd = detail::north_data(lambda, cfg.north.profile);
    const double theta = cfg.west.geometry.theta;
    const double k_nm_sq = cfg.north.profile.k_minus_sq;
    const double a_nw = cfg.a_NW();
    const double xw0 = -cfg.west.geometry.center_y / std::sin(theta);
    const double st = std::sin(theta), ct = std::cos(theta);

    cplx common = nd.T * std::exp(I * nd.beta_minus * a_nw);
    if (diag) *diag = {};
    cplx acc = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const SpectralDensity& d = west.trace_spectrum.density(b);
        const auto& evals = west.evals(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double mu = d.nodes[i];
            double smu = std::sqrt(mu);
            double bmu = std::sqrt(mu + k_nm_sq);  // beta_W^+(mu) = beta_N^-(mu)
            cplx d_plus = smu * st + I * bmu * ct + I * nd.beta_minus;
            cplx e_p = std::exp(I * bmu * xw0);
            if (diag) {
                double dist = std::abs(lambda - curve_point(CurveKind::lambda_NW, theta,
                                                            k_nm_sq, mu));
                diag->curve_distance = std::min(diag->curve_distance, dist);
            }
            cplx kernel;
            if (b == Branch::minus) {
                kernel = evals[i].T * e_p / d_plus;
            } else {
                cplx d_minus = smu * st - I * bmu * ct + I * nd.beta_minus;
                kernel = std::exp(-I * bmu * xw0) / d_minus + evals[i].R * e_p / d_plus;
            }
            acc += d.weights[i] * d.values[i] * kernel;
        }
    }
    if (diag && diag->curve_distance < 1e-3 * (1.0 + std::abs(lambda)))
        diag->near_curve = true;
    return common * acc;
}

// General-angle east transfer, derived the same way as the west kernels with
// the east exterior forms; reduces to the right-angle east formula at
// theta_E = -pi/2. Four denominators appear, two per exterior wave.
inline cplx transfer_general_east(const HalfPlaneField& east, const JunctionConfig& cfg,
                                  cplx lambda, TransferDiagnostics* diag = nullptr) {
    detail::require_in_DN(lambda, cfg.north.profile);
    const cplx I(0.0, 1.0);
    auto nd = detail::north_data(lambda, cfg.north.profile);
    const double theta = cfg.east.geometry.theta;
    const double k_np_sq = cfg.north.profile.k_plus_sq;
    const double a_ne = cfg.a_NE();
    const double xe0 = -cfg.east.geometry.center_y / std::sin(theta);
    const double st = std::sin(theta), ct = std::cos(theta);

    cplx e_lp = std::exp(I * nd.beta_plus * a_ne);
    cplx e_lm = std::exp(-I * nd.beta_plus * a_ne);
    if (diag) *diag = {};
    cplx acc = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const SpectralDensity& d = east.trace_spectrum.density(b);
        const auto& evals = east.evals(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            double mu = d.nodes[i];
            double smu = std::sqrt(mu);
            double bmu = std::sqrt(mu + k_np_sq);  // beta_E^-(mu) = beta_N^+(mu)
            auto integral = [&](int s1, int s2) {
                return -1.0 / (smu * st + static_cast<double>(s1) * I * bmu * ct +
                               static_cast<double>(s2) * I * nd.beta_plus);
            };
            if (diag) {
                double dist = std::min(
                    std::abs(lambda - curve_point(CurveKind::lambda_NE_plus, theta,
                                                  k_np_sq, mu)),
                    std::abs(lambda - curve_point(CurveKind::lambda_NE_minus, theta,
                                                  k_np_sq, mu)));
                diag->curve_distance = std::min(diag->curve_distance, dist);
            }
            cplx e_mp = std::exp(I * bmu * xe0);
            cplx e_mm = std::exp(-I * bmu * xe0);
            cplx bracket_m = e_lp * integral(-1, +1) + nd.R * e_lm * integral(-1, -1);
            cplx kernel;
            if (b == Branch::plus) {
                kernel = evals[i].T * e_mm * bracket_m;
            } else {
                cplx bracket_p = e_lp * integral(+1, +1) + nd.R * e_lm * integral(+1, -1);
                kernel = e_mp * bracket_p + evals[i].R * e_mm * bracket_m;
            }
            acc += d.weights[i] * d.values[i] * kernel;
        }
    }
    if (diag && diag->curve_distance < 1e-3 * (1.0 + std::abs(lambda)))
        diag->near_curve = true;
    return acc;
}

inline cplx transfer_outer(const HalfPlaneField& field, const JunctionConfig& cfg,
                           Side side, cplx lambda, TransferDiagnostics* diag = nullptr) {
    if (cfg.kind == JunctionKind::right_angle) {
        if (diag) *diag = {};
        return side == Side::west ? transfer_right_angle(field, cfg, lambda)
                                  : transfer_right_angle_east(field, cfg, lambda);
    }
    return side == Side::west ? transfer_general(field, cfg, lambda, diag)
                              : transfer_general_east(field, cfg, lambda, diag);
}

// Direct quadrature of the same quantity the transfer kernels compute: the
// field is evaluated along the outer segment of the north trace line and
// integrated against the conjugated north eigenfunction. Used as the dual
// path of the Fubini identity.
inline cplx direct_transfer(const HalfPlaneField& field, const JunctionConfig& cfg,
                            Side side, cplx lambda, double rel_tail = 1e-9) {
    const HalfPlaneSpec& spec = side == Side::west ? cfg.west : cfg.east;
    double split = side == Side::west ? cfg.a_NW() : cfg.a_NE();
    double mu_lo = std::numeric_limits<double>::infinity();
    double mu_hi = 0.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const auto& d = field.trace_spectrum.density(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            mu_lo = std::min(mu_lo, d.nodes[i]);
            mu_hi = std::max(mu_hi, d.nodes[i]);
        }
    }
    if (!std::isfinite(mu_lo)) return 0.0;

    double sin_t = std::abs(std::sin(spec.geometry.theta));
    double depth = -std::log(rel_tail);
    double reach = depth / (std::sqrt(mu_lo) * sin_t);

    GeneralizedEigenfunction north_eig =
        assemble_eigenfunction(lambda, Branch::plus, cfg.north.profile);

    double k_fast = std::sqrt(mu_hi + detail::fastest_k_sq(field.profile)) +
                    std::abs(north_eig.beta_minus) + std::abs(north_eig.beta_plus);
    double lo = side == Side::west ? split - reach : split;
    double hi = side == Side::west ? split : split + reach;
    QuadRule rule = composite_gl(lo, hi, 2.0 * pi / (6.0 * k_fast), 16);

    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        double x = rule.nodes[i];
        auto [X, Y] = to_local(spec.geometry, x, 0.0);
        cplx u = evaluate_representation(field, X, Y);
        acc += rule.weights[i] * u * std::conj(north_eig.value(x));
    }
    return acc;
}

// Mirror the whole junction through x -> -x: west and east swap roles, every
// profile is reflected, and spectral branches swap. Used to obtain the
// north-minus transfers from the north-plus implementation.
inline HalfPlaneGeometry mirror(const HalfPlaneGeometry& g) {
    return {-g.theta, -g.center_x, g.center_y, g.epsilon};
}

inline HalfPlaneField mirror(const HalfPlaneField& f) {
    HalfPlaneField m;
    m.profile = mirror(f.profile);
    m.geometry = mirror(f.geometry);
    m.trace_spectrum.minus = f.trace_spectrum.plus;
    m.trace_spectrum.minus.branch = Branch::minus;
    m.trace_spectrum.plus = f.trace_spectrum.minus;
    m.trace_spectrum.plus.branch = Branch::plus;
    m.trace_spectrum.point = f.trace_spectrum.point;
    m.build_cache();
    return m;
}

inline JunctionConfig mirror(const JunctionConfig& cfg) {
    JunctionConfig m;
    m.kind = cfg.kind;
    m.west = {mirror(cfg.east.geometry), mirror(cfg.east.profile)};
    m.east = {mirror(cfg.west.geometry), mirror(cfg.west.profile)};
    m.north = {mirror(cfg.north.geometry), mirror(cfg.north.profile)};
    m.north.geometry.theta = 0.0;
    return m;
}

inline CompactFunction mirror(const CompactFunction& f) {
    CompactFunction m;
    m.lo = -f.hi;
    m.hi = -f.lo;
    auto base = f;
    m.f = [base](double x) { return base(-x); };
    return m;
}

// North-minus outer transfers via the mirrored junction.
inline cplx transfer_outer_minus(const HalfPlaneField& field, const JunctionConfig& cfg,
                                 Side side, cplx lambda,
                                 TransferDiagnostics* diag = nullptr) {
    JunctionConfig mc = mirror(cfg);
    HalfPlaneField mf = mirror(field);
    Side mirrored = side == Side::west ? Side::east : Side::west;
    return transfer_outer(mf, mc, mirrored, lambda, diag);
}

struct ProbeGrid {
    std::size_t n_interval = 48;
    std::size_t n_positive = 48;
    double lambda_positive_max = 12.0;
    double margin_fraction = 0.02;  // inset from the interval endpoints
    double consistency_window = 6.0;
    std::size_t consistency_samples = 40;
    double consistency_tol = 1e-5;
    double x_panel_fraction = 0.25;
    std::size_t x_nodes = 16;
    cplx morera_center{1.0, 1.5};
    double morera_radius = 0.75;
};

struct ProbeReport {
    std::vector<double> interval_lambdas, positive_lambdas;
    std::vector<cplx> interval_total, positive_total;
    std::vector<cplx> interval_west, interval_middle, interval_east;
    std::vector<cplx> positive_west, positive_middle, positive_east;
    double interval_sup = 0.0;   // sup |total| on the evanescent interval
    double positive_sup = 0.0;   // sup |total| on (0, infinity)
    double interval_ratio = 0.0; // interval_sup / positive_sup
    double middle_morera_residual = 0.0;
    double consistency_west = 0.0, consistency_east = 0.0;
    bool consistent = false;
    std::vector<std::string> violations;
};

namespace detail {

// Analytic continuation of lambda -> conj(Psi_N^+(lambda, x)): conjugate the
// eigenfunction at the conjugate point. Coincides with the plain conjugate
// for real lambda.
inline cplx north_conj_kernel(const GeneralizedEigenfunction& eig_at_conj, double x) {
    return std::conj(eig_at_conj.value(x));
}

inline cplx middle_part(const CompactFunction& phi_n, const JunctionConfig& cfg,
                        cplx lambda, const ProbeGrid& g) {
    double a = cfg.a_NW(), b = cfg.a_NE();
    GeneralizedEigenfunction eig =
        assemble_eigenfunction(std::conj(lambda), Branch::plus, cfg.north.profile);
    double k_fast =
        std::sqrt(std::abs(lambda) + fastest_k_sq(cfg.north.profile)) + 1.0;
    QuadRule rule = composite_gl(a, b, g.x_panel_fraction * 2.0 * pi / k_fast, g.x_nodes,
                                 cfg.north.profile.breakpoints());
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        acc += rule.weights[i] * phi_n(rule.nodes[i]) *
               north_conj_kernel(eig, rule.nodes[i]);
    return acc;
}

}  // namespace detail

// Exhibit the uniqueness mechanism: assemble the north-plus spectral
// component from the three-part split (kernel transfers for the outer parts,
// direct quadrature for the middle), measure its magnitude on the evanescent
// interval against its magnitude on (0, inf), verify the overlap consistency
// of the supplied data, and Morera-probe the middle part's continuation.
inline ProbeReport uniqueness_probe(const JunctionConfig& cfg,
                                    const CompactFunction& north_trace,
                                    const HalfPlaneField& west, const HalfPlaneField& east,
                                    const ProbeGrid& grid = {}) {
    ProbeReport rep;
    // evanescent interval: (-k_{N,+}^2, 0) clipped to the continuation
    // domain, where the transfer kernels are defined (the limit onto the cut
    // would put real poles into the kernel integrands)
    double interval_lo =
        -std::min(cfg.north.profile.k_minus_sq, cfg.north.profile.k_plus_sq);
    double inset = grid.margin_fraction * (-interval_lo);

    for (std::size_t i = 0; i < grid.n_interval; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(grid.n_interval);
        rep.interval_lambdas.push_back(interval_lo + inset +
                                       t * (-interval_lo - 2.0 * inset));
    }
    for (std::size_t i = 0; i < grid.n_positive; ++i) {
        double t = (static_cast<double>(i) + 0.5) / static_cast<double>(grid.n_positive);
        rep.positive_lambdas.push_back(inset + t * grid.lambda_positive_max);
    }

    auto run = [&](const std::vector<double>& lams, std::vector<cplx>& tw,
                   std::vector<cplx>& tm, std::vector<cplx>& te,
                   std::vector<cplx>& tot, double& sup) {
        tw.resize(lams.size());
        tm.resize(lams.size());
        te.resize(lams.size());
        tot.resize(lams.size());
        for (std::size_t i = 0; i < lams.size(); ++i) {
            cplx lam(lams[i], 0.0);
            tw[i] = transfer_outer(west, cfg, Side::west, lam);
            tm[i] = detail::middle_part(north_trace, cfg, lam, grid);
            te[i] = transfer_outer(east, cfg, Side::east, lam);
            tot[i] = tw[i] + tm[i] + te[i];
            sup = std::max(sup, std::abs(tot[i]));
        }
    };
    run(rep.interval_lambdas, rep.interval_west, rep.interval_middle, rep.interval_east,
        rep.interval_total, rep.interval_sup);
    run(rep.positive_lambdas, rep.positive_west, rep.positive_middle, rep.positive_east,
        rep.positive_total, rep.positive_sup);
    rep.interval_ratio = rep.positive_sup > 0.0 ? rep.interval_sup / rep.positive_sup : 0.0;

    rep.middle_morera_residual = cauchy_circle_residual(
        [&](cplx z) { return detail::middle_part(north_trace, cfg, z, grid); },
        grid.morera_center, grid.morera_radius, 48);

    // Overlap consistency: the supplied north trace must match the west/east
    // representations along the outer segments.
    auto overlap_dev = [&](const HalfPlaneField& f, Side side) {
        double split = side == Side::west ? cfg.a_NW() : cfg.a_NE();
        const auto& geom = side == Side::west ? cfg.west.geometry : cfg.east.geometry;
        double scale = 0.0, dev = 0.0;
        for (std::size_t i = 0; i < grid.consistency_samples; ++i) {
            double t = (static_cast<double>(i) + 0.5) /
                       static_cast<double>(grid.consistency_samples);
            double x = side == Side::west ? split - t * grid.consistency_window
                                          : split + t * grid.consistency_window;
            auto [X, Y] = to_local(geom, x, 0.0);
            cplx field_val = evaluate_representation(f, X, Y);
            cplx trace_val = north_trace(x);
            dev = std::max(dev, std::abs(field_val - trace_val));
            scale = std::max({scale, std::abs(field_val), std::abs(trace_val)});
        }
        return scale > 0.0 ? dev / scale : 0.0;
    };
    rep.consistency_west = overlap_dev(west, Side::west);
    rep.consistency_east = overlap_dev(east, Side::east);
    rep.consistent = rep.consistency_west < grid.consistency_tol &&
                     rep.consistency_east < grid.consistency_tol;
    if (!rep.consistent) {
        if (rep.consistency_west >= grid.consistency_tol)
            rep.violations.push_back("north trace deviates from the west representation");
        if (rep.consistency_east >= grid.consistency_tol)
            rep.violations.push_back("north trace deviates from the east representation");
    }
    return rep;
}

}  // namespace stratspec
