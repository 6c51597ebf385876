// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.
#include <cstdarg>
#include <cstdio>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "stratspec/gft.hpp"
#include "stratspec/halfplane.hpp"
#include "stratspec/junction.hpp"
#include "stratspec/ode.hpp"
#include "stratspec/two_layer.hpp"

using namespace stratspec;

namespace {

int failures = 0;

void report(int n, bool pass, const char* what, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", n, what,
                detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// smooth compactly supported x-space bump, optionally modulated
CompactFunction x_bump(double center, double halfwidth, double q = 0.0) {
    CompactFunction f;
    f.lo = center - halfwidth;
    f.hi = center + halfwidth;
    f.f = [=](double x) {
        double s = (x - center) / halfwidth;
        if (std::abs(s) >= 1.0) return cplx(0.0, 0.0);
        return std::exp(cplx(1.0 - 1.0 / (1.0 - s * s), q * x));
    };
    return f;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> kd(0.5, 4.0), u(0.0, 1.0), xd(-6.0, 6.0);
    double worst = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        double km = kd(rng), kp = kd(rng);
        auto p = make_two_layer(km, kp);
        for (int j = 0; j < 40; ++j) {
            Branch b = (j % 2 == 0) ? Branch::plus : Branch::minus;
            double edge = (b == Branch::plus) ? kp * kp : km * km;
            double lam = -edge + 0.05 + 40.0 * u(rng);
            auto eig = assemble_eigenfunction(cplx(lam, 0.0), b, p);
            auto s = scattering_coefficients(cplx(lam, 0.0), km, kp);
            cplx Rw = (b == Branch::plus) ? s.R_plus : s.R_minus;
            cplx Tw = (b == Branch::plus) ? s.T_plus : s.T_minus;
            worst = std::max(worst, std::abs(eig.R - Rw) / (1.0 + std::abs(Rw)));
            worst = std::max(worst, std::abs(eig.T - Tw) / (1.0 + std::abs(Tw)));
            for (int m = 0; m < 20; ++m) {
                double x = xd(rng);
                cplx want = psi_two_layer(lam, x, b, km, kp);
                worst = std::max(worst,
                                 std::abs(eig.value(x) - want) / (1.0 + std::abs(want)));
            }
        }
    }
    report(1, worst < 1e-10, "closed-form two-layer oracle agreement",
           fmt("max rel deviation %.3e, tol 1e-10", worst));
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
    std::vector<CompactFunction> battery;
    for (double c : {-1.5, -0.75, 0.0, 0.6}) battery.push_back(gaussian_packet(c, 0.8));
    for (double s : {0.6, 1.0, 1.2}) battery.push_back(gaussian_packet(0.3, s));
    battery.push_back(gaussian_packet(-0.4, 0.9, 1.3));
    for (double c : {-1.0, 0.0, 0.8}) battery.push_back(x_bump(c, 2.2));
    for (double w : {1.5, 2.8}) battery.push_back(x_bump(0.3, w));
    battery.push_back(x_bump(-0.6, 2.5));
    for (double q : {0.8, 1.5, 2.2}) battery.push_back(x_bump(0.0, 2.4, q));
    for (double q : {1.0, 1.9}) battery.push_back(x_bump(0.7, 1.8, q));
    battery.push_back(x_bump(-1.2, 2.0, 1.4));
    const std::size_t n_battery = battery.size();

    std::vector<StratifiedProfile> profiles{make_homogeneous(1.0), make_two_layer(3.0, 2.0),
                                            make_square_well(1.0, 10.0, pi)};
    GftGrid ref;  // reference grid: window sized for the algebraic interface tail
    ref.lambda_max = 800.0;
    ref.spectral_panels = 56;
    double worst = 0.0;
    for (const auto& p : profiles) {
        auto modes = find_guided_modes(p);
        for (const auto& phi : battery)
            worst = std::max(worst, plancherel_check(phi, p, ref, &modes));
    }

    // refinement study where the error is measurably above the floor
    double worst_order = 1e9;
    for (std::size_t pi_idx : {1, 2}) {
        const auto& p = profiles[pi_idx];
        auto modes = find_guided_modes(p);
        GftGrid coarse;
        coarse.lambda_max = 60.0;
        coarse.spectral_panels = 24;
        double e_c = plancherel_check(battery[2], p, coarse, &modes);
        double e_f = plancherel_check(battery[2], p, coarse.refined(2.0), &modes);
        double order = (e_c < 1e-12 && e_f < 1e-12) ? 99.0 : std::log2(e_c / e_f);
        worst_order = std::min(worst_order, order);
    }
    bool pass = worst < 1e-6 && worst_order >= 2.0;
    report(2, pass, "unitarity on a 20-function battery over three profiles",
           fmt("battery size %zu, max plancherel %.3e (tol 1e-6), observed order %.2f (>= 2)",
               n_battery, worst, worst_order));
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
    std::vector<StratifiedProfile> profiles{make_homogeneous(1.0), make_two_layer(3.0, 2.0),
                                            make_square_well(1.0, 10.0, pi)};
    GftGrid g;
    double worst = 0.0;
    for (const auto& p : profiles) {
        auto modes = find_guided_modes(p);
        for (auto [c, s, q] : {std::tuple{0.2, 0.8, 0.0}, std::tuple{-0.5, 1.0, 1.2}}) {
            auto phi = gaussian_packet(c, s, q);
            // A phi in closed form; the K^2 jump enters pointwise
            std::function<cplx(double)> Aphi = [c, s, q, &p](double x) {
                double t = (x - c) / s;
                cplx gval = std::exp(cplx(-0.5 * t * t, q * x));
                cplx dlog(-t / s, q);
                cplx d2 = (dlog * dlog - 1.0 / (s * s)) * gval;
                return -d2 - p.k_sq_at(x) * gval;
            };
            worst = std::max(worst, diagonalization_check(phi, p, g, &Aphi, &modes));
        }
    }
    report(3, worst < 1e-6, "diagonalization F(A phi) = lambda F(phi)",
           fmt("max rel error %.3e, tol 1e-6", worst));
}

// ---------------------------------------------------------------- criterion 4

void criterion_4() {
    std::mt19937_64 rng(1004);
    std::uniform_real_distribution<double> vd(0.25, 25.0), kd(0.5, 4.0), wd(0.2, 1.2),
        u(0.0, 1.0);
    std::uniform_int_distribution<int> np(0, 4);
    double worst_w = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = np(rng);
        std::vector<StratifiedProfile::Piece> pieces;
        double x = -1.0;
        for (int i = 0; i < n; ++i) {
            double w = wd(rng);
            pieces.push_back({x, x + w, vd(rng)});
            x += w;
        }
        double km = kd(rng), kp = kd(rng);
        auto p = make_piecewise(pieces, km * km, kp * kp);
        double lam = -std::min(p.k_minus_sq, p.k_plus_sq) + 0.1 + 40.0 * u(rng);
        auto pair = canonical_solutions(cplx(lam, 0.0), p, 7);
        worst_w = std::max(worst_w, std::abs(pair.transfer_matrix.det() - 1.0));
        for (const auto& s : pair.samples)
            worst_w = std::max(worst_w, std::abs(s.c * s.s_prime - s.s * s.c_prime - 1.0));
    }

    double worst_f = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        int n = np(rng);
        std::vector<StratifiedProfile::Piece> pieces;
        double x = -1.0;
        for (int i = 0; i < n; ++i) {
            double w = wd(rng);
            pieces.push_back({x, x + w, vd(rng)});
            x += w;
        }
        double km = kd(rng), kp = kd(rng);
        auto p = make_piecewise(pieces, km * km, kp * kp);
        double lam = -std::min(p.k_minus_sq, p.k_plus_sq) + 0.05 + 40.0 * u(rng);
        auto eig = assemble_eigenfunction(cplx(lam, 0.0), Branch::plus, p);
        double bm = eig.beta_minus.real(), bp = eig.beta_plus.real();
        double flux = std::norm(eig.R) + (bm / bp) * std::norm(eig.T);
        worst_f = std::max(worst_f, std::abs(flux - 1.0));
    }
    bool pass = worst_w < 1e-12 && worst_f < 1e-10;
    report(4, pass, "Wronskian and flux conservation",
           fmt("max |W-1| %.3e (tol 1e-12), max flux defect %.3e (tol 1e-10)", worst_w,
               worst_f));
}

// ---------------------------------------------------------------- criterion 5

void criterion_5() {
    auto well = make_square_well(1.0, 10.0, pi);
    auto modes = find_guided_modes(well);
    auto scan = oracles::dispersion_scan_eigenvalues(well, 100000);
    bool count_ok = modes.size() >= 3 && modes.size() == scan.size();
    double window_lo = -well.k_M_sq, window_hi = -std::max(well.k_minus_sq, well.k_plus_sq);
    bool window_ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        window_ok = window_ok && modes[i].lambda >= window_lo && modes[i].lambda <= window_hi;
        if (i < scan.size()) worst = std::max(worst, std::abs(modes[i].lambda - scan[i]));
    }
    bool pass = count_ok && window_ok && worst < 1e-8;
    report(5, pass, "guided-mode counting on the depth-10 well",
           fmt("%zu modes (>= 3), window ok %d, max |eig - scan| %.3e (tol 1e-8)",
               modes.size(), window_ok ? 1 : 0, worst));
}

// ---------------------------------------------------------------- criterion 6

void criterion_6() {
    auto p = make_two_layer(3.0, 2.0);
    HalfPlaneGeometry geom{0.0, 0.0, 0.0, 0.1};
    using K = DensityBump::Kind;
    auto field = synthesize_solution({{Branch::plus, 0.8, 4.8, 1.0, K::windowed_gaussian},
                                      {Branch::minus, 1.5, 7.5, 0.6, K::windowed_gaussian}},
                                     p, geom);

    // (a) finite-difference Helmholtz residual on a 400 x 400 grid. The field
    // factorizes over spectral nodes, u = sum_m A_m(x) B_m(y), so the grid
    // evaluation is two small matrix products.
    const std::size_t N = 400;
    const double x0 = -4.013, x1 = 3.987, y0 = 0.05, y1 = 6.05, h = 0.004;
    std::vector<double> xs(N), ys(N);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i] = x0 + (x1 - x0) * static_cast<double>(i) / (N - 1);
        ys[i] = y0 + (y1 - y0) * static_cast<double>(i) / (N - 1);
    }
    std::vector<const SpectralDensity*> ds{&field.trace_spectrum.minus,
                                           &field.trace_spectrum.plus};
    std::size_t M = 0;
    for (auto* d : ds) M += d->size();
    std::vector<cplx> A(N * M), Axx(N * M), B(N * M), Byy(N * M);
    {
        std::size_t m0 = 0;
        for (std::size_t bi = 0; bi < 2; ++bi) {
            const SpectralDensity& d = *ds[bi];
            const auto& evals = field.evals(bi == 0 ? Branch::minus : Branch::plus);
            for (std::size_t m = 0; m < d.size(); ++m) {
                cplx wv = d.weights[m] * d.values[m];
                double sl = std::sqrt(d.nodes[m]);
                for (std::size_t i = 0; i < N; ++i) {
                    auto psi = [&](double x) { return evals[m].value(x); };
                    cplx am = psi(xs[i]);
                    cplx axx = (-psi(xs[i] - 2 * h) + 16.0 * psi(xs[i] - h) - 30.0 * am +
                                16.0 * psi(xs[i] + h) - psi(xs[i] + 2 * h)) /
                               (12.0 * h * h);
                    A[i * M + m0 + m] = wv * am;
                    Axx[i * M + m0 + m] = wv * axx;
                    auto damp = [&](double y) { return std::exp(-sl * y); };
                    cplx bm = damp(ys[i]);
                    cplx byy = (-damp(ys[i] - 2 * h) + 16.0 * damp(ys[i] - h) - 30.0 * bm +
                                16.0 * damp(ys[i] + h) - damp(ys[i] + 2 * h)) /
                               (12.0 * h * h);
                    B[i * M + m0 + m] = bm;
                    Byy[i * M + m0 + m] = byy;
                }
            }
            m0 += d.size();
        }
    }
    double sup_u = 0.0, sup_resid = 0.0;
    parallel_for(N, 4, [&](std::size_t i) {
        if (std::abs(xs[i]) < 0.02 + 2 * h) return;  // keep the stencil off the interface
        double k_sq = p.k_sq_at(xs[i]);
        double row_u = 0.0, row_r = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
            cplx u = 0.0, lap = 0.0;
            for (std::size_t m = 0; m < M; ++m) {
                cplx a = A[i * M + m], b = B[j * M + m];
                u += a * b;
                lap += Axx[i * M + m] * b + a * Byy[j * M + m];
            }
            row_u = std::max(row_u, std::abs(u));
            row_r = std::max(row_r, std::abs(lap + k_sq * u));
        }
        static std::mutex mu;
        std::lock_guard<std::mutex> lock(mu);
        sup_u = std::max(sup_u, row_u);
        sup_resid = std::max(sup_resid, row_r);
    });
    double resid_rel = sup_resid / (sup_u * p.k_M_sq);

    // (b) trace round trip through the transform of the y = 0 values
    double trip_err = 0.0;
    {
        CompactFunction trace{
            [&field](double x) { return evaluate_representation(field, x, 0.0); }, -135.0,
            135.0};
        GftGrid grid;
        grid.lambda_max = 80.0;
        TraceDiagnostics diag;
        auto back = spectral_trace(trace, p, geom, grid, &diag);
        DensityBump bp{Branch::plus, 0.8, 4.8, 1.0, K::windowed_gaussian};
        DensityBump bm{Branch::minus, 1.5, 7.5, 0.6, K::windowed_gaussian};
        for (Branch b : {Branch::plus, Branch::minus}) {
            const auto& d = back.trace_spectrum.density(b);
            const DensityBump& bump = (b == Branch::plus) ? bp : bm;
            double sup = 0.0, err = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                cplx want = bump(d.nodes[i]);
                sup = std::max(sup, std::abs(want));
                err = std::max(err, std::abs(d.values[i] - want));
            }
            trip_err = std::max(trip_err, err / sup);
        }
    }

    // (c) ray integrability with certified tails
    bool rays_ok = true;
    for (double alpha : {0.25 * pi, 0.5 * pi, 0.75 * pi}) {
        auto r = ray_l1_norm(field, alpha, 40.0, 1e-8);
        rays_ok = rays_ok && r.converged && r.value > 0.0;
    }

    bool pass = resid_rel < 1e-5 && trip_err < 1e-6 && rays_ok;
    report(6, pass, "half-plane synthesis, trace round trip, ray integrability",
           fmt("FD residual %.3e (tol 1e-5), round trip %.3e (tol 1e-6), rays %s",
               resid_rel, trip_err, rays_ok ? "converged" : "NOT converged"));
}

// ---------------------------------------------------------------- criterion 7

JunctionConfig accept_right_config() {
    JunctionConfig cfg;
    cfg.kind = JunctionKind::right_angle;
    cfg.north = {{0.0, 0.0, 0.0, 0.1}, make_two_layer(3.0, 2.0)};
    cfg.west = {{0.5 * pi, -2.0, -1.0, 0.1}, make_two_layer(2.5, 3.0)};
    cfg.east = {{-0.5 * pi, 2.0, -1.0, 0.1}, make_two_layer(2.0, 2.5)};
    return cfg;
}

JunctionConfig accept_general_config(double theta_w, double theta_e) {
    JunctionConfig cfg = accept_right_config();
    cfg.kind = JunctionKind::general_angle;
    cfg.west.geometry.theta = theta_w;
    cfg.east.geometry.theta = theta_e;
    return cfg;
}

void criterion_7() {
    std::mt19937_64 rng(1007);
    std::uniform_real_distribution<double> lo_d(0.6, 2.5), wid_d(0.8, 3.0), amp_d(0.3, 1.0),
        ph_d(0.0, 2.0 * pi), u(0.0, 1.0);
    BumpGrid light{16, 10};

    auto random_field = [&](const HalfPlaneSpec& spec) {
        double lo1 = lo_d(rng), hi1 = lo1 + wid_d(rng);
        double lo2 = lo_d(rng), hi2 = lo2 + wid_d(rng);
        cplx a1 = std::polar(amp_d(rng), ph_d(rng));
        cplx a2 = std::polar(amp_d(rng), ph_d(rng));
        return synthesize_solution({{Branch::plus, lo1, hi1, a1},
                                    {Branch::minus, lo2, hi2, a2}},
                                   spec.profile, spec.geometry, light);
    };

    double worst = 0.0;
    for (int kind = 0; kind < 2; ++kind) {
        JunctionConfig cfg = (kind == 0)
                                 ? accept_right_config()
                                 : accept_general_config(2.0 * pi / 3.0, -2.0 * pi / 3.0);
        double lam_lo =
            -std::min(cfg.north.profile.k_minus_sq, cfg.north.profile.k_plus_sq) + 0.15;
        for (int pair = 0; pair < 50; ++pair) {
            auto wf = random_field(cfg.west);
            auto ef = random_field(cfg.east);
            cplx lam(lam_lo + (7.0 - lam_lo) * u(rng), 0.0);
            cplx kw = transfer_outer(wf, cfg, Side::west, lam);
            cplx dw = direct_transfer(wf, cfg, Side::west, lam);
            cplx ke = transfer_outer(ef, cfg, Side::east, lam);
            cplx de = direct_transfer(ef, cfg, Side::east, lam);
            worst = std::max(worst, std::abs(kw - dw) / (1.0 + std::abs(dw)));
            worst = std::max(worst, std::abs(ke - de) / (1.0 + std::abs(de)));
        }
    }
    report(7, worst < 1e-5, "Fubini transfer identity, both kinds and sides",
           fmt("max rel deviation %.3e over 2 x 50 pairs, tol 1e-5", worst));
}

// ---------------------------------------------------------------- criterion 8

void criterion_8() {
    double tw = 2.0 * pi / 3.0, te = -5.0 * pi / 6.0;
    double tp_w = touch_point(tw, 81.0), tp_e = touch_point(te, 100.0);
    bool identity_ok = tp_w == -81.0 * std::sin(tw) * std::sin(tw) &&
                       tp_e == -100.0 * std::sin(te) * std::sin(te);
    bool value_ok = std::abs(tp_w - (-60.75)) < 1e-12 * 60.75 &&
                    std::abs(tp_e - (-25.0)) < 1e-12 * 25.0;

    double min_d = 1e300;
    for (int i = 0; i < 200; ++i) {
        double mu = 0.5 + 99.5 * i / 199.0;
        for (int j = 0; j < 200; ++j) {
            cplx lam(-8.0 + 28.0 * (j % 20) / 19.0, -9.0 + 18.0 * (j / 20) / 9.0);
            if (!in_continuation_domain(lam, 9.0, 9.0)) continue;
            if (std::abs(lam.imag()) < 1e-9 && lam.real() <= -9.0) continue;
            min_d = std::min(min_d, std::abs(denominator_D(-1, lam, mu, tw, 9.0)));
        }
    }

    bool conj_ok = true;
    for (double mu : {0.0, 0.4, 3.0, 17.0, 80.0}) {
        cplx up = curve_point(CurveKind::lambda_NE_plus, te, 100.0, mu);
        cplx dn = curve_point(CurveKind::lambda_NE_minus, te, 100.0, mu);
        conj_ok = conj_ok && (dn == std::conj(up));
    }

    // right-angle degeneration of the general kernels
    auto right = accept_right_config();
    auto wf = synthesize_solution({{Branch::plus, 1.0, 4.0, 1.0}}, right.west.profile,
                                  right.west.geometry);
    auto ef = synthesize_solution({{Branch::minus, 1.5, 4.0, 0.7}}, right.east.profile,
                                  right.east.geometry);
    double degen = 0.0;
    auto nearly = accept_general_config(0.5 * pi + 1e-3, -0.5 * pi - 1e-3);
    for (double lam : {-2.0, 1.1, 5.0}) {
        cplx base_w = transfer_right_angle(wf, right, cplx(lam, 0.0));
        cplx gen_w = transfer_general(wf, nearly, cplx(lam, 0.0));
        degen = std::max(degen, std::abs(gen_w - base_w) / (1.0 + std::abs(base_w)));
        cplx base_e = transfer_right_angle_east(ef, right, cplx(lam, 0.0));
        cplx gen_e = transfer_general_east(ef, nearly, cplx(lam, 0.0));
        degen = std::max(degen, std::abs(gen_e - base_e) / (1.0 + std::abs(base_e)));
    }

    bool pass = identity_ok && value_ok && min_d > 0.0 && conj_ok && degen < 1e-3;
    report(8, pass, "analyticity geometry: touch points, D-, conjugacy, degeneration",
           fmt("touch (%.14g, %.14g) identity %d, min|D-| %.3e, conj %d, degeneration %.3e "
               "(tol 1e-3)",
               tp_w, tp_e, identity_ok ? 1 : 0, min_d, conj_ok ? 1 : 0, degen));
}

// ---------------------------------------------------------------- criterion 9

// C-infinity step: 0 below a, 1 above b.
double smoothstep(double x, double a, double b) {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    auto ramp = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double t = (x - a) / (b - a);
    return ramp(t) / (ramp(t) + ramp(1.0 - t));
}

// Solve the ridge-regularized complex least squares (M^H M + eta I) c = M^H t
// by Gaussian elimination with partial pivoting.
std::vector<cplx> ridge_solve(const std::vector<std::vector<cplx>>& M,
                              const std::vector<cplx>& t, double eta) {
    std::size_t rows = M.size(), cols = M[0].size();
    std::vector<std::vector<cplx>> N(cols, std::vector<cplx>(cols + 1, cplx(0.0)));
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j)
            for (std::size_t r = 0; r < rows; ++r)
                N[i][j] += std::conj(M[r][i]) * M[r][j];
        N[i][i] += eta;
        for (std::size_t r = 0; r < rows; ++r) N[i][cols] += std::conj(M[r][i]) * t[r];
    }
    for (std::size_t col = 0; col < cols; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < cols; ++r)
            if (std::abs(N[r][col]) > std::abs(N[piv][col])) piv = r;
        std::swap(N[col], N[piv]);
        for (std::size_t r = col + 1; r < cols; ++r) {
            cplx f = N[r][col] / N[col][col];
            for (std::size_t j = col; j <= cols; ++j) N[r][j] -= f * N[col][j];
        }
    }
    std::vector<cplx> c(cols);
    for (std::size_t r = cols; r-- > 0;) {
        cplx acc = N[r][cols];
        for (std::size_t j = r + 1; j < cols; ++j) acc -= N[r][j] * c[j];
        c[r] = acc / N[r][r];
    }
    return c;
}

void criterion_9() {
    JunctionConfig cfg;
    cfg.kind = JunctionKind::right_angle;
    // homogeneous north: one exponential family carries the whole spectral
    // geometry. The outer densities sit at high mu, which keeps their
    // kernels analytic in a wide strip around the measured lambda ranges --
    // that is what makes the middle-bridge cancellation well-conditioned.
    cfg.north = {{0.0, 0.0, 0.0, 0.1}, make_two_layer(2.0, 2.0)};
    cfg.west = {{0.5 * pi, -3.0, -1.0, 0.1}, make_two_layer(1.5, 2.0)};
    cfg.east = {{-0.5 * pi, 3.0, -1.0, 0.1}, make_two_layer(2.0, 2.5)};
    double a_nw = cfg.a_NW(), a_ne = cfg.a_NE();

    auto wf = synthesize_solution({{Branch::plus, 6.0, 12.0, 0.9}}, cfg.west.profile,
                                  cfg.west.geometry);
    auto ef = synthesize_solution({{Branch::minus, 6.0, 12.0, 1.15}}, cfg.east.profile,
                                  cfg.east.geometry);

    // the packet carrying the (0, inf) signal: its oscillation sits far above
    // the north propagating wavenumbers, so its spectrum is concentrated on
    // lambda > 0 (a valid-solution trace shape), and its tails clear the
    // middle segment
    auto packet = gaussian_packet(0.0, 0.45, -14.0, 1.7);

    // blended outer representations continued into the middle
    auto west_on_trace = [&](double x) {
        auto [X, Y] = to_local(cfg.west.geometry, x, 0.0);
        return evaluate_extension(wf, X, Y);  // Y < 0 inside the middle segment
    };
    auto east_on_trace = [&](double x) {
        auto [X, Y] = to_local(cfg.east.geometry, x, 0.0);
        return evaluate_extension(ef, X, Y);
    };
    auto blend = [&](double x) {
        cplx v = 0.0;
        double bw = 1.0 - smoothstep(x, a_nw, a_nw + 1.4);
        double be = smoothstep(x, a_ne - 1.4, a_ne);
        if (bw > 0.0) v += bw * west_on_trace(x);
        if (be > 0.0) v += be * east_on_trace(x);
        return v;
    };  // continuous across the split points by construction

    // middle bridge correction: fit windowed Fourier atoms so that the
    // assembled north-plus component cancels on the evanescent interval, the
    // numerical inverse of the analyticity mechanism the probe exhibits
    ProbeGrid pg;
    pg.n_interval = 40;
    pg.n_positive = 48;
    pg.lambda_positive_max = 260.0;
    // Gaussian atoms, spectrally confined far below the packet: wavenumber
    // content |q| + 3/sigma stays well under the packet modulation, so
    // nothing resonates where the packet carries the positive signal. The
    // centers run all the way to the split points: the outer sources hug
    // those boundaries, and the cancellation needs matching content there.
    const double atom_sigma = 0.5;
    std::vector<double> atom_centers, atom_qs{0.0, -0.8, 0.8, -1.6, 1.6, -2.4, 2.4};
    for (int j = -4; j <= 4; ++j) atom_centers.push_back(0.75 * j);
    const std::size_t n_basis = atom_centers.size() * atom_qs.size();
    auto atom = [&](int idx, double x) {
        double c = atom_centers[static_cast<std::size_t>(idx) % atom_centers.size()];
        double q = atom_qs[static_cast<std::size_t>(idx) / atom_centers.size()];
        double t = (x - c) / atom_sigma;
        return std::exp(cplx(-0.5 * t * t, q * x));
    };
    auto basis_fn = [&](int idx) {
        CompactFunction f;
        f.lo = a_nw;
        f.hi = a_ne;
        f.f = [&, idx](double x) { return atom(idx, x); };
        return f;
    };

    // fit grid interleaves with the probe grid so generalization is tested.
    // The correction is fitted to the natural analytic continuation of
    // -(K_W + K_E + blended middle) on BOTH the evanescent interval and the
    // positive axis; asking it to vanish on the positive side instead would
    // fight analyticity and wreck the interval cancellation. The packet rides
    // on top untouched and carries the (0, inf) signal.
    std::vector<double> fit_lams, pos_lams;
    double interval_lo = -cfg.north.profile.k_plus_sq;
    for (std::size_t i = 0; i < 120; ++i) {
        double t = (static_cast<double>(i) + 0.3) / 120.0;
        fit_lams.push_back(interval_lo + 0.05 + t * (-interval_lo - 0.1));
    }
    // anchor the correction to the natural continuation just above zero;
    // further out the kernels decay and the packet owns the signal
    for (std::size_t i = 0; i < 30; ++i) {
        double t = (static_cast<double>(i) + 0.5) / 30.0;
        pos_lams.push_back(0.1 + t * 12.0);
    }
    const double w_pos = 0.3;
    CompactFunction mid_blend{[&](double x) { return blend(x); }, a_nw, a_ne};
    auto natural_target = [&](double lam_r) {
        cplx lam(lam_r, 0.0);
        cplx kw = transfer_outer(wf, cfg, Side::west, lam);
        cplx ke = transfer_outer(ef, cfg, Side::east, lam);
        cplx mid = detail::middle_part(mid_blend, cfg, lam, pg);
        return -(kw + ke + mid);
    };
    std::size_t n_int = fit_lams.size(), n_all = n_int + pos_lams.size();
    std::vector<std::vector<cplx>> M(n_all, std::vector<cplx>(n_basis));
    std::vector<cplx> target(n_all);
    for (std::size_t i = 0; i < n_all; ++i) {
        double lam_r = i < n_int ? fit_lams[i] : pos_lams[i - n_int];
        double w = i < n_int ? 1.0 : w_pos;
        target[i] = w * natural_target(lam_r);
        for (std::size_t k = 0; k < n_basis; ++k)
            M[i][k] = w * detail::middle_part(basis_fn(static_cast<int>(k)), cfg,
                                              cplx(lam_r, 0.0), pg);
    }

    // normalize columns to tame the normal equations, then sweep the ridge
    std::vector<double> col_scale(n_basis, 0.0);
    for (std::size_t k = 0; k < n_basis; ++k) {
        for (std::size_t i = 0; i < n_all; ++i)
            col_scale[k] = std::max(col_scale[k], std::abs(M[i][k]));
        if (col_scale[k] == 0.0) col_scale[k] = 1.0;
        for (std::size_t i = 0; i < n_all; ++i) M[i][k] /= col_scale[k];
    }
    // the ridge sweep guards against ringing: candidates whose transforms
    // grow anywhere on the probe's positive range are rejected outright
    std::vector<double> guard_lams;
    for (std::size_t i = 0; i < 48; ++i)
        guard_lams.push_back(0.2 + (pg.lambda_positive_max - 0.2) *
                                       (static_cast<double>(i) + 0.5) / 48.0);
    std::vector<std::vector<cplx>> G(guard_lams.size(), std::vector<cplx>(n_basis));
    for (std::size_t i = 0; i < guard_lams.size(); ++i)
        for (std::size_t k = 0; k < n_basis; ++k)
            G[i][k] = detail::middle_part(basis_fn(static_cast<int>(k)), cfg,
                                          cplx(guard_lams[i], 0.0), pg);
    std::vector<cplx> coef;
    double best_resid = 1e300;
    for (double eta : {1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7, 1e-7, 3e-8, 1e-8, 1e-9,
                       1e-10, 1e-11, 1e-12}) {
        auto c = ridge_solve(M, target, eta);
        double resid = 0.0, excess = 0.0;
        for (std::size_t i = 0; i < n_int; ++i) {
            cplx r = -target[i];
            for (std::size_t k = 0; k < n_basis; ++k) r += M[i][k] * c[k];
            resid = std::max(resid, std::abs(r));
        }
        for (std::size_t i = 0; i < guard_lams.size(); ++i) {
            cplx v = 0.0;
            for (std::size_t k = 0; k < n_basis; ++k)
                v += G[i][k] * (c[k] / col_scale[k]);
            excess = std::max(excess, std::abs(v));
        }
        if (excess < 1.1 && resid < best_resid) {
            best_resid = resid;
            coef = c;
        }
    }
    if (coef.empty()) coef.assign(n_basis, cplx(0.0));
    for (std::size_t k = 0; k < n_basis; ++k) coef[k] /= col_scale[k];
    CompactFunction north_trace;
    north_trace.lo = a_nw - 45.0;
    north_trace.hi = a_ne + 45.0;
    north_trace.f = [&, coef](double x) {
        if (x <= a_nw) return west_on_trace(x);
        if (x >= a_ne) return east_on_trace(x);
        cplx v = blend(x) + packet(x);
        for (std::size_t k = 0; k < n_basis; ++k)
            v += coef[k] * atom(static_cast<int>(k), x);
        return v;
    };

    auto rep = uniqueness_probe(cfg, north_trace, wf, ef, pg);
    double base_ratio = rep.interval_sup / rep.positive_sup;

    auto zero_east = synthesize_solution({}, cfg.east.profile, cfg.east.geometry);
    auto rep_zero = uniqueness_probe(cfg, north_trace, wf, zero_east, pg);
    double zero_ratio = rep_zero.interval_sup / rep_zero.positive_sup;

    bool pass = rep.consistent && base_ratio < 1e-5 && zero_ratio > 1e-2 &&
                zero_ratio / base_ratio >= 1e3 && !rep_zero.consistent;
    report(9, pass, "uniqueness mechanism probe with perturbation contrast",
           fmt("consistent %d, interval/positive %.3e (tol 1e-5), zeroed %.3e (> 1e-2), "
               "contrast %.1e (>= 1e3), zeroed flagged %d",
               rep.consistent ? 1 : 0, base_ratio, zero_ratio, zero_ratio / base_ratio,
               !rep_zero.consistent ? 1 : 0));
}

// --------------------------------------------------------------- criterion 10

void criterion_10() {
    auto well = make_square_well(1.0, 10.0, pi);
    auto steps = make_piecewise({{-1.0, 0.0, 16.0}, {0.0, 1.0, 6.0}}, 1.0, 1.0);
    struct Case {
        const StratifiedProfile* p;
        Rect r;
    };
    std::vector<Case> cases{
        {&well, {0.0, 16.0, -8.0, -0.15}},
        {&well, {16.0, 40.0, -14.0, -8.0}},
        {&well, {40.0, 80.0, -20.0, -14.0}},
        {&steps, {0.0, 15.0, -12.0, -0.15}},
        {&steps, {15.0, 40.0, -20.0, -10.0}},
        {&steps, {0.0, 40.0, -20.0, -0.15}},
    };
    bool pass = true;
    std::string detail;
    std::size_t total = 0;
    for (const auto& c : cases) {
        auto found = find_resonances(*c.p, c.r, 0.4);
        auto scanned = oracles::grid_scan_resonances(*c.p, c.r);
        total += found.size();
        if (found.size() != scanned.size()) {
            pass = false;
            detail += fmt("[count %zu vs scan %zu] ", found.size(), scanned.size());
            continue;
        }
        for (std::size_t i = 0; i < found.size(); ++i)
            if (std::abs(found[i] - scanned[i]) > 1e-6 * (1.0 + std::abs(found[i])))
                pass = false;
    }
    report(10, pass, "resonance counts match the dense-grid-scan oracle",
           detail.empty() ? fmt("6 rectangles, %zu zeros total, all counts equal", total)
                          : detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
