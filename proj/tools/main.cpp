// stratspec command-line front end: file-based runs of the spectral toolkit.
#include <CLI11.hpp>

#include <cstdio>
#include <random>
#include <string>

#include "stratspec/io.hpp"

using namespace stratspec;

namespace {

GftGrid grid_from_json(const json& cfg, unsigned threads) {
    GftGrid g;
    if (cfg.contains("quadrature")) {
        const auto& q = cfg.at("quadrature");
        g.lambda_max = q.value("lambda_max", g.lambda_max);
        g.spectral_panels = q.value("spectral_panels", g.spectral_panels);
        g.spectral_nodes = q.value("spectral_nodes", g.spectral_nodes);
        g.x_panel_fraction = q.value("x_panel_fraction", g.x_panel_fraction);
        g.x_nodes = q.value("x_nodes", g.x_nodes);
    }
    g.threads = threads;
    return g;
}

json grid_to_json(const GftGrid& g) {
    return {{"lambda_max", g.lambda_max},
            {"spectral_panels", g.spectral_panels},
            {"spectral_nodes", g.spectral_nodes},
            {"x_panel_fraction", g.x_panel_fraction},
            {"x_nodes", g.x_nodes}};
}

BumpGrid bump_grid_from_json(const json& cfg) {
    BumpGrid b;
    if (cfg.contains("bump_grid")) {
        b.panels_per_bump = cfg.at("bump_grid").value("panels_per_bump", b.panels_per_bump);
        b.nodes_per_panel = cfg.at("bump_grid").value("nodes_per_panel", b.nodes_per_panel);
    }
    return b;
}

// Analytic A phi = -phi'' - K^2 phi for a Gaussian packet; exact even across
// profile jumps since K^2 enters pointwise.
std::function<cplx(double)> analytic_A_gaussian(const json& fn, StratifiedProfile p) {
    double center = fn.value("center", 0.0);
    double sigma = fn.at("sigma").get<double>();
    double q = fn.value("wavenumber", 0.0);
    cplx amp(1.0, 0.0);
    if (fn.contains("amplitude")) {
        const auto& a = fn.at("amplitude");
        amp = a.is_array() ? cplx(a.at(0).get<double>(), a.at(1).get<double>())
                           : cplx(a.get<double>(), 0.0);
    }
    return [=](double x) {
        double s = (x - center) / sigma;
        cplx g = amp * std::exp(cplx(-0.5 * s * s, q * x));
        cplx dlog(-s / sigma, q);
        cplx d2 = (dlog * dlog - 1.0 / (sigma * sigma)) * g;
        return -d2 - p.k_sq_at(x) * g;
    };
}

struct Run {
    json cfg;
    std::string format;
    unsigned threads;
    std::uint64_t seed;
    std::string hash;

    json meta(const json& quadrature) const {
        return {{"tool", std::string("stratspec ") + version},
                {"config_hash", hash},
                {"quadrature", quadrature},
                {"seed", seed}};
    }
};

std::string run_modes(const Run& r) {
    auto p = profile_from_json(r.cfg.at("profile"));
    double tol = r.cfg.value("tol", 1e-12);
    std::size_t grid_points = r.cfg.value("grid_points", std::size_t{2048});
    std::size_t n_samples = r.cfg.value("samples", std::size_t{201});
    auto modes = find_guided_modes(p, tol, grid_points);
    json quad = {{"tol", tol}, {"grid_points", grid_points}};
    if (r.format == "json") {
        json out = {{"meta", r.meta(quad)}, {"modes", json::array()}};
        for (const auto& m : modes) out["modes"].push_back(to_json(m, n_samples));
        return out.dump(2) + "\n";
    }
    if (r.format == "csv") {
        CsvWriter w(r.hash, quad);
        w.header({"mode", "x", "psi"});
        for (std::size_t n = 0; n < modes.size(); ++n)
            for (auto [x, v] : modes[n].sample(n_samples))
                w.row({static_cast<double>(n), x, v});
        return w.str();
    }
    SvgPlot plot;
    double lo = 0.0, hi = 1.0, vmax = 1.0;
    if (!modes.empty()) {
        auto s0 = modes.front().sample(n_samples);
        lo = s0.front().first;
        hi = s0.back().first;
        vmax = 0.0;
        for (const auto& m : modes)
            for (auto [x, v] : m.sample(n_samples)) vmax = std::max(vmax, std::abs(v));
    }
    plot.set_range(lo, hi, -vmax, vmax);
    const char* colors[] = {"steelblue", "firebrick", "seagreen", "darkorange", "purple"};
    for (std::size_t n = 0; n < modes.size(); ++n)
        plot.polyline(modes[n].sample(n_samples), colors[n % 5]);
    return plot.str(r.hash);
}

std::string run_spectrum(const Run& r) {
    auto p = profile_from_json(r.cfg.at("profile"));
    auto phi = function_from_json(r.cfg.at("function"));
    GftGrid g = grid_from_json(r.cfg, r.threads);
    auto c = forward(phi, p, g);
    if (r.format == "json") {
        json out = {{"meta", r.meta(grid_to_json(g))}, {"coefficients", to_json(c)}};
        return out.dump(2) + "\n";
    }
    if (r.format == "csv") {
        CsvWriter w(r.hash, grid_to_json(g));
        w.header({"branch", "lambda", "re", "im", "abs2", "weight"});
        for (Branch b : {Branch::minus, Branch::plus}) {
            const auto& d = c.density(b);
            for (std::size_t i = 0; i < d.size(); ++i)
                w.row({b == Branch::plus ? 1.0 : -1.0, d.nodes[i], d.values[i].real(),
                       d.values[i].imag(), std::norm(d.values[i]), d.weights[i]});
        }
        return w.str();
    }
    SvgPlot plot;
    double vmax = 0.0, lmin = 0.0, lmax = 1.0;
    for (Branch b : {Branch::minus, Branch::plus}) {
        const auto& d = c.density(b);
        for (std::size_t i = 0; i < d.size(); ++i) {
            vmax = std::max(vmax, std::norm(d.values[i]));
            lmin = std::min(lmin, d.nodes[i]);
            lmax = std::max(lmax, d.nodes[i]);
        }
    }
    plot.set_range(lmin, lmax, 0.0, vmax);
    for (Branch b : {Branch::minus, Branch::plus}) {
        const auto& d = c.density(b);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < d.size(); ++i)
            pts.emplace_back(d.nodes[i], std::norm(d.values[i]));
        plot.polyline(pts, b == Branch::plus ? "steelblue" : "firebrick");
    }
    return plot.str(r.hash);
}

std::string run_gft_check(const Run& r) {
    auto p = profile_from_json(r.cfg.at("profile"));
    GftGrid g = grid_from_json(r.cfg, r.threads);
    json report;
    auto modes = find_guided_modes(p);

    const json& fn = r.cfg.at("function");
    auto phi = function_from_json(fn);
    report["plancherel_error"] = plancherel_check(phi, p, g, &modes);
    std::function<cplx(double)> Aphi;
    if (fn.at("kind") == "gaussian") {
        Aphi = analytic_A_gaussian(fn, p);
        report["diagonalization_error"] = diagonalization_check(phi, p, g, &Aphi, &modes);
    } else {
        report["diagonalization_error"] = nullptr;
    }

    // convergence order against a coarse grid pair
    GftGrid coarse = g;
    coarse.lambda_max = std::min(60.0, g.lambda_max);
    coarse.spectral_panels = 24;
    double e_c = plancherel_check(phi, p, coarse, &modes);
    double e_f = plancherel_check(phi, p, coarse.refined(2.0), &modes);
    report["convergence"] = {{"coarse_error", e_c},
                             {"fine_error", e_f},
                             {"order", (e_c > 0 && e_f > 0) ? std::log2(e_c / e_f) : 0.0}};

    if (r.cfg.contains("battery")) {
        std::mt19937_64 rng(r.seed);
        std::uniform_real_distribution<double> cd(-1.5, 1.5), sd(0.6, 1.2), qd(0.0, 2.5);
        std::size_t count = r.cfg.at("battery").value("count", std::size_t{5});
        double worst = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            auto f = gaussian_packet(cd(rng), sd(rng), qd(rng));
            worst = std::max(worst, plancherel_check(f, p, g, &modes));
        }
        report["battery"] = {{"count", count}, {"max_plancherel_error", worst}};
    }

    json out = {{"meta", r.meta(grid_to_json(g))}, {"report", report}};
    if (r.format == "json") return out.dump(2) + "\n";
    CsvWriter w(r.hash, grid_to_json(g));
    w.header({"plancherel_error", "diagonalization_error", "order"});
    w.row({report["plancherel_error"].get<double>(),
           report["diagonalization_error"].is_null()
               ? -1.0
               : report["diagonalization_error"].get<double>(),
           report["convergence"]["order"].get<double>()});
    return w.str();
}

std::string run_represent(const Run& r) {
    auto p = profile_from_json(r.cfg.at("profile"));
    auto geom = geometry_from_json(r.cfg.at("geometry"));
    auto bumps = bumps_from_json(r.cfg.at("density"));
    auto field = synthesize_solution(bumps, p, geom, bump_grid_from_json(r.cfg));
    const auto& gr = r.cfg.at("grid");
    double x0 = gr.at("x").at(0), x1 = gr.at("x").at(1);
    double y0 = gr.at("y").at(0), y1 = gr.at("y").at(1);
    std::size_t nx = gr.at("x").at(2), ny = gr.at("y").at(2);
    json quad = {{"nx", nx}, {"ny", ny}};

    std::vector<cplx> vals(nx * ny);
    parallel_for(nx * ny, r.threads, [&](std::size_t idx) {
        std::size_t i = idx % nx, j = idx / nx;
        double x = nx > 1 ? x0 + (x1 - x0) * static_cast<double>(i) / (nx - 1) : x0;
        double y = ny > 1 ? y0 + (y1 - y0) * static_cast<double>(j) / (ny - 1) : y0;
        vals[idx] = evaluate_representation(field, x, y);
    });

    if (r.format == "csv") {
        CsvWriter w(r.hash, quad);
        w.header({"x", "y", "re_u", "im_u"});
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i) {
                double x = nx > 1 ? x0 + (x1 - x0) * static_cast<double>(i) / (nx - 1) : x0;
                double y = ny > 1 ? y0 + (y1 - y0) * static_cast<double>(j) / (ny - 1) : y0;
                const cplx& v = vals[j * nx + i];
                w.row({x, y, v.real(), v.imag()});
            }
        return w.str();
    }
    if (r.format == "json") {
        json rows = json::array();
        for (const cplx& v : vals) rows.push_back({v.real(), v.imag()});
        return json{{"meta", r.meta(quad)},
                    {"grid", {{"x", {x0, x1, nx}}, {"y", {y0, y1, ny}}}},
                    {"values", rows}}
                   .dump(2) +
               "\n";
    }
    SvgPlot plot;
    double vmax = 1e-300;
    for (const cplx& v : vals) vmax = std::max(vmax, std::abs(v.real()));
    plot.set_range(x0, x1, -vmax, vmax);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < nx; ++i)
        pts.emplace_back(nx > 1 ? x0 + (x1 - x0) * static_cast<double>(i) / (nx - 1) : x0,
                         vals[i].real());
    plot.polyline(pts, "steelblue");
    return plot.str(r.hash);
}

std::string run_ray_check(const Run& r) {
    auto p = profile_from_json(r.cfg.at("profile"));
    auto geom = geometry_from_json(r.cfg.at("geometry"));
    auto field = synthesize_solution(bumps_from_json(r.cfg.at("density")), p, geom,
                                     bump_grid_from_json(r.cfg));
    double t_max = r.cfg.value("t_max", 40.0);
    double tail_tol = r.cfg.value("tail_tol", 1e-8);
    json rays = json::array();
    for (double alpha : r.cfg.at("alphas").get<std::vector<double>>()) {
        auto ri = ray_l1_norm(field, alpha, t_max, tail_tol);
        rays.push_back({{"alpha", alpha},
                        {"value", ri.value},
                        {"tail_bound", ri.tail_bound},
                        {"converged", ri.converged}});
    }
    json quad = {{"t_max", t_max}, {"tail_tol", tail_tol}};
    if (r.format == "json")
        return json{{"meta", r.meta(quad)}, {"rays", rays}}.dump(2) + "\n";
    CsvWriter w(r.hash, quad);
    w.header({"alpha", "value", "tail_bound", "converged"});
    for (const auto& q : rays)
        w.row({q["alpha"], q["value"], q["tail_bound"],
               q["converged"].get<bool>() ? 1.0 : 0.0});
    return w.str();
}

std::string run_curves(const Run& r) {
    double tw = r.cfg.at("west").at("theta").get<double>();
    double kw = r.cfg.at("west").at("k_sq").get<double>();
    double te = r.cfg.at("east").at("theta").get<double>();
    double ke = r.cfg.at("east").at("k_sq").get<double>();
    double mu_max = r.cfg.value("mu_max", 300.0);
    std::size_t count = r.cfg.value("mu_count", std::size_t{301});
    std::vector<double> mu;
    for (std::size_t i = 0; i < count; ++i)
        mu.push_back(mu_max * static_cast<double>(i) / static_cast<double>(count - 1));
    auto west = analyticity_curves(Side::west, tw, kw, mu);
    auto east = analyticity_curves(Side::east, te, ke, mu);
    json quad = {{"mu_max", mu_max}, {"mu_count", count}};

    auto name = [](CurveKind k) {
        switch (k) {
            case CurveKind::lambda_NW: return "NW";
            case CurveKind::lambda_NE_plus: return "NE_plus";
            default: return "NE_minus";
        }
    };
    if (r.format == "csv") {
        CsvWriter w(r.hash, quad);
        w.header({"curve", "mu", "re_lambda", "im_lambda"});
        for (const auto& s : west) w.row({0.0, s.mu, s.lambda.real(), s.lambda.imag()});
        for (const auto& s : east)
            w.row({s.which == CurveKind::lambda_NE_plus ? 1.0 : 2.0, s.mu,
                   s.lambda.real(), s.lambda.imag()});
        return w.str();
    }
    if (r.format == "json") {
        json out = {{"meta", r.meta(quad)},
                    {"west",
                     {{"touch_point", west.empty() ? 0.0 : west[0].touch_point},
                      {"samples", json::array()}}},
                    {"east",
                     {{"touch_point", east.empty() ? 0.0 : east[0].touch_point},
                      {"samples", json::array()}}}};
        for (const auto& s : west)
            out["west"]["samples"].push_back({{"curve", name(s.which)},
                                              {"mu", s.mu},
                                              {"lambda", {s.lambda.real(), s.lambda.imag()}}});
        for (const auto& s : east)
            out["east"]["samples"].push_back({{"curve", name(s.which)},
                                              {"mu", s.mu},
                                              {"lambda", {s.lambda.real(), s.lambda.imag()}}});
        return out.dump(2) + "\n";
    }
    SvgPlot plot;
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
    auto grow = [&](const CurveSample& s) {
        re_lo = std::min(re_lo, s.lambda.real());
        re_hi = std::max(re_hi, s.lambda.real());
        im_lo = std::min(im_lo, s.lambda.imag());
        im_hi = std::max(im_hi, s.lambda.imag());
    };
    for (const auto& s : west) grow(s);
    for (const auto& s : east) grow(s);
    plot.set_range(re_lo, re_hi + 1.0, im_lo, im_hi);
    std::vector<std::pair<double, double>> nw, nep, nem;
    for (const auto& s : west) nw.emplace_back(s.lambda.real(), s.lambda.imag());
    for (const auto& s : east)
        (s.which == CurveKind::lambda_NE_plus ? nep : nem)
            .emplace_back(s.lambda.real(), s.lambda.imag());
    plot.polyline(nw, "firebrick");
    plot.polyline(nep, "steelblue");
    plot.polyline(nem, "steelblue");
    return plot.str(r.hash);
}

std::string run_resonances(const Run& r) {
    auto p = profile_from_json(r.cfg.at("profile"));
    const auto& reg = r.cfg.at("region");
    Rect rect{reg.at("re").at(0), reg.at("re").at(1), reg.at("im").at(0),
              reg.at("im").at(1)};
    double min_box = r.cfg.value("min_box", 0.5);
    double tol = r.cfg.value("tol", 1e-9);
    auto zeros = find_resonances(p, rect, min_box, tol);
    json quad = {{"min_box", min_box}, {"tol", tol}};
    if (r.format == "json") {
        json list = json::array();
        for (cplx z : zeros)
            list.push_back({{"re", z.real()},
                            {"im", z.imag()},
                            {"det_abs", std::abs(robin_determinant(z, p))}});
        return json{{"meta", r.meta(quad)}, {"resonances", list}}.dump(2) + "\n";
    }
    CsvWriter w(r.hash, quad);
    w.header({"re", "im", "det_abs"});
    for (cplx z : zeros) w.row({z.real(), z.imag(), std::abs(robin_determinant(z, p))});
    return w.str();
}

std::string run_transfer_check(const Run& r) {
    auto cfg = junction_from_json(r.cfg.at("junction"));
    auto violations = check_compatibility(cfg);
    if (!violations.empty()) {
        std::string msg = "incompatible junction:";
        for (const auto& v : violations) msg += " " + v + ";";
        throw precondition_error(msg);
    }
    auto wf = synthesize_solution(bumps_from_json(r.cfg.at("west_density")),
                                  cfg.west.profile, cfg.west.geometry);
    auto ef = synthesize_solution(bumps_from_json(r.cfg.at("east_density")),
                                  cfg.east.profile, cfg.east.geometry);
    json rows = json::array();
    double worst = 0.0;
    for (double lam : r.cfg.at("lambdas").get<std::vector<double>>()) {
        cplx kw = transfer_outer(wf, cfg, Side::west, cplx(lam, 0.0));
        cplx dw = direct_transfer(wf, cfg, Side::west, cplx(lam, 0.0));
        cplx ke = transfer_outer(ef, cfg, Side::east, cplx(lam, 0.0));
        cplx de = direct_transfer(ef, cfg, Side::east, cplx(lam, 0.0));
        double ew = std::abs(kw - dw) / (1.0 + std::abs(dw));
        double ee = std::abs(ke - de) / (1.0 + std::abs(de));
        worst = std::max({worst, ew, ee});
        rows.push_back({{"lambda", lam},
                        {"west_kernel", {kw.real(), kw.imag()}},
                        {"west_direct", {dw.real(), dw.imag()}},
                        {"west_rel_error", ew},
                        {"east_kernel", {ke.real(), ke.imag()}},
                        {"east_direct", {de.real(), de.imag()}},
                        {"east_rel_error", ee}});
    }
    json quad = json::object();
    if (r.format == "json")
        return json{{"meta", r.meta(quad)}, {"max_rel_error", worst}, {"checks", rows}}
                   .dump(2) +
               "\n";
    CsvWriter w(r.hash, quad);
    w.header({"lambda", "west_rel_error", "east_rel_error"});
    for (const auto& q : rows)
        w.row({q["lambda"], q["west_rel_error"], q["east_rel_error"]});
    return w.str();
}

std::string run_probe(const Run& r) {
    auto cfg = junction_from_json(r.cfg.at("junction"));
    auto wf = synthesize_solution(bumps_from_json(r.cfg.at("west_density")),
                                  cfg.west.profile, cfg.west.geometry);
    auto ef = synthesize_solution(bumps_from_json(r.cfg.at("east_density")),
                                  cfg.east.profile, cfg.east.geometry);
    auto trace = function_from_json(r.cfg.at("north_trace"));
    ProbeGrid grid;
    if (r.cfg.contains("probe")) {
        const auto& q = r.cfg.at("probe");
        grid.n_interval = q.value("n_interval", grid.n_interval);
        grid.n_positive = q.value("n_positive", grid.n_positive);
        grid.lambda_positive_max = q.value("lambda_positive_max", grid.lambda_positive_max);
        grid.consistency_tol = q.value("consistency_tol", grid.consistency_tol);
    }
    auto rep = uniqueness_probe(cfg, trace, wf, ef, grid);
    json quad = {{"n_interval", grid.n_interval}, {"n_positive", grid.n_positive}};
    if (r.format == "json") {
        auto cvec = [](const std::vector<cplx>& v) {
            json a = json::array();
            for (cplx z : v) a.push_back({z.real(), z.imag()});
            return a;
        };
        json out = {{"meta", r.meta(quad)},
                    {"interval_lambdas", rep.interval_lambdas},
                    {"positive_lambdas", rep.positive_lambdas},
                    {"interval_total", cvec(rep.interval_total)},
                    {"interval_west", cvec(rep.interval_west)},
                    {"interval_middle", cvec(rep.interval_middle)},
                    {"interval_east", cvec(rep.interval_east)},
                    {"positive_total", cvec(rep.positive_total)},
                    {"interval_sup", rep.interval_sup},
                    {"positive_sup", rep.positive_sup},
                    {"interval_ratio", rep.interval_ratio},
                    {"middle_morera_residual", rep.middle_morera_residual},
                    {"consistency_west", rep.consistency_west},
                    {"consistency_east", rep.consistency_east},
                    {"consistent", rep.consistent},
                    {"violations", rep.violations}};
        return out.dump(2) + "\n";
    }
    CsvWriter w(r.hash, quad);
    w.header({"lambda", "abs_total", "abs_west", "abs_middle", "abs_east"});
    for (std::size_t i = 0; i < rep.interval_lambdas.size(); ++i)
        w.row({rep.interval_lambdas[i], std::abs(rep.interval_total[i]),
               std::abs(rep.interval_west[i]), std::abs(rep.interval_middle[i]),
               std::abs(rep.interval_east[i])});
    for (std::size_t i = 0; i < rep.positive_lambdas.size(); ++i)
        w.row({rep.positive_lambdas[i], std::abs(rep.positive_total[i]),
               std::abs(rep.positive_west[i]), std::abs(rep.positive_middle[i]),
               std::abs(rep.positive_east[i])});
    return w.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stratspec: spectral toolkit for stratified half-planes and junctions"};
    std::string config_path, out_path, format = "json";
    unsigned threads = 1;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_path, "output file path")->required();
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    app.add_option("--threads", threads, "worker thread cap");
    app.add_option("--seed", seed, "seed for randomized batteries");
    CLI11_PARSE(app, argc, argv);

    json cfg;
    try {
        cfg = json::parse(read_text_file(config_path));
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config parse error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config read error: %s\n", e.what());
        return 3;
    }

    Run run{cfg, format, threads, seed, ""};
    run.hash = config_hash(cfg.dump() + "|format=" + format + "|seed=" + std::to_string(seed));

    std::string payload;
    try {
        std::string cmd = cfg.at("command").get<std::string>();
        if (cmd == "modes")
            payload = run_modes(run);
        else if (cmd == "spectrum")
            payload = run_spectrum(run);
        else if (cmd == "gft-check")
            payload = run_gft_check(run);
        else if (cmd == "represent")
            payload = run_represent(run);
        else if (cmd == "ray-check")
            payload = run_ray_check(run);
        else if (cmd == "curves")
            payload = run_curves(run);
        else if (cmd == "resonances")
            payload = run_resonances(run);
        else if (cmd == "transfer-check")
            payload = run_transfer_check(run);
        else if (cmd == "probe")
            payload = run_probe(run);
        else {
            std::fprintf(stderr, "unknown command: %s\n", cmd.c_str());
            return 1;
        }
    } catch (const nonconvergence_error& e) {
        std::fprintf(stderr, "numerical non-convergence: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config validation error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 1;
    }

    try {
        write_text_file(out_path, payload);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "output error: %s\n", e.what());
        return 3;
    }
    return 0;
}
