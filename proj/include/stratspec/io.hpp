#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratspec/gft.hpp"
#include "stratspec/halfplane.hpp"
#include "stratspec/junction.hpp"
#include "stratspec/ode.hpp"
#include "stratspec/profile.hpp"
#include "stratspec/version.hpp"

namespace stratspec {

using json = nlohmann::json;

// ---- profiles ----

inline json to_json(const StratifiedProfile& p) {
    json pieces = json::array();
    for (const auto& q : p.pieces)
        pieces.push_back({{"from", q.from}, {"to", q.to}, {"k_sq", q.k_sq}});
    return {{"pieces", pieces}, {"k_minus_sq", p.k_minus_sq}, {"k_plus_sq", p.k_plus_sq}};
}

inline StratifiedProfile profile_from_json(const json& j) {
    std::vector<StratifiedProfile::Piece> pieces;
    if (j.contains("pieces"))
        for (const auto& q : j.at("pieces"))
            pieces.push_back({q.at("from").get<double>(), q.at("to").get<double>(),
                              q.at("k_sq").get<double>()});
    return make_piecewise(std::move(pieces), j.at("k_minus_sq").get<double>(),
                          j.at("k_plus_sq").get<double>());
}

// ---- geometry ----

inline json to_json(const HalfPlaneGeometry& g) {
    return {{"theta", g.theta},
            {"center", {g.center_x, g.center_y}},
            {"epsilon", g.epsilon}};
}

inline HalfPlaneGeometry geometry_from_json(const json& j) {
    HalfPlaneGeometry g;
    g.theta = j.value("theta", 0.0);
    if (j.contains("center")) {
        g.center_x = j.at("center").at(0).get<double>();
        g.center_y = j.at("center").at(1).get<double>();
    }
    g.epsilon = j.value("epsilon", 0.1);
    return g;
}

// ---- density bumps ----

inline Branch branch_from_string(const std::string& s) {
    if (s == "plus" || s == "+") return Branch::plus;
    if (s == "minus" || s == "-") return Branch::minus;
    throw precondition_error("unknown spectral branch: " + s);
}

inline DensityBump bump_from_json(const json& j) {
    DensityBump b;
    b.branch = branch_from_string(j.at("branch").get<std::string>());
    b.lo = j.at("lo").get<double>();
    b.hi = j.at("hi").get<double>();
    if (j.contains("amplitude")) {
        const auto& a = j.at("amplitude");
        if (a.is_array())
            b.amplitude = cplx(a.at(0).get<double>(), a.at(1).get<double>());
        else
            b.amplitude = cplx(a.get<double>(), 0.0);
    }
    std::string kind = j.value("kind", "smooth");
    if (kind == "gaussian" || kind == "windowed_gaussian")
        b.kind = DensityBump::Kind::windowed_gaussian;
    else if (kind == "smooth")
        b.kind = DensityBump::Kind::smooth;
    else
        throw precondition_error("unknown bump kind: " + kind);
    return b;
}

inline std::vector<DensityBump> bumps_from_json(const json& j) {
    std::vector<DensityBump> out;
    for (const auto& q : j) out.push_back(bump_from_json(q));
    return out;
}

// ---- x-space functions ----

inline CompactFunction function_from_json(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
        double center = j.value("center", 0.0);
        double sigma = j.at("sigma").get<double>();
        double q = j.value("wavenumber", 0.0);
        cplx amp(1.0, 0.0);
        if (j.contains("amplitude")) {
            const auto& a = j.at("amplitude");
            if (a.is_array())
                amp = cplx(a.at(0).get<double>(), a.at(1).get<double>());
            else
                amp = cplx(a.get<double>(), 0.0);
        }
        double reach = j.value("support_sigmas", 10.0);
        return gaussian_packet(center, sigma, q, amp, reach);
    }
    if (kind == "samples") {
        auto xs = j.at("xs").get<std::vector<double>>();
        auto re = j.at("re").get<std::vector<double>>();
        std::vector<double> im(xs.size(), 0.0);
        if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
        if (xs.size() < 2 || xs.size() != re.size() || xs.size() != im.size())
            throw precondition_error("samples: xs/re/im must have equal length >= 2");
        CompactFunction f;
        f.lo = xs.front();
        f.hi = xs.back();
        f.f = [xs, re, im](double x) -> cplx {
            auto it = std::upper_bound(xs.begin(), xs.end(), x);
            if (it == xs.begin() || it == xs.end()) {
                if (x == xs.front()) return {re.front(), im.front()};
                if (x == xs.back()) return {re.back(), im.back()};
                return {0.0, 0.0};
            }
            std::size_t i = static_cast<std::size_t>(it - xs.begin());
            double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return {re[i - 1] + t * (re[i] - re[i - 1]), im[i - 1] + t * (im[i] - im[i - 1])};
        };
        return f;
    }
    throw precondition_error("unknown function kind: " + kind);
}

// ---- junction ----

inline JunctionConfig junction_from_json(const json& j) {
    JunctionConfig cfg;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "right_angle")
        cfg.kind = JunctionKind::right_angle;
    else if (kind == "general_angle")
        cfg.kind = JunctionKind::general_angle;
    else
        throw precondition_error("unknown junction kind: " + kind);
    auto spec = [&](const char* name, Side side) {
        const auto& q = j.at(name);
        HalfPlaneSpec s;
        s.geometry = geometry_from_json(q.at("geometry"));
        s.profile = profile_from_json(q.at("profile"));
        validate_geometry(s.geometry, side);
        return s;
    };
    cfg.west = spec("west", Side::west);
    cfg.north = spec("north", Side::north);
    cfg.east = spec("east", Side::east);
    return cfg;
}

// ---- spectral data ----

inline json to_json(const SpectralDensity& d) {
    json re = json::array(), im = json::array();
    for (cplx v : d.values) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return {{"branch", d.branch == Branch::plus ? "plus" : "minus"},
            {"k_sq", d.k_sq},
            {"nodes", d.nodes},
            {"values_re", re},
            {"values_im", im},
            {"weights", d.weights}};
}

inline json to_json(const SpectralCoefficients& c) {
    json point = json::array();
    for (cplx v : c.point) point.push_back({v.real(), v.imag()});
    return {{"minus", to_json(c.minus)}, {"plus", to_json(c.plus)}, {"point", point}};
}

inline json to_json(const GuidedMode& m, std::size_t n_samples = 201) {
    json samples = json::array();
    for (auto [x, v] : m.sample(n_samples)) samples.push_back({x, v});
    return {{"lambda", m.lambda},
            {"decay_minus", m.kappa_minus},
            {"decay_plus", m.kappa_plus},
            {"samples", samples}};
}

// ---- deterministic config hash (FNV-1a 64) ----

inline std::string config_hash(const std::string& canonical) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---- CSV with metadata comments ----

struct CsvWriter {
    std::ostringstream out;

    CsvWriter(const std::string& hash, const json& quadrature) {
        out << "# tool=stratspec " << version << "\n";
        out << "# config_hash=" << hash << "\n";
        out << "# quadrature=" << quadrature.dump() << "\n";
    }
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out << cols[i] << (i + 1 < cols.size() ? "," : "\n");
    }
    void row(const std::vector<double>& vals) {
        char buf[32];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g", vals[i]);
            out << buf << (i + 1 < vals.size() ? "," : "\n");
        }
    }
    std::string str() const { return out.str(); }
};

// ---- minimal SVG polyline plots ----

struct SvgPlot {
    double width = 720, height = 480, margin = 48;
    std::ostringstream body;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

    void set_range(double xa, double xb, double ya, double yb) {
        x0 = xa;
        x1 = xb == xa ? xa + 1 : xb;
        y0 = ya;
        y1 = yb == ya ? ya + 1 : yb;
    }
    double px(double x) const { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); }
    double py(double y) const {
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin);
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* color) {
        body << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        char buf[64];
        for (auto [x, y] : pts) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(x), py(y));
            body << buf;
        }
        body << "\"/>\n";
    }
    std::string str(const std::string& hash) const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\">\n";
        out << "<!-- tool=stratspec " << version << " config_hash=" << hash << " -->\n";
        out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        // axes
        out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
            << width - margin << "\" y2=\"" << height - margin
            << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
            << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
        out << body.str();
        out << "</svg>\n";
        return out.str();
    }
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace stratspec
