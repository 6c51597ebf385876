#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace stratspec {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Error hierarchy. Every failure mode carries a message; a few carry data
// needed by callers (pole value, bracketing interval).

struct invalid_profile_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct branch_cut_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_density_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_applicable_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Singular Robin system: the 2x2 determinant vanished (scattering resonance).
struct robin_pole_error : std::runtime_error {
    cplx determinant;
    robin_pole_error(const std::string& msg, cplx det)
        : std::runtime_error(msg), determinant(det) {}
};

// Root search failed to converge; carries the last bracket for diagnosis.
struct nonconvergence_error : std::runtime_error {
    double bracket_lo = 0.0, bracket_hi = 0.0;
    nonconvergence_error(const std::string& msg, double lo = 0.0, double hi = 0.0)
        : std::runtime_error(msg), bracket_lo(lo), bracket_hi(hi) {}
};

inline bool finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Static-partition parallel loop. Deterministic: the work item i is
// independent of thread count provided fn(i) only writes slot i.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace stratspec
