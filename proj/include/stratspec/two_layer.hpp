#pragma once

#include <cmath>
#include <complex>

#include "stratspec/common.hpp"

namespace stratspec {

// Spectral branch: which side the unit-amplitude incident wave comes from.
enum class Branch { plus, minus };

inline Branch other(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }

// Lambda intervals where the corresponding objects live.
inline bool in_lambda_interval(double lambda, double k_sq) { return lambda > -k_sq; }

// Continuation domain: the plane cut along (-inf, -min(k-^2, k+^2)].
inline bool in_continuation_domain(cplx lambda, double k_minus_sq, double k_plus_sq) {
    double cut = -std::min(k_minus_sq, k_plus_sq);
    return !(lambda.imag() == 0.0 && lambda.real() <= cut);
}

// Transverse wavenumber sqrt(lambda + k^2), principal branch, so Re > 0 off
// the cut. On the cut itself (real lambda <= -k^2) the limit from above is
// used: i*sqrt(-lambda-k^2). Points hugging the cut with a tiny nonzero
// imaginary part are rejected as numerically ambiguous.
inline cplx beta(cplx lambda, double k_sq) {
    cplx z = lambda + k_sq;
    if (lambda.imag() == 0.0) {
        double zr = z.real();
        if (zr < 0.0) return {0.0, std::sqrt(-zr)};
        return {std::sqrt(zr), 0.0};
    }
    if (std::abs(lambda.imag()) < 1e-14 && lambda.real() <= -k_sq)
        throw branch_cut_error("beta: lambda within cut-detection tolerance of the branch cut");
    return std::sqrt(z);
}

struct ScatteringData {
    cplx beta_minus, beta_plus;
    cplx R_plus, R_minus, T_plus, T_minus;
};

inline ScatteringData scattering_coefficients(cplx lambda, double k_minus,
                                              double k_plus) {
    ScatteringData s;
    s.beta_minus = beta(lambda, k_minus * k_minus);
    s.beta_plus = beta(lambda, k_plus * k_plus);
    cplx denom = s.beta_plus + s.beta_minus;
    if (std::abs(denom) < 1e-300)
        throw std::domain_error("scattering_coefficients: beta+ + beta- vanishes");
    s.R_plus = (s.beta_plus - s.beta_minus) / denom;
    s.R_minus = (s.beta_minus - s.beta_plus) / denom;
    s.T_plus = 2.0 * s.beta_plus / denom;
    s.T_minus = 2.0 * s.beta_minus / denom;
    return s;
}

// Generalized eigenfunction of the two-layer medium (interface at x = 0):
// unit incident wave from the `branch` side, reflected and transmitted parts.
inline cplx psi_two_layer(cplx lambda, double x, Branch branch, double k_minus,
                          double k_plus) {
    const ScatteringData s = scattering_coefficients(lambda, k_minus, k_plus);
    const cplx I(0.0, 1.0);
    if (branch == Branch::plus) {
        if (x > 0.0)
            return std::exp(-I * s.beta_plus * x) + s.R_plus * std::exp(I * s.beta_plus * x);
        return s.T_plus * std::exp(-I * s.beta_minus * x);
    }
    if (x < 0.0)
        return std::exp(I * s.beta_minus * x) + s.R_minus * std::exp(-I * s.beta_minus * x);
    return s.T_minus * std::exp(I * s.beta_plus * x);
}

// Spectral weight making the generalized Fourier transform unitary.
inline double rho_weight(double lambda, double k_sq) {
    if (!(lambda > -k_sq))
        throw std::domain_error("rho_weight: lambda must exceed -k^2");
    return 1.0 / (4.0 * pi * std::sqrt(lambda + k_sq));
}

}  // namespace stratspec
