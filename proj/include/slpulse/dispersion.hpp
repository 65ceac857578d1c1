#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slpulse/params.hpp"

namespace slpulse {

using Complex = std::complex<double>;

/// Thrown when a continued-fraction level or an effective decay hits an
/// exact pole.
class PoleError : public std::runtime_error {
  public:
    PoleError(const std::string& what, int level_) : std::runtime_error(what), level(level_) {}
    int level;
};

/// Continued fraction eliminating the coherence chain above the first
/// optical harmonic:
///   R = Omega^2 / (gamma_2 - i w + Omega^2 / (Gamma + gamma_3 - i w + ...
///       ... + Omega^2 / (gamma_{2 ell} - i w)))
/// evaluated bottom-up (backward recurrence) for numerical stability.
/// Depth ell counts the retained spin harmonics; ell <= 0 leaves no levels
/// and gives R = 0.
inline Complex continued_fraction_R(double omega, const PhysicalParams& params,
                                    const DecayModel& decay, int ell) {
    if (ell <= 0) return {0.0, 0.0};
    const double om2 = params.omega_abs() * params.omega_abs();
    const Complex iw(0.0, omega);
    auto base = [&](int level) -> Complex {
        const double optical = (level & 1) ? params.gamma : 0.0;
        return Complex(optical + decay.rate(level, params), 0.0) - iw;
    };
    Complex d = base(2 * ell);
    for (int level = 2 * ell - 1; level >= 2; --level) {
        if (d == Complex(0.0, 0.0))
            throw PoleError("continued_fraction_R: zero denominator at level " +
                                std::to_string(level + 1),
                            level + 1);
        d = base(level) + om2 / d;
    }
    if (d == Complex(0.0, 0.0))
        throw PoleError("continued_fraction_R: zero denominator at level 2", 2);
    return om2 / d;
}

/// Effective decay parameters of the sum and difference probe modes.
struct EffectiveDecays {
    Complex gamma_s;
    Complex gamma_d;
    Complex r_value;
    int ell_used = 0;
};

/// Gamma_s = Gamma + gamma_1 - i w + 2 i Omega^2 / w + R and
/// Gamma_d = Gamma + gamma_1 - i w + R, sharing one fraction value.
inline EffectiveDecays effective_decays(double omega, const PhysicalParams& params,
                                        const DecayModel& decay, int ell) {
    if (omega == 0.0)
        throw PoleError("effective_decays: Gamma_s has a pole at omega = 0", 0);
    const Complex r = continued_fraction_R(omega, params, decay, ell);
    const double om2 = params.omega_abs() * params.omega_abs();
    const Complex common =
        Complex(params.gamma + decay.rate(1, params), -omega) + r;
    EffectiveDecays out;
    out.gamma_d = common;
    out.gamma_s = common + Complex(0.0, 2.0 * om2 / omega);
    out.r_value = r;
    out.ell_used = ell;
    return out;
}

/// One point of the dispersion relation. Momenta are dimensionless,
/// k_plus = (c/Gamma) k, and the branches come as an exact +- pair.
struct DispersionPoint {
    double omega = 0.0;
    Complex k_plus;
    Complex k_minus;
};

namespace detail {

inline Complex normalize_branch(Complex k) {
    if (k.imag() < 0.0 || (k.imag() == 0.0 && k.real() < 0.0)) return -k;
    return k;
}

inline Complex pick_branch(Complex k, const std::optional<Complex>& previous) {
    if (!previous) return normalize_branch(k);
    return std::abs(k - *previous) <= std::abs(-k - *previous) ? k : -k;
}

}  // namespace detail

/// Complex momentum branches at one frequency,
///   k = +- (i Gamma / c) sqrt[(A Gamma/Gamma_s - i w/Gamma)(A Gamma/Gamma_d - i w/Gamma)]
/// with A = g^2 N / Gamma^2, returned as (c/Gamma) k. The branch is the one
/// with Im k_plus >= 0 unless a previous scan point dictates continuity.
/// omega = 0 returns the analytic limit k = 0.
inline DispersionPoint dispersion_k(double omega, const PhysicalParams& params,
                                    const DecayModel& decay, int ell,
                                    std::optional<Complex> previous = std::nullopt) {
    DispersionPoint point;
    point.omega = omega;
    if (omega == 0.0) return point;  // both factors cancel in the limit
    const EffectiveDecays eff = effective_decays(omega, params, decay, ell);
    const double a = params.g2n;  // g^2 N / Gamma^2
    const double wg = omega / params.gamma;
    const Complex fs = a / (eff.gamma_s / params.gamma) - Complex(0.0, wg);
    const Complex fd = a / (eff.gamma_d / params.gamma) - Complex(0.0, wg);
    const Complex k = Complex(0.0, 1.0) * std::sqrt(fs * fd);
    point.k_plus = detail::pick_branch(k, previous);
    point.k_minus = -point.k_plus;
    return point;
}

/// Dispersion scan with branch continuity along the frequency list.
struct DispersionScan {
    std::vector<DispersionPoint> points;
    std::vector<std::pair<double, std::string>> skipped;  ///< (omega, reason)
};

inline DispersionScan scan_dispersion(const std::vector<double>& omegas,
                                      const PhysicalParams& params, const DecayModel& decay,
                                      int ell) {
    for (std::size_t i = 1; i < omegas.size(); ++i)
        if (!(omegas[i] > omegas[i - 1]))
            throw std::invalid_argument("scan_dispersion: frequencies must be increasing");
    DispersionScan scan;
    scan.points.reserve(omegas.size());
    std::optional<Complex> previous;
    for (double w : omegas) {
        try {
            DispersionPoint p = dispersion_k(w, params, decay, ell, previous);
            if (w != 0.0) previous = p.k_plus;
            scan.points.push_back(std::move(p));
        } catch (const PoleError& e) {
            scan.skipped.emplace_back(w, e.what());
        }
    }
    return scan;
}

/// Independent route to the same momenta: assemble the truncated linear
/// system for the atomic amplitudes driven by unit probe fields, eliminate
/// it by the Thomas algorithm, and reduce the two Maxwell rows to a 2x2
/// eigenvalue problem in k.
struct OracleDispersion {
    Complex k_plus;
    Complex k_minus;
    double residual = 0.0;   ///< plug-back residual of the full system, relative
    double asymmetry = 0.0;  ///< forward/backward response mismatch, relative
    Complex chain_response_sum;   ///< P_{s,1} per unit E_s
    Complex chain_response_diff;  ///< P_{d,1} per unit E_d
};

inline OracleDispersion truncated_matrix_oracle(double omega, const PhysicalParams& params,
                                                const DecayModel& decay, int ell) {
    if (omega == 0.0)
        throw PoleError("truncated_matrix_oracle: omega must be nonzero", 0);
    const int m_top = std::max(1, 2 * ell);
    const int n = 2 * m_top + 1;
    const double om = params.omega_abs();
    const double gsn = params.coupling_amplitude();
    const Complex coupling(0.0, -om);  // off-diagonal of the chain system
    auto order_of = [&](int i) { return i - m_top; };
    const int row_p1 = m_top + 1;
    const int row_pm1 = m_top - 1;

    std::vector<Complex> diag(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int m = order_of(i);
        const double optical = (m & 1) ? params.gamma : 0.0;
        diag[static_cast<std::size_t>(i)] =
            Complex(optical + decay.rate(m, params), -omega);
    }

    // Thomas elimination with constant off-diagonals.
    auto solve = [&](int source_row) {
        std::vector<Complex> d = diag;
        std::vector<Complex> b(static_cast<std::size_t>(n), Complex(0.0, 0.0));
        b[static_cast<std::size_t>(source_row)] = Complex(0.0, gsn);
        for (int i = 1; i < n; ++i) {
            if (d[static_cast<std::size_t>(i - 1)] == Complex(0.0, 0.0))
                throw std::runtime_error("truncated_matrix_oracle: singular chain system");
            const Complex w = coupling / d[static_cast<std::size_t>(i - 1)];
            d[static_cast<std::size_t>(i)] -= w * coupling;
            b[static_cast<std::size_t>(i)] -= w * b[static_cast<std::size_t>(i - 1)];
        }
        std::vector<Complex> x(static_cast<std::size_t>(n));
        x[static_cast<std::size_t>(n - 1)] =
            b[static_cast<std::size_t>(n - 1)] / d[static_cast<std::size_t>(n - 1)];
        for (int i = n - 2; i >= 0; --i)
            x[static_cast<std::size_t>(i)] =
                (b[static_cast<std::size_t>(i)] - coupling * x[static_cast<std::size_t>(i + 1)]) /
                d[static_cast<std::size_t>(i)];
        return x;
    };

    const auto x_fwd = solve(row_p1);   // response to E_p^+ = 1
    const auto x_bwd = solve(row_pm1);  // response to E_p^- = 1
    const Complex a_fwd = x_fwd[static_cast<std::size_t>(row_p1)];
    const Complex b_fwd = x_bwd[static_cast<std::size_t>(row_p1)];
    const Complex b_mir = x_fwd[static_cast<std::size_t>(row_pm1)];
    const Complex a_mir = x_bwd[static_cast<std::size_t>(row_pm1)];

    OracleDispersion out;
    const double scale = std::max({std::abs(a_fwd), std::abs(b_fwd), 1e-300});
    out.asymmetry =
        std::max(std::abs(a_fwd - a_mir), std::abs(b_fwd - b_mir)) / scale;
    out.chain_response_sum = 0.5 * (a_fwd + a_mir) + 0.5 * (b_fwd + b_mir);
    out.chain_response_diff = 0.5 * (a_fwd + a_mir) - 0.5 * (b_fwd + b_mir);

    // Mirror symmetry makes the reduced 2x2 problem traceless:
    //   K E+ =  alpha E+ + beta E-,   K E- = -beta E+ - alpha E-.
    const Complex alpha = Complex(omega / params.gamma, 0.0) +
                          (gsn / params.gamma) * (0.5 * (a_fwd + a_mir));
    const Complex beta = (gsn / params.gamma) * (0.5 * (b_fwd + b_mir));
    const Complex k = detail::normalize_branch(std::sqrt(alpha * alpha - beta * beta));
    out.k_plus = k;
    out.k_minus = -k;

    // Plug-back residual of the assembled equations at (omega, k_plus, v).
    const Complex v1 = std::abs(beta) >= std::abs(k - alpha) ? beta : alpha + k;
    const Complex v2 = std::abs(beta) >= std::abs(k - alpha) ? k - alpha : -beta;
    std::vector<Complex> atoms(static_cast<std::size_t>(n));
    double xmax = 0.0;
    for (int i = 0; i < n; ++i) {
        atoms[static_cast<std::size_t>(i)] =
            v1 * x_fwd[static_cast<std::size_t>(i)] + v2 * x_bwd[static_cast<std::size_t>(i)];
        xmax = std::max(xmax, std::abs(atoms[static_cast<std::size_t>(i)]));
    }
    xmax = std::max({xmax, std::abs(v1), std::abs(v2), 1e-300});
    double gmax = 0.0;
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        gmax = std::max(gmax, std::abs(diag[static_cast<std::size_t>(i)]));
        Complex row = diag[static_cast<std::size_t>(i)] * atoms[static_cast<std::size_t>(i)];
        if (i > 0) row += coupling * atoms[static_cast<std::size_t>(i - 1)];
        if (i < n - 1) row += coupling * atoms[static_cast<std::size_t>(i + 1)];
        if (i == row_p1) row -= Complex(0.0, gsn) * v1;
        if (i == row_pm1) row -= Complex(0.0, gsn) * v2;
        res = std::max(res, std::abs(row));
    }
    {
        const Complex iw(0.0, omega);
        const Complex ikg(0.0, 1.0);
        const Complex row1 = (-iw / params.gamma + ikg * k) * v1 -
                             Complex(0.0, gsn / params.gamma) *
                                 atoms[static_cast<std::size_t>(row_p1)];
        const Complex row2 = (-iw / params.gamma - ikg * k) * v2 -
                             Complex(0.0, gsn / params.gamma) *
                                 atoms[static_cast<std::size_t>(row_pm1)];
        res = std::max({res, std::abs(row1), std::abs(row2)});
    }
    const double row_scale = (gmax + 2.0 * om + gsn + std::abs(k)) * xmax;
    out.residual = res / row_scale;
    return out;
}

}  // namespace slpulse
