#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slpulse/params.hpp"

namespace slpulse {

/// Closed-form results for the zero-dephasing hierarchy after adiabatic
/// elimination of the optical coherences, truncated at order ell.

/// Group velocity of the split wave packets at truncation order ell,
/// c0 = c / sqrt((1 + ell*r/(2 ell + 1)) * (1 + ell*r)) with r = g2n/omega_c^2.
/// Returned in simulation units (l_abs * gamma).
inline double c0_exact(int ell, const PhysicalParams& params) {
    if (ell < 1)
        throw std::domain_error("c0_exact: truncation order must be >= 1");
    const double r = params.g2n / (params.omega_c * params.omega_c);
    const double fs = 1.0 + ell * r / (2.0 * ell + 1.0);
    const double fd = 1.0 + ell * r;
    return params.light_speed() / std::sqrt(fs * fd);
}

/// Slow-light limit of c0_exact, c * sqrt(2 ell + 1) * omega_c^2 / (ell g2n).
inline double c0_slowlight(int ell, const PhysicalParams& params) {
    if (ell < 1)
        throw std::domain_error("c0_slowlight: truncation order must be >= 1");
    return params.light_speed() * std::sqrt(2.0 * ell + 1.0) * params.omega_c *
           params.omega_c / (ell * params.g2n);
}

/// Coefficient tables of the adiabatic mode chain. Row n expresses the
/// symmetric/antisymmetric optical harmonics through the first one and the
/// field time derivative:
///   P_{s,2n+1} = s_p1[n] * P_{s,1} + s_dedt[n] * (i g / omega_c^2) dE_s/dt
///   P_{d,2n+1} = d_p1[n] * P_{d,1} + d_dedt[n] * (i g / omega_c^2) dE_d/dt
/// Closing the chain at order ell fixes the first harmonics themselves:
///   P_{s,1} = p_s1 * (i g / omega_c^2) dE_s/dt,  p_s1 = ell / (2 ell + 1)
///   P_{d,1} = p_d1 * (i g / omega_c^2) dE_d/dt,  p_d1 = ell
struct AdiabaticChain {
    struct Row {
        double s_p1;
        double s_dedt;
        double d_p1;
        double d_dedt;
    };
    std::vector<Row> rows;  ///< rows n = 0 .. ell-1 (modes kept by the cutoff)
    double p_s1 = 0.0;
    double p_d1 = 0.0;
    int ell = 0;
};

inline AdiabaticChain adiabatic_mode_chain(int ell) {
    if (ell < 1)
        throw std::domain_error("adiabatic_mode_chain: truncation order must be >= 1");
    AdiabaticChain chain;
    chain.ell = ell;
    chain.rows.reserve(static_cast<std::size_t>(ell));
    for (int n = 0; n < ell; ++n) {
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        chain.rows.push_back({sign * (2.0 * n + 1.0), -sign * n, sign, -sign * n});
    }
    chain.p_s1 = static_cast<double>(ell) / (2.0 * ell + 1.0);
    chain.p_d1 = static_cast<double>(ell);
    return chain;
}

/// d'Alembert solution for the retrieved sum and difference fields when a
/// stored profile S0 is released at t = 0:
///   E_s(z,t) = -(omega_c/g)[S0(z - c0 t) + S0(z + c0 t)]
///   E_d(z,t) = -A (omega_c/g)[S0(z - c0 t) - S0(z + c0 t)]
/// The difference-mode amplitude A is a free prefactor; the default is the
/// value sqrt((1 + ell r/(2 ell+1)) / (1 + ell r)) implied by the wave
/// equation the two cutoff relations produce.
class TravelingWave {
  public:
    using Profile = std::function<std::complex<double>(double)>;

    TravelingWave(Profile s0, int ell, PhysicalParams params)
        : TravelingWave(std::move(s0), ell, params, default_prefactor(ell, params)) {}

    TravelingWave(Profile s0, int ell, PhysicalParams params, double prefactor)
        : s0_(std::move(s0)),
          ell_(ell),
          params_(params),
          prefactor_(prefactor),
          c0_(c0_exact(ell, params)),
          amp_(params.omega_abs() / params.coupling_amplitude()) {}

    static double default_prefactor(int ell, const PhysicalParams& params) {
        if (ell < 1)
            throw std::domain_error("TravelingWave: truncation order must be >= 1");
        const double r = params.g2n / (params.omega_c * params.omega_c);
        return std::sqrt((1.0 + ell * r / (2.0 * ell + 1.0)) / (1.0 + ell * r));
    }

    double c0() const { return c0_; }
    double prefactor() const { return prefactor_; }

    std::complex<double> e_s(double z, double t) const {
        return -amp_ * (s0_(z - c0_ * t) + s0_(z + c0_ * t));
    }

    std::complex<double> e_d(double z, double t) const {
        return -prefactor_ * amp_ * (s0_(z - c0_ * t) - s0_(z + c0_ * t));
    }

    /// Sample both fields on a set of positions.
    std::pair<std::vector<std::complex<double>>, std::vector<std::complex<double>>>
    sample(const std::vector<double>& z, double t) const {
        std::vector<std::complex<double>> es(z.size()), ed(z.size());
        for (std::size_t j = 0; j < z.size(); ++j) {
            es[j] = e_s(z[j], t);
            ed[j] = e_d(z[j], t);
        }
        return {std::move(es), std::move(ed)};
    }

  private:
    Profile s0_;
    int ell_;
    PhysicalParams params_;
    double prefactor_;
    double c0_;
    double amp_;
};

}  // namespace slpulse
