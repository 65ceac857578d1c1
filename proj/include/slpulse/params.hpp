#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace slpulse {

/// Physical parameters of the Lambda-type ensemble in simulation units.
///
/// Time is measured in 1/gamma (optical-coherence decay) and length in
/// absorption lengths, so the identity l_abs = gamma * c / g2n fixes the
/// light speed once gamma, g2n and l_abs are chosen.
struct PhysicalParams {
    double gamma = 1.0;     ///< optical-coherence decay rate (time unit)
    double omega_c = 0.69;  ///< control Rabi frequency, units of gamma
    double g2n = 138.0;     ///< collective coupling g^2 N, units of gamma^2
    double l_abs = 1.0;     ///< absorption length (length unit)

    /// Rabi frequency and collective coupling as plain rates.
    double omega_abs() const { return omega_c * gamma; }
    double g2n_abs() const { return g2n * gamma * gamma; }

    /// Vacuum light speed implied by l_abs = gamma c / (g^2 N).
    double light_speed() const { return g2n_abs() * l_abs / gamma; }

    /// Collective coupling amplitude g*sqrt(N) as a plain rate.
    double coupling_amplitude() const { return std::sqrt(g2n_abs()); }

    /// The group-velocity unit c * omega_c^2 / (g^2 N) used for reporting.
    double vg_unit() const { return light_speed() * omega_c * omega_c / g2n; }

    void validate() const {
        // omega_c = 0 is the switched-off-control edge case; the other
        // scales define the units and must be positive.
        if (!(gamma > 0.0) || !(omega_c >= 0.0) || !(g2n > 0.0) || !(l_abs > 0.0))
            throw std::invalid_argument(
                "PhysicalParams: gamma, g2n, l_abs must be positive and omega_c >= 0");
    }

    bool operator==(const PhysicalParams&) const = default;
};

/// Convert a velocity in simulation units (l_abs*gamma) to units of
/// c*omega_c^2/(g^2 N).
inline double vg_to_paper_units(double v, const PhysicalParams& params) {
    return v / params.vg_unit();
}

namespace decay {

/// No dephasing of any spatial harmonic (deep optical lattice limit).
struct Zero {
    bool operator==(const Zero&) const = default;
};

/// Linear-in-order model gamma_n = |n| * a * gamma for cold gases.
struct ColdLinear {
    double a = 0.0;
    bool operator==(const ColdLinear&) const = default;
};

/// Order-of-magnitude estimate for a laser-cooled ensemble: the n-th
/// harmonic washes out once atoms at thermal speed v_s cross one grating
/// wavelength, gamma_n = |n| * |k_c * v_s / (2 pi)|.
struct LaserCooledEstimate {
    double k_c = 0.0;
    double v_s = 0.0;
    bool operator==(const LaserCooledEstimate&) const = default;
};

/// Order-of-magnitude estimate for a condensate: the n-th harmonic is an
/// excitation of momentum |n| k_c hbar leaving a cloud of size L,
/// gamma_n = |n| * k_c * (hbar/m) / L.
struct BECEstimate {
    double k_c = 0.0;
    double hbar_over_m = 0.0;
    double length = 0.0;
    bool operator==(const BECEstimate&) const = default;
};

/// Explicit per-order table; entry |n| gives gamma_n. Entry 0 must be 0.
struct CustomTable {
    std::vector<double> rates;
    bool operator==(const CustomTable&) const = default;
};

}  // namespace decay

/// Dephasing-rate model gamma_n for the spatial harmonics of the atomic
/// coherences. All variants are even in n and give gamma_0 = 0.
class DecayModel {
  public:
    using Variant = std::variant<decay::Zero, decay::ColdLinear,
                                 decay::LaserCooledEstimate, decay::BECEstimate,
                                 decay::CustomTable>;

    DecayModel() : variant_(decay::Zero{}) {}
    DecayModel(Variant v) : variant_(std::move(v)) { validate(); }

    static DecayModel zero() { return DecayModel(decay::Zero{}); }
    static DecayModel cold_linear(double a) { return DecayModel(decay::ColdLinear{a}); }

    const Variant& variant() const { return variant_; }

    /// Dephasing rate of the order-n harmonic, units of params.gamma.
    double rate(int n, const PhysicalParams& params) const {
        const int m = n < 0 ? -n : n;
        if (m == 0) return 0.0;
        return std::visit(
            [&](const auto& v) -> double {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, decay::Zero>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<T, decay::ColdLinear>) {
                    return m * v.a * params.gamma;
                } else if constexpr (std::is_same_v<T, decay::LaserCooledEstimate>) {
                    return m * std::abs(v.k_c * v.v_s / (2.0 * M_PI));
                } else if constexpr (std::is_same_v<T, decay::BECEstimate>) {
                    return m * v.k_c * v.hbar_over_m / v.length;
                } else {
                    if (static_cast<std::size_t>(m) >= v.rates.size())
                        throw std::out_of_range(
                            "DecayModel: no table entry for harmonic order " +
                            std::to_string(n));
                    return v.rates[static_cast<std::size_t>(m)];
                }
            },
            variant_);
    }

    void validate() const {
        std::visit(
            [](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, decay::ColdLinear>) {
                    if (v.a < 0.0)
                        throw std::invalid_argument("DecayModel: decay constant a must be >= 0");
                } else if constexpr (std::is_same_v<T, decay::BECEstimate>) {
                    if (!(v.length > 0.0))
                        throw std::invalid_argument("DecayModel: ensemble length must be > 0");
                    if (v.k_c * v.hbar_over_m < 0.0)
                        throw std::invalid_argument("DecayModel: negative rate estimate");
                } else if constexpr (std::is_same_v<T, decay::CustomTable>) {
                    if (v.rates.empty() || v.rates[0] != 0.0)
                        throw std::invalid_argument(
                            "DecayModel: table must start with gamma_0 = 0");
                    for (double r : v.rates)
                        if (!(r >= 0.0) || !std::isfinite(r))
                            throw std::invalid_argument(
                                "DecayModel: table rates must be finite and >= 0");
                }
            },
            variant_);
    }

    bool operator==(const DecayModel&) const = default;

  private:
    Variant variant_;
};

/// Dephasing rate of the order-n coherence harmonic (units of gamma).
inline double decay_rate(const DecayModel& model, int n, const PhysicalParams& params) {
    return model.rate(n, params);
}

}  // namespace slpulse
