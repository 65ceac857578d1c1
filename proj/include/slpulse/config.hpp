#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slpulse/analytic.hpp"
#include "slpulse/params.hpp"

namespace slpulse {

/// Uniform 1-D grid, symmetric about z = 0, plus the explicit time stepping
/// parameters. dt is tied to dz through the Courant number, and the CFL
/// bound c*dt/dz <= 1 is enforced at construction.
struct Grid {
    double z_max = 0.0;
    int n_z = 0;
    double dz = 0.0;
    double dt = 0.0;
    long n_steps = 0;
    long snapshot_stride = 1;

    double z_min() const { return -z_max; }

    /// Positions are measured from the center cell so that the grid is
    /// bitwise symmetric: z_at(n_z - 1 - j) == -z_at(j).
    double z_at(int j) const { return (j - (n_z - 1) / 2) * dz; }

    std::vector<double> positions() const {
        std::vector<double> z(static_cast<std::size_t>(n_z));
        for (int j = 0; j < n_z; ++j) z[static_cast<std::size_t>(j)] = z_at(j);
        return z;
    }

    bool operator==(const Grid&) const = default;
};

/// Build a symmetric grid covering at least [-z_extent, z_extent].
/// The extent is rounded up to a whole number of cells so that z = 0 is a
/// grid point. snapshot_stride <= 0 requests the default of one snapshot
/// per 0.5/gamma.
inline Grid make_grid(double z_extent, double dz, double cfl, double total_time,
                      const PhysicalParams& params, long snapshot_stride = 0) {
    if (!(dz > 0.0)) throw std::invalid_argument("Grid: dz must be > 0");
    if (!(z_extent > 0.0)) throw std::invalid_argument("Grid: z_max must be > 0");
    if (!(total_time > 0.0)) throw std::invalid_argument("Grid: total_time must be > 0");
    if (!(cfl > 0.0) || cfl > 1.0 + 1e-12)
        throw std::invalid_argument("Grid: CFL number c*dt/dz = " + std::to_string(cfl) +
                                    " violates the stability bound (need 0 < cfl <= 1)");
    Grid g;
    const long n_half = static_cast<long>(std::ceil(z_extent / dz - 1e-9));
    g.z_max = static_cast<double>(n_half) * dz;
    g.n_z = static_cast<int>(2 * n_half + 1);
    g.dz = dz;
    g.dt = cfl * dz / params.light_speed();
    g.n_steps = static_cast<long>(std::ceil(total_time / g.dt - 1e-9));
    if (snapshot_stride > 0)
        g.snapshot_stride = snapshot_stride;
    else
        g.snapshot_stride = std::max(1L, std::lround(0.5 / g.dt));
    return g;
}

/// Complete description of one run: medium, dephasing model, stored-packet
/// length, truncation order and discretization.
struct SimulationConfig {
    PhysicalParams params;
    DecayModel decay;
    double l0 = 5.0;      ///< stored-packet length, units of l_abs
    int ell = 30;         ///< truncation order of the mode hierarchy
    double total_time = 100.0;
    Grid grid;
    double cfl = 0.5;
    bool auto_domain = true;  ///< grid extent derived from l0, ell, total_time
    bool auto_stride = true;  ///< snapshot stride derived from dt

    void validate() const {
        params.validate();
        decay.validate();
        if (!(l0 > 0.0)) throw std::invalid_argument("SimulationConfig: l0 must be > 0");
        if (ell < 0) throw std::invalid_argument("SimulationConfig: ell must be >= 0");
        if (!(total_time > 0.0))
            throw std::invalid_argument("SimulationConfig: total_time must be > 0");
        if (grid.n_z < 3) throw std::invalid_argument("SimulationConfig: grid too small");
        if (grid.z_max < 3.0 * l0 - 1e-9)
            throw std::invalid_argument(
                "SimulationConfig: z_max must cover the strength window [-3 l0, 3 l0]");
        const double courant = params.light_speed() * grid.dt / grid.dz;
        if (courant > 1.0 + 1e-12)
            throw std::invalid_argument("SimulationConfig: CFL number " +
                                        std::to_string(courant) + " exceeds 1");
    }

    bool operator==(const SimulationConfig&) const = default;
};

/// Conservative bound on the retrieved-pulse speed used to size the domain:
/// 1.25x the adiabatic value at this truncation, but never below
/// 0.30 l_abs*gamma so the deep-hierarchy plateau stays covered.
inline double pulse_speed_bound(int ell, const PhysicalParams& params) {
    const double c0 = c0_exact(std::max(ell, 1), params);
    return std::max(1.25 * c0, 0.30 * params.l_abs * params.gamma);
}

/// Domain half-width policy: fit the strength window and keep the pulse
/// away from the boundary for the whole run.
inline double auto_domain_extent(double l0, int ell, double total_time,
                                 const PhysicalParams& params) {
    const double travel = l0 + pulse_speed_bound(ell, params) * total_time + 5.0 * params.l_abs;
    return std::max(3.0 * l0, travel);
}

/// Assemble a config, deriving the grid from the policy above when no
/// explicit extent is given (z_extent <= 0).
inline SimulationConfig make_config(PhysicalParams params, DecayModel decay, double l0,
                                    int ell, double total_time, double dz, double cfl = 0.5,
                                    double z_extent = 0.0, long snapshot_stride = 0) {
    SimulationConfig cfg;
    cfg.params = params;
    cfg.decay = std::move(decay);
    cfg.l0 = l0;
    cfg.ell = ell;
    cfg.total_time = total_time;
    cfg.cfl = cfl;
    cfg.auto_domain = z_extent <= 0.0;
    cfg.auto_stride = snapshot_stride <= 0;
    const double extent =
        cfg.auto_domain ? auto_domain_extent(l0, ell, total_time, params) : z_extent;
    cfg.grid = make_grid(extent, dz, cfl, total_time, params, snapshot_stride);
    cfg.validate();
    return cfg;
}

/// Copy of `base` at a different truncation order; an auto-sized domain is
/// re-derived so faster small-ell pulses stay inside the grid.
inline SimulationConfig with_ell(const SimulationConfig& base, int ell) {
    SimulationConfig cfg = base;
    cfg.ell = ell;
    if (cfg.auto_domain) {
        const double extent =
            auto_domain_extent(cfg.l0, ell, cfg.total_time, cfg.params);
        cfg.grid = make_grid(extent, cfg.grid.dz, cfg.cfl, cfg.total_time, cfg.params,
                             cfg.auto_stride ? 0 : cfg.grid.snapshot_stride);
    }
    cfg.validate();
    return cfg;
}

}  // namespace slpulse
