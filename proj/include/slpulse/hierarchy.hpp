#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slpulse/field_state.hpp"

namespace slpulse {

/// Thrown when time integration produces non-finite fields.
class SimulationError : public std::runtime_error {
  public:
    SimulationError(const std::string& what, double t)
        : std::runtime_error(what + " at t = " + std::to_string(t)), time(t) {}
    double time;
};

namespace detail {

inline void check_shapes(const FieldState& state, const SimulationConfig& config) {
    if (state.ell() != config.ell || state.n_z() != config.grid.n_z)
        throw std::invalid_argument("state shape does not match config (ell " +
                                    std::to_string(state.ell()) + "/" +
                                    std::to_string(config.ell) + ", n_z " +
                                    std::to_string(state.n_z()) + "/" +
                                    std::to_string(config.grid.n_z) + ")");
}

inline std::vector<double> chain_decays(const ModeLayout& layout,
                                        const SimulationConfig& config) {
    std::vector<double> d(static_cast<std::size_t>(layout.n_rows));
    for (int r = 0; r < layout.n_rows; ++r) {
        const int m = layout.order_of_row(r);
        const double optical = (m & 1) ? config.params.gamma : 0.0;
        d[static_cast<std::size_t>(r)] = optical + config.decay.rate(m, config.params);
    }
    return d;
}

}  // namespace detail

/// Time derivative of the hierarchy at fixed probe fields:
///   dP_{2n+1}/dt = -(Gamma + gamma_{|2n+1|}) P_{2n+1} + i g sqrt(N) E_{p,2n+1}
///                  + i Omega_c (S_{2n} + S_{2(n+1)})
///   dS_{2n}/dt   = -gamma_{|2n|} S_{2n} + i Omega_c (P_{2n-1} + P_{2n+1})
/// with E_{p,+1} = E_p^+, E_{p,-1} = E_p^-, harmonics beyond the cutoff zero.
/// The probe rows of the result hold only the source i g sqrt(N) P_{+-1};
/// the advection terms belong to the stepper.
inline FieldState rhs(const FieldState& state, const SimulationConfig& config) {
    detail::check_shapes(state, config);
    const ModeLayout& layout = state.layout();
    const int nz = state.n_z();
    const auto d = detail::chain_decays(layout, config);
    const double om = config.params.omega_abs();
    const double gsn = config.params.coupling_amplitude();

    FieldState out(state.ell(), nz);
    out.set_time(state.time());
    for (int r = 0; r < layout.n_rows; ++r) {
        const double* xr = state.atom_re(r);
        const double* xi = state.atom_im(r);
        const double* lr = state.atom_re(r - 1);  // guard rows read as zero
        const double* li = state.atom_im(r - 1);
        const double* hr = state.atom_re(r + 1);
        const double* hi = state.atom_im(r + 1);
        double* or_ = out.atom_re(r);
        double* oi_ = out.atom_im(r);
        const double dr = d[static_cast<std::size_t>(r)];
        for (int j = 0; j < nz; ++j) {
            or_[j] = -dr * xr[j] - om * (li[j] + hi[j]);
            oi_[j] = -dr * xi[j] + om * (lr[j] + hr[j]);
        }
    }
    {
        double* pr = out.atom_re(layout.p_plus_row());
        double* pi = out.atom_im(layout.p_plus_row());
        double* mr = out.atom_re(layout.p_minus_row());
        double* mi = out.atom_im(layout.p_minus_row());
        for (int j = 0; j < nz; ++j) {
            pr[j] -= gsn * state.ep_im()[j];
            pi[j] += gsn * state.ep_re()[j];
            mr[j] -= gsn * state.em_im()[j];
            mi[j] += gsn * state.em_re()[j];
        }
    }
    {
        const double* p1r = state.atom_re(layout.p_plus_row());
        const double* p1i = state.atom_im(layout.p_plus_row());
        const double* pmr = state.atom_re(layout.p_minus_row());
        const double* pmi = state.atom_im(layout.p_minus_row());
        for (int j = 0; j < nz; ++j) {
            out.ep_re()[j] = -gsn * p1i[j];
            out.ep_im()[j] = gsn * p1r[j];
            out.em_re()[j] = -gsn * pmi[j];
            out.em_im()[j] = gsn * pmr[j];
        }
    }
    return out;
}

/// One-step integrator: Lax-Friedrichs for the two advected probe envelopes,
/// explicit midpoint (with the probe frozen over the step) for the local
/// atomic chain. The midpoint update is applied as a precomputed banded
/// operator I + dt A + dt^2/2 A^2 over the chain, which is algebraically the
/// same as the two-stage form but runs in one pass.
class Stepper {
  public:
    explicit Stepper(const SimulationConfig& config)
        : config_(config), layout_(config.ell), nz_(config.grid.n_z) {
        config.validate();
        const double dt = config.grid.dt;
        const double om = config.params.omega_abs();
        const double gsn = config.params.coupling_amplitude();
        const auto d = detail::chain_decays(layout_, config);
        const int rows = layout_.n_rows;

        lambda_ = config.params.light_speed() * dt / config.grid.dz;
        b0_.resize(rows);
        c1lo_.resize(rows);
        c1hi_.resize(rows);
        b2_ = -0.5 * dt * dt * om * om;
        for (int r = 0; r < rows; ++r) {
            const int deg = (r == 0 ? 0 : 1) + (r == rows - 1 ? 0 : 1);
            const double dr = d[static_cast<std::size_t>(r)];
            b0_[r] = 1.0 - dt * dr + 0.5 * dt * dt * (dr * dr - om * om * deg);
            const double dlo = r > 0 ? d[static_cast<std::size_t>(r - 1)] : 0.0;
            const double dhi = r < rows - 1 ? d[static_cast<std::size_t>(r + 1)] : 0.0;
            c1lo_[r] = dt * om - 0.5 * dt * dt * om * (dr + dlo);
            c1hi_[r] = dt * om - 0.5 * dt * dt * om * (dr + dhi);
        }
        ke_plus_ = gsn * (dt - 0.5 * dt * dt * d[static_cast<std::size_t>(layout_.p_plus_row())]);
        ke_minus_ = gsn * (dt - 0.5 * dt * dt * d[static_cast<std::size_t>(layout_.p_minus_row())]);
        ks_ = 0.5 * dt * dt * om * gsn;
        dt_gsn_ = dt * gsn;

        atoms_next_.assign(static_cast<std::size_t>(rows + 4) * 2 * nz_, 0.0);
        ep_next_.assign(static_cast<std::size_t>(2) * nz_, 0.0);
        em_next_.assign(static_cast<std::size_t>(2) * nz_, 0.0);
    }

    const SimulationConfig& config() const { return config_; }

    /// Advance the state by one dt.
    void step(FieldState& state) {
        detail::check_shapes(state, config_);
        advance_probe(state);
        advance_atoms(state);
        state.swap_atoms(atoms_next_);
        state.swap_e(ep_next_, em_next_);
        state.set_time(state.time() + config_.grid.dt);
    }

  private:
    void advance_probe(const FieldState& state) {
        const int nz = nz_;
        const double am = 0.5 * (1.0 + lambda_);
        const double ap = 0.5 * (1.0 - lambda_);
        const double* p1r = state.atom_re(layout_.p_plus_row());
        const double* p1i = state.atom_im(layout_.p_plus_row());
        const double* pmr = state.atom_re(layout_.p_minus_row());
        const double* pmi = state.atom_im(layout_.p_minus_row());
        const double* epr = state.ep_re();
        const double* epi = state.ep_im();
        const double* emr = state.em_re();
        const double* emi = state.em_im();
        double* opr = ep_next_.data();
        double* opi = ep_next_.data() + nz;
        double* omr = em_next_.data();
        double* omi = em_next_.data() + nz;

        for (int j = 1; j < nz - 1; ++j) {
            opr[j] = am * epr[j - 1] + ap * epr[j + 1] - dt_gsn_ * p1i[j];
            opi[j] = am * epi[j - 1] + ap * epi[j + 1] + dt_gsn_ * p1r[j];
        }
        for (int j = 1; j < nz - 1; ++j) {
            omr[j] = am * emr[j + 1] + ap * emr[j - 1] - dt_gsn_ * pmi[j];
            omi[j] = am * emi[j + 1] + ap * emi[j - 1] + dt_gsn_ * pmr[j];
        }
        // Inflow ghosts are zero; outflow ghosts copy the boundary value.
        opr[0] = ap * epr[1] - dt_gsn_ * p1i[0];
        opi[0] = ap * epi[1] + dt_gsn_ * p1r[0];
        opr[nz - 1] = am * epr[nz - 2] + ap * epr[nz - 1] - dt_gsn_ * p1i[nz - 1];
        opi[nz - 1] = am * epi[nz - 2] + ap * epi[nz - 1] + dt_gsn_ * p1r[nz - 1];
        omr[nz - 1] = ap * emr[nz - 2] - dt_gsn_ * pmi[nz - 1];
        omi[nz - 1] = ap * emi[nz - 2] + dt_gsn_ * pmr[nz - 1];
        omr[0] = am * emr[1] + ap * emr[0] - dt_gsn_ * pmi[0];
        omi[0] = am * emi[1] + ap * emi[0] + dt_gsn_ * pmr[0];
    }

    void advance_atoms(const FieldState& state) {
        const int nz = nz_;
        const int rows = layout_.n_rows;
        for (int r = 0; r < rows; ++r) {
            const double* __restrict__ xr = state.atom_re(r);
            const double* __restrict__ xi = state.atom_im(r);
            const double* __restrict__ l1r = state.atom_re(r - 1);
            const double* __restrict__ l1i = state.atom_im(r - 1);
            const double* __restrict__ h1r = state.atom_re(r + 1);
            const double* __restrict__ h1i = state.atom_im(r + 1);
            const double* __restrict__ l2r = state.atom_re(r - 2);
            const double* __restrict__ l2i = state.atom_im(r - 2);
            const double* __restrict__ h2r = state.atom_re(r + 2);
            const double* __restrict__ h2i = state.atom_im(r + 2);
            double* __restrict__ outr = next_re(r);
            double* __restrict__ outi = next_im(r);
            const double b0 = b0_[r];
            const double b2 = b2_;
            const double clo = c1lo_[r];
            const double chi = c1hi_[r];
            for (int j = 0; j < nz; ++j)
                outr[j] = b0 * xr[j] + b2 * (l2r[j] + h2r[j]) - clo * l1i[j] - chi * h1i[j];
            for (int j = 0; j < nz; ++j)
                outi[j] = b0 * xi[j] + b2 * (l2i[j] + h2i[j]) + clo * l1r[j] + chi * h1r[j];
        }
        add_probe_sources(state);
    }

    void add_probe_sources(const FieldState& state) {
        const int nz = nz_;
        const int p1 = layout_.p_plus_row();
        const int pm = layout_.p_minus_row();
        {
            double* outr = next_re(p1);
            double* outi = next_im(p1);
            const double* er = state.ep_re();
            const double* ei = state.ep_im();
            for (int j = 0; j < nz; ++j) {
                outr[j] -= ke_plus_ * ei[j];
                outi[j] += ke_plus_ * er[j];
            }
        }
        {
            double* outr = next_re(pm);
            double* outi = next_im(pm);
            const double* er = state.em_re();
            const double* ei = state.em_im();
            for (int j = 0; j < nz; ++j) {
                outr[j] -= ke_minus_ * ei[j];
                outi[j] += ke_minus_ * er[j];
            }
        }
        for (int r : {p1 - 1, p1 + 1}) {
            if (r < 0 || r >= layout_.n_rows) continue;
            double* outr = next_re(r);
            double* outi = next_im(r);
            const double* er = state.ep_re();
            const double* ei = state.ep_im();
            for (int j = 0; j < nz; ++j) {
                outr[j] -= ks_ * er[j];
                outi[j] -= ks_ * ei[j];
            }
        }
        for (int r : {pm - 1, pm + 1}) {
            if (r < 0 || r >= layout_.n_rows) continue;
            double* outr = next_re(r);
            double* outi = next_im(r);
            const double* er = state.em_re();
            const double* ei = state.em_im();
            for (int j = 0; j < nz; ++j) {
                outr[j] -= ks_ * er[j];
                outi[j] -= ks_ * ei[j];
            }
        }
    }

    double* next_re(int r) { return atoms_next_.data() + static_cast<std::size_t>(r + 2) * 2 * nz_; }
    double* next_im(int r) { return next_re(r) + nz_; }

    SimulationConfig config_;
    ModeLayout layout_;
    int nz_;
    double lambda_ = 0.0;
    double b2_ = 0.0;
    double ke_plus_ = 0.0;
    double ke_minus_ = 0.0;
    double ks_ = 0.0;
    double dt_gsn_ = 0.0;
    std::vector<double> b0_, c1lo_, c1hi_;
    std::vector<double> atoms_next_, ep_next_, em_next_;
};

/// Advance a state by one step (convenience wrapper over Stepper).
inline FieldState step(FieldState state, const SimulationConfig& config) {
    Stepper stepper(config);
    stepper.step(state);
    if (!state.finite())
        throw SimulationError("integration diverged (non-finite fields)", state.time());
    return state;
}

/// Intensity integral over [-3 l0, 3 l0] by the trapezoidal rule; the window
/// endpoints are handled by linear interpolation so uniform profiles
/// integrate exactly.
inline double remaining_strength(const std::vector<double>& intensity_profile,
                                 const Grid& grid, double l0) {
    const double zl = -3.0 * l0;
    const double zr = 3.0 * l0;
    if (zl < grid.z_min() - 1e-12 || zr > grid.z_max + 1e-12)
        throw std::invalid_argument(
            "remaining_strength: window [-3 l0, 3 l0] exceeds the grid domain");
    const auto& f = intensity_profile;
    const int n = grid.n_z;
    auto value_at = [&](double z) {
        double u = (z - grid.z_min()) / grid.dz;
        int j = static_cast<int>(std::floor(u));
        j = std::clamp(j, 0, n - 2);
        const double w = u - j;
        return f[static_cast<std::size_t>(j)] * (1.0 - w) +
               f[static_cast<std::size_t>(j + 1)] * w;
    };
    const int jl = static_cast<int>(std::ceil((zl - grid.z_min()) / grid.dz - 1e-9));
    const int jr = static_cast<int>(std::floor((zr - grid.z_min()) / grid.dz + 1e-9));
    double total = 0.0;
    for (int j = jl; j < jr; ++j)
        total += 0.5 * (f[static_cast<std::size_t>(j)] + f[static_cast<std::size_t>(j + 1)]) *
                 grid.dz;
    const double wl = grid.z_at(jl) - zl;
    if (wl > 1e-15) total += 0.5 * (value_at(zl) + f[static_cast<std::size_t>(jl)]) * wl;
    const double wr = zr - grid.z_at(jr);
    if (wr > 1e-15) total += 0.5 * (f[static_cast<std::size_t>(jr)] + value_at(zr)) * wr;
    return total;
}

inline double remaining_strength(const FieldState& state, const Grid& grid, double l0) {
    return remaining_strength(intensity(state), grid, l0);
}

/// Local intensity maximum with three-point parabolic refinement.
struct Peak {
    double z = 0.0;
    double value = 0.0;
};

/// Largest value in rows [j_begin, j_end) of the profile, sub-cell refined.
/// Empty result when the segment carries no light.
inline std::optional<Peak> max_peak(const std::vector<double>& profile, const Grid& grid,
                                    int j_begin, int j_end) {
    if (j_begin >= j_end) return std::nullopt;
    int jm = j_begin;
    for (int j = j_begin + 1; j < j_end; ++j)
        if (profile[static_cast<std::size_t>(j)] > profile[static_cast<std::size_t>(jm)]) jm = j;
    const double v = profile[static_cast<std::size_t>(jm)];
    if (!(v > 0.0)) return std::nullopt;
    double z = grid.z_at(jm);
    if (jm > 0 && jm < grid.n_z - 1) {
        const double a = profile[static_cast<std::size_t>(jm - 1)];
        const double c = profile[static_cast<std::size_t>(jm + 1)];
        const double den = a - 2.0 * v + c;
        if (den < 0.0) {
            const double delta = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
            z += delta * grid.dz;
        }
    }
    return Peak{z, v};
}

/// Forward-pulse peak: maximum over z > 0.
inline std::optional<Peak> forward_peak(const std::vector<double>& profile, const Grid& grid) {
    return max_peak(profile, grid, (grid.n_z - 1) / 2 + 1, grid.n_z);
}

/// Backward-pulse peak: maximum over z < 0.
inline std::optional<Peak> backward_peak(const std::vector<double>& profile, const Grid& grid) {
    return max_peak(profile, grid, 0, (grid.n_z - 1) / 2);
}

/// Recorded time series of one run.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> intensity_maps;
    std::vector<double> strength_series;
    std::vector<std::optional<double>> forward_peak_positions;
    SimulationConfig config;

    std::vector<double> z() const { return config.grid.positions(); }
};

/// Integrate a given initial state to total_time, recording a snapshot
/// every snapshot_stride steps (plus the final step). Fields are checked
/// for finiteness at every snapshot; divergence reports the failing time.
inline Trajectory simulate(const SimulationConfig& config, FieldState state) {
    config.validate();
    Stepper stepper(config);

    Trajectory traj;
    traj.config = config;
    const long n_steps = config.grid.n_steps;
    const long stride = config.grid.snapshot_stride;
    traj.times.reserve(static_cast<std::size_t>(n_steps / stride + 2));

    auto record = [&](const FieldState& s) {
        if (!s.finite())
            throw SimulationError("integration diverged (non-finite fields)", s.time());
        auto map = intensity(s);
        traj.strength_series.push_back(remaining_strength(map, config.grid, config.l0));
        auto pk = forward_peak(map, config.grid);
        traj.forward_peak_positions.push_back(
            pk ? std::optional<double>(pk->z) : std::nullopt);
        traj.times.push_back(s.time());
        traj.intensity_maps.push_back(std::move(map));
    };

    for (long n = 0; n <= n_steps; ++n) {
        if (n % stride == 0 || n == n_steps) record(state);
        if (n < n_steps) stepper.step(state);
    }
    return traj;
}

/// Release the stored Gaussian packet and integrate to total_time.
inline Trajectory simulate(const SimulationConfig& config) {
    return simulate(config, gaussian_initial_state(config));
}

}  // namespace slpulse
