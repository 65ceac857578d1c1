// Test-only reference implementations, kept independent of the library's
// computation paths.
#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "slpulse/hierarchy.hpp"

namespace oracles {

using Complex = std::complex<double>;
using slpulse::FieldState;
using slpulse::SimulationConfig;
using slpulse::Trajectory;

/// Field ordering used by the dense oracle: the chain harmonics by spatial
/// order (-m_top .. m_top), then E_p^+, E_p^-.
struct DenseSystem {
    int m_top = 0;
    int dim = 0;
    std::vector<Complex> matrix;  // row-major dim x dim

    int index_of_order(int m) const { return m + m_top; }
    int index_ep() const { return 2 * m_top + 1; }
    int index_em() const { return 2 * m_top + 2; }
};

/// Assemble the local coupling matrix by walking the coupled-mode equations
/// term by term: rows for P_{2n+1}, rows for S_{2n}, source rows for the
/// probe envelopes. Harmonics outside the cutoff contribute nothing.
inline DenseSystem dense_coupling_matrix(const SimulationConfig& config) {
    DenseSystem sys;
    sys.m_top = config.ell == 0 ? 1 : 2 * config.ell;
    sys.dim = 2 * sys.m_top + 1 + 2;
    sys.matrix.assign(static_cast<std::size_t>(sys.dim) * sys.dim, Complex(0, 0));
    auto at = [&](int row, int col) -> Complex& {
        return sys.matrix[static_cast<std::size_t>(row) * sys.dim + col];
    };
    const double om = config.params.omega_abs();
    const double gsn = config.params.coupling_amplitude();
    const Complex iom(0.0, om);
    const Complex igsn(0.0, gsn);
    auto in_chain = [&](int m) { return m >= -sys.m_top && m <= sys.m_top; };

    // Optical harmonics: dP_q/dt = -(Gamma + gamma_|q|) P_q + i Omega (S_{q-1} + S_{q+1})
    //                              + i g sqrt(N) E for q = +-1.
    for (int q = -sys.m_top; q <= sys.m_top; ++q) {
        if ((q & 1) == 0) continue;
        const int row = sys.index_of_order(q);
        at(row, row) = -(config.params.gamma + config.decay.rate(q, config.params));
        if (in_chain(q - 1)) at(row, sys.index_of_order(q - 1)) += iom;
        if (in_chain(q + 1)) at(row, sys.index_of_order(q + 1)) += iom;
        if (q == 1) at(row, sys.index_ep()) += igsn;
        if (q == -1) at(row, sys.index_em()) += igsn;
    }
    // Spin harmonics: dS_m/dt = -gamma_|m| S_m + i Omega (P_{m-1} + P_{m+1}).
    for (int m = -sys.m_top; m <= sys.m_top; ++m) {
        if ((m & 1) != 0) continue;
        const int row = sys.index_of_order(m);
        at(row, row) = -config.decay.rate(m, config.params);
        if (in_chain(m - 1)) at(row, sys.index_of_order(m - 1)) += iom;
        if (in_chain(m + 1)) at(row, sys.index_of_order(m + 1)) += iom;
    }
    // Probe source terms (the advection part is not a local coupling).
    at(sys.index_ep(), sys.index_of_order(1)) = igsn;
    at(sys.index_em(), sys.index_of_order(-1)) = igsn;
    return sys;
}

/// Pack the state at one grid point into the dense ordering.
inline std::vector<Complex> pack_point(const FieldState& state, int j) {
    const int m_top = state.layout().m_top;
    std::vector<Complex> v(static_cast<std::size_t>(2 * m_top + 3));
    for (int m = -m_top; m <= m_top; ++m) {
        const int r = state.layout().row_of_order(m);
        v[static_cast<std::size_t>(m + m_top)] = {state.atom_re(r)[j], state.atom_im(r)[j]};
    }
    v[static_cast<std::size_t>(2 * m_top + 1)] = state.ep(j);
    v[static_cast<std::size_t>(2 * m_top + 2)] = state.em(j);
    return v;
}

inline std::vector<Complex> apply(const DenseSystem& sys, const std::vector<Complex>& x) {
    std::vector<Complex> y(static_cast<std::size_t>(sys.dim), Complex(0, 0));
    for (int r = 0; r < sys.dim; ++r)
        for (int c = 0; c < sys.dim; ++c)
            y[static_cast<std::size_t>(r)] +=
                sys.matrix[static_cast<std::size_t>(r) * sys.dim + c] *
                x[static_cast<std::size_t>(c)];
    return y;
}

/// Fill every field of a state with reproducible random complex values.
inline void randomize(FieldState& state, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int m_top = state.layout().m_top;
    for (int j = 0; j < state.n_z(); ++j) {
        for (int m = -m_top; m <= m_top; ++m) {
            const int r = state.layout().row_of_order(m);
            state.atom_re(r)[j] = dist(rng);
            state.atom_im(r)[j] = dist(rng);
        }
        state.set_ep(j, {dist(rng), dist(rng)});
        state.set_em(j, {dist(rng), dist(rng)});
    }
}

/// Synthetic trajectory with two Gaussian lobes moving apart at speed v.
inline Trajectory two_lobe_trajectory(const SimulationConfig& config, double v,
                                      double width, int n_snapshots, double t_end) {
    Trajectory traj;
    traj.config = config;
    for (int i = 0; i < n_snapshots; ++i) {
        const double t = t_end * i / (n_snapshots - 1);
        std::vector<double> map(static_cast<std::size_t>(config.grid.n_z));
        for (int j = 0; j < config.grid.n_z; ++j) {
            const double z = config.grid.z_at(j);
            const double a = (z - v * t) / width;
            const double b = (z + v * t) / width;
            map[static_cast<std::size_t>(j)] = std::exp(-a * a) + std::exp(-b * b);
        }
        traj.strength_series.push_back(
            slpulse::remaining_strength(map, config.grid, config.l0));
        const auto pk = slpulse::forward_peak(map, config.grid);
        traj.forward_peak_positions.push_back(pk ? std::optional<double>(pk->z)
                                                 : std::nullopt);
        traj.times.push_back(t);
        traj.intensity_maps.push_back(std::move(map));
    }
    return traj;
}

}  // namespace oracles
