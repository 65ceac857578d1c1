#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "slpulse/config.hpp"

namespace slpulse {

/// Index layout of the coherence-harmonic chain at truncation order ell.
///
/// The chain keeps spin harmonics S_{2n} through spatial order 2*ell and
/// optical harmonics P_{2n+1} through order 2*ell - 1, i.e. the cutoff drops
/// P beyond the highest retained S. Rows are ordered by spatial order
/// m = -m_top .. m_top; even m hold S_m, odd m hold P_m. ell = 0 keeps the
/// zeroth-order set {P_-1, S_0, P_1}.
struct ModeLayout {
    int ell = 0;
    int m_top = 1;
    int n_rows = 3;

    explicit ModeLayout(int ell_) : ell(ell_) {
        if (ell_ < 0) throw std::invalid_argument("ModeLayout: ell must be >= 0");
        m_top = ell_ == 0 ? 1 : 2 * ell_;
        n_rows = 2 * m_top + 1;
    }

    int row_of_order(int m) const { return m + m_top; }
    int order_of_row(int r) const { return r - m_top; }
    bool is_optical_row(int r) const { return (order_of_row(r) & 1) != 0; }

    int s0_row() const { return row_of_order(0); }
    int p_plus_row() const { return row_of_order(1); }
    int p_minus_row() const { return row_of_order(-1); }

    /// Number of evolved fields including the two probe envelopes.
    int n_fields() const { return n_rows + 2; }
};

/// State of all envelopes on the grid at one instant.
///
/// Storage is split into real and imaginary planes per field, each plane a
/// contiguous run over z, which keeps the update kernels vectorizable. The
/// atomic rows carry two zeroed guard rows on each side so chain-edge
/// stencils need no branches.
class FieldState {
  public:
    FieldState(int ell, int n_z)
        : layout_(ell),
          n_z_(n_z),
          atoms_(static_cast<std::size_t>(layout_.n_rows + 4) * 2 * n_z, 0.0),
          e_plus_(static_cast<std::size_t>(2) * n_z, 0.0),
          e_minus_(static_cast<std::size_t>(2) * n_z, 0.0) {
        if (n_z < 3) throw std::invalid_argument("FieldState: grid too small");
    }

    const ModeLayout& layout() const { return layout_; }
    int ell() const { return layout_.ell; }
    int n_z() const { return n_z_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    // Raw plane access; row r in [0, n_rows).
    double* atom_re(int r) { return atoms_.data() + plane_offset(r); }
    double* atom_im(int r) { return atoms_.data() + plane_offset(r) + n_z_; }
    const double* atom_re(int r) const { return atoms_.data() + plane_offset(r); }
    const double* atom_im(int r) const { return atoms_.data() + plane_offset(r) + n_z_; }

    double* ep_re() { return e_plus_.data(); }
    double* ep_im() { return e_plus_.data() + n_z_; }
    double* em_re() { return e_minus_.data(); }
    double* em_im() { return e_minus_.data() + n_z_; }
    const double* ep_re() const { return e_plus_.data(); }
    const double* ep_im() const { return e_plus_.data() + n_z_; }
    const double* em_re() const { return e_minus_.data(); }
    const double* em_im() const { return e_minus_.data() + n_z_; }

    std::complex<double> ep(int j) const { return {ep_re()[j], ep_im()[j]}; }
    std::complex<double> em(int j) const { return {em_re()[j], em_im()[j]}; }
    void set_ep(int j, std::complex<double> v) { ep_re()[j] = v.real(); ep_im()[j] = v.imag(); }
    void set_em(int j, std::complex<double> v) { em_re()[j] = v.real(); em_im()[j] = v.imag(); }

    /// Spin harmonic S_{2n}; n in [-ell, ell] (n = 0 only at ell = 0).
    std::complex<double> s(int n, int j) const {
        const int r = s_row(n);
        return {atom_re(r)[j], atom_im(r)[j]};
    }
    void set_s(int n, int j, std::complex<double> v) {
        const int r = s_row(n);
        atom_re(r)[j] = v.real();
        atom_im(r)[j] = v.imag();
    }

    /// Optical harmonic P_q for odd label q with |q| <= m_top.
    std::complex<double> p(int q, int j) const {
        const int r = p_row(q);
        return {atom_re(r)[j], atom_im(r)[j]};
    }
    void set_p(int q, int j, std::complex<double> v) {
        const int r = p_row(q);
        atom_re(r)[j] = v.real();
        atom_im(r)[j] = v.imag();
    }

    void swap_atoms(std::vector<double>& other) { atoms_.swap(other); }
    std::size_t atoms_size() const { return atoms_.size(); }
    void swap_e(std::vector<double>& ep_other, std::vector<double>& em_other) {
        e_plus_.swap(ep_other);
        e_minus_.swap(em_other);
    }

    bool finite() const {
        for (double v : atoms_)
            if (!std::isfinite(v)) return false;
        for (double v : e_plus_)
            if (!std::isfinite(v)) return false;
        for (double v : e_minus_)
            if (!std::isfinite(v)) return false;
        return true;
    }

  private:
    std::size_t plane_offset(int r) const {
        if (r < -2 || r >= layout_.n_rows + 2)
            throw std::out_of_range("FieldState: chain row out of range");
        return static_cast<std::size_t>(r + 2) * 2 * n_z_;
    }
    int s_row(int n) const {
        const int m = 2 * n;
        if (m < -layout_.m_top || m > layout_.m_top || (m & 1) != 0)
            throw std::out_of_range("FieldState: no spin harmonic of this order");
        return layout_.row_of_order(m);
    }
    int p_row(int q) const {
        if ((q & 1) == 0 || q < -layout_.m_top || q > layout_.m_top)
            throw std::out_of_range("FieldState: no optical harmonic of this order");
        return layout_.row_of_order(q);
    }

    ModeLayout layout_;
    int n_z_;
    double time_ = 0.0;
    std::vector<double> atoms_;
    std::vector<double> e_plus_;
    std::vector<double> e_minus_;
};

/// Stored-packet release state: S_0(z) = exp(-(z/l0)^2), everything else
/// dark (no probe light, no optical coherence, no higher spin harmonics).
inline FieldState gaussian_initial_state(const SimulationConfig& config) {
    config.validate();
    FieldState state(config.ell, config.grid.n_z);
    double* s0 = state.atom_re(state.layout().s0_row());
    for (int j = 0; j < config.grid.n_z; ++j) {
        const double u = config.grid.z_at(j) / config.l0;
        s0[j] = std::exp(-u * u);
    }
    return state;
}

/// Probe intensity |E_s|^2 + |E_d|^2 = 2(|E_p^+|^2 + |E_p^-|^2) per grid point.
inline std::vector<double> intensity(const FieldState& state) {
    const int n = state.n_z();
    std::vector<double> out(static_cast<std::size_t>(n));
    const double* pr = state.ep_re();
    const double* pi = state.ep_im();
    const double* mr = state.em_re();
    const double* mi = state.em_im();
    for (int j = 0; j < n; ++j)
        out[static_cast<std::size_t>(j)] =
            2.0 * (pr[j] * pr[j] + pi[j] * pi[j] + mr[j] * mr[j] + mi[j] * mi[j]);
    return out;
}

}  // namespace slpulse
