#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slpulse/hierarchy.hpp"
#include "slpulse/parallel.hpp"

namespace slpulse {

/// Group velocity of the forward pulse from a linear fit of peak position
/// versus time. value is in units of c*omega_c^2/(g^2 N).
struct GroupVelocityEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::pair<double, double> fit_window{0.0, 0.0};
    int n_points = 0;
};

/// Fit the forward-peak track over the second half of the run. Returns
/// nothing when the trajectory has no resolvable forward-moving pulse
/// (stationary or dark runs); numeric failures still throw.
inline std::optional<GroupVelocityEstimate> estimate_group_velocity(const Trajectory& traj) {
    if (traj.times.empty())
        throw std::invalid_argument("estimate_group_velocity: empty trajectory");
    const double t_begin = traj.times.back() / 2.0;

    std::vector<double> ts, zs;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] < t_begin) continue;
        if (!traj.forward_peak_positions[i]) return std::nullopt;  // no light on z > 0
        ts.push_back(traj.times[i]);
        zs.push_back(*traj.forward_peak_positions[i]);
    }
    if (ts.size() < 3) return std::nullopt;
    for (std::size_t i = 1; i < zs.size(); ++i)
        if (!(zs[i] > zs[i - 1])) return std::nullopt;  // not strictly advancing
    if (zs.back() - zs.front() < 2.0 * traj.config.grid.dz) return std::nullopt;

    const double n = static_cast<double>(ts.size());
    double st = 0.0, sz = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sz += zs[i];
    }
    const double tbar = st / n, zbar = sz / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - tbar) * (ts[i] - tbar);
        sxy += (ts[i] - tbar) * (zs[i] - zbar);
    }
    const double slope = sxy / sxx;
    if (!(slope > 0.0)) return std::nullopt;
    double ssr = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = zs[i] - zbar - slope * (ts[i] - tbar);
        ssr += r * r;
    }
    const double unit = traj.config.params.vg_unit();
    GroupVelocityEstimate est;
    est.value = slope / unit;
    est.stderr_ = ts.size() > 3 ? std::sqrt(ssr / (n - 2.0) / sxx) / unit : 0.0;
    est.fit_window = {ts.front(), ts.back()};
    est.n_points = static_cast<int>(ts.size());
    return est;
}

enum class Behavior { Stationary, Splitting, Undecided };

/// Outcome of the stationary-versus-splitting classification; evidence is
/// the separation of the two dominant intensity maxima at the final time.
struct BehaviorClass {
    Behavior variant = Behavior::Undecided;
    double evidence = 0.0;
};

namespace detail {

/// Separation of the two largest local intensity maxima. Only maxima within
/// a factor 2 of the profile peak count as pulse lobes; lesser ripples and
/// decaying side streaks are ignored.
inline double dominant_peak_separation(const std::vector<double>& profile, const Grid& grid) {
    const int n = grid.n_z;
    double vmax = 0.0;
    for (double v : profile) vmax = std::max(vmax, v);
    if (!(vmax > 0.0)) return 0.0;
    const double floor_value = 0.5 * vmax;
    std::vector<std::pair<double, double>> peaks;  // (value, z)
    for (int j = 1; j < n - 1; ++j) {
        const double v = profile[static_cast<std::size_t>(j)];
        if (v < floor_value) continue;
        if (v >= profile[static_cast<std::size_t>(j - 1)] &&
            v > profile[static_cast<std::size_t>(j + 1)])
            peaks.emplace_back(v, grid.z_at(j));
    }
    if (peaks.size() < 2) return 0.0;
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    return std::abs(peaks[0].second - peaks[1].second);
}

}  // namespace detail

/// First snapshot time at which the dominant maxima separate beyond the
/// threshold; empty if that never happens.
inline std::optional<double> splitting_onset_time(const Trajectory& traj, double threshold) {
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        if (detail::dominant_peak_separation(traj.intensity_maps[i], traj.config.grid) >
            threshold)
            return traj.times[i];
    return std::nullopt;
}

/// Splitting when the two dominant maxima separate beyond the threshold
/// (default 2 l0) at any snapshot; Stationary when they never do and light
/// remains in the strength window at the end; Undecided otherwise.
inline BehaviorClass classify_behavior(const Trajectory& traj, double threshold = 0.0) {
    if (traj.times.empty())
        throw std::invalid_argument("classify_behavior: empty trajectory");
    if (threshold <= 0.0) threshold = 2.0 * traj.config.l0;

    BehaviorClass result;
    result.evidence =
        detail::dominant_peak_separation(traj.intensity_maps.back(), traj.config.grid);
    if (splitting_onset_time(traj, threshold)) {
        result.variant = Behavior::Splitting;
        return result;
    }
    if (traj.strength_series.back() > 0.0) {
        result.variant = Behavior::Stationary;
        return result;
    }
    result.variant = Behavior::Undecided;
    return result;
}

/// Group-velocity convergence study over increasing truncation orders.
struct VgConvergence {
    std::vector<std::pair<int, std::optional<GroupVelocityEstimate>>> points;
    std::optional<double> plateau;  ///< mean of the trailing window when converged
    bool converged = false;
};

struct ConvergenceOptions {
    double tolerance = 0.01;  ///< plateau tolerance, units of c*omega_c^2/(g^2 N)
    int window = 10;          ///< trailing values averaged into the plateau
    unsigned jobs = 0;        ///< 0 = hardware concurrency
    /// Optional per-point notification; called from worker threads.
    std::function<void(int ell, const GroupVelocityEstimate*)> progress;
};

/// Run the base configuration at each truncation order of the schedule (the
/// runs are independent and execute concurrently), then look for a trailing
/// plateau: consecutive changes below the tolerance across at least
/// `window` values.
inline VgConvergence converge_in_order(const SimulationConfig& base,
                                       const std::vector<int>& ell_schedule,
                                       ConvergenceOptions opts = {}) {
    if (ell_schedule.empty())
        throw std::invalid_argument("converge_in_order: empty schedule");
    for (std::size_t i = 1; i < ell_schedule.size(); ++i)
        if (ell_schedule[i] <= ell_schedule[i - 1])
            throw std::invalid_argument("converge_in_order: schedule must be increasing");

    VgConvergence result;
    result.points.resize(ell_schedule.size());
    // Deep-hierarchy runs cost the most; hand them out first so the pool
    // stays balanced to the end.
    parallel_for_each(
        ell_schedule.size(),
        [&](std::size_t rank) {
            const std::size_t i = ell_schedule.size() - 1 - rank;
            const SimulationConfig cfg = with_ell(base, ell_schedule[i]);
            result.points[i] = {ell_schedule[i], estimate_group_velocity(simulate(cfg))};
            if (opts.progress)
                opts.progress(ell_schedule[i], result.points[i].second ?
                                                   &*result.points[i].second : nullptr);
        },
        opts.jobs);

    // Longest trailing run of small consecutive changes.
    int run = 1;
    for (std::size_t i = result.points.size(); i-- > 1;) {
        const auto& a = result.points[i - 1].second;
        const auto& b = result.points[i].second;
        if (!a || !b) break;
        if (std::abs(a->value - b->value) >= opts.tolerance) break;
        ++run;
    }
    if (run >= opts.window && static_cast<std::size_t>(opts.window) <= result.points.size()) {
        double sum = 0.0;
        for (std::size_t i = result.points.size() - static_cast<std::size_t>(opts.window);
             i < result.points.size(); ++i)
            sum += result.points[i].second->value;
        result.plateau = sum / opts.window;
        result.converged = true;
    }
    return result;
}

}  // namespace slpulse
