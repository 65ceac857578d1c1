#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slpulse/diagnostics.hpp"
#include "slpulse/dispersion.hpp"
#include "slpulse/hierarchy.hpp"

namespace slpulse {

namespace detail {

/// 9-significant-digit formatting shared by every result table.
inline std::string g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Write-then-rename so failed runs leave no partial result files.
inline void commit_file(const std::filesystem::path& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

}  // namespace detail

inline const char* behavior_name(Behavior b) {
    switch (b) {
        case Behavior::Stationary: return "stationary";
        case Behavior::Splitting: return "splitting";
        default: return "undecided";
    }
}

/// Grayscale P5 heatmap of the intensity record: one column per snapshot,
/// one row per grid point (top row = +z_max), normalized to the image
/// maximum. Byte-identical for identical trajectories.
inline std::string render_heatmap_pgm(const Trajectory& traj) {
    const int width = static_cast<int>(traj.times.size());
    const int height = traj.config.grid.n_z;
    double vmax = 0.0;
    for (const auto& map : traj.intensity_maps)
        for (double v : map) vmax = std::max(vmax, v);
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(width) * height + 32);
    bytes += "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    for (int y = 0; y < height; ++y) {
        const std::size_t j = static_cast<std::size_t>(height - 1 - y);
        for (int x = 0; x < width; ++x) {
            const double v = traj.intensity_maps[static_cast<std::size_t>(x)][j];
            const int level = vmax > 0.0 ? static_cast<int>(std::lround(255.0 * v / vmax)) : 0;
            bytes += static_cast<char>(static_cast<std::uint8_t>(level));
        }
    }
    return bytes;
}

/// Colorized P6 variant of the same image on a fixed blue-to-red ramp.
inline std::string render_heatmap_ppm(const Trajectory& traj) {
    const int width = static_cast<int>(traj.times.size());
    const int height = traj.config.grid.n_z;
    double vmax = 0.0;
    for (const auto& map : traj.intensity_maps)
        for (double v : map) vmax = std::max(vmax, v);
    std::string bytes;
    bytes.reserve(static_cast<std::size_t>(width) * height * 3 + 32);
    bytes += "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    for (int y = 0; y < height; ++y) {
        const std::size_t j = static_cast<std::size_t>(height - 1 - y);
        for (int x = 0; x < width; ++x) {
            const double v = traj.intensity_maps[static_cast<std::size_t>(x)][j];
            const double u = vmax > 0.0 ? v / vmax : 0.0;
            const int r = static_cast<int>(std::lround(255.0 * u));
            const int g = static_cast<int>(std::lround(357.0 * u * (1.0 - u)));
            const int b = static_cast<int>(std::lround(255.0 * (1.0 - u)));
            bytes += static_cast<char>(static_cast<std::uint8_t>(r));
            bytes += static_cast<char>(static_cast<std::uint8_t>(g));
            bytes += static_cast<char>(static_cast<std::uint8_t>(b));
        }
    }
    return bytes;
}

/// Emit strength.csv, peaks.csv, intensity.csv (long form, time-major) and
/// the two heatmaps into dir. Numbers use 9 significant digits; row order
/// is fixed, so identical runs produce byte-identical files.
inline void write_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const Grid& grid = traj.config.grid;

    {
        std::string csv = "t,strength\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            csv += detail::g9(traj.times[i]) + "," + detail::g9(traj.strength_series[i]) + "\n";
        detail::commit_file(dir / "strength.csv", csv);
    }
    {
        std::string csv = "t,z_forward,z_backward\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            csv += detail::g9(traj.times[i]);
            csv += ",";
            if (traj.forward_peak_positions[i]) csv += detail::g9(*traj.forward_peak_positions[i]);
            csv += ",";
            const auto back = backward_peak(traj.intensity_maps[i], grid);
            if (back) csv += detail::g9(back->z);
            csv += "\n";
        }
        detail::commit_file(dir / "peaks.csv", csv);
    }
    {
        std::string csv = "t,z,intensity\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const std::string t = detail::g9(traj.times[i]);
            for (int j = 0; j < grid.n_z; ++j) {
                csv += t;
                csv += ",";
                csv += detail::g9(grid.z_at(j));
                csv += ",";
                csv += detail::g9(traj.intensity_maps[i][static_cast<std::size_t>(j)]);
                csv += "\n";
            }
        }
        detail::commit_file(dir / "intensity.csv", csv);
    }
    detail::commit_file(dir / "intensity.pgm", render_heatmap_pgm(traj));
    detail::commit_file(dir / "intensity.ppm", render_heatmap_ppm(traj));
}

/// Truncation-order table for the group-velocity study (velocities in units
/// of c*omega_c^2/(g^2 N)).
inline void write_vgroup_csv(const VgConvergence& result, const PhysicalParams& params,
                             const std::filesystem::path& path) {
    std::string csv = "ell,vg,vg_stderr,c0_exact\n";
    for (const auto& [ell, est] : result.points) {
        csv += std::to_string(ell);
        csv += ",";
        if (est) csv += detail::g9(est->value);
        csv += ",";
        if (est) csv += detail::g9(est->stderr_);
        csv += ",";
        if (ell >= 1) csv += detail::g9(vg_to_paper_units(c0_exact(ell, params), params));
        csv += "\n";
    }
    detail::commit_file(path, csv);
}

inline void write_dispersion_csv(const DispersionScan& scan,
                                 const std::filesystem::path& path) {
    std::string csv = "omega,re_k_plus,im_k_plus,re_k_minus,im_k_minus\n";
    for (const auto& p : scan.points) {
        csv += detail::g9(p.omega) + "," + detail::g9(p.k_plus.real()) + "," +
               detail::g9(p.k_plus.imag()) + "," + detail::g9(p.k_minus.real()) + "," +
               detail::g9(p.k_minus.imag()) + "\n";
    }
    detail::commit_file(path, csv);
}

/// One sweep point: varied parameter value, classification and end-of-run
/// strength.
struct SweepRow {
    std::string parameter;
    double value = 0.0;
    BehaviorClass behavior;
    double strength_end = 0.0;
    std::optional<double> onset_time;
};

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            const std::filesystem::path& path) {
    std::string csv = "parameter,value,behavior,evidence,strength_end,onset_time\n";
    for (const auto& row : rows) {
        csv += row.parameter + "," + detail::g9(row.value) + "," +
               behavior_name(row.behavior.variant) + "," + detail::g9(row.behavior.evidence) +
               "," + detail::g9(row.strength_end) + ",";
        if (row.onset_time) csv += detail::g9(*row.onset_time);
        csv += "\n";
    }
    detail::commit_file(path, csv);
}

}  // namespace slpulse
