#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "slpulse/analytic.hpp"
#include "slpulse/config_io.hpp"
#include "slpulse/diagnostics.hpp"
#include "slpulse/output.hpp"
#include "slpulse/parallel.hpp"

namespace slpulse {

namespace detail {

inline ParsedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

inline std::string format_value_dir(const std::string& name, double value) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s_%g", name.c_str(), value);
    return buf;
}

}  // namespace detail

/// Entry point behind the binary; args exclude the program name.
/// Returns the process exit status.
inline int cli_dispatch(std::vector<std::string> args, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    CLI::App app{"Retrieved-light dynamics in a Lambda-type atomic medium"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned jobs = 0;

    auto* sim = app.add_subcommand("simulate", "run one configuration and write its outputs");
    sim->add_option("config", config_path, "configuration file")->required();

    int ell_max = 30;
    int ell_min = 1;
    auto* vgr = app.add_subcommand(
        "vgroup", "group-velocity convergence in the truncation order");
    vgr->add_option("config", config_path, "configuration file")->required();
    vgr->add_option("--ell-max", ell_max, "largest truncation order")->required();
    vgr->add_option("--ell-min", ell_min, "smallest truncation order");
    vgr->add_option("--jobs", jobs, "concurrent simulations (default: hardware)");

    double omega_min = 0.01, omega_max = 3.0;
    int points = 300;
    int disp_ell = 1000;
    auto* dsp = app.add_subcommand("dispersion", "complex momentum branches k(omega)");
    dsp->add_option("config", config_path, "configuration file")->required();
    dsp->add_option("--omega-min", omega_min, "lowest frequency (units of gamma)")->required();
    dsp->add_option("--omega-max", omega_max, "highest frequency")->required();
    dsp->add_option("--points", points, "scan points")->required();
    dsp->add_option("--ell", disp_ell, "continued-fraction depth (default 1000)");

    std::string vary;
    auto* swp = app.add_subcommand("sweep", "classify behavior across a parameter list");
    swp->add_option("config", config_path, "configuration file")->required();
    swp->add_option("--vary", vary, "parameter list, e.g. a=0.2,0.02 or l0=5,10,20")
        ->required();
    swp->add_option("--jobs", jobs, "concurrent simulations (default: hardware)");

    int analytic_ell_max = 10;
    auto* ana = app.add_subcommand("analytic", "closed-form split-pulse velocities");
    ana->add_option("--ell-max", analytic_ell_max, "largest truncation order");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (sim->parsed()) {
            const ParsedConfig parsed = detail::load_config(config_path);
            const Trajectory traj = simulate(parsed.config);
            write_trajectory(traj, parsed.output_dir);
            const BehaviorClass cls = classify_behavior(traj);
            out << "behavior: " << behavior_name(cls.variant)
                << " (final peak separation " << detail::g9(cls.evidence) << " l_abs)\n";
            if (const auto vg = estimate_group_velocity(traj))
                out << "forward-pulse velocity: " << detail::g9(vg->value) << " +- "
                    << detail::g9(vg->stderr_) << " (units c omega_c^2 / g2n)\n";
            else
                out << "forward-pulse velocity: not applicable\n";
            out << "strength at t_end: " << detail::g9(traj.strength_series.back()) << "\n";
            out << "wrote " << parsed.output_dir << "/{strength,peaks,intensity}.csv"
                << " and intensity.{pgm,ppm}\n";
        } else if (vgr->parsed()) {
            const ParsedConfig parsed = detail::load_config(config_path);
            if (ell_min < 1 || ell_max < ell_min)
                throw std::runtime_error("vgroup: need 1 <= ell-min <= ell-max");
            std::vector<int> schedule;
            for (int l = ell_min; l <= ell_max; ++l) schedule.push_back(l);
            ConvergenceOptions opts;
            opts.jobs = jobs;
            const VgConvergence result = converge_in_order(parsed.config, schedule, opts);
            std::filesystem::create_directories(parsed.output_dir);
            write_vgroup_csv(result, parsed.config.params,
                             std::filesystem::path(parsed.output_dir) / "vgroup.csv");
            out << "ell,vg,vg_stderr,c0_exact\n";
            for (const auto& [ell, est] : result.points) {
                out << ell << ",";
                if (est) out << detail::g9(est->value) << "," << detail::g9(est->stderr_);
                else out << ",";
                out << "," << detail::g9(vg_to_paper_units(c0_exact(ell, parsed.config.params),
                                                           parsed.config.params))
                    << "\n";
            }
            if (result.plateau)
                out << "plateau: " << detail::g9(*result.plateau)
                    << " (units c omega_c^2 / g2n)\n";
            else
                out << "plateau: not reached\n";
        } else if (dsp->parsed()) {
            const ParsedConfig parsed = detail::load_config(config_path);
            if (points < 2 || !(omega_max > omega_min))
                throw std::runtime_error("dispersion: need omega-min < omega-max, points >= 2");
            std::vector<double> omegas(static_cast<std::size_t>(points));
            for (int i = 0; i < points; ++i)
                omegas[static_cast<std::size_t>(i)] =
                    omega_min + (omega_max - omega_min) * i / (points - 1);
            const DispersionScan scan =
                scan_dispersion(omegas, parsed.config.params, parsed.config.decay, disp_ell);
            std::filesystem::create_directories(parsed.output_dir);
            write_dispersion_csv(scan, std::filesystem::path(parsed.output_dir) /
                                           "dispersion.csv");
            out << "wrote " << parsed.output_dir << "/dispersion.csv (" << scan.points.size()
                << " points";
            if (!scan.skipped.empty()) out << ", " << scan.skipped.size() << " skipped";
            out << ")\n";
        } else if (swp->parsed()) {
            const ParsedConfig parsed = detail::load_config(config_path);
            const auto eq = vary.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("sweep: --vary expects name=v1,v2,...");
            const std::string name = vary.substr(0, eq);
            if (name != "a" && name != "l0")
                throw std::runtime_error("sweep: can vary 'a' or 'l0', not '" + name + "'");
            std::vector<double> values;
            std::istringstream list(vary.substr(eq + 1));
            std::string item;
            while (std::getline(list, item, ',')) {
                char* end = nullptr;
                const double v = std::strtod(item.c_str(), &end);
                if (item.empty() || end == item.c_str() || *end != '\0')
                    throw std::runtime_error("sweep: bad value '" + item + "'");
                values.push_back(v);
            }
            if (values.empty()) throw std::runtime_error("sweep: no values given");
            if (name == "a" &&
                !std::holds_alternative<decay::ColdLinear>(parsed.config.decay.variant()) &&
                !std::holds_alternative<decay::Zero>(parsed.config.decay.variant()))
                throw std::runtime_error("sweep over a requires a cold_linear decay model");

            const SimulationConfig& base = parsed.config;
            std::vector<Trajectory> trajectories(values.size());
            parallel_for_each(
                values.size(),
                [&](std::size_t i) {
                    SimulationConfig cfg = base;
                    if (name == "a")
                        cfg.decay = DecayModel(decay::ColdLinear{values[i]});
                    else
                        cfg = make_config(base.params, base.decay, values[i], base.ell,
                                          base.total_time, base.grid.dz, base.cfl,
                                          base.auto_domain ? 0.0 : base.grid.z_max,
                                          base.auto_stride ? 0 : base.grid.snapshot_stride);
                    trajectories[i] = simulate(cfg);
                },
                jobs);

            std::vector<SweepRow> rows(values.size());
            std::filesystem::path dir(parsed.output_dir);
            for (std::size_t i = 0; i < values.size(); ++i) {
                const Trajectory& traj = trajectories[i];
                SweepRow row;
                row.parameter = name;
                row.value = values[i];
                row.behavior = classify_behavior(traj);
                row.strength_end = traj.strength_series.back();
                row.onset_time = splitting_onset_time(traj, 2.0 * traj.config.l0);
                rows[i] = row;
                write_trajectory(traj, dir / detail::format_value_dir(name, values[i]));
            }
            write_sweep_csv(rows, dir / "sweep.csv");
            out << "parameter,value,behavior,evidence,strength_end,onset_time\n";
            for (const auto& row : rows) {
                out << row.parameter << "," << detail::g9(row.value) << ","
                    << behavior_name(row.behavior.variant) << ","
                    << detail::g9(row.behavior.evidence) << ","
                    << detail::g9(row.strength_end) << ",";
                if (row.onset_time) out << detail::g9(*row.onset_time);
                out << "\n";
            }
        } else if (ana->parsed()) {
            if (analytic_ell_max < 1)
                throw std::runtime_error("analytic: need --ell-max >= 1");
            const PhysicalParams params;
            out << "ell,c0_exact,c0_slowlight,c0_exact_labs\n";
            for (int l = 1; l <= analytic_ell_max; ++l) {
                const double c0 = c0_exact(l, params);
                out << l << "," << detail::g9(vg_to_paper_units(c0, params)) << ","
                    << detail::g9(vg_to_paper_units(c0_slowlight(l, params), params)) << ","
                    << detail::g9(c0) << "\n";
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace slpulse
