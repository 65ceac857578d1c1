#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slpulse/config.hpp"

namespace slpulse {

/// Invalid or inconsistent configuration text. The message carries one
/// diagnostic per line, each with its source line number where applicable.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A parsed run description: the simulation proper plus the output target.
struct ParsedConfig {
    SimulationConfig config;
    std::string output_dir = "out";

    bool operator==(const ParsedConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct KeyValue {
    std::string value;
    int line = 0;
    bool used = false;
};

}  // namespace detail

/// Parse the key = value run description. Unknown keys, duplicate keys,
/// non-numeric values and missing decay parameters are all collected and
/// reported together. Omitted optional keys fall back to the reference
/// parameter set (gamma = 1, omega_c = 0.69, g2n = 138, l0 = 5, ell = 30,
/// dz = 0.05, cfl = 0.5, total_time = 100, z_max = auto,
/// snapshot_stride = auto, decay.model = cold_linear).
inline ParsedConfig parse_config(const std::string& text) {
    static const std::set<std::string> known = {
        "gamma",          "omega_c",     "g2n",         "decay.model",
        "decay.a",        "decay.k_c",   "decay.v_s",   "decay.hbar_over_m",
        "decay.length",   "decay.table", "l0",          "ell",
        "z_max",          "dz",          "cfl",         "total_time",
        "snapshot_stride", "output_dir"};

    std::map<std::string, detail::KeyValue> entries;
    std::vector<std::string> diagnostics;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            diagnostics.push_back("line " + std::to_string(line_no) +
                                  ": expected key = value, got '" + line + "'");
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!known.count(key)) {
            diagnostics.push_back("line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "'");
            continue;
        }
        if (entries.count(key)) {
            diagnostics.push_back("line " + std::to_string(line_no) + ": duplicate key '" +
                                  key + "' (first on line " +
                                  std::to_string(entries[key].line) + ")");
            continue;
        }
        if (value.empty()) {
            diagnostics.push_back("line " + std::to_string(line_no) + ": empty value for '" +
                                  key + "'");
            continue;
        }
        entries[key] = {value, line_no, false};
    }

    auto take = [&](const std::string& key) -> detail::KeyValue* {
        auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };
    auto number = [&](const std::string& key, double fallback) -> double {
        detail::KeyValue* kv = take(key);
        if (!kv) return fallback;
        char* end = nullptr;
        const double v = std::strtod(kv->value.c_str(), &end);
        if (end == kv->value.c_str() || *end != '\0' || !std::isfinite(v)) {
            diagnostics.push_back("line " + std::to_string(kv->line) + ": value of '" + key +
                                  "' is not a finite number: '" + kv->value + "'");
            return fallback;
        }
        return v;
    };
    auto integer = [&](const std::string& key, long fallback) -> long {
        detail::KeyValue* kv = take(key);
        if (!kv) return fallback;
        char* end = nullptr;
        const long v = std::strtol(kv->value.c_str(), &end, 10);
        if (end == kv->value.c_str() || *end != '\0') {
            diagnostics.push_back("line " + std::to_string(kv->line) + ": value of '" + key +
                                  "' is not an integer: '" + kv->value + "'");
            return fallback;
        }
        return v;
    };
    std::vector<std::string> missing;
    auto required_number = [&](const std::string& key) -> double {
        if (!entries.count(key)) {
            missing.push_back(key);
            return 0.0;
        }
        return number(key, 0.0);
    };

    PhysicalParams params;
    params.gamma = number("gamma", 1.0);
    params.omega_c = number("omega_c", 0.69);
    params.g2n = number("g2n", 138.0);

    std::string model = "cold_linear";
    if (detail::KeyValue* kv = take("decay.model")) model = kv->value;
    DecayModel::Variant decay_variant = decay::Zero{};
    if (model == "zero") {
        decay_variant = decay::Zero{};
    } else if (model == "cold_linear") {
        decay_variant = decay::ColdLinear{required_number("decay.a")};
    } else if (model == "laser_cooled") {
        decay_variant = decay::LaserCooledEstimate{required_number("decay.k_c"),
                                                   required_number("decay.v_s")};
    } else if (model == "bec") {
        const double kc = required_number("decay.k_c");
        const double hm = required_number("decay.hbar_over_m");
        const double len = required_number("decay.length");
        decay_variant = decay::BECEstimate{kc, hm, len};
    } else if (model == "table") {
        detail::KeyValue* kv = take("decay.table");
        if (!kv) {
            missing.push_back("decay.table");
        } else {
            std::vector<double> rates;
            std::istringstream list(kv->value);
            std::string item;
            bool ok = true;
            while (std::getline(list, item, ',')) {
                item = detail::trim(item);
                char* end = nullptr;
                const double v = std::strtod(item.c_str(), &end);
                if (item.empty() || end == item.c_str() || *end != '\0') {
                    diagnostics.push_back("line " + std::to_string(kv->line) +
                                          ": bad decay.table entry '" + item + "'");
                    ok = false;
                    break;
                }
                rates.push_back(v);
            }
            if (ok) decay_variant = decay::CustomTable{std::move(rates)};
        }
    } else {
        diagnostics.push_back("decay.model '" + model +
                              "' is not one of zero, cold_linear, laser_cooled, bec, table");
    }
    DecayModel decay;
    if (diagnostics.empty() && missing.empty()) {
        try {
            decay = DecayModel(std::move(decay_variant));
        } catch (const std::exception& e) {
            diagnostics.push_back(std::string("decay model: ") + e.what());
        }
    }

    const double l0 = number("l0", 5.0);
    const long ell = integer("ell", 30);
    const double dz = number("dz", 0.05);
    const double cfl = number("cfl", 0.5);
    const double total_time = number("total_time", 100.0);

    double z_extent = 0.0;
    if (detail::KeyValue* kv = take("z_max")) {
        if (kv->value == "auto") {
            z_extent = 0.0;
        } else {
            char* end = nullptr;
            z_extent = std::strtod(kv->value.c_str(), &end);
            if (end == kv->value.c_str() || *end != '\0' || !std::isfinite(z_extent))
                diagnostics.push_back("line " + std::to_string(kv->line) +
                                      ": z_max must be a number or 'auto'");
        }
    }
    long stride = 0;
    if (detail::KeyValue* kv = take("snapshot_stride")) {
        if (kv->value != "auto") {
            char* end = nullptr;
            stride = std::strtol(kv->value.c_str(), &end, 10);
            if (end == kv->value.c_str() || *end != '\0' || stride < 1)
                diagnostics.push_back("line " + std::to_string(kv->line) +
                                      ": snapshot_stride must be a positive integer or 'auto'");
        }
    }
    std::string output_dir = "out";
    if (detail::KeyValue* kv = take("output_dir")) output_dir = kv->value;

    for (const auto& [key, kv] : entries)
        if (!kv.used)
            diagnostics.push_back("line " + std::to_string(kv.line) + ": key '" + key +
                                  "' is not used by decay.model '" + model + "'");
    if (!missing.empty()) {
        std::string msg = "missing required key";
        if (missing.size() > 1) msg += "s";
        msg += ":";
        for (const auto& k : missing) msg += " " + k;
        diagnostics.push_back(msg);
    }
    if (!diagnostics.empty()) {
        std::string what = "invalid configuration:";
        for (const auto& d : diagnostics) what += "\n  " + d;
        throw ConfigError(what);
    }

    ParsedConfig out;
    try {
        out.config = make_config(params, decay, l0, static_cast<int>(ell), total_time, dz,
                                 cfl, z_extent, stride);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
    out.output_dir = output_dir;
    return out;
}

/// Canonical text form; parse_config(render_config(c)) reproduces c exactly.
inline std::string render_config(const ParsedConfig& parsed) {
    const SimulationConfig& c = parsed.config;
    std::ostringstream out;
    out << "gamma = " << detail::format_full(c.params.gamma) << "\n";
    out << "omega_c = " << detail::format_full(c.params.omega_c) << "\n";
    out << "g2n = " << detail::format_full(c.params.g2n) << "\n";
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, decay::Zero>) {
                out << "decay.model = zero\n";
            } else if constexpr (std::is_same_v<T, decay::ColdLinear>) {
                out << "decay.model = cold_linear\n";
                out << "decay.a = " << detail::format_full(v.a) << "\n";
            } else if constexpr (std::is_same_v<T, decay::LaserCooledEstimate>) {
                out << "decay.model = laser_cooled\n";
                out << "decay.k_c = " << detail::format_full(v.k_c) << "\n";
                out << "decay.v_s = " << detail::format_full(v.v_s) << "\n";
            } else if constexpr (std::is_same_v<T, decay::BECEstimate>) {
                out << "decay.model = bec\n";
                out << "decay.k_c = " << detail::format_full(v.k_c) << "\n";
                out << "decay.hbar_over_m = " << detail::format_full(v.hbar_over_m) << "\n";
                out << "decay.length = " << detail::format_full(v.length) << "\n";
            } else {
                out << "decay.model = table\n";
                out << "decay.table = ";
                for (std::size_t i = 0; i < v.rates.size(); ++i) {
                    if (i) out << ",";
                    out << detail::format_full(v.rates[i]);
                }
                out << "\n";
            }
        },
        c.decay.variant());
    out << "l0 = " << detail::format_full(c.l0) << "\n";
    out << "ell = " << c.ell << "\n";
    if (c.auto_domain)
        out << "z_max = auto\n";
    else
        out << "z_max = " << detail::format_full(c.grid.z_max) << "\n";
    out << "dz = " << detail::format_full(c.grid.dz) << "\n";
    out << "cfl = " << detail::format_full(c.cfl) << "\n";
    out << "total_time = " << detail::format_full(c.total_time) << "\n";
    if (c.auto_stride)
        out << "snapshot_stride = auto\n";
    else
        out << "snapshot_stride = " << c.grid.snapshot_stride << "\n";
    out << "output_dir = " << parsed.output_dir << "\n";
    return out.str();
}

}  // namespace slpulse
