#pragma once

// Declarative scenario runner: JSON configs reproducing the canonical
// experiments, spectrum CSV output, and summary JSON. One scenario per
// invocation; outputs are deterministic for identical configs.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffborn/errors.hpp"
#include "diffborn/forward.hpp"
#include "diffborn/geometry.hpp"
#include "diffborn/green.hpp"
#include "diffborn/spectral.hpp"

namespace diffborn {

inline constexpr const char* kVersion = "1.0.0";

struct ScenarioConfig {
    std::string scenario;
    std::vector<double> H_values; // H_over_lambda; >1 entry only for cube_sweep
    double h_over_lambda = 0.0;
    std::vector<double> kappas; // one or two values
    double deltaH_over_H = 0.0;
    double H_in_over_lambda = 0.0;
    double a_over_lambda = 0.0; // bound scenario
    double tol = 1e-10;
    int max_iter = 10000;
    bool use_self_energy = true;
    Eigen::Index cap_real = 12000;
    Eigen::Index cap_complex = 4000;
    ProbeLayout probes; // in nondimensional lengths after parsing
    bool has_probes = false;
    std::string spectrum_csv; // optional
    std::string summary_json; // required
    nlohmann::json raw;
};

namespace detail {

inline const std::vector<std::string>& scenario_tags() {
    static const std::vector<std::string> tags = {
        "cube_spectrum", "cube_sweep", "two_cubes", "two_cubes_opposite",
        "sandwich",      "embedded",   "born_run",  "bound",
        "forward_data"};
    return tags;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace detail

/// Parse and validate a scenario config. Reports all validation errors at
/// once, with field names, in a single ConfigError.
inline ScenarioConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    std::vector<std::string> errs;
    auto fail = [&](const std::string& msg) { errs.push_back(msg); };

    ScenarioConfig c;
    c.raw = j;

    if (!j.contains("scenario") || !j["scenario"].is_string()) {
        fail("scenario: missing or not a string");
    } else {
        c.scenario = j["scenario"].get<std::string>();
        const auto& tags = detail::scenario_tags();
        if (std::find(tags.begin(), tags.end(), c.scenario) == tags.end())
            fail("scenario: unrecognized tag '" + c.scenario + "'");
    }

    auto get_number = [&](const char* key, double& dst, bool required,
                          bool positive) {
        if (!j.contains(key)) {
            if (required) fail(std::string(key) + ": missing");
            return false;
        }
        if (!j[key].is_number()) {
            fail(std::string(key) + ": must be a number");
            return false;
        }
        dst = j[key].get<double>();
        if (positive && !(dst > 0.0)) {
            fail(std::string(key) + ": length must be positive");
            return false;
        }
        return true;
    };

    const bool is_bound = c.scenario == "bound";
    const bool is_sweep = c.scenario == "cube_sweep";
    const bool needs_geometry = !c.scenario.empty() && !is_bound;

    if (j.contains("H_over_lambda")) {
        if (j["H_over_lambda"].is_array()) {
            if (!is_sweep)
                fail("H_over_lambda: array form is only valid for cube_sweep");
            for (const auto& v : j["H_over_lambda"]) {
                if (!v.is_number() || !(v.get<double>() > 0.0)) {
                    fail("H_over_lambda: length must be positive");
                    break;
                }
                c.H_values.push_back(v.get<double>());
            }
            if (c.H_values.empty()) fail("H_over_lambda: empty array");
        } else {
            double H = 0.0;
            if (get_number("H_over_lambda", H, false, true))
                c.H_values.push_back(H);
        }
    } else if (needs_geometry) {
        fail("H_over_lambda: missing");
    }

    if (needs_geometry)
        get_number("h_over_lambda", c.h_over_lambda, true, true);

    if (j.contains("kappa")) {
        if (j["kappa"].is_array()) {
            for (const auto& v : j["kappa"]) {
                if (!v.is_number()) {
                    fail("kappa: entries must be numbers");
                    break;
                }
                c.kappas.push_back(v.get<double>());
            }
            if (c.kappas.size() != 2)
                fail("kappa: array form must hold exactly two values");
        } else if (j["kappa"].is_number()) {
            c.kappas.push_back(j["kappa"].get<double>());
        } else {
            fail("kappa: must be a number or a pair");
        }
    } else if (needs_geometry) {
        fail("kappa: missing");
    }

    if (c.scenario == "two_cubes" || c.scenario == "two_cubes_opposite") {
        get_number("deltaH_over_H", c.deltaH_over_H, true, false);
        if (c.deltaH_over_H < 0.0) fail("deltaH_over_H: must be nonnegative");
    }
    if (c.scenario == "embedded") {
        get_number("H_in_over_lambda", c.H_in_over_lambda, true, true);
        if (c.kappas.size() != 2)
            fail("kappa: embedded scenario needs [kappa_out, kappa_in]");
    }
    if (is_bound) get_number("a_over_lambda", c.a_over_lambda, true, true);

    if (j.contains("tol")) {
        c.tol = j["tol"].get<double>();
        if (!(c.tol > 0.0)) fail("tol: must be positive");
    }
    if (j.contains("max_iter")) {
        c.max_iter = j["max_iter"].get<int>();
        if (c.max_iter < 1) fail("max_iter: must be at least 1");
    }
    if (j.contains("use_self_energy"))
        c.use_self_energy = j["use_self_energy"].get<bool>();
    if (j.contains("cap_real")) c.cap_real = j["cap_real"].get<Eigen::Index>();
    if (j.contains("cap_complex"))
        c.cap_complex = j["cap_complex"].get<Eigen::Index>();

    const bool needs_probes =
        c.scenario == "born_run" || c.scenario == "forward_data";
    if (j.contains("probes")) {
        const Medium medium;
        auto parse_points = [&](const char* key,
                                std::vector<Eigen::Vector3d>& dst) {
            if (!j["probes"].contains(key)) {
                fail(std::string("probes.") + key + ": missing");
                return;
            }
            for (const auto& p : j["probes"][key]) {
                if (!p.is_array() || p.size() != 3) {
                    fail(std::string("probes.") + key +
                         ": points must be [x,y,z]");
                    return;
                }
                dst.emplace_back(p[0].get<double>() * medium.lambda_d,
                                 p[1].get<double>() * medium.lambda_d,
                                 p[2].get<double>() * medium.lambda_d);
            }
            if (dst.empty()) fail(std::string("probes.") + key + ": empty");
        };
        parse_points("sources", c.probes.sources);
        parse_points("detectors", c.probes.detectors);
        if (j["probes"].contains("strengths"))
            for (const auto& q : j["probes"]["strengths"])
                c.probes.strengths.push_back(q.get<double>());
        if (!c.probes.strengths.empty() &&
            c.probes.strengths.size() != c.probes.sources.size())
            fail("probes.strengths: length must match sources");
        c.has_probes = true;
    } else if (needs_probes) {
        fail("probes: missing");
    }

    if (!j.contains("outputs") || !j["outputs"].contains("summary_json")) {
        fail("outputs.summary_json: missing");
    } else {
        c.summary_json = j["outputs"]["summary_json"].get<std::string>();
        if (j["outputs"].contains("spectrum_csv"))
            c.spectrum_csv = j["outputs"]["spectrum_csv"].get<std::string>();
    }

    if (!errs.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errs) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return c;
}

namespace detail {

inline void write_spectrum_csv(const std::string& path,
                               const SpectrumReport& rep) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open spectrum CSV for writing: " + path);
    out << "n,re,im,n_over_N\n";
    const auto n_total = static_cast<double>(rep.n);
    if (rep.is_complex) {
        for (Eigen::Index i = 0; i < rep.n; ++i) {
            const auto& w = rep.complex_spectrum.values[static_cast<std::size_t>(i)];
            out << (i + 1) << ',' << format_g17(w.real()) << ','
                << format_g17(w.imag()) << ','
                << format_g17(static_cast<double>(i + 1) / n_total) << '\n';
        }
    } else {
        for (Eigen::Index i = 0; i < rep.n; ++i) {
            out << (i + 1) << ',' << format_g17(rep.real_spectrum.values(i))
                << ",0," << format_g17(static_cast<double>(i + 1) / n_total)
                << '\n';
        }
    }
}

inline void check_probe_clearance(const VoxelGrid& grid,
                                  const ProbeLayout& probes) {
    auto check = [&](const std::vector<Eigen::Vector3d>& pts, const char* kind) {
        for (const auto& p : pts)
            for (const auto& c : grid.centers)
                if ((p - c).norm() < 0.5 * grid.h)
                    throw ConfigError(std::string("probes: a ") + kind +
                                      " lies within h/2 of a voxel center");
    };
    check(probes.sources, "source");
    check(probes.detectors, "detector");
}

inline nlohmann::json matrix_to_json(const DenseMatrixR& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

} // namespace detail

/// Run one scenario: dispatches to the matching pipeline, writes the
/// spectrum CSV (when configured) and the summary JSON, and returns the
/// summary document.
inline nlohmann::json run_scenario(const ScenarioConfig& c,
                                   const std::string& out_dir = "") {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();
    auto resolve = [&](const std::string& p) {
        if (p.empty() || out_dir.empty() || fs::path(p).is_absolute()) return p;
        return (fs::path(out_dir) / p).string();
    };

    const Medium medium;
    SpectralOptions opts;
    opts.cap_real = c.cap_real;
    opts.cap_complex = c.cap_complex;
    opts.use_self_energy = c.use_self_energy;
    opts.power_tol = c.tol;

    nlohmann::json summary;
    summary["scenario"] = c.scenario;
    summary["version"] = kVersion;
    {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(
                          detail::fnv1a(c.raw.dump())));
        summary["config_hash"] = buf;
    }

    auto fill_from_report = [&](const SpectrumReport& rep) {
        summary["n"] = rep.n;
        summary["w_max"] = rep.w_max;
        summary["max_abs"] = rep.max_abs;
        summary["max_imag_abs"] = rep.max_imag_abs;
        summary["trace_defect"] = rep.trace_defect;
        if (!c.spectrum_csv.empty())
            detail::write_spectrum_csv(resolve(c.spectrum_csv), rep);
    };

    const double H = c.H_values.empty() ? 0.0 : c.H_values.front();
    const double k0 = c.kappas.empty() ? 0.0 : c.kappas.front();

    if (c.scenario == "cube_spectrum") {
        fill_from_report(
            spectrum_w(build_cube(H, c.h_over_lambda, k0, medium), opts,
                       "cube"));
    } else if (c.scenario == "cube_sweep") {
        const auto points = wmax_sweep(c.H_values, c.h_over_lambda, k0, opts,
                                       medium);
        nlohmann::json rows = nlohmann::json::array();
        double wmax_overall = 0.0;
        Eigen::Index n_max = 0;
        for (const auto& pt : points) {
            rows.push_back({{"H_over_lambda", pt.H_over_lambda},
                            {"n", pt.n},
                            {"w_max", pt.w_max},
                            {"iters", pt.iters},
                            {"converged", pt.converged},
                            {"error", pt.error}});
            wmax_overall = std::max(wmax_overall, pt.w_max);
            n_max = std::max(n_max, pt.n);
        }
        summary["sweep"] = rows;
        summary["n"] = n_max;
        summary["w_max"] = wmax_overall;
        summary["max_abs"] = wmax_overall;
        summary["max_imag_abs"] = 0.0;
        summary["trace_defect"] = 0.0;
    } else if (c.scenario == "two_cubes") {
        const double k1 = c.kappas.size() > 1 ? c.kappas[1] : k0;
        fill_from_report(spectrum_w(
            build_two_cubes(H, c.h_over_lambda, c.deltaH_over_H, k0, k1, medium),
            opts, "two_cubes"));
    } else if (c.scenario == "two_cubes_opposite") {
        const double k1 = c.kappas.size() > 1 ? c.kappas[1] : -k0;
        fill_from_report(spectrum_wc(
            build_two_cubes(H, c.h_over_lambda, c.deltaH_over_H, k0, k1, medium),
            opts, "two_cubes_opposite"));
    } else if (c.scenario == "sandwich") {
        fill_from_report(spectrum_wc(
            build_sandwich(H, c.h_over_lambda, k0, medium), opts, "sandwich"));
    } else if (c.scenario == "embedded") {
        fill_from_report(
            spectrum_wc(build_embedded(H, c.H_in_over_lambda, c.h_over_lambda,
                                       c.kappas[0], c.kappas[1], medium),
                        opts, "embedded"));
    } else if (c.scenario == "born_run") {
        const VoxelGrid grid = build_cube(H, c.h_over_lambda, k0, medium);
        detail::check_probe_clearance(grid, c.probes);
        const Polarizabilities pol = polarizabilities(grid, c.use_self_energy);
        const BornReport rep = born_iterate(
            grid, pol, incident_field(grid, c.probes), c.tol, c.max_iter);
        summary["n"] = grid.size();
        summary["converged"] = rep.converged;
        summary["iterations"] = rep.iterations;
        summary["divergence_flag"] = to_string(rep.divergence_flag);
        summary["final_residual"] =
            rep.residuals.empty() ? 0.0 : rep.residuals.back();
        summary["w_max"] = 0.0;
        summary["max_abs"] = 0.0;
        summary["max_imag_abs"] = 0.0;
        summary["trace_defect"] = 0.0;
    } else if (c.scenario == "bound") {
        const double a = c.a_over_lambda * medium.lambda_d;
        const BoundVerdict v = born_bound(a, medium, k0);
        summary["n"] = 0;
        summary["a_over_lambda"] = c.a_over_lambda;
        summary["kd_a"] = medium.kd * a;
        summary["threshold"] = v.threshold;
        summary["regime"] = to_string(v.regime);
        summary["satisfied"] = v.satisfied;
        summary["w_max"] = 0.0;
        summary["max_abs"] = 0.0;
        summary["max_imag_abs"] = 0.0;
        summary["trace_defect"] = 0.0;
    } else if (c.scenario == "forward_data") {
        const VoxelGrid grid = build_cube(H, c.h_over_lambda, k0, medium);
        detail::check_probe_clearance(grid, c.probes);
        const Polarizabilities pol = polarizabilities(grid, c.use_self_energy);
        const DataFunction df = data_function(grid, pol, c.probes);
        summary["n"] = grid.size();
        summary["g_ds"] = detail::matrix_to_json(df.g_ds);
        summary["g0_ds"] = detail::matrix_to_json(df.g0_ds);
        summary["delta"] = detail::matrix_to_json(df.delta);
        summary["w_max"] = 0.0;
        summary["max_abs"] = 0.0;
        summary["max_imag_abs"] = 0.0;
        summary["trace_defect"] = 0.0;
    } else {
        throw ConfigError("unrecognized scenario: " + c.scenario);
    }

    summary["timing_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    const std::string path = resolve(c.summary_json);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open summary JSON for writing: " + path);
    out << summary.dump(2) << '\n';
    return summary;
}

} // namespace diffborn
