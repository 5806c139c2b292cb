// eistrib command-line tool: simulate, fit, plot and calibrate equivalent
// circuits of lubricated contacts from impedance spectra.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eistrib/eistrib.hpp"

namespace fs = std::filesystem;
using namespace eistrib;

namespace {

// Exit codes shared by all subcommands.
constexpr int exit_ok = 0;
constexpr int exit_input_failure = 1;
constexpr int exit_config_error = 2;
constexpr int exit_empty_join = 3;
constexpr int exit_model_validity = 4;

FrequencyGrid parse_grid(const std::string& spec) {
    const auto fields = detail::split_csv(spec);
    if (fields.size() != 3)
        throw parse_error("--grid expects 'lo_hz,hi_hz,points_per_decade'");
    const double lo = detail::parse_double(fields[0], 0);
    const double hi = detail::parse_double(fields[1], 0);
    const double ppd = detail::parse_double(fields[2], 0);
    if (ppd < 1 || ppd != std::floor(ppd))
        throw parse_error("--grid: points per decade must be a positive integer");
    return make_log_grid(lo, hi, static_cast<int>(ppd));
}

ModelKind parse_model(const std::string& name) {
    if (name == "rc") return ModelKind::ParallelRC;
    if (name == "rc+r") return ModelKind::ParallelRC_SeriesR;
    if (name == "rc+w") return ModelKind::ParallelRC_Warburg;
    throw parse_error("--model must be one of rc, rc+r, rc+w");
}

Weighting parse_weighting(const std::string& name) {
    if (name == "modulus") return Weighting::Modulus;
    if (name == "proportional") return Weighting::Proportional;
    if (name == "unit") return Weighting::Unit;
    throw parse_error("--weighting must be one of modulus, proportional, unit");
}

fs::path svg_sibling(const fs::path& out) {
    fs::path p = out;
    p.replace_extension(".svg");
    return p;
}

BallOnDiscGeometry geometry_from_config(const ContactConfig& cfg) {
    BallOnDiscGeometry g;
    g.permittivity_f_per_m = permittivity(cfg.epsilon_r);
    g.ball_radius_m = cfg.ball_radius_m;
    // ball on flat disc: the reduced radius equals the ball radius
    g.hertz_radius_m = hertz_radius(cfg.load_n, cfg.ball_radius_m, cfg.reduced_modulus_pa);
    g.validate();
    return g;
}

int cmd_simulate(const std::string& config_path, const std::string& out_path, double film_nm,
                 double alpha, const std::string& grid_spec, double noise_sigma,
                 std::uint64_t seed) {
    ContactConfig cfg;
    try {
        cfg = read_contact_config(fs::path(config_path));
    } catch (const parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    FrequencyGrid grid;
    try {
        grid = parse_grid(grid_spec);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    try {
        const BallOnDiscGeometry geom = geometry_from_config(cfg);
        const BallOnDiscModel model =
            BallOnDiscModel::make(geom, film_nm * 1e-9, alpha, cfg.r0_ohm);
        const double c = total_capacitance(model);
        const double r = breakdown_resistance(cfg.r0_ohm, alpha);
        const CircuitNetwork network = is_open_circuit(r) ? capacitor(c) : parallel_rc(r, c);
        const Spectrum s = synth_spectrum(network, grid, NoiseSpec{noise_sigma}, seed);
        write_spectrum_csv(fs::path(out_path), s);
    } catch (const model_validity_error& e) {
        std::cerr << "model validity error: " << e.what() << "\n";
        return exit_model_validity;
    } catch (const std::invalid_argument& e) {
        std::cerr << "model validity error: " << e.what() << "\n";
        return exit_model_validity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }
    return exit_ok;
}

int cmd_fit(const std::vector<std::string>& inputs, const std::string& model_name,
            const std::string& weighting_name, double r0, const std::string& out_path) {
    ModelKind kind;
    FitConfig cfg;
    try {
        kind = parse_model(model_name);
        cfg.weighting = parse_weighting(weighting_name);
    } catch (const parse_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    std::vector<FitReportRow> rows;
    std::size_t failures = 0;
    for (const auto& input : inputs) {
        FitReportRow row;
        row.file = input;
        try {
            const Spectrum s = read_spectrum_csv(fs::path(input));
            const FitResult fit = fit_model(s, kind, cfg);
            row.fit = fit;
            row.regime = classify_regime(fit, r0);
        } catch (const std::exception& e) {
            row.error = e.what();
            ++failures;
            std::cerr << "fit failed for '" << input << "': " << e.what() << "\n";
        }
        rows.push_back(std::move(row));
    }

    try {
        if (out_path.empty()) {
            write_fit_report(std::cout, rows);
        } else {
            auto out = detail::open_output(fs::path(out_path));
            write_fit_report(out, rows);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }
    return failures == inputs.size() ? exit_input_failure : exit_ok;
}

int cmd_bode_nyquist(bool bode, const std::string& input, const std::string& out_path,
                     bool want_svg) {
    try {
        const Spectrum s = read_spectrum_csv(fs::path(input));
        auto out = detail::open_output(fs::path(out_path));
        std::string svg;
        if (bode) {
            const auto table = to_bode(s);
            write_bode_csv(out, table);
            if (want_svg) svg = bode_svg(table);
        } else {
            const auto table = to_nyquist(s);
            write_nyquist_csv(out, table);
            if (want_svg) svg = nyquist_svg(table);
        }
        if (want_svg) {
            auto svg_out = detail::open_output(svg_sibling(fs::path(out_path)));
            svg_out << svg;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }
    return exit_ok;
}

int cmd_calibrate(const std::string& fits_path, const std::string& utfi_path,
                  const std::string& out_path, double factor, double r0, double threshold_ohm,
                  const std::string& merged_out) {
    std::vector<std::pair<OperatingPoint, FitResult>> fits;
    std::vector<UtfiSample> utfi;
    try {
        fits = read_fitted_rc_csv(fs::path(fits_path));
        utfi = read_utfi_csv(fs::path(utfi_path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }

    MergeOutcome merged;
    try {
        merged = merge_datasets(fits, utfi, factor);
    } catch (const join_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }

    std::cout << "matched " << merged.records.size() << ", unmatched fits "
              << merged.unmatched_fits.size() << ", unmatched interferometry rows "
              << merged.unmatched_utfi.size() << "\n";
    for (std::size_t i : merged.unmatched_fits)
        std::cerr << "unmatched fit row " << i << "\n";
    for (std::size_t i : merged.unmatched_utfi)
        std::cerr << "unmatched interferometry row " << i << "\n";

    if (merged.records.empty()) {
        std::cerr << "no joinable operating points\n";
        return exit_empty_join;
    }

    try {
        // threshold override: build with an equivalent boundary factor
        const double boundary_factor = threshold_ohm > 0.0 ? threshold_ohm / r0 : 10.0;
        const ThicknessModel model = build_thickness_model(merged.records, r0, boundary_factor);
        write_thickness_model(fs::path(out_path), model);
        if (!merged_out.empty()) write_calibration_csv(fs::path(merged_out), merged.records);
        std::cout << "model written with " << model.knots().size() << " knots, threshold "
                  << model.breakdown_r_threshold_ohm() << " ohm\n";
    } catch (const model_build_error& e) {
        std::cerr << "model validity error: " << e.what() << "\n";
        return exit_model_validity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }
    return exit_ok;
}

int cmd_thickness(const std::string& model_path, double r, double c) {
    try {
        const ThicknessModel model = read_thickness_model(fs::path(model_path));
        const ThicknessQuery q = thickness_from_rc(model, r, c);
        std::printf("%.10g,%s,%s\n", q.h_m * 1e9, regime_name(q.regime).c_str(),
                    q.extrapolated ? "true" : "false");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }
    return exit_ok;
}

int cmd_family(const std::string& model_path, const std::string& config_path, double alpha,
               double h_min_nm, double h_max_nm, int count, const std::string& grid_spec,
               const std::string& out_dir) {
    std::optional<ThicknessModel> model;
    try {
        model = read_thickness_model(fs::path(model_path));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }

    ContactConfig cfg;
    FrequencyGrid grid;
    try {
        cfg = read_contact_config(fs::path(config_path));
        grid = parse_grid(grid_spec);
        if (count < 1 || !(h_min_nm > 0.0) || !(h_max_nm > h_min_nm))
            throw parse_error("family needs 0 < --h-min-nm < --h-max-nm and --h-count >= 1");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    std::vector<double> h_grid;
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
        h_grid.push_back(1e-9 * h_min_nm * std::pow(h_max_nm / h_min_nm, t));
    }

    try {
        const BallOnDiscGeometry geom = geometry_from_config(cfg);
        const BallOnDiscModel contact =
            BallOnDiscModel::make(geom, h_grid.front(), alpha, cfg.r0_ohm);
        const auto family = model_response_family(*model, contact, h_grid, grid);

        fs::create_directories(out_dir);
        std::size_t written = 0;
        for (std::size_t i = 0; i < family.size(); ++i) {
            const auto& entry = family[i];
            if (!entry.spectrum) {
                std::cerr << "h = " << entry.h_m * 1e9 << " nm skipped: " << entry.error << "\n";
                continue;
            }
            char name[64];
            std::snprintf(name, sizeof(name), "family_%02zu_h%gnm.csv", i, entry.h_m * 1e9);
            const fs::path out = fs::path(out_dir) / name;
            write_spectrum_csv(out, *entry.spectrum);
            std::printf("%.10g,%s,%s\n", entry.h_m * 1e9, out.string().c_str(),
                        entry.within_calibration ? "calibrated" : "extrapolated");
            ++written;
        }
        if (written == 0) {
            std::cerr << "model validity error: no film thickness in the grid is representable\n";
            return exit_model_validity;
        }
    } catch (const model_validity_error& e) {
        std::cerr << "model validity error: " << e.what() << "\n";
        return exit_model_validity;
    } catch (const std::invalid_argument& e) {
        std::cerr << "model validity error: " << e.what() << "\n";
        return exit_model_validity;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input_failure;
    }
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"equivalent-circuit impedance analysis for lubricated contacts"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate",
                                   "synthesize a contact spectrum from a geometry config");
    std::string sim_config, sim_out, sim_grid = "1,1e6,10";
    double sim_film_nm = 100.0, sim_alpha = 0.0, sim_noise = 0.0;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", sim_config, "geometry/material config file")->required();
    sim->add_option("--out", sim_out, "output spectrum CSV")->required();
    sim->add_option("--film-nm", sim_film_nm, "central film thickness, nm")->capture_default_str();
    sim->add_option("--alpha", sim_alpha, "breakdown ratio in [0, 1]")->capture_default_str();
    sim->add_option("--grid", sim_grid, "frequency grid lo_hz,hi_hz,points_per_decade")->capture_default_str();
    sim->add_option("--noise", sim_noise, "multiplicative noise sigma")->capture_default_str();
    sim->add_option("--seed", sim_seed, "noise generator seed")->capture_default_str();

    // fit
    auto* fit = app.add_subcommand("fit", "fit circuit models to spectrum CSVs");
    std::vector<std::string> fit_inputs;
    std::string fit_model_name = "rc", fit_weighting = "modulus", fit_out;
    double fit_r0 = 10.0;
    fit->add_option("inputs", fit_inputs, "spectrum CSV files")->required();
    fit->add_option("--model", fit_model_name, "circuit model: rc, rc+r, rc+w")->capture_default_str();
    fit->add_option("--weighting", fit_weighting, "residual weighting: modulus, proportional, unit")->capture_default_str();
    fit->add_option("--r0", fit_r0, "stationary contact resistance, ohm")->capture_default_str();
    fit->add_option("--out", fit_out, "fit report CSV (stdout when omitted)");

    // bode / nyquist
    auto* bode = app.add_subcommand("bode", "export a Bode table (and optional SVG)");
    std::string bode_in, bode_out;
    bool bode_svg_flag = false;
    bode->add_option("input", bode_in, "spectrum CSV")->required();
    bode->add_option("--out", bode_out, "output table CSV")->required();
    bode->add_flag("--svg", bode_svg_flag, "also write an SVG plot next to the table");

    auto* nyq = app.add_subcommand("nyquist", "export a Nyquist table (and optional SVG)");
    std::string nyq_in, nyq_out;
    bool nyq_svg_flag = false;
    nyq->add_option("input", nyq_in, "spectrum CSV")->required();
    nyq->add_option("--out", nyq_out, "output table CSV")->required();
    nyq->add_flag("--svg", nyq_svg_flag, "also write an SVG plot next to the table");

    // calibrate
    auto* cal = app.add_subcommand("calibrate",
                                   "join fitted (R, C) rows with interferometry films and build "
                                   "the thickness model");
    std::string cal_fits, cal_utfi, cal_out, cal_merged;
    double cal_factor = material_conversion_factor(2.26e11, 1.17e11);
    double cal_r0 = 10.0, cal_threshold = 0.0;
    cal->add_option("--fits", cal_fits, "fitted RC dataset CSV")->required();
    cal->add_option("--utfi", cal_utfi, "interferometry dataset CSV")->required();
    cal->add_option("--out", cal_out, "output thickness model file")->required();
    cal->add_option("--factor", cal_factor, "film transfer factor (default steel/steel over steel/glass)")->capture_default_str();
    cal->add_option("--r0", cal_r0, "stationary contact resistance, ohm")->capture_default_str();
    cal->add_option("--threshold-ohm", cal_threshold, "breakdown threshold override, ohm")->capture_default_str();
    cal->add_option("--merged-out", cal_merged, "also write the joined calibration dataset CSV");

    // thickness
    auto* thick = app.add_subcommand("thickness", "query a thickness model at (R, C)");
    std::string thick_model;
    double thick_r = 0.0, thick_c = 0.0;
    thick->add_option("model", thick_model, "thickness model file")->required();
    thick->add_option("--r", thick_r, "measured resistance, ohm")->required();
    thick->add_option("--c", thick_c, "measured capacitance, farad")->required();

    // family
    auto* fam = app.add_subcommand("family",
                                   "frequency-response family over a film-thickness range");
    std::string fam_model, fam_config, fam_grid = "1,1e6,10", fam_dir = ".";
    double fam_alpha = 0.0, fam_hmin = 0.1, fam_hmax = 1000.0;
    int fam_count = 9;
    fam->add_option("--model", fam_model, "thickness model file")->required();
    fam->add_option("--config", fam_config, "geometry/material config file")->required();
    fam->add_option("--alpha", fam_alpha, "breakdown ratio in [0, 1]")->capture_default_str();
    fam->add_option("--h-min-nm", fam_hmin, "smallest film, nm")->capture_default_str();
    fam->add_option("--h-max-nm", fam_hmax, "largest film, nm")->capture_default_str();
    fam->add_option("--h-count", fam_count, "number of log-spaced films")->capture_default_str();
    fam->add_option("--grid", fam_grid, "frequency grid lo_hz,hi_hz,points_per_decade")->capture_default_str();
    fam->add_option("--out-dir", fam_dir, "directory for the spectrum CSVs")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return exit_config_error;
    }

    if (sim->parsed())
        return cmd_simulate(sim_config, sim_out, sim_film_nm, sim_alpha, sim_grid, sim_noise,
                            sim_seed);
    if (fit->parsed()) return cmd_fit(fit_inputs, fit_model_name, fit_weighting, fit_r0, fit_out);
    if (bode->parsed()) return cmd_bode_nyquist(true, bode_in, bode_out, bode_svg_flag);
    if (nyq->parsed()) return cmd_bode_nyquist(false, nyq_in, nyq_out, nyq_svg_flag);
    if (cal->parsed())
        return cmd_calibrate(cal_fits, cal_utfi, cal_out, cal_factor, cal_r0, cal_threshold,
                             cal_merged);
    if (thick->parsed()) return cmd_thickness(thick_model, thick_r, thick_c);
    if (fam->parsed())
        return cmd_family(fam_model, fam_config, fam_alpha, fam_hmin, fam_hmax, fam_count,
                          fam_grid, fam_dir);
    return exit_config_error;
}
