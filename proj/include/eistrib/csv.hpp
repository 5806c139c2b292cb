#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eistrib/calibration.hpp"
#include "eistrib/errors.hpp"
#include "eistrib/fit.hpp"
#include "eistrib/spectrum.hpp"

namespace eistrib {

namespace detail {

/// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            fields.emplace_back(trim(line.substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

inline double parse_double(const std::string& field, std::size_t line_no) {
    if (field.empty()) throw parse_error("empty numeric field", line_no);
    const char* begin = field.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + field.size())
        throw parse_error("malformed number '" + field + "'", line_no);
    return v;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open '" + path.string() + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

inline std::vector<std::string> read_lines(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    // ignore trailing blank lines
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    return lines;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Spectrum CSV: header `freq_hz,z_real_ohm,z_imag_ohm`. The polar form
// `freq_hz,z_mag_ohm,z_phase_deg` is accepted on read. Values are written
// with 17 significant digits so the round trip is lossless.
// ---------------------------------------------------------------------------

inline constexpr const char* spectrum_csv_header = "freq_hz,z_real_ohm,z_imag_ohm";
inline constexpr const char* spectrum_polar_csv_header = "freq_hz,z_mag_ohm,z_phase_deg";

inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << spectrum_csv_header << "\n";
    for (const auto& sample : s.samples) {
        out << detail::format_double(sample.freq_hz) << ','
            << detail::format_double(sample.z.real()) << ','
            << detail::format_double(sample.z.imag()) << "\n";
    }
}

inline void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& s) {
    auto out = detail::open_output(path);
    write_spectrum_csv(out, s);
}

inline Spectrum read_spectrum_csv(std::istream& in) {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw parse_error("spectrum file is empty");
    const std::string header{detail::trim(lines[0])};
    const bool polar = header == spectrum_polar_csv_header;
    if (!polar && header != spectrum_csv_header)
        throw parse_error("unrecognized spectrum header '" + header + "'", 1);

    std::vector<SpectrumSample> samples;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_csv(lines[i]);
        if (fields.size() != 3)
            throw parse_error("expected 3 comma-separated fields", i + 1);
        const double f = detail::parse_double(fields[0], i + 1);
        const double a = detail::parse_double(fields[1], i + 1);
        const double b = detail::parse_double(fields[2], i + 1);
        if (polar) {
            const double phi = b * pi / 180.0;
            samples.push_back({f, Complex{a * std::cos(phi), a * std::sin(phi)}});
        } else {
            samples.push_back({f, Complex{a, b}});
        }
    }
    if (samples.empty()) throw parse_error("spectrum file has no samples");
    try {
        return make_spectrum(std::move(samples));
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }
}

inline Spectrum read_spectrum_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_spectrum_csv(in);
    } catch (parse_error& e) {
        throw parse_error(path.string() + ": " + e.what(), 0);
    }
}

// ---------------------------------------------------------------------------
// Bode / Nyquist tables.
// ---------------------------------------------------------------------------

inline constexpr const char* bode_csv_header = "freq_hz,z_mag_ohm,z_phase_deg";
inline constexpr const char* nyquist_csv_header = "z_real_ohm,z_neg_imag_ohm";

inline void write_bode_csv(std::ostream& out, const std::vector<BodePoint>& table) {
    out << bode_csv_header << "\n";
    for (const auto& p : table) {
        out << detail::format_double(p.freq_hz) << ',' << detail::format_double(p.magnitude_ohm)
            << ',' << detail::format_double(p.phase_deg) << "\n";
    }
}

inline void write_nyquist_csv(std::ostream& out, const std::vector<NyquistPoint>& table) {
    out << nyquist_csv_header << "\n";
    for (const auto& p : table) {
        out << detail::format_double(p.real_ohm) << ','
            << detail::format_double(p.neg_imag_ohm) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Calibration dataset CSV: `temperature_c,speed_mm_s,load_n,r_ohm,c_farad,h_nm`.
// Thickness is stored in nanometres.
// ---------------------------------------------------------------------------

inline constexpr const char* calibration_csv_header =
    "temperature_c,speed_mm_s,load_n,r_ohm,c_farad,h_nm";

inline void write_calibration_csv(std::ostream& out,
                                  const std::vector<CalibrationRecord>& records) {
    out << calibration_csv_header << "\n";
    for (const auto& rec : records) {
        out << detail::format_double(rec.op.temperature_c) << ','
            << detail::format_double(rec.op.speed_mm_s) << ','
            << detail::format_double(rec.op.load_n) << ','
            << detail::format_double(rec.r_ohm) << ','
            << detail::format_double(rec.c_farad) << ','
            << detail::format_double(rec.h_m * 1e9) << "\n";
    }
}

inline void write_calibration_csv(const std::filesystem::path& path,
                                  const std::vector<CalibrationRecord>& records) {
    auto out = detail::open_output(path);
    write_calibration_csv(out, records);
}

inline std::vector<CalibrationRecord> read_calibration_csv(std::istream& in) {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw parse_error("calibration file is empty");
    if (detail::trim(lines[0]) != calibration_csv_header)
        throw parse_error("unrecognized calibration header", 1);
    std::vector<CalibrationRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_csv(lines[i]);
        if (fields.size() != 6) throw parse_error("expected 6 fields", i + 1);
        CalibrationRecord rec;
        rec.op.temperature_c = detail::parse_double(fields[0], i + 1);
        rec.op.speed_mm_s = detail::parse_double(fields[1], i + 1);
        rec.op.load_n = detail::parse_double(fields[2], i + 1);
        rec.r_ohm = detail::parse_double(fields[3], i + 1);
        rec.c_farad = detail::parse_double(fields[4], i + 1);
        rec.h_m = detail::parse_double(fields[5], i + 1) / 1e9; // exact inverse of the writer
        try {
            rec.validate();
        } catch (const std::invalid_argument& e) {
            throw parse_error(e.what(), i + 1);
        }
        records.push_back(rec);
    }
    return records;
}

inline std::vector<CalibrationRecord> read_calibration_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_calibration_csv(in);
}

// ---------------------------------------------------------------------------
// Fitted RC dataset (input to calibration): one fitted circuit per
// operating point, `temperature_c,speed_mm_s,load_n,r_ohm,c_farad`.
// ---------------------------------------------------------------------------

inline constexpr const char* fitted_rc_csv_header =
    "temperature_c,speed_mm_s,load_n,r_ohm,c_farad";

inline std::vector<std::pair<OperatingPoint, FitResult>> read_fitted_rc_csv(std::istream& in) {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw parse_error("fitted-RC file is empty");
    if (detail::trim(lines[0]) != fitted_rc_csv_header)
        throw parse_error("unrecognized fitted-RC header", 1);
    std::vector<std::pair<OperatingPoint, FitResult>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_csv(lines[i]);
        if (fields.size() != 5) throw parse_error("expected 5 fields", i + 1);
        OperatingPoint op;
        op.temperature_c = detail::parse_double(fields[0], i + 1);
        op.speed_mm_s = detail::parse_double(fields[1], i + 1);
        op.load_n = detail::parse_double(fields[2], i + 1);
        FitResult fit;
        fit.model = ModelKind::ParallelRC;
        fit.r1_ohm = detail::parse_double(fields[3], i + 1);
        fit.c1_farad = detail::parse_double(fields[4], i + 1);
        fit.converged = true;
        rows.emplace_back(op, fit);
    }
    return rows;
}

inline std::vector<std::pair<OperatingPoint, FitResult>>
read_fitted_rc_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_fitted_rc_csv(in);
}

inline void write_fitted_rc_csv(std::ostream& out,
                                const std::vector<std::pair<OperatingPoint, FitResult>>& rows) {
    out << fitted_rc_csv_header << "\n";
    for (const auto& [op, fit] : rows) {
        out << detail::format_double(op.temperature_c) << ','
            << detail::format_double(op.speed_mm_s) << ','
            << detail::format_double(op.load_n) << ','
            << detail::format_double(fit.r1_ohm) << ','
            << detail::format_double(fit.c1_farad) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Interferometry dataset: `temperature_c,speed_mm_s,load_n,h_utfi_nm`.
// ---------------------------------------------------------------------------

inline constexpr const char* utfi_csv_header = "temperature_c,speed_mm_s,load_n,h_utfi_nm";

inline std::vector<UtfiSample> read_utfi_csv(std::istream& in) {
    const auto lines = detail::read_lines(in);
    if (lines.empty()) throw parse_error("interferometry file is empty");
    if (detail::trim(lines[0]) != utfi_csv_header)
        throw parse_error("unrecognized interferometry header", 1);
    std::vector<UtfiSample> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_csv(lines[i]);
        if (fields.size() != 4) throw parse_error("expected 4 fields", i + 1);
        UtfiSample row;
        row.op.temperature_c = detail::parse_double(fields[0], i + 1);
        row.op.speed_mm_s = detail::parse_double(fields[1], i + 1);
        row.op.load_n = detail::parse_double(fields[2], i + 1);
        row.h_utfi_m = detail::parse_double(fields[3], i + 1) / 1e9;
        if (!(row.h_utfi_m > 0.0)) throw parse_error("film thickness must be > 0", i + 1);
        rows.push_back(row);
    }
    return rows;
}

inline std::vector<UtfiSample> read_utfi_csv(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    return read_utfi_csv(in);
}

inline void write_utfi_csv(std::ostream& out, const std::vector<UtfiSample>& rows) {
    out << utfi_csv_header << "\n";
    for (const auto& row : rows) {
        out << detail::format_double(row.op.temperature_c) << ','
            << detail::format_double(row.op.speed_mm_s) << ','
            << detail::format_double(row.op.load_n) << ','
            << detail::format_double(row.h_utfi_m * 1e9) << "\n";
    }
}

// ---------------------------------------------------------------------------
// Fit report: one row per input spectrum,
// `file,model,r1_ohm,c1_farad,r2_ohm,aw,residual_norm,iterations,converged,regime`.
// Failed inputs produce a row with model "error" and empty numeric fields.
// ---------------------------------------------------------------------------

inline constexpr const char* fit_report_header =
    "file,model,r1_ohm,c1_farad,r2_ohm,aw,residual_norm,iterations,converged,regime";

struct FitReportRow {
    std::string file;
    std::optional<FitResult> fit;
    std::optional<LubricationRegime> regime;
    std::string error;
};

inline void write_fit_report(std::ostream& out, const std::vector<FitReportRow>& rows) {
    out << fit_report_header << "\n";
    for (const auto& row : rows) {
        if (!row.fit) {
            out << row.file << ",error,,,,,,,false,\n";
            continue;
        }
        const FitResult& fit = *row.fit;
        out << row.file << ',' << model_name(fit.model) << ','
            << detail::format_double(fit.r1_ohm) << ',' << detail::format_double(fit.c1_farad)
            << ',' << (fit.r2_ohm ? detail::format_double(*fit.r2_ohm) : "") << ','
            << (fit.aw ? detail::format_double(*fit.aw) : "") << ','
            << detail::format_double(fit.residual_norm) << ',' << fit.iterations << ','
            << (fit.converged ? "true" : "false") << ','
            << (row.regime ? regime_name(*row.regime) : "") << "\n";
    }
}

// ---------------------------------------------------------------------------
// Contact geometry and material configuration: flat key-value text with
// exactly the keys below. Unknown keys are rejected.
// ---------------------------------------------------------------------------

struct ContactConfig {
    double ball_radius_m = 0.0;
    double load_n = 0.0;
    double reduced_modulus_pa = 0.0;
    double epsilon_r = 0.0;
    double r0_ohm = 0.0;
};

inline ContactConfig read_contact_config(std::istream& in) {
    ContactConfig cfg;
    bool seen[5] = {false, false, false, false, false};
    static constexpr const char* keys[5] = {"ball_radius_m", "load_n", "reduced_modulus_pa",
                                            "epsilon_r", "r0_ohm"};
    double* slots[5] = {&cfg.ball_radius_m, &cfg.load_n, &cfg.reduced_modulus_pa, &cfg.epsilon_r,
                        &cfg.r0_ohm};

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        // accept `key = value` and `key value`
        std::size_t split = line.find('=');
        if (split == std::string_view::npos) split = line.find_first_of(" \t");
        if (split == std::string_view::npos)
            throw parse_error("expected 'key = value'", line_no);
        const std::string key{detail::trim(line.substr(0, split))};
        const std::string value{detail::trim(line.substr(split + 1))};

        int idx = -1;
        for (int k = 0; k < 5; ++k)
            if (key == keys[k]) idx = k;
        if (idx < 0) throw parse_error("unknown key '" + key + "'", line_no);
        if (seen[idx]) throw parse_error("duplicate key '" + key + "'", line_no);
        seen[idx] = true;
        *slots[idx] = detail::parse_double(value, line_no);
        if (!(*slots[idx] > 0.0))
            throw parse_error("key '" + key + "' must be > 0", line_no);
    }
    for (int k = 0; k < 5; ++k)
        if (!seen[k]) throw parse_error(std::string("missing key '") + keys[k] + "'");
    return cfg;
}

inline ContactConfig read_contact_config(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_contact_config(in);
    } catch (parse_error& e) {
        throw parse_error(path.string() + ": " + e.what(), 0);
    }
}

// ---------------------------------------------------------------------------
// Thickness model file: versioned text format.
//
//   eis-thickness-model v1
//   threshold_ohm,<value>
//   <log10_c_farad>,<log10_h_m>
//   ...
// ---------------------------------------------------------------------------

inline constexpr const char* thickness_model_magic = "eis-thickness-model v1";

inline void write_thickness_model(std::ostream& out, const ThicknessModel& m) {
    out << thickness_model_magic << "\n";
    out << "threshold_ohm," << detail::format_double(m.breakdown_r_threshold_ohm()) << "\n";
    for (const auto& knot : m.knots()) {
        out << detail::format_double(knot.log10_c_farad) << ','
            << detail::format_double(knot.log10_h_m) << "\n";
    }
}

inline void write_thickness_model(const std::filesystem::path& path, const ThicknessModel& m) {
    auto out = detail::open_output(path);
    write_thickness_model(out, m);
}

inline ThicknessModel read_thickness_model(std::istream& in) {
    const auto lines = detail::read_lines(in);
    if (lines.size() < 2 || detail::trim(lines[0]) != thickness_model_magic)
        throw parse_error("not an eis-thickness-model v1 file", 1);
    const auto threshold_fields = detail::split_csv(lines[1]);
    if (threshold_fields.size() != 2 || threshold_fields[0] != "threshold_ohm")
        throw parse_error("expected 'threshold_ohm,<value>'", 2);
    const double threshold = detail::parse_double(threshold_fields[1], 2);

    std::vector<ThicknessKnot> knots;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split_csv(lines[i]);
        if (fields.size() != 2) throw parse_error("expected 2 fields per knot", i + 1);
        knots.push_back({detail::parse_double(fields[0], i + 1),
                         detail::parse_double(fields[1], i + 1)});
    }
    try {
        return ThicknessModel::from_knots(std::move(knots), threshold);
    } catch (const model_build_error& e) {
        throw parse_error(e.what());
    }
}

inline ThicknessModel read_thickness_model(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_thickness_model(in);
    } catch (parse_error& e) {
        throw parse_error(path.string() + ": " + e.what(), 0);
    }
}

} // namespace eistrib
