#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eistrib {

using Complex = std::complex<double>;

/// Steady-state operating condition a spectrum was captured under.
struct OperatingPoint {
    double temperature_c = 0.0;
    double speed_mm_s = 0.0; // entrainment speed U
    double load_n = 0.0;     // applied load W

    void validate() const {
        if (speed_mm_s < 0.0) throw std::invalid_argument("operating point: speed must be >= 0");
        if (!(load_n > 0.0)) throw std::invalid_argument("operating point: load must be > 0");
    }
};

enum class GridSpacing { Logarithmic, Linear, Explicit };

/// Admissible frequency window. Defaults to the instrument's sweep range
/// (10 uHz to 2 MHz); pass a wider window to the grid factories to override.
struct FrequencyLimits {
    double lo_hz = 1e-5;
    double hi_hz = 2e6;
};

/// Strictly monotone list of frequencies in hertz, ascending or descending.
struct FrequencyGrid {
    std::vector<double> points_hz;
    GridSpacing spacing = GridSpacing::Explicit;

    std::size_t size() const { return points_hz.size(); }
    bool empty() const { return points_hz.empty(); }
};

namespace detail {

inline void validate_grid_points(const std::vector<double>& pts, const FrequencyLimits& limits) {
    if (pts.empty()) throw std::invalid_argument("frequency grid must be non-empty");
    bool ascending = true, descending = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!(pts[i] > 0.0) || !std::isfinite(pts[i]))
            throw std::invalid_argument("frequency grid: all points must be finite and > 0");
        if (pts[i] < limits.lo_hz || pts[i] > limits.hi_hz)
            throw std::invalid_argument("frequency grid: point " + std::to_string(pts[i]) +
                                        " Hz outside limits [" + std::to_string(limits.lo_hz) +
                                        ", " + std::to_string(limits.hi_hz) + "] Hz");
        if (i > 0) {
            if (pts[i] <= pts[i - 1]) ascending = false;
            if (pts[i] >= pts[i - 1]) descending = false;
        }
    }
    if (pts.size() > 1 && !ascending && !descending)
        throw std::invalid_argument("frequency grid: points must be strictly monotone");
}

} // namespace detail

/// Logarithmic grid from f_lo to f_hi with the given number of points per
/// decade (descending when f_lo > f_hi). Endpoints are included.
inline FrequencyGrid make_log_grid(double f_lo_hz, double f_hi_hz, int points_per_decade,
                                   const FrequencyLimits& limits = {}) {
    if (points_per_decade < 1) throw std::invalid_argument("points per decade must be >= 1");
    if (!(f_lo_hz > 0.0) || !(f_hi_hz > 0.0) || f_lo_hz == f_hi_hz)
        throw std::invalid_argument("log grid endpoints must be positive and distinct");
    const double lg_lo = std::log10(f_lo_hz);
    const double lg_hi = std::log10(f_hi_hz);
    const double decades = std::abs(lg_hi - lg_lo);
    const auto n = static_cast<std::size_t>(std::lround(decades * points_per_decade)) + 1;
    FrequencyGrid grid;
    grid.spacing = GridSpacing::Logarithmic;
    grid.points_hz.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        double f = std::pow(10.0, lg_lo + t * (lg_hi - lg_lo));
        // keep endpoints exact
        if (i == 0) f = f_lo_hz;
        if (i == n - 1) f = f_hi_hz;
        grid.points_hz.push_back(f);
    }
    detail::validate_grid_points(grid.points_hz, limits);
    return grid;
}

/// Linear grid with n equally spaced points, endpoints included.
inline FrequencyGrid make_linear_grid(double f_lo_hz, double f_hi_hz, std::size_t n,
                                      const FrequencyLimits& limits = {}) {
    if (n < 2) throw std::invalid_argument("linear grid needs >= 2 points");
    FrequencyGrid grid;
    grid.spacing = GridSpacing::Linear;
    grid.points_hz.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        grid.points_hz.push_back(f_lo_hz + t * (f_hi_hz - f_lo_hz));
    }
    detail::validate_grid_points(grid.points_hz, limits);
    return grid;
}

/// Grid from explicit points (must already be strictly monotone).
inline FrequencyGrid make_explicit_grid(std::vector<double> points_hz,
                                        const FrequencyLimits& limits = {}) {
    detail::validate_grid_points(points_hz, limits);
    return FrequencyGrid{std::move(points_hz), GridSpacing::Explicit};
}

/// Default measurement grid: 1 Hz to 1 MHz, 10 points per decade.
inline FrequencyGrid default_grid() { return make_log_grid(1.0, 1e6, 10); }

/// One impedance sample of a swept measurement.
struct SpectrumSample {
    double freq_hz = 0.0;
    Complex z; // ohms
};

/// Ordered impedance spectrum with optional acquisition metadata.
/// Frequencies are strictly monotone (ascending or descending) by
/// construction.
struct Spectrum {
    std::vector<SpectrumSample> samples;
    std::optional<OperatingPoint> meta;
    std::optional<double> amplitude_mv;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

/// Validating constructor for sample sets coming from files or callers.
inline Spectrum make_spectrum(std::vector<SpectrumSample> samples,
                              std::optional<OperatingPoint> meta = std::nullopt,
                              std::optional<double> amplitude_mv = std::nullopt) {
    if (samples.empty()) throw std::invalid_argument("spectrum must contain at least one sample");
    bool ascending = true, descending = true;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i].freq_hz > 0.0) || !std::isfinite(samples[i].freq_hz))
            throw std::invalid_argument("spectrum: frequencies must be finite and > 0");
        if (i > 0) {
            if (samples[i].freq_hz <= samples[i - 1].freq_hz) ascending = false;
            if (samples[i].freq_hz >= samples[i - 1].freq_hz) descending = false;
        }
    }
    if (samples.size() > 1 && !ascending && !descending)
        throw std::invalid_argument("spectrum: frequencies must be strictly monotone");
    if (amplitude_mv && !(*amplitude_mv > 0.0))
        throw std::invalid_argument("spectrum: amplitude must be > 0 mV");
    if (meta) meta->validate();
    return Spectrum{std::move(samples), meta, amplitude_mv};
}

/// Multiplicative complex noise level for synthetic spectra.
struct NoiseSpec {
    double sigma = 0.0; // standard deviation of each quadrature, relative to |z|

    void validate() const {
        if (sigma < 0.0 || !std::isfinite(sigma))
            throw std::invalid_argument("noise sigma must be finite and >= 0");
    }
};

} // namespace eistrib
