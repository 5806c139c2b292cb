#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eistrib/circuit.hpp"

namespace eistrib {

namespace detail {

struct Axis {
    double lo = 0.0, hi = 1.0;   // data range
    double px_lo = 0.0, px_hi = 1.0; // pixel range

    double map(double v) const {
        if (hi == lo) return 0.5 * (px_lo + px_hi);
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

inline std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

inline void polyline(std::ostream& out, const std::vector<std::pair<double, double>>& px,
                     const char* color) {
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : px) out << fmt_px(x) << ',' << fmt_px(y) << ' ';
    out << "\"/>\n";
}

inline void frame(std::ostream& out, double x0, double y0, double x1, double y1) {
    out << "<rect x=\"" << fmt_px(x0) << "\" y=\"" << fmt_px(y0) << "\" width=\""
        << fmt_px(x1 - x0) << "\" height=\"" << fmt_px(y1 - y0)
        << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
}

inline void text(std::ostream& out, double x, double y, const std::string& s,
                 const char* anchor = "middle", int size = 11) {
    out << "<text x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y) << "\" font-size=\"" << size
        << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

// decade tick positions covering [lo, hi] in log10 units
inline std::vector<double> decade_ticks(double log_lo, double log_hi) {
    std::vector<double> ticks;
    for (double d = std::ceil(log_lo - 1e-9); d <= log_hi + 1e-9; d += 1.0) ticks.push_back(d);
    return ticks;
}

} // namespace detail

/// Static Bode plot: log-frequency magnitude panel on top, phase panel
/// below. Returns a complete standalone SVG document.
inline std::string bode_svg(const std::vector<BodePoint>& table) {
    if (table.empty()) throw std::invalid_argument("bode_svg: empty table");
    const double width = 720, height = 560;
    const double left = 80, right = width - 30;
    const double mag_top = 40, mag_bot = 270, ph_top = 320, ph_bot = 520;

    double lf_lo = std::log10(table.front().freq_hz), lf_hi = lf_lo;
    double lm_lo = 0.0, lm_hi = 0.0;
    bool first_mag = true;
    double ph_lo = -90.0, ph_hi = 0.0;
    for (const auto& p : table) {
        const double lf = std::log10(p.freq_hz);
        lf_lo = std::min(lf_lo, lf);
        lf_hi = std::max(lf_hi, lf);
        if (p.magnitude_ohm > 0.0) {
            const double lm = std::log10(p.magnitude_ohm);
            if (first_mag) {
                lm_lo = lm_hi = lm;
                first_mag = false;
            }
            lm_lo = std::min(lm_lo, lm);
            lm_hi = std::max(lm_hi, lm);
        }
        ph_lo = std::min(ph_lo, p.phase_deg);
        ph_hi = std::max(ph_hi, p.phase_deg);
    }
    if (lf_hi == lf_lo) lf_hi = lf_lo + 1.0;
    if (lm_hi == lm_lo) lm_hi = lm_lo + 1.0;
    lm_lo = std::floor(lm_lo);
    lm_hi = std::ceil(lm_hi);

    detail::Axis fx{lf_lo, lf_hi, left, right};
    detail::Axis my{lm_lo, lm_hi, mag_bot, mag_top};
    detail::Axis py{ph_lo, ph_hi, ph_bot, ph_top};

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    detail::text(out, width / 2, 22, "Bode diagram", "middle", 14);

    for (int panel = 0; panel < 2; ++panel) {
        const double top = panel == 0 ? mag_top : ph_top;
        const double bot = panel == 0 ? mag_bot : ph_bot;
        detail::frame(out, left, top, right, bot);
        for (double t : detail::decade_ticks(lf_lo, lf_hi)) {
            const double x = fx.map(t);
            out << "<line x1=\"" << detail::fmt_px(x) << "\" y1=\"" << detail::fmt_px(top)
                << "\" x2=\"" << detail::fmt_px(x) << "\" y2=\"" << detail::fmt_px(bot)
                << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
            detail::text(out, x, bot + 16, "1e" + detail::fmt_tick(t));
        }
    }
    for (double t : detail::decade_ticks(lm_lo, lm_hi)) {
        detail::text(out, left - 8, my.map(t) + 4, "1e" + detail::fmt_tick(t), "end");
    }
    for (double t : {ph_lo, 0.5 * (ph_lo + ph_hi), ph_hi}) {
        detail::text(out, left - 8, py.map(t) + 4, detail::fmt_tick(t), "end");
    }
    detail::text(out, left, mag_top - 8, "|Z| (ohm)", "start");
    detail::text(out, left, ph_top - 8, "phase (deg)", "start");
    detail::text(out, (left + right) / 2, height - 12, "frequency (Hz)");

    std::vector<std::pair<double, double>> mag_px, ph_px;
    for (const auto& p : table) {
        const double x = fx.map(std::log10(p.freq_hz));
        if (p.magnitude_ohm > 0.0) mag_px.emplace_back(x, my.map(std::log10(p.magnitude_ohm)));
        ph_px.emplace_back(x, py.map(p.phase_deg));
    }
    detail::polyline(out, mag_px, "#1f77b4");
    detail::polyline(out, ph_px, "#d62728");
    out << "</svg>\n";
    return out.str();
}

/// Static Nyquist plot (real vs negated imaginary part), square aspect.
inline std::string nyquist_svg(const std::vector<NyquistPoint>& table) {
    if (table.empty()) throw std::invalid_argument("nyquist_svg: empty table");
    const double width = 540, height = 540;
    const double left = 80, right = width - 30, top = 40, bot = height - 60;

    double re_lo = table.front().real_ohm, re_hi = re_lo;
    double im_lo = table.front().neg_imag_ohm, im_hi = im_lo;
    for (const auto& p : table) {
        re_lo = std::min(re_lo, p.real_ohm);
        re_hi = std::max(re_hi, p.real_ohm);
        im_lo = std::min(im_lo, p.neg_imag_ohm);
        im_hi = std::max(im_hi, p.neg_imag_ohm);
    }
    // equal scale on both axes (impedance plane)
    const double span = std::max({re_hi - re_lo, im_hi - im_lo, 1e-300});
    const double re_mid = 0.5 * (re_lo + re_hi), im_mid = 0.5 * (im_lo + im_hi);
    detail::Axis ax{re_mid - 0.55 * span, re_mid + 0.55 * span, left, right};
    detail::Axis ay{im_mid - 0.55 * span, im_mid + 0.55 * span, bot, top};

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    detail::text(out, width / 2, 22, "Nyquist diagram", "middle", 14);
    detail::frame(out, left, top, right, bot);
    detail::text(out, (left + right) / 2, height - 16, "Re Z (ohm)");
    detail::text(out, left, top - 8, "-Im Z (ohm)", "start");
    for (double t : {ax.lo, ax.hi}) detail::text(out, ax.map(t), bot + 16, detail::fmt_tick(t));
    for (double t : {ay.lo, ay.hi}) detail::text(out, left - 8, ay.map(t) + 4, detail::fmt_tick(t), "end");

    std::vector<std::pair<double, double>> px;
    for (const auto& p : table) px.emplace_back(ax.map(p.real_ohm), ay.map(p.neg_imag_ohm));
    detail::polyline(out, px, "#1f77b4");
    for (const auto& [x, y] : px) {
        out << "<circle cx=\"" << detail::fmt_px(x) << "\" cy=\"" << detail::fmt_px(y)
            << "\" r=\"2\" fill=\"#1f77b4\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace eistrib
