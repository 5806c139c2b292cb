#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eistrib/circuit.hpp"
#include "eistrib/contact.hpp"
#include "eistrib/ehd.hpp"
#include "eistrib/errors.hpp"
#include "eistrib/fit.hpp"
#include "eistrib/spectrum.hpp"

namespace eistrib {

/// One joined row of the calibration dataset: fitted (R, C) plus the
/// interferometry film thickness transferred to the tribometer material
/// pair. Boundary-regime rows carry h as a flagged lower bound.
struct CalibrationRecord {
    OperatingPoint op;
    double r_ohm = 0.0;
    double c_farad = 0.0;
    double h_m = 0.0;
    bool boundary_lower_bound = false;

    void validate() const {
        op.validate();
        if (!(r_ohm > 0.0) || !(c_farad > 0.0) || !(h_m > 0.0))
            throw std::invalid_argument("calibration record: r, c, h must be > 0");
    }
};

/// Interferometry-side measurement at an operating point.
struct UtfiSample {
    OperatingPoint op;
    double h_utfi_m = 0.0;
};

struct JoinTolerances {
    double temperature_c = 0.5; // absolute
    double speed_rel = 0.01;
    double load_rel = 0.01;
};

namespace detail {

inline bool rel_close(double a, double b, double rel_tol) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return true;
    return std::abs(a - b) <= rel_tol * scale;
}

inline bool same_operating_point(const OperatingPoint& a, const OperatingPoint& b,
                                 const JoinTolerances& tol) {
    return std::abs(a.temperature_c - b.temperature_c) <= tol.temperature_c &&
           rel_close(a.speed_mm_s, b.speed_mm_s, tol.speed_rel) &&
           rel_close(a.load_n, b.load_n, tol.load_rel);
}

inline std::string describe_op(const OperatingPoint& op) {
    std::ostringstream s;
    s << "(T=" << op.temperature_c << " C, U=" << op.speed_mm_s << " mm/s, W=" << op.load_n
      << " N)";
    return s.str();
}

} // namespace detail

/// Inner join of fit results and interferometry rows on operating point.
/// Unmatched rows are reported by index, never silently dropped.
struct MergeOutcome {
    std::vector<CalibrationRecord> records;
    std::vector<std::size_t> unmatched_fits;
    std::vector<std::size_t> unmatched_utfi;
};

/// Join fitted (R, C) rows with interferometry film thickness at matching
/// operating points and apply the material transfer factor:
/// h = factor * h_utfi. Throws join_error when any row matches more than
/// one candidate within tolerance.
inline MergeOutcome merge_datasets(const std::vector<std::pair<OperatingPoint, FitResult>>& fits,
                                   const std::vector<UtfiSample>& utfi, double factor,
                                   const JoinTolerances& tol = {}) {
    if (!(factor > 0.0)) throw std::invalid_argument("merge_datasets: factor must be > 0");

    std::vector<std::ptrdiff_t> match_of_fit(fits.size(), -1);
    std::vector<std::ptrdiff_t> match_of_utfi(utfi.size(), -1);

    for (std::size_t i = 0; i < fits.size(); ++i) {
        for (std::size_t j = 0; j < utfi.size(); ++j) {
            if (!detail::same_operating_point(fits[i].first, utfi[j].op, tol)) continue;
            if (match_of_fit[i] != -1) {
                throw join_error("ambiguous join: fit row " + std::to_string(i) + " " +
                                 detail::describe_op(fits[i].first) +
                                 " matches interferometry rows " +
                                 std::to_string(match_of_fit[i]) + " and " + std::to_string(j));
            }
            if (match_of_utfi[j] != -1) {
                throw join_error("ambiguous join: interferometry row " + std::to_string(j) + " " +
                                 detail::describe_op(utfi[j].op) + " matches fit rows " +
                                 std::to_string(match_of_utfi[j]) + " and " + std::to_string(i));
            }
            match_of_fit[i] = static_cast<std::ptrdiff_t>(j);
            match_of_utfi[j] = static_cast<std::ptrdiff_t>(i);
        }
    }

    MergeOutcome out;
    for (std::size_t i = 0; i < fits.size(); ++i) {
        if (match_of_fit[i] == -1) {
            out.unmatched_fits.push_back(i);
            continue;
        }
        const auto& u = utfi[static_cast<std::size_t>(match_of_fit[i])];
        CalibrationRecord rec;
        rec.op = fits[i].first;
        rec.r_ohm = fits[i].second.r1_ohm;
        rec.c_farad = fits[i].second.c1_farad;
        rec.h_m = convert_utfi_to_mtm(u.h_utfi_m, factor);
        rec.validate();
        out.records.push_back(rec);
    }
    for (std::size_t j = 0; j < utfi.size(); ++j)
        if (match_of_utfi[j] == -1) out.unmatched_utfi.push_back(j);
    return out;
}

struct ThicknessKnot {
    double log10_c_farad = 0.0;
    double log10_h_m = 0.0;
};

/// Calibrated h = h(R, C) map. The capacitance carries the thickness
/// information through a monotone shape-preserving cubic in log-log space;
/// the resistance acts as a regime gate only (metal-to-metal breakdown
/// dominates R irrespective of the lubricant).
class ThicknessModel {
public:
    static ThicknessModel from_knots(std::vector<ThicknessKnot> knots,
                                     double breakdown_r_threshold_ohm,
                                     std::vector<CalibrationRecord> provenance = {}) {
        if (knots.size() < 3)
            throw model_build_error("thickness model needs at least 3 knots");
        if (!(breakdown_r_threshold_ohm > 0.0))
            throw model_build_error("thickness model: breakdown threshold must be > 0");
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i].log10_c_farad > knots[i - 1].log10_c_farad))
                throw model_build_error("thickness model: knot capacitances must strictly increase");
            if (!(knots[i].log10_h_m < knots[i - 1].log10_h_m))
                throw model_build_error("thickness model: knot thicknesses must strictly decrease");
        }
        ThicknessModel m;
        m.knots_ = std::move(knots);
        m.threshold_ohm_ = breakdown_r_threshold_ohm;
        m.provenance_ = std::move(provenance);
        m.slopes_ = pchip_slopes(m.knots_);
        return m;
    }

    const std::vector<ThicknessKnot>& knots() const { return knots_; }
    double breakdown_r_threshold_ohm() const { return threshold_ohm_; }
    const std::vector<CalibrationRecord>& provenance() const { return provenance_; }

    double min_h_m() const { return std::pow(10.0, knots_.back().log10_h_m); }
    double max_h_m() const { return std::pow(10.0, knots_.front().log10_h_m); }

    /// Interpolated log10(h) at log10(c); linear end-slope extrapolation
    /// outside the knot range.
    double log10_h_at(double log10_c, bool* extrapolated = nullptr) const {
        const auto& k = knots_;
        if (log10_c < k.front().log10_c_farad) {
            if (extrapolated) *extrapolated = true;
            return k.front().log10_h_m + slopes_.front() * (log10_c - k.front().log10_c_farad);
        }
        if (log10_c > k.back().log10_c_farad) {
            if (extrapolated) *extrapolated = true;
            return k.back().log10_h_m + slopes_.back() * (log10_c - k.back().log10_c_farad);
        }
        if (extrapolated) *extrapolated = false;
        std::size_t i = 0;
        {
            std::size_t lo = 0, hi = k.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                if (k[mid].log10_c_farad <= log10_c) lo = mid;
                else hi = mid;
            }
            i = lo;
        }
        const double h = k[i + 1].log10_c_farad - k[i].log10_c_farad;
        const double t = (log10_c - k[i].log10_c_farad) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * k[i].log10_h_m +
               (t3 - 2.0 * t2 + t) * h * slopes_[i] +
               (-2.0 * t3 + 3.0 * t2) * k[i + 1].log10_h_m + (t3 - t2) * h * slopes_[i + 1];
    }

private:
    // Fritsch-Carlson shape-preserving slopes; monotone data gives a
    // monotone interpolant.
    static std::vector<double> pchip_slopes(const std::vector<ThicknessKnot>& k) {
        const std::size_t n = k.size();
        std::vector<double> h(n - 1), delta(n - 1), d(n);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = k[i + 1].log10_c_farad - k[i].log10_c_farad;
            delta[i] = (k[i + 1].log10_h_m - k[i].log10_h_m) / h[i];
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        d.front() = edge_slope(h[0], h[1], delta[0], delta[1]);
        d.back() = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        return d;
    }

    static double edge_slope(double h0, double h1, double delta0, double delta1) {
        double d = ((2.0 * h0 + h1) * delta0 - h0 * delta1) / (h0 + h1);
        if (d * delta0 <= 0.0) d = 0.0;
        else if (delta0 * delta1 < 0.0 && std::abs(d) > 3.0 * std::abs(delta0))
            d = 3.0 * delta0;
        return d;
    }

    std::vector<ThicknessKnot> knots_;
    std::vector<double> slopes_;
    double threshold_ohm_ = 0.0;
    std::vector<CalibrationRecord> provenance_;
};

/// Build the h = h(R, C) model from joined calibration records. Film-bearing
/// records (R above the breakdown threshold) become knots in (log C, log h);
/// near-duplicate capacitances (within 0.5% relative) are merged by
/// geometric mean before the monotonicity check.
inline ThicknessModel build_thickness_model(const std::vector<CalibrationRecord>& records,
                                            double r0_ohm, double boundary_factor = 10.0) {
    if (!(r0_ohm > 0.0) || !(boundary_factor > 0.0))
        throw std::invalid_argument("build_thickness_model: R0 and factor must be > 0");
    const double threshold = boundary_factor * r0_ohm;

    std::vector<CalibrationRecord> film;
    for (const auto& rec : records) {
        rec.validate();
        if (rec.r_ohm > threshold && !rec.boundary_lower_bound) film.push_back(rec);
    }
    if (film.size() < 3)
        throw model_build_error("need at least 3 film-bearing records (R > " +
                                std::to_string(threshold) + " ohm); got " +
                                std::to_string(film.size()));

    std::sort(film.begin(), film.end(),
              [](const CalibrationRecord& a, const CalibrationRecord& b) {
                  return a.c_farad < b.c_farad;
              });

    // cluster near-duplicate capacitances, geometric-mean each cluster
    std::vector<ThicknessKnot> knots;
    std::size_t i = 0;
    while (i < film.size()) {
        const double c_ref = film[i].c_farad;
        double sum_log_c = 0.0, sum_log_h = 0.0;
        std::size_t count = 0;
        while (i < film.size() && film[i].c_farad <= c_ref * 1.005) {
            sum_log_c += std::log10(film[i].c_farad);
            sum_log_h += std::log10(film[i].h_m);
            ++count;
            ++i;
        }
        knots.push_back({sum_log_c / static_cast<double>(count),
                         sum_log_h / static_cast<double>(count)});
    }
    if (knots.size() < 3)
        throw model_build_error("fewer than 3 distinct capacitance knots after aggregation");

    for (std::size_t j = 1; j < knots.size(); ++j) {
        if (!(knots[j].log10_h_m < knots[j - 1].log10_h_m)) {
            std::ostringstream msg;
            msg << "calibration data not monotone: thickness does not decrease between "
                << "C = " << std::pow(10.0, knots[j - 1].log10_c_farad) << " F (h = "
                << std::pow(10.0, knots[j - 1].log10_h_m) << " m) and C = "
                << std::pow(10.0, knots[j].log10_c_farad) << " F (h = "
                << std::pow(10.0, knots[j].log10_h_m) << " m)";
            throw model_build_error(msg.str());
        }
    }
    return ThicknessModel::from_knots(std::move(knots), threshold, records);
}

/// Film thickness looked up from a measured (R, C) pair.
struct ThicknessQuery {
    double h_m = 0.0;
    LubricationRegime regime = LubricationRegime::FullFilm;
    bool extrapolated = false;
};

/// Query the model. Below the breakdown threshold the electrical model
/// cannot resolve the film: the minimum calibrated thickness is returned as
/// a flagged lower bound rather than zero.
inline ThicknessQuery thickness_from_rc(const ThicknessModel& m, double r_ohm, double c_farad) {
    if (!(r_ohm > 0.0) && !is_open_circuit(r_ohm))
        throw std::invalid_argument("thickness_from_rc: R must be > 0");
    if (!(c_farad > 0.0)) throw std::invalid_argument("thickness_from_rc: C must be > 0");

    ThicknessQuery q;
    if (r_ohm < m.breakdown_r_threshold_ohm()) {
        q.regime = LubricationRegime::Boundary;
        q.h_m = m.min_h_m();
        q.extrapolated = true;
        return q;
    }
    q.regime = LubricationRegime::FullFilm;
    q.h_m = std::pow(10.0, m.log10_h_at(std::log10(c_farad), &q.extrapolated));
    return q;
}

/// One member of the model-generated frequency-response family.
struct FamilyEntry {
    double h_m = 0.0;
    bool within_calibration = false; // h inside the model's knot range
    std::optional<Spectrum> spectrum;
    std::string error; // non-empty when this film is outside the contact model's validity
};

/// Frequency response of the identified contact over a range of film
/// thicknesses: for each h the equivalent circuit is R1 = R0/alpha in
/// parallel with the total contact capacitance at that film (a bare
/// capacitor when alpha = 0). Per-entry validity failures are recorded and
/// the family continues.
inline std::vector<FamilyEntry> model_response_family(const ThicknessModel& m,
                                                      const BallOnDiscModel& contact,
                                                      const std::vector<double>& h_grid,
                                                      const FrequencyGrid& grid) {
    for (double h : h_grid)
        if (!(h > 0.0))
            throw std::invalid_argument("model_response_family: film thicknesses must be > 0");

    std::vector<FamilyEntry> family;
    family.reserve(h_grid.size());
    for (double h : h_grid) {
        FamilyEntry entry;
        entry.h_m = h;
        entry.within_calibration = h >= m.min_h_m() && h <= m.max_h_m();
        try {
            BallOnDiscModel at_h = contact;
            at_h.film_thickness_m = h;
            at_h.validate();
            const double c = total_capacitance(at_h);
            const double r = breakdown_resistance(at_h.stationary_resistance_ohm,
                                                  at_h.breakdown_ratio);
            const CircuitNetwork network =
                is_open_circuit(r) ? capacitor(c) : parallel_rc(r, c);
            entry.spectrum = sweep(network, grid);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        family.push_back(std::move(entry));
    }
    return family;
}

} // namespace eistrib
