#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "eistrib/errors.hpp"
#include "eistrib/numeric.hpp"

namespace eistrib {

/// Hertz point-contact radius a = (3*W*R'/E')^(1/3), with E' the reduced
/// modulus in the EHL convention (see ehd.hpp).
inline double hertz_radius(double load_n, double reduced_radius_m, double reduced_modulus_pa) {
    if (!(load_n > 0.0) || !(reduced_radius_m > 0.0) || !(reduced_modulus_pa > 0.0))
        throw std::domain_error("hertz_radius: load, radius and modulus must be > 0");
    return std::cbrt(3.0 * load_n * reduced_radius_m / reduced_modulus_pa);
}

/// Point contact under load, with the derived Hertz radius cached.
struct HertzContact {
    double load_n = 0.0;
    double reduced_radius_m = 0.0;
    double reduced_modulus_pa = 0.0;
    double hertz_radius_m = 0.0;

    static HertzContact make(double load_n, double reduced_radius_m, double reduced_modulus_pa) {
        HertzContact c{load_n, reduced_radius_m, reduced_modulus_pa,
                       hertz_radius(load_n, reduced_radius_m, reduced_modulus_pa)};
        return c;
    }

    void validate() const {
        if (!(load_n > 0.0) || !(reduced_radius_m > 0.0) || !(reduced_modulus_pa > 0.0) ||
            !(hertz_radius_m > 0.0))
            throw std::invalid_argument("hertz contact: all fields must be > 0");
        const double expected = hertz_radius(load_n, reduced_radius_m, reduced_modulus_pa);
        if (std::abs(hertz_radius_m - expected) > 1e-12 * expected)
            throw std::invalid_argument("hertz contact: stored radius inconsistent with inputs");
    }
};

/// Electrode-facing geometry of a ball-on-disc contact, independent of the
/// instantaneous film state.
struct BallOnDiscGeometry {
    double permittivity_f_per_m = 0.0; // absolute permittivity of the lubricant
    double hertz_radius_m = 0.0;       // a
    double ball_radius_m = 0.0;        // r

    void validate() const {
        if (!(permittivity_f_per_m > 0.0))
            throw std::invalid_argument("ball-on-disc: permittivity must be > 0");
        if (!(hertz_radius_m > 0.0) || !(ball_radius_m > 0.0))
            throw std::invalid_argument("ball-on-disc: radii must be > 0");
        if (!(hertz_radius_m < ball_radius_m))
            throw std::invalid_argument("ball-on-disc: hertz radius must be < ball radius");
    }
};

/// Ball-on-disc lubricated contact: geometry plus film thickness, breakdown
/// ratio and stationary contact resistance.
struct BallOnDiscModel {
    double permittivity_f_per_m = 0.0;
    double hertz_radius_m = 0.0;
    double ball_radius_m = 0.0;
    double film_thickness_m = 0.0;  // central film h_c
    double breakdown_ratio = 0.0;   // alpha in [0, 1]
    double stationary_resistance_ohm = 10.0; // R_0

    static BallOnDiscModel make(const BallOnDiscGeometry& g, double film_thickness_m,
                                double breakdown_ratio, double stationary_resistance_ohm) {
        BallOnDiscModel m{g.permittivity_f_per_m, g.hertz_radius_m, g.ball_radius_m,
                          film_thickness_m,       breakdown_ratio,  stationary_resistance_ohm};
        m.validate();
        return m;
    }

    BallOnDiscGeometry geometry() const {
        return {permittivity_f_per_m, hertz_radius_m, ball_radius_m};
    }

    void validate() const {
        geometry().validate();
        if (!(film_thickness_m > 0.0))
            throw std::invalid_argument("ball-on-disc: film thickness must be > 0");
        if (!(breakdown_ratio >= 0.0 && breakdown_ratio <= 1.0))
            throw std::invalid_argument("ball-on-disc: breakdown ratio must be in [0, 1]");
        if (!(stationary_resistance_ohm > 0.0))
            throw std::invalid_argument("ball-on-disc: stationary resistance must be > 0");
    }
};

/// Plate-capacitor approximation of the non-broken-down Hertz zone:
/// C1 = eps*pi*a^2*(1 - alpha)/h_c. Zero when alpha = 1.
inline double capacitance_hertz_zone(const BallOnDiscModel& m) {
    m.validate();
    return m.permittivity_f_per_m * pi * m.hertz_radius_m * m.hertz_radius_m *
           (1.0 - m.breakdown_ratio) / m.film_thickness_m;
}

/// Capacitance of the area surrounding the Hertz zone:
/// C2 = 2*pi*eps*(h_c + sqrt(r^2 - a^2)) * [ln(r/(h_c + sqrt(r^2 - a^2))) - 1].
/// The closed form is only meaningful where it comes out positive, which
/// requires h_c + sqrt(r^2 - a^2) < r/e; outside that domain a
/// model_validity_error is raised instead of returning a negative
/// capacitance.
inline double capacitance_surround(const BallOnDiscModel& m) {
    m.validate();
    const double r = m.ball_radius_m;
    const double a = m.hertz_radius_m;
    const double gap = m.film_thickness_m + std::sqrt(r * r - a * a);
    const double log_term = std::log(r / gap);
    if (!std::isfinite(log_term))
        throw model_validity_error("surround capacitance: degenerate geometry (log diverges)");
    const double c2 = 2.0 * pi * m.permittivity_f_per_m * gap * (log_term - 1.0);
    if (!(c2 > 0.0)) {
        std::ostringstream msg;
        msg << "surround capacitance formula yields " << c2
            << " F; geometry outside the formula's domain (requires h_c + sqrt(r^2 - a^2) < r/e)";
        throw model_validity_error(msg.str());
    }
    return c2;
}

/// Overall contact capacitance C1 + C2.
inline double total_capacitance(const BallOnDiscModel& m) {
    return capacitance_hertz_zone(m) + capacitance_surround(m);
}

/// Open-circuit marker for contact resistance (no metallic path).
inline constexpr double open_circuit_ohm = std::numeric_limits<double>::infinity();

inline bool is_open_circuit(double resistance_ohm) { return std::isinf(resistance_ohm); }

/// Contact resistance R1 = R_0/alpha. alpha = 0 means no breakdown path at
/// all and yields the distinguished open-circuit value.
inline double breakdown_resistance(double r0_ohm, double alpha) {
    if (!(r0_ohm > 0.0)) throw std::domain_error("breakdown_resistance: R0 must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::domain_error("breakdown_resistance: alpha must be in [0, 1]");
    if (alpha == 0.0) return open_circuit_ohm;
    return r0_ohm / alpha;
}

/// Eccentric cylindrical contact (journal-bearing style).
struct CylinderModel {
    double inner_radius_m = 0.0;  // r1
    double outer_radius_m = 0.0;  // r2
    double eccentricity_m = 0.0;  // d
    double length_m = 0.0;        // L
    double permittivity_f_per_m = 0.0;

    void validate() const {
        if (!(inner_radius_m > 0.0) || !(outer_radius_m > inner_radius_m))
            throw std::invalid_argument("cylinder: need 0 < r1 < r2");
        if (!(eccentricity_m >= 0.0) || !(eccentricity_m < outer_radius_m - inner_radius_m))
            throw std::invalid_argument("cylinder: need 0 <= d < r2 - r1");
        if (!(length_m > 0.0)) throw std::invalid_argument("cylinder: length must be > 0");
        if (!(permittivity_f_per_m > 0.0))
            throw std::invalid_argument("cylinder: permittivity must be > 0");
    }
};

/// Eccentric-cylinder capacitance
/// C3 = 2*pi*eps*L / arcosh((r1^2 + r2^2 - d^2)/(2*r1*r2)).
/// Reduces to the coaxial form 2*pi*eps*L/ln(r2/r1) at d = 0; diverges as
/// d -> r2 - r1 (touching), which is reported as a model_validity_error.
inline double cylinder_capacitance(const CylinderModel& m) {
    m.validate();
    const double r1 = m.inner_radius_m;
    const double r2 = m.outer_radius_m;
    const double d = m.eccentricity_m;
    // arg - 1 == ((r2 - r1)^2 - d^2) / (2*r1*r2); evaluate arcosh via log1p
    // to keep precision when the cylinders are nearly touching.
    const double excess = ((r2 - r1) * (r2 - r1) - d * d) / (2.0 * r1 * r2);
    if (excess < 0.0)
        throw std::domain_error("cylinder_capacitance: arcosh argument below 1");
    if (excess == 0.0)
        throw model_validity_error("cylinder_capacitance diverges: cylinders touching");
    const double arcosh = std::log1p(excess + std::sqrt(excess * (2.0 + excess)));
    return 2.0 * pi * m.permittivity_f_per_m * m.length_m / arcosh;
}

/// Result of mapping a measured (R, C) pair back to film state.
struct InversionResult {
    double film_thickness_m = 0.0;
    double breakdown_ratio = 0.0;
    bool alpha_saturated = false; // measured R below nominal R0, alpha clamped to 1
};

namespace detail {

inline double film_capacitance(const BallOnDiscGeometry& g, double film_m, double alpha,
                               double r0_ohm) {
    return total_capacitance(BallOnDiscModel::make(g, film_m, alpha, r0_ohm));
}

} // namespace detail

/// Invert the ball-on-disc model: alpha from R1 = R0/alpha (clamped to
/// [0, 1]), then the central film from the capacitance by bisection over
/// h_c in [1e-11, 1e-4] m, where the total capacitance is strictly
/// decreasing. Pass open_circuit_ohm as r_meas_ohm for an open circuit
/// (alpha = 0).
inline InversionResult invert_ball_on_disc(double r_meas_ohm, double c_meas_farad, double r0_ohm,
                                           const BallOnDiscGeometry& geometry) {
    geometry.validate();
    if (!(r0_ohm > 0.0)) throw std::invalid_argument("invert_ball_on_disc: R0 must be > 0");
    if (!(c_meas_farad > 0.0))
        throw std::invalid_argument("invert_ball_on_disc: measured capacitance must be > 0");
    if (!is_open_circuit(r_meas_ohm) && !(r_meas_ohm > 0.0))
        throw std::invalid_argument("invert_ball_on_disc: measured resistance must be > 0 or open");

    InversionResult result;
    const double raw_alpha = is_open_circuit(r_meas_ohm) ? 0.0 : r0_ohm / r_meas_ohm;
    result.alpha_saturated = raw_alpha > 1.0;
    result.breakdown_ratio = std::clamp(raw_alpha, 0.0, 1.0);

    constexpr double h_lo = 1e-11;
    constexpr double h_hi = 1e-4;
    const double alpha = result.breakdown_ratio;
    const double c_max = detail::film_capacitance(geometry, h_lo, alpha, r0_ohm);
    const double c_min = detail::film_capacitance(geometry, h_hi, alpha, r0_ohm);
    if (c_meas_farad > c_max || c_meas_farad < c_min) {
        std::ostringstream msg;
        msg << "no film thickness in [" << h_lo << ", " << h_hi << "] m reproduces C = "
            << c_meas_farad << " F; attainable range is [" << c_min << ", " << c_max << "] F";
        throw no_solution_error(msg.str(), c_min, c_max);
    }

    const auto mismatch = [&](double h) {
        return detail::film_capacitance(geometry, h, alpha, r0_ohm) - c_meas_farad;
    };
    // f_tol 0: run the bracket down to adjacent doubles. Near alpha = 1 the
    // Hertz-zone term vanishes and the capacitance becomes very stiff in h,
    // so the film needs the full double resolution.
    result.film_thickness_m = bisect(mismatch, h_lo, h_hi, 0.0);

    const double residual =
        std::abs(mismatch(result.film_thickness_m)) / c_meas_farad;
    if (residual >= 1e-10) {
        std::ostringstream msg;
        msg << "film-thickness bisection stalled at relative capacitance residual " << residual;
        throw no_solution_error(msg.str(), c_min, c_max);
    }
    return result;
}

} // namespace eistrib
