#pragma once

#include <cmath>
#include <stdexcept>

namespace eistrib {

// Dowson-Hamrock central-film exponents.
inline constexpr double dh_speed_exponent = 0.68;
inline constexpr double dh_pressure_viscosity_exponent = 0.53;
inline constexpr double dh_load_exponent = -0.067;
// Net E' exponent in the central-film formula: -0.68 + 0.53 + 0.067.
inline constexpr double dh_modulus_exponent = -0.083;

/// Elastic constants of the two contacting bodies.
struct MaterialPair {
    double e1_pa = 0.0;
    double e2_pa = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;

    void validate() const {
        if (!(e1_pa > 0.0) || !(e2_pa > 0.0))
            throw std::invalid_argument("material pair: moduli must be > 0");
        if (!(nu1 > 0.0 && nu1 < 0.5) || !(nu2 > 0.0 && nu2 < 0.5))
            throw std::invalid_argument("material pair: Poisson ratios must be in (0, 0.5)");
    }
};

/// Reduced Young's modulus, EHL convention:
/// 2/E' = (1 - nu1^2)/E1 + (1 - nu2^2)/E2.
inline double reduced_modulus(const MaterialPair& m) {
    m.validate();
    return 2.0 / ((1.0 - m.nu1 * m.nu1) / m.e1_pa + (1.0 - m.nu2 * m.nu2) / m.e2_pa);
}

/// Inputs to the Dowson-Hamrock central film thickness formula. The
/// pressure-viscosity coefficient is the lubricant's alpha (1/Pa), not the
/// electrical breakdown ratio.
struct EhdInputs {
    double k_ellipticity = 1.9; // circular point contact default
    double reduced_radius_m = 0.0;
    double entrainment_speed_m_s = 0.0;
    double viscosity_pa_s = 0.0;
    double reduced_modulus_pa = 0.0;
    double pressure_viscosity_coeff_per_pa = 0.0;
    double load_n = 0.0;

    void validate() const {
        if (!(k_ellipticity > 0.0) || !(reduced_radius_m > 0.0) ||
            !(entrainment_speed_m_s > 0.0) || !(viscosity_pa_s > 0.0) ||
            !(reduced_modulus_pa > 0.0) || !(pressure_viscosity_coeff_per_pa > 0.0) ||
            !(load_n > 0.0))
            throw std::invalid_argument("ehd inputs: all parameters must be > 0");
    }
};

/// Dowson-Hamrock central film thickness,
/// h_c = k*R'*(U*eta0/(E'*R'))^0.68 * (alpha*E')^0.53 * (W/(E'*R'^2))^-0.067.
inline double dowson_hamrock_hc(const EhdInputs& in) {
    in.validate();
    const double speed_term =
        in.entrainment_speed_m_s * in.viscosity_pa_s / (in.reduced_modulus_pa * in.reduced_radius_m);
    const double material_term = in.pressure_viscosity_coeff_per_pa * in.reduced_modulus_pa;
    const double load_term =
        in.load_n / (in.reduced_modulus_pa * in.reduced_radius_m * in.reduced_radius_m);
    return in.k_ellipticity * in.reduced_radius_m * std::pow(speed_term, dh_speed_exponent) *
           std::pow(material_term, dh_pressure_viscosity_exponent) *
           std::pow(load_term, dh_load_exponent);
}

/// Ratio of central film thickness between two material pairs at the same
/// operating condition: (E'_a/E'_b)^-0.083. With steel/steel over
/// steel/glass this is ~0.9468, the interferometry-to-tribometer transfer
/// factor.
inline double material_conversion_factor(double e_prime_a_pa, double e_prime_b_pa) {
    if (!(e_prime_a_pa > 0.0) || !(e_prime_b_pa > 0.0))
        throw std::invalid_argument("material_conversion_factor: moduli must be > 0");
    return std::pow(e_prime_a_pa / e_prime_b_pa, dh_modulus_exponent);
}

/// Apply the material transfer factor to an interferometry-measured film.
inline double convert_utfi_to_mtm(double h_utfi_m, double factor) {
    if (!(h_utfi_m > 0.0)) throw std::invalid_argument("convert_utfi_to_mtm: film must be > 0");
    if (!(factor > 0.0)) throw std::invalid_argument("convert_utfi_to_mtm: factor must be > 0");
    return h_utfi_m * factor;
}

} // namespace eistrib
