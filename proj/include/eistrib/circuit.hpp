#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eistrib/errors.hpp"
#include "eistrib/numeric.hpp"
#include "eistrib/spectrum.hpp"

namespace eistrib {

enum class ElementKind { Resistor, Capacitor, Inductor, Warburg };

/// A single lumped element. `value` is ohms for R, farads for C, henries
/// for L, and the Warburg coefficient A_W (ohm * s^-1/2) for W.
struct CircuitElement {
    ElementKind kind = ElementKind::Resistor;
    double value = 0.0;

    void validate() const {
        if (!(value > 0.0) || !std::isfinite(value))
            throw std::invalid_argument("circuit element value must be finite and > 0");
    }
};

inline CircuitElement resistor_element(double ohms) {
    CircuitElement e{ElementKind::Resistor, ohms};
    e.validate();
    return e;
}
inline CircuitElement capacitor_element(double farads) {
    CircuitElement e{ElementKind::Capacitor, farads};
    e.validate();
    return e;
}
inline CircuitElement inductor_element(double henries) {
    CircuitElement e{ElementKind::Inductor, henries};
    e.validate();
    return e;
}
inline CircuitElement warburg_element(double a_w) {
    CircuitElement e{ElementKind::Warburg, a_w};
    e.validate();
    return e;
}

/// Finite tree of elements under series/parallel combination. Composite
/// nodes always have at least two children.
class CircuitNetwork {
public:
    enum class Kind { Leaf, Series, Parallel };

    static CircuitNetwork leaf(CircuitElement element) {
        element.validate();
        CircuitNetwork n;
        n.kind_ = Kind::Leaf;
        n.element_ = element;
        return n;
    }

    static CircuitNetwork series(std::vector<CircuitNetwork> children) {
        return composite(Kind::Series, std::move(children));
    }

    static CircuitNetwork parallel(std::vector<CircuitNetwork> children) {
        return composite(Kind::Parallel, std::move(children));
    }

    Kind kind() const { return kind_; }
    const CircuitElement& element() const { return element_; }
    const std::vector<CircuitNetwork>& children() const { return children_; }

private:
    static CircuitNetwork composite(Kind kind, std::vector<CircuitNetwork> children) {
        if (children.size() < 2)
            throw std::invalid_argument("series/parallel nodes need at least two children");
        CircuitNetwork n;
        n.kind_ = kind;
        n.children_ = std::move(children);
        return n;
    }

    Kind kind_ = Kind::Leaf;
    CircuitElement element_{ElementKind::Resistor, 1.0};
    std::vector<CircuitNetwork> children_;
};

inline CircuitNetwork resistor(double ohms) { return CircuitNetwork::leaf(resistor_element(ohms)); }
inline CircuitNetwork capacitor(double farads) {
    return CircuitNetwork::leaf(capacitor_element(farads));
}
inline CircuitNetwork inductor(double henries) {
    return CircuitNetwork::leaf(inductor_element(henries));
}
inline CircuitNetwork warburg(double a_w) { return CircuitNetwork::leaf(warburg_element(a_w)); }

/// The classic tribo-contact model: a resistor in parallel with a capacitor.
inline CircuitNetwork parallel_rc(double r_ohm, double c_farad) {
    return CircuitNetwork::parallel({resistor(r_ohm), capacitor(c_farad)});
}

/// Impedance of a single element at angular frequency omega (rad/s).
inline Complex element_impedance(const CircuitElement& e, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw std::domain_error("element_impedance: omega must be finite and > 0");
    e.validate();
    switch (e.kind) {
    case ElementKind::Resistor:
        return {e.value, 0.0};
    case ElementKind::Capacitor:
        return {0.0, -1.0 / (omega * e.value)};
    case ElementKind::Inductor:
        return {0.0, omega * e.value};
    case ElementKind::Warburg: {
        const double m = e.value / std::sqrt(omega);
        return {m, -m};
    }
    }
    throw std::logic_error("unreachable element kind");
}

/// Impedance of a network at angular frequency omega: series nodes sum
/// impedances, parallel nodes sum admittances and invert.
inline Complex network_impedance(const CircuitNetwork& n, double omega) {
    switch (n.kind()) {
    case CircuitNetwork::Kind::Leaf:
        return element_impedance(n.element(), omega);
    case CircuitNetwork::Kind::Series: {
        Complex z{0.0, 0.0};
        for (const auto& child : n.children()) z += network_impedance(child, omega);
        return z;
    }
    case CircuitNetwork::Kind::Parallel: {
        Complex y{0.0, 0.0};
        for (const auto& child : n.children()) {
            const Complex zc = network_impedance(child, omega);
            if (zc == Complex{0.0, 0.0})
                throw model_validity_error("parallel combination contains a zero-impedance branch");
            y += 1.0 / zc;
        }
        if (y == Complex{0.0, 0.0})
            throw model_validity_error(
                "parallel combination has zero total admittance (resonant singularity)");
        return 1.0 / y;
    }
    }
    throw std::logic_error("unreachable network kind");
}

/// Evaluate a network over a grid. One sample per grid point, grid order.
inline Spectrum sweep(const CircuitNetwork& n, const FrequencyGrid& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep: frequency grid must be non-empty");
    Spectrum s;
    s.samples.reserve(grid.size());
    for (double f : grid.points_hz) {
        s.samples.push_back({f, network_impedance(n, 2.0 * pi * f)});
    }
    return s;
}

/// One row of a Bode table.
struct BodePoint {
    double freq_hz = 0.0;
    double magnitude_ohm = 0.0;
    double phase_deg = 0.0; // in (-180, 180], capacitive negative
};

inline std::vector<BodePoint> to_bode(const Spectrum& s) {
    if (s.empty()) throw std::invalid_argument("to_bode: spectrum must be non-empty");
    std::vector<BodePoint> table;
    table.reserve(s.size());
    for (const auto& sample : s.samples) {
        double phase = std::atan2(sample.z.imag(), sample.z.real()) * 180.0 / pi;
        if (phase <= -180.0) phase = 180.0;
        table.push_back({sample.freq_hz, std::abs(sample.z), phase});
    }
    return table;
}

/// One point of a Nyquist locus (real part vs negated imaginary part).
struct NyquistPoint {
    double real_ohm = 0.0;
    double neg_imag_ohm = 0.0;
};

inline std::vector<NyquistPoint> to_nyquist(const Spectrum& s) {
    if (s.empty()) throw std::invalid_argument("to_nyquist: spectrum must be non-empty");
    std::vector<NyquistPoint> table;
    table.reserve(s.size());
    for (const auto& sample : s.samples) table.push_back({sample.z.real(), -sample.z.imag()});
    return table;
}

/// -3 dB corner of a parallel RC: f_c = 1/(2*pi*R*C). At this frequency the
/// parallel-RC magnitude equals R/sqrt(2).
inline double cutoff_frequency(double r_ohm, double c_farad) {
    if (!(r_ohm > 0.0) || !(c_farad > 0.0))
        throw std::domain_error("cutoff_frequency: R and C must be > 0");
    return 1.0 / (2.0 * pi * r_ohm * c_farad);
}

/// Deterministic noisy sweep: each clean sample z becomes
/// z * (1 + sigma*(g1 + j*g2)) with g1, g2 standard-normal draws from a
/// seeded generator. Identical (seed, network, grid, noise) give identical
/// output.
inline Spectrum synth_spectrum(const CircuitNetwork& n, const FrequencyGrid& grid,
                               const NoiseSpec& noise, std::uint64_t seed) {
    noise.validate();
    Spectrum s = sweep(n, grid);
    if (noise.sigma == 0.0) return s;
    NormalSampler normal(seed);
    for (auto& sample : s.samples) {
        const double g1 = normal();
        const double g2 = normal();
        sample.z *= Complex{1.0 + noise.sigma * g1, noise.sigma * g2};
    }
    return s;
}

} // namespace eistrib
