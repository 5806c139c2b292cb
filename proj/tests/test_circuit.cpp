#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "eistrib/circuit.hpp"
#include "eistrib/numeric.hpp"

using namespace eistrib;
using Catch::Approx;

namespace {

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

// Eq-style closed forms used as independent oracles for the compositional
// evaluator.
Complex parallel_rc_closed_form(double r, double c, double omega) {
    return r / Complex{1.0, omega * r * c};
}

Complex rc_plus_series_r_closed_form(double r1, double c1, double r2, double omega) {
    return Complex{r1 + r2, omega * r1 * r2 * c1} / Complex{1.0, omega * r1 * c1};
}

} // namespace

TEST_CASE("element impedances match the canonical forms") {
    CHECK(element_impedance(resistor_element(100.0), 7.3) == Complex{100.0, 0.0});

    const Complex zc = element_impedance(capacitor_element(1e-6), 1e6);
    CHECK(zc.real() == 0.0);
    CHECK(zc.imag() == Approx(-1.0).margin(1e-15));

    const Complex zl = element_impedance(inductor_element(2e-3), 1000.0);
    CHECK(zl == Complex{0.0, 2.0});

    const Complex zw = element_impedance(warburg_element(10.0), 4.0);
    CHECK(zw.real() == Approx(5.0));
    CHECK(zw.imag() == Approx(-5.0));
    CHECK(std::arg(zw) * 180.0 / pi == Approx(-45.0));
}

TEST_CASE("element impedance rejects non-positive frequency and values") {
    CHECK_THROWS_AS(element_impedance(resistor_element(1.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(element_impedance(resistor_element(1.0), -5.0), std::domain_error);
    CHECK_THROWS(resistor_element(0.0));
    CHECK_THROWS(capacitor_element(-1e-6));
}

TEST_CASE("network impedance of the parallel RC and its series extension") {
    const auto rc = parallel_rc(1000.0, 1e-6);
    // omega = 1/(RC) puts the response exactly at R(1 - j)/2
    const Complex z = network_impedance(rc, 1000.0);
    CHECK(z.real() == Approx(500.0).epsilon(1e-12));
    CHECK(z.imag() == Approx(-500.0).epsilon(1e-12));

    const auto net = CircuitNetwork::series({parallel_rc(1000.0, 1e-6), resistor(100.0)});
    const Complex z_dc = network_impedance(net, 1e-6);
    CHECK(std::abs(z_dc) == Approx(1100.0).epsilon(1e-6));
    const Complex z_hf = network_impedance(net, 1e9);
    CHECK(std::abs(z_hf) == Approx(100.0).epsilon(1e-3));
}

TEST_CASE("parallel LC at resonance raises the singularity guard") {
    const double l = 1e-3, c = 1e-6;
    const double omega0 = 1.0 / std::sqrt(l * c);
    const auto lc = CircuitNetwork::parallel({inductor(l), capacitor(c)});
    CHECK_THROWS_AS(network_impedance(lc, omega0), model_validity_error);
}

TEST_CASE("composite nodes need at least two children") {
    CHECK_THROWS_AS(CircuitNetwork::series({resistor(1.0)}), std::invalid_argument);
    CHECK_THROWS_AS(CircuitNetwork::parallel({}), std::invalid_argument);
}

TEST_CASE("sweep is one sample per grid point in grid order") {
    const auto grid = make_explicit_grid({1.0, 10.0, 100.0});
    const Spectrum s = sweep(resistor(10.0), grid);
    REQUIRE(s.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(s.samples[i].freq_hz == grid.points_hz[i]);
        CHECK(s.samples[i].z == Complex{10.0, 0.0});
    }
    CHECK_THROWS_AS(sweep(resistor(10.0), FrequencyGrid{}), std::invalid_argument);
}

TEST_CASE("parallel RC sweep matches the closed form point by point") {
    const auto grid = make_log_grid(1.0, 1e6, 10);
    REQUIRE(grid.size() == 61);
    const Spectrum s = sweep(parallel_rc(1000.0, 1e-6), grid);
    double prev_mag = std::abs(s.samples.front().z);
    for (const auto& sample : s.samples) {
        const Complex oracle = parallel_rc_closed_form(1000.0, 1e-6, 2.0 * pi * sample.freq_hz);
        CHECK(rel_err(sample.z, oracle) < 1e-12);
        const double mag = std::abs(sample.z);
        CHECK(mag <= prev_mag * (1.0 + 1e-12)); // monotone non-increasing
        prev_mag = mag;
    }
}

TEST_CASE("bode table: magnitude, phase convention, limits") {
    Spectrum s = make_spectrum({{1.0, {500.0, -500.0}}, {2.0, {10.0, 0.0}}});
    const auto table = to_bode(s);
    CHECK(table[0].magnitude_ohm == Approx(707.10678118654752).epsilon(1e-14));
    CHECK(table[0].phase_deg == Approx(-45.0));
    CHECK(table[1].magnitude_ohm == Approx(10.0));
    CHECK(table[1].phase_deg == 0.0);

    // phase for a negative-real sample lands in (-180, 180]
    Spectrum neg = make_spectrum({{1.0, {-5.0, 0.0}}});
    CHECK(to_bode(neg)[0].phase_deg == 180.0);

    const Spectrum rc = sweep(parallel_rc(1000.0, 1e-6), make_log_grid(1e-2, 1e6, 10));
    const auto rc_table = to_bode(rc);
    CHECK(rc_table.front().phase_deg == Approx(0.0).margin(0.01));
    CHECK(rc_table.back().phase_deg == Approx(-90.0).margin(0.01));
    for (const auto& p : rc_table) CHECK(p.phase_deg <= 0.0);
}

TEST_CASE("bode table reconstructs the complex samples") {
    const Spectrum s = sweep(CircuitNetwork::series({parallel_rc(2200.0, 4.7e-8), warburg(30.0)}),
                             make_log_grid(1e-2, 1e5, 7));
    const auto table = to_bode(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double phi = table[i].phase_deg * pi / 180.0;
        const Complex rebuilt =
            table[i].magnitude_ohm * Complex{std::cos(phi), std::sin(phi)};
        CHECK(rel_err(rebuilt, s.samples[i].z) < 1e-12);
    }
}

TEST_CASE("nyquist locus of a parallel RC is a semicircle") {
    const double r = 4700.0;
    const Spectrum s = sweep(parallel_rc(r, 2.2e-7), make_log_grid(1e-2, 1e7, 12,
                                                                   FrequencyLimits{1e-5, 1e8}));
    for (const auto& p : to_nyquist(s)) {
        const double dx = p.real_ohm - r / 2.0;
        const double deviation = std::abs(std::hypot(dx, p.neg_imag_ohm) - r / 2.0);
        CHECK(deviation < 1e-9 * r);
        CHECK(p.neg_imag_ohm >= 0.0);
    }

    // a series resistor shifts the semicircle right by R2
    const double r2 = 300.0;
    const Spectrum shifted =
        sweep(CircuitNetwork::series({parallel_rc(r, 2.2e-7), resistor(r2)}),
              make_log_grid(1e-2, 1e7, 12, FrequencyLimits{1e-5, 1e8}));
    for (const auto& p : to_nyquist(shifted)) {
        const double dx = p.real_ohm - (r2 + r / 2.0);
        CHECK(std::abs(std::hypot(dx, p.neg_imag_ohm) - r / 2.0) < 1e-9 * r);
    }

    const auto flat = to_nyquist(sweep(resistor(42.0), make_log_grid(1.0, 1e3, 5)));
    for (const auto& p : flat) {
        CHECK(p.real_ohm == 42.0);
        CHECK(p.neg_imag_ohm == 0.0);
    }
}

TEST_CASE("cutoff frequency is the -3 dB point of the parallel RC") {
    CHECK(cutoff_frequency(1000.0, 1e-6) == Approx(159.15494309189535).epsilon(1e-14));
    CHECK(cutoff_frequency(1.0, 1.0) == Approx(0.15915494309189535).epsilon(1e-14));
    CHECK_THROWS_AS(cutoff_frequency(0.0, 1e-6), std::domain_error);
    CHECK_THROWS_AS(cutoff_frequency(1.0, -1.0), std::domain_error);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> exp_r(0.5, 8.0), exp_c(-12.0, -4.0);
    for (int i = 0; i < 100; ++i) {
        const double r = std::pow(10.0, exp_r(rng));
        const double c = std::pow(10.0, exp_c(rng));
        const double fc = cutoff_frequency(r, c);
        const double mag = std::abs(network_impedance(parallel_rc(r, c), 2.0 * pi * fc));
        CHECK(std::abs(mag - r / std::sqrt(2.0)) <= 1e-12 * r);
    }
}

TEST_CASE("series composition is associative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(0.1, 1e4);
    for (int i = 0; i < 50; ++i) {
        const auto a = resistor(val(rng));
        const auto b = capacitor(val(rng) * 1e-9);
        const auto c = warburg(val(rng));
        const auto nested = CircuitNetwork::series({a, CircuitNetwork::series({b, c})});
        const auto flat = CircuitNetwork::series({a, b, c});
        const double omega = std::pow(10.0, std::uniform_real_distribution<double>(-2, 6)(rng));
        CHECK(rel_err(network_impedance(nested, omega), network_impedance(flat, omega)) < 1e-14);
    }
}

TEST_CASE("parallel composition is invariant under child permutation") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> val(0.1, 1e4);
    for (int i = 0; i < 50; ++i) {
        std::vector<CircuitNetwork> kids{resistor(val(rng)), capacitor(val(rng) * 1e-9),
                                         resistor(val(rng)), warburg(val(rng))};
        auto shuffled = kids;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const double omega = std::pow(10.0, std::uniform_real_distribution<double>(-2, 6)(rng));
        CHECK(rel_err(network_impedance(CircuitNetwork::parallel(kids), omega),
                      network_impedance(CircuitNetwork::parallel(shuffled), omega)) < 1e-14);
    }
}

TEST_CASE("compositional evaluation equals the closed forms across the band") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> exp_r(0.0, 7.0), exp_c(-12.0, -5.0);
    for (int draw = 0; draw < 50; ++draw) {
        const double r1 = std::pow(10.0, exp_r(rng));
        const double c1 = std::pow(10.0, exp_c(rng));
        const double r2 = std::pow(10.0, exp_r(rng));
        const auto net1 = parallel_rc(r1, c1);
        const auto net2 = CircuitNetwork::series({parallel_rc(r1, c1), resistor(r2)});
        for (int k = 0; k <= 60; ++k) {
            const double omega = 1e-3 * std::pow(10.0, k / 6.0); // 1e-3 .. 1e7 rad/s
            CHECK(rel_err(network_impedance(net1, omega),
                          parallel_rc_closed_form(r1, c1, omega)) < 1e-12);
            CHECK(rel_err(network_impedance(net2, omega),
                          rc_plus_series_r_closed_form(r1, c1, r2, omega)) < 1e-12);
        }
    }
}

TEST_CASE("warburg signature: -1/2 log-log slope and -45 degree phase") {
    const auto grid = make_log_grid(1e-3, 1e3, 10);
    const Spectrum s = sweep(warburg(25.0), grid);
    std::vector<double> lw, lm;
    for (const auto& sample : s.samples) {
        lw.push_back(std::log10(2.0 * pi * sample.freq_hz));
        lm.push_back(std::log10(std::abs(sample.z)));
        CHECK(std::arg(sample.z) * 180.0 / pi == Approx(-45.0).margin(1e-9));
    }
    CHECK(fit_line(lw, lm).slope == Approx(-0.5).margin(1e-12));
}

TEST_CASE("passive R/C/W networks stay in the fourth quadrant") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> val(0.5, 5e3);
    std::uniform_int_distribution<int> pick(0, 2), arity(2, 3), combine(0, 1);

    auto random_leaf = [&]() {
        switch (pick(rng)) {
        case 0: return resistor(val(rng));
        case 1: return capacitor(val(rng) * 1e-9);
        default: return warburg(val(rng));
        }
    };
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<CircuitNetwork> level;
        for (int i = 0; i < 4; ++i) {
            std::vector<CircuitNetwork> kids;
            const int n = arity(rng);
            for (int k = 0; k < n; ++k) kids.push_back(random_leaf());
            level.push_back(combine(rng) ? CircuitNetwork::series(kids)
                                         : CircuitNetwork::parallel(kids));
        }
        const auto net = combine(rng) ? CircuitNetwork::series(level)
                                      : CircuitNetwork::parallel(level);
        for (double f : make_log_grid(1e-2, 1e6, 4).points_hz) {
            const Complex z = network_impedance(net, 2.0 * pi * f);
            CHECK(z.real() >= -1e-12 * std::abs(z));
            CHECK(z.imag() <= 1e-12 * std::abs(z));
        }
    }
}

TEST_CASE("synthetic spectra are deterministic and scale with sigma") {
    const auto grid = make_log_grid(1.0, 1e6, 10);
    const auto net = parallel_rc(1000.0, 1e-6);

    const Spectrum clean = synth_spectrum(net, grid, NoiseSpec{0.0}, 42);
    const Spectrum swept = sweep(net, grid);
    REQUIRE(clean.size() == swept.size());
    for (std::size_t i = 0; i < clean.size(); ++i) CHECK(clean.samples[i].z == swept.samples[i].z);

    const Spectrum a = synth_spectrum(net, grid, NoiseSpec{0.01}, 42);
    const Spectrum b = synth_spectrum(net, grid, NoiseSpec{0.01}, 42);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].z.real() == b.samples[i].z.real());
        CHECK(a.samples[i].z.imag() == b.samples[i].z.imag());
    }
    const Spectrum c = synth_spectrum(net, grid, NoiseSpec{0.01}, 43);
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.samples[i].z != c.samples[i].z) any_different = true;
    CHECK(any_different);

    // realized quadrature deviations have sample std near sigma
    std::vector<double> deviations;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Complex ratio = a.samples[i].z / swept.samples[i].z - Complex{1.0, 0.0};
        deviations.push_back(ratio.real());
        deviations.push_back(ratio.imag());
    }
    double mean = 0.0;
    for (double d : deviations) mean += d;
    mean /= static_cast<double>(deviations.size());
    double var = 0.0;
    for (double d : deviations) var += (d - mean) * (d - mean);
    var /= static_cast<double>(deviations.size() - 1);
    const double std_dev = std::sqrt(var);
    CHECK(std_dev > 0.005);
    CHECK(std_dev < 0.02);
}

TEST_CASE("frequency grids validate range, monotonicity and spacing") {
    CHECK(default_grid().size() == 61);
    CHECK(default_grid().points_hz.front() == 1.0);
    CHECK(default_grid().points_hz.back() == 1e6);

    CHECK_THROWS_AS(make_log_grid(1e-7, 1.0, 10), std::invalid_argument); // below 10 uHz
    CHECK_THROWS_AS(make_log_grid(1.0, 1e7, 10), std::invalid_argument);  // above 2 MHz
    CHECK_NOTHROW(make_log_grid(1.0, 1e7, 10, FrequencyLimits{1e-5, 1e9})); // overridden

    const auto descending = make_log_grid(1e6, 1.0, 10);
    CHECK(descending.points_hz.front() == 1e6);
    CHECK(descending.points_hz.back() == 1.0);

    CHECK_THROWS_AS(make_explicit_grid({1.0, 1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_explicit_grid({1.0, 3.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_explicit_grid({}), std::invalid_argument);
}

TEST_CASE("spectrum construction rejects unordered or duplicate frequencies") {
    CHECK_THROWS_AS(make_spectrum({{1.0, {1, 0}}, {1.0, {1, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(make_spectrum({{1.0, {1, 0}}, {3.0, {1, 0}}, {2.0, {1, 0}}}),
                    std::invalid_argument);
    CHECK_NOTHROW(make_spectrum({{3.0, {1, 0}}, {2.0, {1, 0}}, {1.0, {1, 0}}}));
    CHECK_THROWS_AS(make_spectrum({}), std::invalid_argument);

    CHECK_THROWS_AS(make_spectrum({{1.0, {1, 0}}}, std::nullopt, -10.0), std::invalid_argument);
    const Spectrum tagged =
        make_spectrum({{1.0, {1, 0}}}, OperatingPoint{60.0, 2500.0, 20.0}, 10.0);
    CHECK(tagged.amplitude_mv == 10.0);
    CHECK(tagged.meta->speed_mm_s == 2500.0);
}
