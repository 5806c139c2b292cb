#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "eistrib/contact.hpp"
#include "eistrib/numeric.hpp"

using namespace eistrib;
using Catch::Approx;

namespace {

// Geometry inside the surround-capacitance formula's domain
// (h + sqrt(r^2 - a^2) < r/e requires a close to r).
BallOnDiscGeometry test_geometry() {
    BallOnDiscGeometry g;
    g.permittivity_f_per_m = permittivity(2.2);
    g.ball_radius_m = 9.525e-3;
    g.hertz_radius_m = 9.05e-3;
    return g;
}

} // namespace

TEST_CASE("hertz radius closed form and scaling") {
    // independently recomputed at extended precision
    CHECK(hertz_radius(20.0, 9.525e-3, 2.26e11) ==
          Approx(1.3623936116594134e-4).epsilon(1e-12));

    const double a1 = hertz_radius(5.0, 0.01, 2e11);
    const double a8 = hertz_radius(40.0, 0.01, 2e11);
    CHECK(a8 == Approx(2.0 * a1).epsilon(1e-12)); // load x8 -> radius x2

    CHECK(hertz_radius(1e-12, 0.01, 2e11) < 1e-6); // vanishing load limit
    CHECK_THROWS_AS(hertz_radius(0.0, 0.01, 2e11), std::domain_error);
    CHECK_THROWS_AS(hertz_radius(5.0, -0.01, 2e11), std::domain_error);
}

TEST_CASE("hertz contact caches a consistent radius") {
    const auto c = HertzContact::make(20.0, 9.525e-3, 2.26e11);
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.hertz_radius_m *= 1.001;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("hertz-zone capacitance: plate capacitor with breakdown fraction") {
    BallOnDiscModel m;
    m.permittivity_f_per_m = permittivity(2.2);
    m.hertz_radius_m = 1.362e-4;
    m.ball_radius_m = 9.525e-3;
    m.film_thickness_m = 100e-9;
    m.breakdown_ratio = 0.0;
    m.stationary_resistance_ohm = 10.0;

    // frozen from an extended-precision evaluation of eps*pi*a^2*(1-alpha)/h
    CHECK(capacitance_hertz_zone(m) == Approx(1.1352081452020316e-11).epsilon(1e-12));

    // and cross-checked here against a long-double recomputation
    const long double oracle = static_cast<long double>(m.permittivity_f_per_m) *
                               3.141592653589793238462643383279502884L *
                               static_cast<long double>(m.hertz_radius_m) *
                               static_cast<long double>(m.hertz_radius_m) /
                               static_cast<long double>(m.film_thickness_m);
    CHECK(capacitance_hertz_zone(m) == Approx(static_cast<double>(oracle)).epsilon(1e-15));

    auto broken = m;
    broken.breakdown_ratio = 1.0;
    CHECK(capacitance_hertz_zone(broken) == 0.0);

    auto half = m;
    half.film_thickness_m = m.film_thickness_m / 2.0;
    CHECK(capacitance_hertz_zone(half) ==
          Approx(2.0 * capacitance_hertz_zone(m)).epsilon(1e-14));
}

TEST_CASE("surround capacitance inside its domain") {
    const auto m = BallOnDiscModel::make(test_geometry(), 100e-9, 0.0, 10.0);
    const double c2 = capacitance_surround(m);
    CHECK(c2 == Approx(6.00595980428e-14).epsilon(1e-9)); // extended-precision oracle
    CHECK(c2 > 0.0);

    // determinism: identical inputs, identical bits
    CHECK(capacitance_surround(m) == c2);

    // a 1 nm film change moves C2 by far less than 0.1% on a ~9.5 mm ball
    auto bumped = m;
    bumped.film_thickness_m += 1e-9;
    CHECK(std::abs(capacitance_surround(bumped) - c2) / c2 < 1e-3);
}

TEST_CASE("surround capacitance rejects geometry outside the formula's domain") {
    // a physically proportioned contact (hertz radius << ball radius) makes
    // the bracket negative; the error names the domain restriction
    BallOnDiscModel mtm;
    mtm.permittivity_f_per_m = permittivity(2.2);
    mtm.hertz_radius_m = 1.362e-4;
    mtm.ball_radius_m = 9.525e-3;
    mtm.film_thickness_m = 100e-9;
    mtm.breakdown_ratio = 0.0;
    mtm.stationary_resistance_ohm = 10.0;
    CHECK_THROWS_AS(capacitance_surround(mtm), model_validity_error);
    CHECK_THROWS_WITH(capacitance_surround(mtm),
                      Catch::Matchers::ContainsSubstring("domain"));

    // degenerate geometry is rejected at construction
    auto degenerate = mtm;
    degenerate.hertz_radius_m = degenerate.ball_radius_m;
    CHECK_THROWS_AS(degenerate.validate(), std::invalid_argument);
    auto no_film = mtm;
    no_film.film_thickness_m = 0.0;
    CHECK_THROWS_AS(no_film.validate(), std::invalid_argument);
}

TEST_CASE("total capacitance adds the zones and is monotone in film and breakdown") {
    const auto geom = test_geometry();
    const auto m = BallOnDiscModel::make(geom, 50e-9, 0.25, 10.0);
    CHECK(total_capacitance(m) ==
          Approx(capacitance_hertz_zone(m) + capacitance_surround(m)).epsilon(1e-15));

    auto all_broken = m;
    all_broken.breakdown_ratio = 1.0;
    CHECK(total_capacitance(all_broken) == Approx(capacitance_surround(all_broken)).epsilon(1e-15));

    // strictly decreasing in h over [1 nm, 1 um], 1000 points
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
        const double h = 1e-9 * std::pow(1000.0, i / 999.0);
        const double c = total_capacitance(BallOnDiscModel::make(geom, h, 0.3, 10.0));
        CHECK(c > 0.0);
        CHECK(c < prev);
        prev = c;
    }
    // strictly decreasing in alpha at fixed film
    prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 100; ++i) {
        const double alpha = i / 100.0;
        const double c = total_capacitance(BallOnDiscModel::make(geom, 100e-9, alpha, 10.0));
        CHECK(c < prev);
        prev = c;
    }
}

TEST_CASE("breakdown resistance follows R1 = R0/alpha with an open-circuit limit") {
    CHECK(breakdown_resistance(10.0, 1.0) == 10.0);
    CHECK(breakdown_resistance(10.0, 0.5) == 20.0);

    const double open = breakdown_resistance(10.0, 0.0);
    CHECK(is_open_circuit(open));
    CHECK(std::isinf(open));

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> alpha_draw(1e-6, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double alpha = alpha_draw(rng);
        CHECK(breakdown_resistance(10.0, alpha) * alpha == Approx(10.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(breakdown_resistance(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(breakdown_resistance(10.0, 1.5), std::domain_error);
}

TEST_CASE("cylinder capacitance: concentric identity and eccentric growth") {
    CylinderModel m;
    m.inner_radius_m = 5e-3;
    m.outer_radius_m = 5.1e-3;
    m.eccentricity_m = 0.0;
    m.length_m = 1e-2;
    m.permittivity_f_per_m = permittivity(2.2);

    // arcosh((r1^2+r2^2)/(2 r1 r2)) == ln(r2/r1): the coaxial-cable formula
    const double coaxial = 2.0 * pi * m.permittivity_f_per_m * m.length_m /
                           std::log(m.outer_radius_m / m.inner_radius_m);
    CHECK(cylinder_capacitance(m) == Approx(coaxial).epsilon(1e-12));
    CHECK(cylinder_capacitance(m) == Approx(6.180569086551323e-11).epsilon(1e-9));

    auto ecc = m;
    ecc.eccentricity_m = 5e-5;
    const double c_ecc = cylinder_capacitance(ecc);
    CHECK(c_ecc == Approx(7.136677300411733e-11).epsilon(1e-9));
    CHECK(c_ecc > cylinder_capacitance(m)); // eccentricity increases capacitance

    // touching limit is rejected: d must stay below r2 - r1
    auto touching = m;
    touching.eccentricity_m = m.outer_radius_m - m.inner_radius_m;
    CHECK_THROWS_AS(cylinder_capacitance(touching), std::invalid_argument);
    auto inverted = m;
    inverted.outer_radius_m = m.inner_radius_m;
    CHECK_THROWS_AS(cylinder_capacitance(inverted), std::invalid_argument);
}

TEST_CASE("ball-on-disc inversion recovers the forward film state") {
    const auto geom = test_geometry();
    const double r0 = 10.0;

    SECTION("single round trip") {
        const double h_true = 100e-9, alpha_true = 0.3;
        const auto forward = BallOnDiscModel::make(geom, h_true, alpha_true, r0);
        const double r_meas = breakdown_resistance(r0, alpha_true);
        const double c_meas = total_capacitance(forward);

        const InversionResult inv = invert_ball_on_disc(r_meas, c_meas, r0, geom);
        CHECK(inv.film_thickness_m == Approx(h_true).epsilon(1e-6));
        CHECK(inv.breakdown_ratio == Approx(alpha_true).epsilon(1e-12));
        CHECK_FALSE(inv.alpha_saturated);
    }

    SECTION("grid of film states") {
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const double h = i == 4 ? 1e-6 : 1e-9 * std::pow(1000.0, i / 4.0);
                const double alpha = j == 4 ? 1.0 : 0.01 + (1.0 - 0.01) * j / 4.0;
                const auto fwd = BallOnDiscModel::make(geom, h, alpha, r0);
                const InversionResult inv = invert_ball_on_disc(
                    breakdown_resistance(r0, alpha), total_capacitance(fwd), r0, geom);
                CHECK(inv.film_thickness_m == Approx(h).epsilon(1e-6));
                CHECK(inv.breakdown_ratio == Approx(alpha).epsilon(1e-9));
            }
        }
    }

    SECTION("open circuit resolves the film from capacitance alone") {
        const auto fwd = BallOnDiscModel::make(geom, 30e-9, 0.0, r0);
        const InversionResult inv =
            invert_ball_on_disc(open_circuit_ohm, total_capacitance(fwd), r0, geom);
        CHECK(inv.breakdown_ratio == 0.0);
        CHECK(inv.film_thickness_m == Approx(30e-9).epsilon(1e-6));
    }

    SECTION("measured R below R0 saturates alpha with a flag") {
        const auto fwd = BallOnDiscModel::make(geom, 30e-9, 1.0, r0);
        const InversionResult inv =
            invert_ball_on_disc(r0 / 2.0, total_capacitance(fwd), r0, geom);
        CHECK(inv.breakdown_ratio == 1.0);
        CHECK(inv.alpha_saturated);
        CHECK(inv.film_thickness_m == Approx(30e-9).epsilon(1e-6));
    }

    SECTION("unattainable capacitance reports the attainable range") {
        // the bracket's true maximum sits at its lower film end, 1e-11 m
        const double c_max = total_capacitance(BallOnDiscModel::make(geom, 1e-11, 0.5, r0));
        try {
            invert_ball_on_disc(breakdown_resistance(r0, 0.5), 10.0 * c_max, r0, geom);
            FAIL("expected no_solution_error");
        } catch (const no_solution_error& e) {
            CHECK(e.attainable_max > e.attainable_min);
            CHECK(e.attainable_min > 0.0);
            CHECK(std::string(e.what()).find("attainable") != std::string::npos);
        }
    }

    SECTION("input validation") {
        CHECK_THROWS_AS(invert_ball_on_disc(-1.0, 1e-12, r0, geom), std::invalid_argument);
        CHECK_THROWS_AS(invert_ball_on_disc(100.0, 0.0, r0, geom), std::invalid_argument);
    }
}
