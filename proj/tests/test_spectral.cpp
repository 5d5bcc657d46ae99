#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cribsim/spectral.hpp"

using namespace cribsim;

TEST_CASE("fwhm to sigma conversion") {
    auto p = gaussian_peak_profile(0.5, 1e6, 1.6);
    CHECK(p.sigma == doctest::Approx(424661.0).epsilon(1e-4));
    CHECK(p.d_peak == 0.5);
    CHECK(p.d_background == 1.6);

    auto unit = gaussian_peak_profile(0.5, 2.0 * std::sqrt(2.0 * std::log(2.0)), 0.0);
    CHECK(unit.sigma == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("flat profile when the peak is absent") {
    auto p = gaussian_peak_profile(0.0, 1e6, 1.6);
    CHECK(optical_depth_at(p, 0.0) == doctest::Approx(1.6));
    CHECK(optical_depth_at(p, 5e6) == doctest::Approx(1.6));
}

TEST_CASE("optical depth evaluation") {
    auto p = gaussian_peak_profile(0.5, 1e6, 1.6);
    CHECK(optical_depth_at(p, 0.0) == doctest::Approx(2.1).epsilon(1e-9));
    CHECK(optical_depth_at(p, p.sigma) == doctest::Approx(1.6 + 0.5 * std::exp(-0.5)).epsilon(1e-12));
    CHECK(optical_depth_at(p, 1e12) == doctest::Approx(1.6));

    // maximal at center, strictly decreasing in |detuning - center|
    double prev = optical_depth_at(p, 0.0);
    for (int i = 1; i <= 20; ++i) {
        const double cur = optical_depth_at(p, i * 0.3 * p.sigma);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("broadening rescales and conserves the peak area") {
    auto p = gaussian_peak_profile(0.5, 1e6, 1.6);

    auto b3 = apply_broadening(p, 3.0);
    CHECK(b3.d_peak == doctest::Approx(0.5 / 3.0).epsilon(1e-12));
    CHECK(b3.sigma == doctest::Approx(3.0 * p.sigma).epsilon(1e-12));
    CHECK(b3.d_background == 1.6);

    auto same = apply_broadening(p, 1.0);
    CHECK(same.d_peak == p.d_peak);
    CHECK(same.sigma == p.sigma);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> depth(0.01, 5.0), width(1e3, 1e7), factor(1.0, 50.0);
    for (int i = 0; i < 200; ++i) {
        SpectralProfile q;
        q.d_peak = depth(rng);
        q.sigma = width(rng);
        q.d_background = depth(rng);
        const double b = factor(rng);
        const auto r = apply_broadening(q, b);
        CHECK(r.peak_area() == doctest::Approx(q.peak_area()).epsilon(1e-12));
    }
}

TEST_CASE("voltage calibration") {
    CHECK(broadening_from_voltage(50.0, 0.04) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(broadening_from_voltage(0.0, 0.04) == 1.0);
    CHECK(broadening_from_voltage(0.0, 123.0) == 1.0);
    CHECK(broadening_from_voltage(70.0, 0.04) == doctest::Approx(3.8).epsilon(1e-12));

    // strictly increasing in voltage
    double prev = broadening_from_voltage(0.0, 0.04);
    for (int i = 1; i <= 10; ++i) {
        const double cur = broadening_from_voltage(10.0 * i, 0.04);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("polarity has exactly two segments") {
    StarkSchedule s;
    s.broadening_factor = 3.0;
    s.switch_time = 150e-9;
    CHECK(s.polarity(0.0) == 1);
    CHECK(s.polarity(149e-9) == 1);
    CHECK(s.polarity(150e-9) == -1);
    CHECK(s.polarity(1.0) == -1);
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(gaussian_peak_profile(0.5, 0.0, 1.6), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_peak_profile(0.5, -1e6, 1.6), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_peak_profile(-0.1, 1e6, 1.6), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_peak_profile(0.5, 1e6, -0.1), std::invalid_argument);

    auto p = gaussian_peak_profile(0.5, 1e6, 1.6);
    CHECK_THROWS_AS(apply_broadening(p, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(broadening_from_voltage(-1.0, 0.04), std::invalid_argument);

    StarkSchedule s;
    s.switch_time = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s.switch_time = 1e-7;
    s.broadening_factor = 0.9;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
