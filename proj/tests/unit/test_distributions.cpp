#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "pstrat/distributions.hpp"

using namespace pstrat;

TEST_CASE("incomplete beta closed forms") {
    CHECK(dist::incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(dist::incomplete_beta(2, 1, 0.3) == doctest::Approx(0.09).epsilon(1e-14));
    CHECK(dist::incomplete_beta(1, 3, 0.5) == doctest::Approx(1 - 0.125).epsilon(1e-14));
    CHECK(dist::incomplete_beta(2.5, 4, 0.0) == 0.0);
    CHECK(dist::incomplete_beta(2.5, 4, 1.0) == 1.0);
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(dist::incomplete_beta(3.2, 0.7, 0.4) == doctest::Approx(1 - dist::incomplete_beta(0.7, 3.2, 0.6)));
}

TEST_CASE("incomplete beta agrees with boost::math::ibeta") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ab(0.05, 200.0), x(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double a = ab(rng), b = ab(rng), xx = x(rng);
        worst = std::max(worst, std::abs(dist::incomplete_beta(a, b, xx) - boost::math::ibeta(a, b, xx)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("Student t tails agree with boost to 1e-8") {
    double worst = 0.0;
    for (double df : {1.0, 2.0, 3.5, 7.0, 29.9, 63.8, 112.6, 1000.0, 1e6}) {
        const boost::math::students_t_distribution<double> t(df);
        for (double v = -40.0; v <= 40.0; v += 0.137) {
            worst = std::max(worst, std::abs(dist::student_t_upper(v, df) - cdf(complement(t, v))));
            worst = std::max(worst, std::abs(dist::student_t_cdf(v, df) - cdf(t, v)));
        }
    }
    CHECK(worst < 1e-8);
    CHECK(dist::student_t_upper(0.0, 5.0) == 0.5);
    // Cauchy: P(T > 1) = 1/4
    CHECK(dist::student_t_upper(1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("normal tails agree with boost") {
    const boost::math::normal_distribution<double> n;
    for (double z = -38.0; z <= 38.0; z += 0.25) {
        CHECK(std::abs(dist::normal_upper(z) - cdf(complement(n, z))) < 1e-15);
        CHECK(std::abs(dist::normal_cdf(z) - cdf(n, z)) < 1e-15);
    }
    CHECK(dist::normal_upper(1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
}
