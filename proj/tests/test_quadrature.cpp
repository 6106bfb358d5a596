#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "xdisk/angles.hpp"
#include "xdisk/error.hpp"
#include "xdisk/quadrature.hpp"

using namespace xdisk;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const GaussRule r = gauss_legendre(6); // exact through degree 11
    for (int p = 0; p <= 11; ++p) {
        double acc = 0.0;
        for (int i = 0; i < r.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], p);
        const double exact = (p % 2 == 0) ? 2.0 / (p + 1.0) : 0.0;
        CHECK(std::abs(acc - exact) < 1e-14);
    }
}

TEST_CASE("gauss-jacobi total mass matches the Beta integral") {
    struct Case {
        double a, b, mass;
    };
    // int (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    const Case cases[] = {
        {0.5, 0.5, kPi / 2.0},
        {-0.5, -0.5, kPi},
        {1.0, 0.0, 2.0},
        {2.5, 0.0, std::pow(2.0, 3.5) / 3.5},
    };
    for (const auto& c : cases) {
        const GaussRule r = gauss_jacobi(10, c.a, c.b);
        CHECK(r.weights.sum() == doctest::Approx(c.mass).epsilon(1e-13));
    }
}

TEST_CASE("gauss-jacobi moments for an asymmetric weight") {
    // int x (1-x)^1 (1+x)^0 dx over (-1,1) = -2/3 by direct integration.
    const GaussRule r = gauss_jacobi(8, 1.0, 0.0);
    double m1 = 0.0;
    for (int i = 0; i < r.size(); ++i) m1 += r.weights[i] * r.nodes[i];
    CHECK(m1 == doctest::Approx(-2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("gauss-jacobi rejects bad parameters") {
    CHECK_THROWS_AS(gauss_jacobi(0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(gauss_jacobi(4, -1.0, 0.0), DomainError);
}

TEST_CASE("double-exponential rule on the line") {
    const DeRule r = de_rule(2, 1.0);
    SUBCASE("sech integrates to pi") {
        auto res = r.integrate([](double t) { return Complex(1.0 / std::cosh(t), 0.0); }, 1e-12);
        CHECK(std::abs(res.value.real() - kPi) < 1e-12);
        CHECK(res.converged);
    }
    SUBCASE("sech^2 integrates to 2") {
        auto res = r.integrate([](double t) { return Complex(std::pow(std::cosh(t), -2.0), 0.0); },
                               1e-12);
        CHECK(std::abs(res.value.real() - 2.0) < 1e-12);
    }
    SUBCASE("levels nest") {
        const DeRule coarse = de_rule(1, 1.0);
        REQUIRE(r.size() == 2 * coarse.size() - 1);
        for (int i = 0; i < coarse.size(); ++i)
            CHECK(coarse.nodes[i] == doctest::Approx(r.nodes[2 * i]).epsilon(1e-15));
    }
    SUBCASE("impossible tolerance raises the flag") {
        auto res = r.integrate([](double t) { return Complex(1.0 / std::cosh(t), 0.0); }, 1e-40);
        CHECK_FALSE(res.converged);
    }
}

TEST_CASE("fft roundtrip and a known transform") {
    std::vector<Complex> v(8);
    for (int i = 0; i < 8; ++i) v[i] = Complex(std::sin(0.3 * i), std::cos(1.1 * i));
    auto w = v;
    fft_pow2(w, -1);
    // delta in frequency: constant input
    std::vector<Complex> c(8, Complex(1.0, 0.0));
    fft_pow2(c, -1);
    CHECK(std::abs(c[0] - Complex(8.0, 0.0)) < 1e-13);
    for (int k = 1; k < 8; ++k) CHECK(std::abs(c[k]) < 1e-13);
    // inverse recovers input after 1/N scaling
    fft_pow2(w, +1);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(w[i] / 8.0 - v[i]) < 1e-13);
    std::vector<Complex> bad(6);
    CHECK_THROWS_AS(fft_pow2(bad, -1), DomainError);
}
