#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "sobmat/polynomial.hpp"
#include "sobmat/quadrature.hpp"

using namespace sobmat;

TEST_CASE("small Gauss-Legendre rules match known nodes") {
    const auto r1 = gauss_legendre(1, -1.0, 1.0);
    REQUIRE(r1.nodes.size() == 1);
    CHECK(r1.nodes[0] == 0.0);
    CHECK(r1.weights[0] == 2.0);

    const auto r2 = gauss_legendre(2, -1.0, 1.0);
    const double x = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(r2.nodes[0] + x) < 1e-15);
    CHECK(std::abs(r2.nodes[1] - x) < 1e-15);
    CHECK(std::abs(r2.weights[0] - 1.0) < 1e-15);
    CHECK(std::abs(r2.weights[1] - 1.0) < 1e-15);
    // degree-3 exactness: integral of z^2 over [-1,1] is 2/3
    CHECK(std::abs(integrate([](double z) { return z * z; }, r2) - 2.0 / 3.0) < 1e-15);
}

TEST_CASE("rule invariants") {
    for (int n : {1, 2, 3, 5, 8, 16, 33, 64}) {
        const auto r = gauss_legendre(n, -2.0, 3.5);
        double sum = 0.0;
        for (std::size_t i = 0; i < r.nodes.size(); ++i) {
            CHECK(r.nodes[i] > -2.0);
            CHECK(r.nodes[i] < 3.5);
            if (i > 0) CHECK(r.nodes[i] > r.nodes[i - 1]);
            CHECK(r.weights[i] > 0.0);
            sum += r.weights[i];
        }
        CHECK(std::abs(sum - 5.5) < 1e-12);  // weights sum to b-a
    }
    CHECK_THROWS_AS(gauss_legendre(0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gauss_legendre(4, 2.0, -2.0), std::invalid_argument);
}

TEST_CASE("simple integrals") {
    const auto r = gauss_legendre(4, -1.0, 1.0);
    CHECK(std::abs(integrate([](double) { return 1.0; }, r) - 2.0) < 1e-15);
    CHECK(std::abs(integrate([](double z) { return z; }, r)) < 1e-15);  // odd symmetry

    // integral of z^5 over [0,2] is 2^6/6 = 32/3
    const auto r3 = gauss_legendre(3, 0.0, 2.0);
    CHECK(std::abs(integrate([](double z) { return std::pow(z, 5); }, r3) - 32.0 / 3.0) <
          1e-12 * (1.0 + 32.0 / 3.0));
}

TEST_CASE("exactness for random polynomials up to degree 2n-1") {
    std::mt19937_64 rng(0xACC5);
    for (int n : {2, 4, 7, 12, 20}) {
        const double a = -1.3, b = 2.1;
        const auto rule = gauss_legendre(n, a, b);
        for (int trial = 0; trial < 10; ++trial) {
            const Polynomial p = random_polynomial(2 * n - 1, rng);
            // independent oracle: antiderivative difference
            const Polynomial P = antiderivative(p);
            const double exact = P(b) - P(a);
            const double got = integrate([&](double z) { return p(z); }, rule);
            CHECK(std::abs(got - exact) <= 1e-12 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("positivity of positive integrands") {
    const auto r = gauss_legendre(16, -1.0, 1.0);
    CHECK(integrate([](double z) { return std::exp(z) + 0.5; }, r) > 0.0);
    CHECK(integrate([](double z) { return z * z + 1e-8; }, r) > 0.0);
}

TEST_CASE("auto_order picks the smallest exact rule") {
    CHECK(auto_order(0, 7).order == 4);   // 2*4-1 = 7
    CHECK(auto_order(0, 7).exact);
    CHECK(auto_order(0, 0).order == 1);
    CHECK(auto_order(3, 4).order == 4);   // total 7
    CHECK(auto_order(2, 4).order == 4);   // total 6 needs 2n-1 >= 6
    const auto adaptive = auto_order(std::nullopt, 4);
    CHECK_FALSE(adaptive.exact);
    CHECK(adaptive.order == 16);
}

TEST_CASE("adaptive integration of smooth non-polynomials") {
    const auto res = integrate_auto([](double z) { return std::exp(z); }, 0.0, 1.0,
                                    auto_order(std::nullopt, std::nullopt));
    CHECK(res.converged);
    CHECK(std::abs(res.value - (std::exp(1.0) - 1.0)) < 1e-12);
}

TEST_CASE("pairwise summation is order-deterministic") {
    std::vector<double> v(1000);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& x : v) x = u(rng);
    const double s1 = pairwise_sum(v);
    const double s2 = pairwise_sum(v);
    CHECK(s1 == s2);
}
