#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "sobmat/fixtures.hpp"
#include "sobmat/inner.hpp"
#include "sobmat/symmetrizer.hpp"
#include "sobmat/weight.hpp"

using namespace sobmat;

namespace {

MatrixWeight identity_weight(int rho) {
    const int d = rho + 1;
    std::vector<std::vector<std::string>> grid(d, std::vector<std::string>(d, "0"));
    for (int i = 0; i < d; ++i) grid[i][i] = "1";
    return MatrixWeight::parse(rho, -1.0, 1.0, grid);
}

MatrixWeight example1_weight() {
    return MatrixWeight::parse(1, -1.0, 1.0, {{"1", "0"}, {"0", "z^2+1"}});
}

}  // namespace

TEST_CASE("weight evaluation") {
    const auto I = identity_weight(1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const Eigen::MatrixXd M = weight_eval(I, u(rng));
        CHECK(M.isApprox(Eigen::MatrixXd::Identity(2, 2)));
    }

    const auto W = example1_weight();
    const Eigen::MatrixXd M = weight_eval(W, 1.0);
    CHECK(M(0, 0) == 1.0);
    CHECK(M(1, 1) == 2.0);
    CHECK(M(0, 1) == 0.0);

    const auto bad = MatrixWeight::parse(1, -1.0, 1.0, {{"1", "0"}, {"0", "1/(z-0.5)"}});
    CHECK_THROWS_AS(weight_eval(bad, 0.5), EvalError);
}

TEST_CASE("weight validation") {
    SECTION("identity passes with min eigenvalue 1") {
        const auto rep = validate_weight(identity_weight(1), 101);
        CHECK(rep.overall_pass());
        const auto* eig = rep.find("weight.min_eigenvalue");
        REQUIRE(eig != nullptr);
        CHECK(eig->value == 1.0);
    }
    SECTION("diag(1, z) fails full rank at z <= 0") {
        const auto W = MatrixWeight::parse(1, -1.0, 1.0, {{"1", "0"}, {"0", "z"}});
        const auto rep = validate_weight(W, 101);
        CHECK_FALSE(rep.overall_pass());
        const auto* eig = rep.find("weight.min_eigenvalue");
        REQUIRE(eig != nullptr);
        CHECK_FALSE(eig->pass);
        REQUIRE(eig->worst_z.has_value());
        CHECK(*eig->worst_z <= 0.0);
    }
    SECTION("random SPD weights pass by construction") {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto W = random_spd_weight(2, -1.0, 1.0, 3, seed);
            const auto rep = validate_weight(W, 201);
            CHECK(rep.overall_pass());
            const auto* eig = rep.find("weight.min_eigenvalue");
            REQUIRE(eig != nullptr);
            CHECK(eig->value >= 0.099);  // shift is 0.1
        }
    }
    SECTION("asymmetric entries are rejected") {
        const auto W = MatrixWeight::parse(1, -1.0, 1.0, {{"1", "z"}, {"0", "1"}});
        const auto rep = validate_weight(W, 101);
        const auto* sym = rep.find("weight.symmetry");
        REQUIRE(sym != nullptr);
        CHECK_FALSE(sym->pass);
    }
    SECTION("negative density is rejected") {
        const auto W = MatrixWeight::parse(1, -1.0, 1.0, {{"1", "0"}, {"0", "1"}}, "z");
        const auto rep = validate_weight(W, 101);
        const auto* dens = rep.find("weight.density_positive");
        REQUIRE(dens != nullptr);
        CHECK_FALSE(dens->pass);
    }
}

TEST_CASE("jets") {
    const auto j1 = jet(Polynomial::monomial(2), 1);  // (z^2, 2z)
    CHECK(j1.eval(3.0)(0) == 9.0);
    CHECK(j1.eval(3.0)(1) == 6.0);

    const auto j2 = jet(Polynomial::constant(1.0), 2);  // (1, 0, 0)
    CHECK(j2.eval(0.7)(0) == 1.0);
    CHECK(j2.eval(0.7)(1) == 0.0);
    CHECK(j2.eval(0.7)(2) == 0.0);
}

TEST_CASE("Leibniz identity jet(z p) = jet(p) A(z)") {
    std::mt19937_64 rng(0x1E1B);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int rho : {1, 2, 3}) {
        for (int trial = 0; trial < 20; ++trial) {
            const Polynomial p = random_polynomial(15, rng);
            const auto lhs = jet(p.times_z(), rho);
            const auto base = jet(p, rho);
            for (int k = 0; k < 50; ++k) {
                const double z = u(rng);
                const Eigen::RowVectorXd l = lhs.eval(z);
                const Eigen::RowVectorXd r = base.eval(z) * leibniz_matrix(rho, z);
                const double scale = 1.0 + l.cwiseAbs().maxCoeff();
                CHECK((l - r).cwiseAbs().maxCoeff() <= 1e-13 * scale);
            }
        }
    }
    // the degree-3 instance named explicitly: jet(z * z^3) vs jet(z^3) A at rho=2
    const Polynomial p3 = Polynomial::monomial(3);
    const auto lhs = jet(p3.times_z(), 2);
    const auto base = jet(p3, 2);
    std::mt19937_64 rng2(99);
    std::uniform_real_distribution<double> u2(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const double z = u2(rng2);
        CHECK((lhs.eval(z) - base.eval(z) * leibniz_matrix(2, z)).cwiseAbs().maxCoeff() <=
              1e-13 * (1.0 + lhs.eval(z).cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("L2(M) inner product examples") {
    const auto I = identity_weight(1);
    const VectorFunction e0({ScalarFunction(1.0), ScalarFunction(0.0)});
    const VectorFunction e1({ScalarFunction(0.0), ScalarFunction(1.0)});
    CHECK(std::abs(l2m_inner(e0, e0, I) - 2.0) < 1e-14);
    CHECK(std::abs(l2m_inner(e0, e1, I)) < 1e-14);

    const VectorFunction v({ScalarFunction(Polynomial::monomial(1)), ScalarFunction(1.0)});
    CHECK(std::abs(l2m_inner(v, v, I) - 8.0 / 3.0) < 1e-14);

    CHECK_THROWS_AS(l2m_inner(VectorFunction({ScalarFunction(1.0)}), e0, I),
                    std::invalid_argument);
}

TEST_CASE("Sobolev inner product examples") {
    const auto I = identity_weight(1);
    const Polynomial one = Polynomial::constant(1.0);
    const Polynomial z = Polynomial::monomial(1);
    CHECK(std::abs(sobolev_inner(one, one, I) - 2.0) < 1e-14);
    CHECK(std::abs(sobolev_inner(z, one, I)) < 1e-14);
    CHECK(std::abs(sobolev_inner(z, z, I) - 8.0 / 3.0) < 1e-14);
}

TEST_CASE("inner product properties") {
    const auto W = random_spd_weight(1, -1.0, 1.0, 3, 42);
    std::mt19937_64 rng(0xB111);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    SECTION("symmetry") {
        for (int t = 0; t < 20; ++t) {
            const Polynomial p = random_polynomial(8, rng);
            const Polynomial q = random_polynomial(8, rng);
            const double pq = sobolev_inner(p, q, W);
            const double qp = sobolev_inner(q, p, W);
            CHECK(std::abs(pq - qp) <= 1e-14 * (1.0 + std::abs(pq)));
        }
    }
    SECTION("positivity for nonzero polynomials") {
        for (int t = 0; t < 50; ++t) {
            const Polynomial p = random_polynomial(10, rng);
            if (p.is_zero()) continue;
            CHECK(sobolev_inner(p, p, W) > 0.0);
        }
    }
    SECTION("bilinearity") {
        for (int t = 0; t < 10; ++t) {
            const Polynomial p = random_polynomial(6, rng);
            const Polynomial q = random_polynomial(6, rng);
            const Polynomial r = random_polynomial(6, rng);
            const double alpha = u(rng);
            const double lhs = sobolev_inner(alpha * p + q, r, W);
            const double rhs = alpha * sobolev_inner(p, r, W) + sobolev_inner(q, r, W);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("non-polynomial weights integrate adaptively") {
    const auto W = MatrixWeight::parse(1, -1.0, 1.0, {{"exp(z)", "0"}, {"0", "exp(z)"}});
    CHECK_FALSE(W.total_degree().has_value());
    const Polynomial one = Polynomial::constant(1.0);
    // integral of exp over [-1,1]
    const double expected = std::exp(1.0) - std::exp(-1.0);
    CHECK(std::abs(sobolev_inner(one, one, W) - expected) < 1e-11);
}

TEST_CASE("weight config round trip through expression printing") {
    std::mt19937_64 rng(314);
    const Polynomial p = random_polynomial(5, rng);
    const auto text = polynomial_to_expr(p);
    // Two parses of the same text are the same function bit for bit; against
    // the Horner evaluation of p only roundoff-level agreement is expected.
    const auto ast1 = parse_expr(text);
    const auto ast2 = parse_expr(text);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        const double z = u(rng);
        CHECK(eval_expr(ast1, z) == eval_expr(ast2, z));
        CHECK(std::abs(eval_expr(ast1, z) - p(z)) <= 1e-13 * (1.0 + std::abs(p(z))));
    }
}
