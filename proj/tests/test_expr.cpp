#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "sobmat/expr.hpp"

using namespace sobmat;

TEST_CASE("parse basic forms") {
    CHECK(parse_expr("z")->kind == ExprKind::Variable);
    CHECK(eval_expr(parse_expr("2*z^2 + 1"), 2.0) == 9.0);
    CHECK(eval_expr(parse_expr("z^2+1"), 2.0) == 5.0);
    CHECK(eval_expr(parse_expr("exp(0*z)"), 7.0) == 1.0);
    CHECK(eval_expr(parse_expr("1.5e-3*z"), 2.0) == 3e-3);
    CHECK(eval_expr(parse_expr("sqrt(z^2)"), -3.0) == 3.0);
    CHECK(eval_expr(parse_expr("sin(0*z)+cos(0*z)"), 0.3) == 1.0);
}

TEST_CASE("precedence") {
    CHECK(eval_expr(parse_expr("2+3*4"), 0.0) == 14.0);
    // power binds tighter than unary minus
    CHECK(eval_expr(parse_expr("-z^2"), 2.0) == -4.0);
    CHECK(eval_expr(parse_expr("(-z)^2"), 2.0) == 4.0);
    CHECK(eval_expr(parse_expr("2-3-4"), 0.0) == -5.0);
    CHECK(eval_expr(parse_expr("12/3/2"), 0.0) == 2.0);
    // unary minus binds tighter than *
    CHECK(eval_expr(parse_expr("-2*3"), 0.0) == -6.0);
}

TEST_CASE("parse errors carry byte offsets") {
    CHECK_THROWS_AS(parse_expr(""), ParseError);
    try {
        parse_expr("(z");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS(parse_expr("z+"), ParseError);
    CHECK_THROWS_AS(parse_expr("w+1"), ParseError);
    CHECK_THROWS_AS(parse_expr("foo(z)"), ParseError);
    CHECK_THROWS_AS(parse_expr("z^-1"), ParseError);
    CHECK_THROWS_AS(parse_expr("z^2^3"), ParseError);
    CHECK_THROWS_AS(parse_expr("1..2"), ParseError);
}

TEST_CASE("evaluation domain errors name the subexpression") {
    auto e = parse_expr("1/(z-1)");
    CHECK(eval_expr(e, 0.0) == -1.0);
    try {
        eval_expr(e, 1.0);
        FAIL("expected EvalError");
    } catch (const EvalError& err) {
        CHECK(err.subexpr().find('/') != std::string::npos);
    }
    CHECK_THROWS_AS(eval_expr(parse_expr("sqrt(z)"), -1.0), EvalError);
}

TEST_CASE("polynomial degree detection") {
    CHECK(expr_poly_degree(parse_expr("3")) == 0);
    CHECK(expr_poly_degree(parse_expr("z^2*(z+1)")) == 3);
    CHECK(expr_poly_degree(parse_expr("exp(z)")) == std::nullopt);
    CHECK(expr_poly_degree(parse_expr("z/2")) == 1);
    CHECK(expr_poly_degree(parse_expr("1/z")) == std::nullopt);
    CHECK(expr_poly_degree(parse_expr("-z^4")) == 4);
    CHECK(expr_poly_degree(parse_expr("(z^2+1)^3")) == 6);
}

namespace {

ExprPtr random_ast(std::mt19937_64& rng, int depth) {
    std::uniform_real_distribution<double> uc(-3.0, 3.0);
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
    switch (pick(rng)) {
        case 0: return make_constant(uc(rng));
        case 1: return make_variable();
        case 2: return make_unary(ExprKind::Negate, random_ast(rng, depth - 1));
        case 3: return make_binary(ExprKind::Add, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 4: return make_binary(ExprKind::Sub, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 5: return make_binary(ExprKind::Mul, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 6: {
            // keep the denominator away from zero
            std::uniform_real_distribution<double> ud(0.5, 2.0);
            return make_binary(ExprKind::Div, random_ast(rng, depth - 1), make_constant(ud(rng)));
        }
        case 7: {
            std::uniform_int_distribution<int> ue(0, 4);
            return make_pow(random_ast(rng, depth - 1), ue(rng));
        }
        default: {
            std::uniform_int_distribution<int> ub(0, 3);
            const auto b = static_cast<Builtin>(ub(rng));
            if (b == Builtin::Sqrt || b == Builtin::Exp) {
                // sqrt needs a nonnegative argument; bounded argument keeps exp finite
                auto sq = make_pow(random_ast(rng, 0), 2);
                return make_call(b == Builtin::Exp ? Builtin::Exp : Builtin::Sqrt,
                                 make_binary(ExprKind::Add, std::move(sq), make_constant(1.0)));
            }
            return make_call(b, random_ast(rng, depth - 1));
        }
    }
}

}  // namespace

TEST_CASE("print/parse round trip preserves evaluation exactly") {
    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> uz(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        const ExprPtr ast = random_ast(rng, 4);
        const ExprPtr reparsed = parse_expr(to_string(ast));
        for (int k = 0; k < 100; ++k) {
            const double z = uz(rng);
            const double a = eval_expr(ast, z);
            const double b = eval_expr(reparsed, z);
            REQUIRE(a == b);  // bit-exact round trip
        }
    }
}
