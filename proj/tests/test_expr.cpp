#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "conet/errors.hpp"
#include "conet/expr.hpp"

using namespace conet;

namespace {

RationalExpr E(const std::string& s) { return parse_expr(s); }

// Central difference of a single-variable expression, one Richardson level.
double fd1(const RationalExpr& f, double u, double h) {
    auto central = [&](double step) {
        return (f.eval_float(Point::floats({u + step})) - f.eval_float(Point::floats({u - step}))) / (2.0 * step);
    };
    return (4.0 * central(h / 2.0) - central(h)) / 3.0;
}

} // namespace

TEST_CASE("parsing lands on the denoted term") {
    RationalExpr a = E("exp(2*u1)");
    REQUIRE(a.is_polynomial());
    const ExpPoly& p = a.poly();
    CHECK(p.term_count() == 1);
    const auto& [key, coeff] = *p.terms().begin();
    CHECK(coeff == 1);
    CHECK(key.powers.empty());
    REQUIRE(key.rates.size() == 1);
    CHECK(key.rates.at(0) == 2);

    RationalExpr b = E("u1^2 * exp(-u2) / 3");
    REQUIRE(b.is_polynomial());
    const auto& [kb, cb] = *b.poly().terms().begin();
    CHECK(cb == make_rat(1, 3));
    CHECK(kb.powers.at(0) == 2);
    CHECK(kb.rates.at(1) == -1);
}

TEST_CASE("exponential arguments outside the class are rejected as such") {
    CHECK_THROWS_AS(parse_expr("exp(u1*u2)"), ClassViolationError);
    CHECK_THROWS_AS(parse_expr("exp(u1+u2)"), ClassViolationError);
    CHECK_THROWS_AS(parse_expr("exp(2)"), ClassViolationError);
    CHECK_THROWS_AS(parse_expr("exp(u1^2)"), ClassViolationError);
    // plain syntax damage is a parse error, not a class violation
    CHECK_THROWS_AS(parse_expr("exp(2*u1"), ParseError);
    CHECK_THROWS_AS(parse_expr("2 +"), ParseError);
    CHECK_THROWS_AS(parse_expr("u0"), ParseError);
    CHECK_THROWS_AS(parse_expr(""), ParseError);
}

TEST_CASE("field operations stay canonical") {
    CHECK(field_ops(E("exp(u1)"), E("0-exp(u1)"), FieldOp::Add).is_zero());
    CHECK(equal(field_ops(E("exp(u1)"), E("exp(u1)"), FieldOp::Mul), E("exp(2*u1)")));
    CHECK(equal(field_ops(E("u1"), E("u1"), FieldOp::Div), E("1")));
    CHECK(equal(E("u1") / E("u1"), RationalExpr::one()));
    CHECK_THROWS_AS(field_ops(E("1"), E("0"), FieldOp::Div), PoleError);

    // subtraction through the quotient normal form
    RationalExpr q = E("(exp(u1)+1)/(exp(u2)+1)");
    CHECK((q - q).is_zero());
    CHECK(equal(q * E("exp(u2)+1"), E("exp(u1)+1")));
}

TEST_CASE("derivatives: product, independence, quotient") {
    CHECK(equal(E("u1*exp(2*u1)").derivative(0), E("(1+2*u1)*exp(2*u1)")));
    CHECK(E("exp(u1)").derivative(1).is_zero());

    RationalExpr inv = E("1/u1");
    RationalExpr d = inv.derivative(0);
    CHECK(equal(d, E("(0-1)/u1^2")));
    // finite-difference cross-check at u1 = 2
    double got = d.eval_float(Point::floats({2.0}));
    CHECK(std::abs(got - fd1(inv, 2.0, 1e-4)) < 1e-8);
    CHECK(std::abs(got - (-0.25)) < 1e-12);
}

TEST_CASE("antiderivatives in closed form, constant fixed to zero") {
    CHECK(equal(RationalExpr(antiderivative(E("exp(2*u1)").poly(), 0)), E("exp(2*u1)/2")));
    CHECK(equal(RationalExpr(antiderivative(E("1").poly(), 0)), E("u1")));

    ExpPoly f = E("u1*exp(u1)").poly();
    ExpPoly F = antiderivative(f, 0);
    CHECK(equal(RationalExpr(F), E("(u1-1)*exp(u1)")));
    CHECK((RationalExpr(F.derivative(0)) - RationalExpr(f)).is_zero());
}

TEST_CASE("derivative of antiderivative is the identity on the class") {
    const char* samples[] = {"u1^3", "u1^2*exp(-u1)", "exp(3*u1)+u1", "5", "u2*exp(u1)*u1^2",
                             "exp(-2*u1)*u1^4 - 7*u1"};
    for (const char* s : samples) {
        ExpPoly a = E(s).poly();
        for (int dir : {0, 1}) {
            ExpPoly F = antiderivative(a, dir);
            CHECK((RationalExpr(F.derivative(dir)) - RationalExpr(a)).is_zero());
        }
    }
}

TEST_CASE("evaluation in both modes") {
    Point zero_f = Point::floats({0.0});
    CHECK(E("exp(u1)").eval_float(zero_f) == doctest::Approx(1.0));
    // exact mode substitutes the base for exp(u1); base 1 is the u1 = 0 slice
    Point zero_q = Point::rationals({Rat(0)});
    CHECK(E("exp(u1)").eval_exact(zero_q, {Rat(1)}) == 1);

    CHECK(E("exp(2*u1)").eval_exact(zero_q, {Rat(3)}) == 9);

    Point zq2 = Point::rationals({Rat(0), Rat(0)});
    Rat v = E("exp(u1)*exp(2*u2) - exp(2*u1)*exp(u2)").eval_exact(zq2, {Rat(2), Rat(3)});
    CHECK(v == 6); // 2*9 - 4*3

    CHECK_THROWS_AS(E("1/(u1-1)").eval_float(Point::floats({1.0})), PoleError);
    CHECK_THROWS_AS(E("1/(u1-1)").eval_exact(Point::rationals({Rat(1)}), {Rat(2)}), PoleError);
    // non-integer rates have no commensurate substitution
    CHECK_THROWS_AS(E("exp(1/2*u1)").eval_exact(zero_q, {Rat(2)}), DomainError);
}

TEST_CASE("is_zero is a decision procedure") {
    CHECK((E("exp(u1)*exp(u2)") - E("exp(u1)*exp(u2)")).is_zero());
    CHECK_FALSE((E("exp(u1)") - E("exp(u2)")).is_zero());

    // quotient rule residual vanishes identically for a small family
    const char* fs[] = {"u1^2", "exp(u1)+1", "u1*exp(-u1)", "u2+u1^3"};
    const char* gs[] = {"u1+1", "exp(2*u1)", "u1^2+u2^2", "exp(u1)-u1"};
    for (const char* fs_i : fs)
        for (const char* gs_j : gs) {
            RationalExpr f = E(fs_i), g = E(gs_j);
            RationalExpr lhs = (f / g).derivative(0);
            RationalExpr rhs = (g * f.derivative(0) - f * g.derivative(0)) / (g * g);
            CHECK(equal(lhs, rhs));
        }
}

TEST_CASE("canonical form is stable under printing and reparsing") {
    const char* samples[] = {
        "exp(2*u1)",         "u1^2*exp(-u2)/3",        "(exp(u1)+1)/(exp(u2)-u2)",
        "0-exp(u2)/exp(u1)", "exp(3/2*u1)*u2 - 5/7",   "1/2 + u1*u2^3",
        "-u1 + 2",           "(u1-1)*(u1+1)",
    };
    for (const char* s : samples) {
        RationalExpr a = E(s);
        RationalExpr b = parse_expr(a.str());
        CHECK(equal(a, b));
        // idempotence: a second round trip prints the identical string
        CHECK(a.str() == b.str());
    }
}

TEST_CASE("linearity and commuting partials") {
    const char* as[] = {"u1^2*exp(u2)", "exp(u1)*exp(-2*u2)", "u1*u2"};
    const char* bs[] = {"exp(u2)", "u2^3", "u1 - exp(u1)"};
    for (const char* sa : as)
        for (const char* sb : bs) {
            RationalExpr a = E(sa), b = E(sb);
            for (int dir : {0, 1})
                CHECK(((a + b).derivative(dir) - (a.derivative(dir) + b.derivative(dir))).is_zero());
            CHECK((a.derivative(0).derivative(1) - a.derivative(1).derivative(0)).is_zero());
        }
}

TEST_CASE("float and exact evaluation agree on integer-rate exponentials") {
    // float at u_j = ln(t_j) against exact at base t_j
    std::vector<Rat> bases = {make_rat(3, 2), make_rat(2, 1)};
    Point pf = Point::floats({std::log(1.5), std::log(2.0)});
    Point pq = Point::rationals({Rat(0), Rat(0)}); // coordinates unused by pure exponentials
    const char* samples[] = {"exp(u1)", "exp(2*u1)*exp(-u2)", "exp(u1)*exp(2*u2) - exp(2*u1)*exp(u2)",
                             "(exp(u1)+exp(u2))/(exp(3*u1)+1)"};
    for (const char* s : samples) {
        RationalExpr a = E(s);
        double f = a.eval_float(pf);
        double q = to_double(a.eval_exact(pq, bases));
        CHECK(std::abs(f - q) <= 1e-10 * std::max(1.0, std::abs(q)));
    }
}

TEST_CASE("value wrapper keeps the mode") {
    EvalMode fm = EvalMode::floating();
    EvalMode xm = EvalMode::exact({Rat(2)});
    Value vf = evaluate(E("exp(u1)"), Point::floats({0.0}), fm);
    CHECK_FALSE(vf.exact);
    CHECK(vf.as_double() == doctest::Approx(1.0));
    Value vx = evaluate(E("exp(2*u1)"), Point::rationals({Rat(0)}), xm);
    CHECK(vx.exact);
    CHECK(vx.q == 4);
    CHECK_THROWS_AS(EvalMode::exact({Rat(-2)}), DomainError);
}
