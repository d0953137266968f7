#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "conet/errors.hpp"
#include "conet/levy.hpp"
#include "conet/net.hpp"
#include "support.hpp"

using namespace conet;
using fix::E;

TEST_CASE("zero background integrates its potentials and surface") {
    NetState s = fix::plane_n2(1);
    CHECK(s.N == 2);
    CHECK(s.P == 2);
    CHECK(s.beta.empty());
    CHECK(equal(s.seeds[0].omega, E("exp(2*u1)/2 + exp(2*u2)/2")));
    CHECK(equal(s.x[0], E("exp(2*u1)/2")));
    CHECK(equal(s.x[1], E("exp(2*u2)/2")));
    CHECK(validate_state(s));
}

TEST_CASE("background construction rejects inadmissible data") {
    BackgroundSpec spec;
    spec.N = 2;
    spec.P = 2;
    spec.tangents = {{E("exp(u1)"), E("0")}, {E("0"), E("exp(u2)")}};
    spec.lame = {E("exp(u1)"), E("exp(u2)")};
    spec.seeds = {{"s1", fix::exp_seed(2, 1)}};

    SUBCASE("tangent leaking into a foreign direction") {
        spec.tangents[0][1] = E("exp(u2)");
        CHECK_THROWS_AS(make_background(spec), DomainError);
    }
    SUBCASE("quotient where the class requires a polynomial-exponential") {
        spec.lame[0] = E("1/u1");
        CHECK_THROWS_AS(make_background(spec), DomainError);
    }
    SUBCASE("seed component in a foreign direction") {
        spec.seeds[0].second[1] = E("exp(u1)");
        CHECK_THROWS_AS(make_background(spec), DomainError);
    }
    SUBCASE("duplicate seed labels") {
        spec.seeds.push_back({"s1", fix::exp_seed(2, 2)});
        CHECK_THROWS_AS(make_background(spec), DomainError);
    }
    SUBCASE("ambient dimension below direction count") {
        spec.P = 1;
        CHECK_THROWS_AS(make_background(spec), DomainError);
    }
}

TEST_CASE("constant data integrates to linear potentials") {
    BackgroundSpec spec;
    spec.N = 2;
    spec.P = 2;
    spec.tangents = {{E("1"), E("0")}, {E("0"), E("1")}};
    spec.lame = {E("1"), E("1")};
    spec.seeds = {{"s1", {E("1"), E("1")}}};
    NetState s = make_background(spec);
    CHECK(equal(s.seeds[0].omega, E("u1+u2")));
    CHECK(equal(s.x[0], E("u1")));
    CHECK(validate_state(s));
}

TEST_CASE("residual operators vanish on every validated background") {
    for (NetState s : {fix::demo_n2(), fix::demo_n3()}) {
        for (int i = 0; i < s.N; ++i) {
            for (int j = 0; j < s.N; ++j) {
                if (i == j) continue;
                for (const RationalExpr& r : residual_tangent(s, i, j)) CHECK(r.is_zero());
                CHECK(residual_lame(s, i, j).is_zero());
                for (int a = 0; a < static_cast<int>(s.seeds.size()); ++a)
                    CHECK(residual_seed(s, i, j, a).is_zero());
                for (int k = 0; k < s.N; ++k)
                    if (k != i && k != j) CHECK(residual_darboux(s, i, j, k).is_zero());
            }
            for (const RationalExpr& r : residual_point(s, i)) CHECK(r.is_zero());
            for (int a = 0; a < static_cast<int>(s.seeds.size()); ++a)
                CHECK(residual_omega(s, i, a).is_zero());
        }
    }
}

TEST_CASE("residual operators reject bad indices") {
    NetState s = fix::demo_n3();
    CHECK_THROWS_AS(residual_darboux(s, 0, 0, 1), DomainError);
    CHECK_THROWS_AS(residual_darboux(s, 0, 1, 1), DomainError);
    CHECK_THROWS_AS(residual_darboux(s, 0, 1, 3), DomainError);
    CHECK_THROWS_AS(residual_lame(s, 2, 2), DomainError);
    CHECK_THROWS_AS(residual_tangent(s, -1, 0), DomainError);
    CHECK_THROWS_AS(residual_seed(s, 0, 1, 7), DomainError);
}

TEST_CASE("residuals expose a corrupted state") {
    NetState s = fix::plane_n2(1);
    s.set_beta(0, 1, E("1"));
    CHECK_FALSE(residual_lame(s, 0, 1).is_zero());
    CHECK_FALSE(validate_state(s));
}

TEST_CASE("laplace form holds symbolically before and after a transform") {
    NetState s = fix::demo_n2();
    for (int l = 0; l < s.P; ++l) CHECK(residual_laplace(s, 0, 1, l).is_zero());

    NetState t = levy_step(s, 0, "s1");
    for (int l = 0; l < t.P; ++l) CHECK(residual_laplace(t, 0, 1, l).is_zero());

    // and numerically at a few points, as an independent reading of the form
    for (double u1 : {-0.7, 0.3}) {
        Point pt = Point::floats({u1, 0.41});
        for (int l = 0; l < t.P; ++l) {
            const RationalExpr &hi = t.H[0], &hj = t.H[1], &xl = t.x[l];
            double t1 = (hi * hj * xl.derivative(0).derivative(1)).eval_float(pt);
            double t2 = (hi.derivative(1) * hj * xl.derivative(0)).eval_float(pt);
            double t3 = (hj.derivative(0) * hi * xl.derivative(1)).eval_float(pt);
            CHECK(std::abs(t1 - t2 - t3) <= 1e-9 * std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)}));
        }
    }
}

TEST_CASE("config documents load into backgrounds") {
    NetConfig cfg = load_config_file(fix::config_path("demo_n2.json"));
    CHECK(cfg.background.N == 2);
    CHECK(cfg.background.P == 3);
    REQUIRE(cfg.partition.has_value());
    CHECK(*cfg.partition == std::vector<int>{1, 1});
    REQUIRE(cfg.steps.size() == 2);
    CHECK(cfg.steps[0].direction == 0); // documents are 1-based, state is 0-based
    CHECK(cfg.steps[1].seed == "s2");
    NetState s = make_background(cfg.background);
    CHECK(validate_state(s));
}

TEST_CASE("malformed config documents are parse errors") {
    CHECK_THROWS_AS(load_config(nlohmann::json{{"N", 2}}), ParseError);
    nlohmann::json doc;
    doc["N"] = 2;
    doc["P"] = 2;
    doc["tangents"] = nlohmann::json::array({nlohmann::json::array({"exp(u1)", "0"}),
                                             nlohmann::json::array({"0", "exp(u2)"})});
    doc["lame"] = nlohmann::json::array({"exp(u1)", "exp(u2)"});
    doc["seeds"] = nlohmann::json::array(
        {{{"label", "s1"}, {"components", nlohmann::json::array({"exp(u1", "exp(u2)"})}}});
    CHECK_THROWS_AS(load_config(doc), ParseError);
    doc["seeds"][0]["components"] = nlohmann::json::array({"exp(u1)", "exp(u2)"});
    CHECK_NOTHROW(load_config(doc));
}

TEST_CASE("state dumps re-ingest to an equal state") {
    NetState s = levy_step(fix::demo_n2(), 0, "s1");
    NetState r = load_state(dump_state(s));
    CHECK(r.N == s.N);
    CHECK(r.P == s.P);
    for (int i = 0; i < s.N; ++i)
        for (int j = 0; j < s.N; ++j)
            if (i != j) CHECK(equal(r.beta_at(i, j), s.beta_at(i, j)));
    for (int i = 0; i < s.N; ++i) {
        CHECK(equal(r.H[i], s.H[i]));
        for (int l = 0; l < s.P; ++l) CHECK(equal(r.X[i][l], s.X[i][l]));
    }
    for (int l = 0; l < s.P; ++l) CHECK(equal(r.x[l], s.x[l]));
    REQUIRE(r.seeds.size() == s.seeds.size());
    for (std::size_t a = 0; a < s.seeds.size(); ++a) {
        CHECK(r.seeds[a].label == s.seeds[a].label);
        CHECK(equal(r.seeds[a].omega, s.seeds[a].omega));
        for (int k = 0; k < s.N; ++k) CHECK(equal(r.seeds[a].xi[k], s.seeds[a].xi[k]));
    }
}
