#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "conet/errors.hpp"
#include "conet/levy.hpp"
#include "conet/verify.hpp"
#include "conet/wronski.hpp"
#include "support.hpp"

using namespace conet;
using fix::E;

TEST_CASE("partitions validate and index their blocks") {
    Partition p = Partition::of({2, 1, 3});
    CHECK(p.blocks() == 3);
    CHECK(p.total() == 6);
    CHECK(p.block_offset(0) == 0);
    CHECK(p.block_offset(2) == 3);
    CHECK(p.block_last_row(0) == 1);
    CHECK(p.block_last_row(2) == 5);
    CHECK_THROWS_AS(Partition::of({1, 0}), DomainError);
    CHECK_THROWS_AS(Partition::of({}), DomainError);
}

TEST_CASE("wronski blocks stack derivative rows") {
    NetState s = fix::demo_n2();

    SymMatrix one = wronski_block(s.seeds, 0, 1);
    CHECK(one.rows == 1);
    CHECK(one.cols == 2);
    CHECK(equal(one.at(0, 0), E("exp(u1)")));
    CHECK(equal(one.at(0, 1), E("exp(2*u1)")));

    SymMatrix two = wronski_block(s.seeds, 0, 2);
    CHECK(equal(two.at(1, 0), E("exp(u1)")));
    CHECK(equal(two.at(1, 1), E("2*exp(2*u1)")));

    // row r is the direction-derivative of row r-1
    SymMatrix tall = wronski_block(s.seeds, 1, 4);
    for (int r = 1; r < tall.rows; ++r)
        for (int c = 0; c < tall.cols; ++c)
            CHECK((tall.at(r, c) - tall.at(r - 1, c).derivative(1)).is_zero());

    CHECK_THROWS_AS(wronski_block(s.seeds, 0, 0), DomainError);
}

TEST_CASE("the multi-wronskian stacks one block per direction") {
    NetState s = fix::demo_n2();
    Partition p = Partition::of({1, 1});
    SymMatrix w = multi_wronskian(s.seeds, p);
    REQUIRE(w.rows == 2);
    CHECK(equal(w.at(0, 0), E("exp(u1)")));
    CHECK(equal(w.at(0, 1), E("exp(2*u1)")));
    CHECK(equal(w.at(1, 0), E("exp(u2)")));
    CHECK(equal(w.at(1, 1), E("exp(2*u2)")));

    CHECK(equal(det_symbolic(w), E("exp(u1)*exp(2*u2) - exp(2*u1)*exp(u2)")));

    CHECK_THROWS_AS(multi_wronskian(s.seeds, Partition::of({1, 2})), DomainError);
}

TEST_CASE("bordered matrices follow the frozen replacement conventions") {
    NetState s = fix::demo_n2();
    Partition p = Partition::of({1, 1});

    // last row of block 2 replaced by the m_1-th derivative row of direction 1
    SymMatrix w12 = bordered_rotation(s, p, 0, 1);
    CHECK(equal(w12.at(0, 0), E("exp(u1)")));
    CHECK(equal(w12.at(0, 1), E("exp(2*u1)")));
    CHECK(equal(w12.at(1, 0), E("exp(u1)")));
    CHECK(equal(w12.at(1, 1), E("2*exp(2*u1)")));
    CHECK(equal(det_symbolic(w12), E("exp(3*u1)")));

    // last row of block 1 replaced by the potentials
    SymMatrix h1 = bordered_lame(s, p, 0);
    CHECK(equal(h1.at(0, 0), s.seeds[0].omega));
    CHECK(equal(h1.at(0, 1), s.seeds[1].omega));
    CHECK(equal(h1.at(1, 0), E("exp(u2)")));
    CHECK(equal(h1.at(1, 1), E("exp(2*u2)")));

    // border column and row sit last
    SymMatrix x10 = bordered_tangent(s, p, 0, 0);
    REQUIRE(x10.rows == 3);
    CHECK(equal(x10.at(0, 2), s.X[0][0]));
    CHECK(equal(x10.at(1, 2), s.X[1][0]));
    CHECK(equal(x10.at(2, 0), s.seeds[0].xi[0].derivative(0)));
    CHECK(equal(x10.at(2, 2), s.X[0][0].derivative(0)));

    SymMatrix pt0 = bordered_point(s, p, 0);
    CHECK(equal(pt0.at(2, 0), s.seeds[0].omega));
    CHECK(equal(pt0.at(2, 2), s.x[0]));
}

TEST_CASE("closed-form rotation coefficient matches two composed transforms") {
    NetState s = fix::demo_n2();
    Partition p = Partition::of({1, 1});
    TransformedNet net(s, p);
    REQUIRE(net.has_symbolic());

    RationalExpr expected = E("(0-exp(3*u1))/(exp(u1)*exp(2*u2) - exp(2*u1)*exp(u2))");
    CHECK(equal(net.rotation_sym(0, 1), expected));

    NetState composed = levy_step(levy_step(s, 0, "s1"), 1, "s2");
    CHECK(equal(composed.beta_at(0, 1), net.rotation_sym(0, 1)));
    CHECK(equal(composed.H[0], net.lame_sym(0)));
    CHECK(equal(composed.X[1][2], net.tangent_sym(1, 2)));
    CHECK(equal(composed.x[0], net.point_sym(0)));

    // and per point, in both modes
    std::vector<Point> pts = filter_nonsingular(net, sample_float_points(2, 12, 7), EvalMode::floating());
    REQUIRE(pts.size() >= 8);
    for (std::size_t t = 0; t < 8; ++t) {
        EvalResult<double> r = net.rotation_f(0, 1, pts[t]);
        REQUIRE_FALSE(r.singular);
        double want = expected.eval_float(pts[t]);
        CHECK(std::abs(r.value - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
    std::vector<Rat> bases = {make_rat(3, 2), make_rat(5, 2)};
    Point pq = Point::rationals({Rat(0), Rat(0)});
    EvalResult<Rat> rq = net.rotation_q(0, 1, pq, bases);
    REQUIRE_FALSE(rq.singular);
    CHECK(rq.value == expected.eval_exact(pq, bases));
}

TEST_CASE("determinant kernels agree and report") {
    SUBCASE("identities and singulars") {
        std::vector<Rat> id9 = {Rat(1), Rat(0), Rat(0), Rat(0), Rat(1), Rat(0), Rat(0), Rat(0), Rat(1)};
        CHECK(det_exact(id9, 3) == 1);
        std::vector<double> id9f = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        CHECK(det_float(id9f, 3).value == doctest::Approx(1.0));
        std::vector<Rat> rep = {Rat(1), Rat(2), Rat(1), Rat(1), Rat(2), Rat(1), Rat(2), Rat(5), Rat(7)};
        CHECK(det_exact(rep, 3) == 0); // rows 0 and 1 equal
        CHECK(det_float({0, 0, 0, 0}, 2).singular);
    }
    SUBCASE("bareiss equals cofactor brute force, float tracks both") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 40; ++trial) {
            int n = 1 + static_cast<int>(rng() % 5);
            std::vector<Rat> a;
            std::vector<double> af;
            for (int t = 0; t < n * n; ++t) {
                long v = static_cast<long>(rng() % 19) - 9;
                a.push_back(Rat(v));
                af.push_back(static_cast<double>(v));
            }
            Rat exact = det_exact(a, n);
            CHECK(exact == det_cofactor(a, n));
            FloatDet fd = det_float(af, n);
            CHECK(fd.growth >= 1.0);
            CHECK(std::abs(fd.value - to_double(exact)) <= 1e-9 * std::max(1.0, std::abs(to_double(exact))));
        }
    }
    SUBCASE("shape errors") {
        CHECK_THROWS_AS(det_exact(std::vector<Rat>(3, Rat(1)), 2), DomainError);
        SymMatrix m(2, 3);
        CHECK_THROWS_AS(det_symbolic(m), DomainError);
    }
}

TEST_CASE("derivative of a determinant, row by row") {
    NetState s = fix::demo_n3();
    SymMatrix w = multi_wronskian(s.seeds, Partition::of({1, 1, 1}));
    RationalExpr sym = det_symbolic(w);
    Point pt = Point::floats({0.31, -0.22, 0.57});
    for (int k = 0; k < 3; ++k) {
        double direct = sym.derivative(k).eval_float(pt);
        double rowwise = determinant_derivative(w, k, pt, EvalMode::floating()).f;
        CHECK(std::abs(direct - rowwise) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
    Point pq = Point::rationals({Rat(0), Rat(0), Rat(0)});
    EvalMode xm = EvalMode::exact({Rat(2), Rat(3), make_rat(5, 2)});
    for (int k = 0; k < 3; ++k)
        CHECK(determinant_derivative(w, k, pq, xm).q == sym.derivative(k).eval_exact(pq, xm.bases));
}

TEST_CASE("degenerate seed families are identically singular") {
    BackgroundSpec spec;
    spec.N = 2;
    spec.P = 3;
    spec.tangents = {{E("exp(u1)"), E("0"), E("exp(2*u1)")}, {E("0"), E("exp(u2)"), E("exp(u2)")}};
    spec.lame = {E("exp(u1)"), E("exp(u2)")};
    spec.seeds = {{"a", fix::exp_seed(2, 1)}, {"b", fix::exp_seed(2, 1)}};
    TransformedNet net(make_background(spec), Partition::of({1, 1}));
    CHECK(net.identically_singular());
    CHECK(net.tangent_f(0, 0, Point::floats({0.2, 0.4})).singular);
    CHECK_THROWS_AS(net.lame_sym(0), SingularError);
}

TEST_CASE("ratios are invariant under seed reordering and rescaling") {
    NetState base = fix::demo_n2();
    Partition p = Partition::of({1, 1});
    TransformedNet net(base, p);

    BackgroundSpec swapped;
    swapped.N = 2;
    swapped.P = 3;
    swapped.tangents = {{E("exp(u1)"), E("0"), E("exp(2*u1)")}, {E("0"), E("exp(u2)"), E("exp(u2)")}};
    swapped.lame = {E("exp(u1)"), E("exp(u2)")};
    swapped.seeds = {{"s2", fix::exp_seed(2, 2)}, {"s1", fix::exp_seed(2, 1)}};
    TransformedNet perm(make_background(swapped), p);

    BackgroundSpec scaled = swapped;
    scaled.seeds = {{"s1", {E("3*exp(u1)"), E("3*exp(u2)")}}, {"s2", fix::exp_seed(2, 2)}};
    TransformedNet resc(make_background(scaled), p);

    for (const TransformedNet* other : {&perm, &resc}) {
        for (int i = 0; i < 2; ++i) {
            CHECK(equal(net.lame_sym(i), other->lame_sym(i)));
            for (int j = 0; j < 2; ++j)
                if (i != j) CHECK(equal(net.rotation_sym(i, j), other->rotation_sym(i, j)));
            for (int l = 0; l < 3; ++l) CHECK(equal(net.tangent_sym(i, l), other->tangent_sym(i, l)));
        }
        for (int l = 0; l < 3; ++l) CHECK(equal(net.point_sym(l), other->point_sym(l)));
    }
}

TEST_CASE("float and exact ratio evaluations agree at commensurate points") {
    NetState s = fix::demo_n3();
    TransformedNet net(s, Partition::of({1, 1, 1}));
    std::vector<Rat> bases = {make_rat(1, 2), make_rat(3, 2), make_rat(5, 2)};
    Point pq = Point::rationals({Rat(0), Rat(0), Rat(0)});
    Point pf = Point::floats({std::log(0.5), std::log(1.5), std::log(2.5)});
    for (int i = 0; i < 3; ++i) {
        EvalResult<Rat> xq = net.lame_q(i, pq, bases);
        EvalResult<double> xf = net.lame_f(i, pf);
        REQUIRE_FALSE(xq.singular);
        REQUIRE_FALSE(xf.singular);
        double want = to_double(xq.value);
        CHECK(std::abs(xf.value - want) <= 1e-8 * std::max(1.0, std::abs(want)));
    }
}
