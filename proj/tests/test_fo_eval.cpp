#include "doctest.h"

#include <random>

#include "lomodal/fo_eval.hpp"
#include "lomodal/named.hpp"

using namespace lomodal;

namespace {

FormulaId pf(const char* s) { return parse_formula(s); }

} // namespace

TEST_CASE("basic facts on infinite terms") {
    CHECK(eval_fo(t_omega(), pf("exists x. forall y. x <= y")));
    CHECK(!eval_fo(t_omega(), pf("exists x. forall y. y <= x")));
    CHECK(eval_fo(t_sum({t_fin(1), t_eta(), t_fin(1)}), dense_sentence()));
    CHECK(!eval_fo(t_eta(), dense_sentence())); // no endpoints
    CHECK(!eval_fo(t_fin(5), dense_sentence()));
    // density check
    FormulaId dens = pf("forall x. forall y. (x < y -> exists z. (x < z & z < y))");
    CHECK(eval_fo(t_eta(), dens));
    CHECK(!eval_fo(t_zeta(), dens));
}

TEST_CASE("theta thresholds on chains by direct evaluation") {
    for (int n = 1; n <= 6; ++n)
        for (int m = 0; m <= 8; ++m)
            CHECK(eval_fo(t_fin(m), theta(n)) == (m >= n));
}

TEST_CASE("counting shortcut agrees with raw quantifier evaluation") {
    for (int m = 0; m <= 6; ++m) {
        for (int n = 1; n <= 4; ++n) {
            CHECK(eval_fo_direct(t_fin(m), theta(n), {}, true) ==
                  eval_fo_direct(t_fin(m), theta(n), {}, false));
        }
        TermId w = t_fin(m);
        if (m >= 2) {
            Assignment asg{{var("x"), parse_position(w, "0")},
                           {var("y"), parse_position(w, std::to_string(m - 1))}};
            FormulaId a = adj(var("x"), var("y"));
            CHECK(eval_fo_direct(w, a, asg, true) == eval_fo_direct(w, a, asg, false));
        }
    }
}

TEST_CASE("qtype basics") {
    CHECK(qtype(t_fin(0), 1).ref == compose_qtype(SumOp::Sum, {}, 1).ref);
    CHECK(qtype(t_fin(3), 1) == qtype(t_fin(7), 1));
    // standard EF bound: chains of size >= 2^q - 1 are rank-q equivalent
    for (int q = 1; q <= 4; ++q) {
        int bound = (1 << q) - 1;
        for (int n = bound; n <= std::min(20, bound + 4); ++n)
            CHECK(qtype(t_fin(n), q) == qtype(t_fin(bound), q));
        if (bound >= 2) CHECK(!(qtype(t_fin(bound - 1), q) == qtype(t_fin(bound), q)));
    }
}

TEST_CASE("qtype composition laws") {
    for (int q = 0; q <= 3; ++q) {
        CHECK(compose_qtype(SumOp::Sum, {qtype(t_fin(2), q), qtype(t_fin(3), q)}, q) ==
              qtype(t_fin(5), q));
        CHECK(compose_qtype(SumOp::Sum, {qtype(t_eta(), q), qtype(t_fin(0), q)}, q) ==
              qtype(t_eta(), q));
        CHECK(compose_qtype(SumOp::EtaSum, {qtype(t_fin(1), q)}, q) == qtype(t_eta(), q));
        CHECK(compose_qtype(SumOp::OmegaSum, {qtype(t_fin(1), q)}, q) == qtype(t_omega(), q));
    }
    CHECK_THROWS_AS(compose_qtype(SumOp::Sum, {qtype(t_fin(1), 1), qtype(t_fin(1), 2)}, 1),
                    DomainError);
}

TEST_CASE("sum congruence on samples") {
    // qtype(a) = qtype(a') implies qtype(a + b) = qtype(a' + b)
    int q = 3;
    TermId a = t_fin(7), a2 = t_fin(9); // equal at rank 3
    REQUIRE(qtype(a, q) == qtype(a2, q));
    for (TermId b : {t_fin(2), t_omega(), t_eta(), t_zeta()}) {
        CHECK(compose_qtype(SumOp::Sum, {qtype(a, q), qtype(b, q)}, q) ==
              compose_qtype(SumOp::Sum, {qtype(a2, q), qtype(b, q)}, q));
    }
}

TEST_CASE("zeta and etasum(zeta) agree at rank 3") {
    CHECK(qtype(t_zeta(), 3) == qtype(t_eta_sum(t_zeta()), 3));
}

TEST_CASE("typed evaluation equals direct enumeration (oracle equivalence)") {
    std::vector<FormulaId> formulas = {
        pf("exists x. forall y. x <= y"),
        pf("exists x. forall y. y <= x"),
        pf("forall x. forall y. (x < y -> exists z. (x < z & z < y))"),
        pf("exists x. exists y. (x < y & ~(exists z. (x < z & z < y)))"),
        theta(2), theta(3), disc(2),
        pf("forall x. exists y. x < y"),
        pf("exists x. (forall y. x <= y) & exists z. forall w. w <= z"),
    };
    std::vector<TermId> worlds;
    for (int n = 0; n <= 7; ++n) worlds.push_back(t_fin(n));
    worlds.push_back(t_sum({t_fin(2), t_fin(3)}));
    EvalOptions typed;
    typed.force_typed = true;
    typed.rank_cap = 8;
    for (TermId w : worlds)
        for (FormulaId f : formulas)
            CHECK(eval_fo_typed(w, f, {}, typed) == eval_fo_direct(w, f, {}));
}

TEST_CASE("oracle equivalence with free variables") {
    FormulaId between = pf("exists z. (x < z & z < y)");
    FormulaId adjf = adj(var("x"), var("y"));
    EvalOptions typed;
    typed.force_typed = true;
    for (int n = 2; n <= 6; ++n) {
        TermId w = t_fin(n);
        auto ps = all_positions(w);
        for (std::size_t i = 0; i < ps.size(); ++i)
            for (std::size_t j = 0; j < ps.size(); ++j) {
                Assignment asg{{var("x"), ps[i]}, {var("y"), ps[j]}};
                for (FormulaId f : {between, adjf})
                    CHECK(eval_fo_typed(w, f, asg, typed) == eval_fo_direct(w, f, asg));
            }
    }
}

TEST_CASE("evaluation with positions on infinite terms") {
    TermId w = t_eta();
    Assignment asg{{param("a"), parse_position(w, "q:0")}, {param("b"), parse_position(w, "q:1")}};
    CHECK(eval_fo(w, pf("exists z. (@a < z & z < @b)"), asg));
    TermId om = t_omega();
    Assignment asg2{{param("a"), parse_position(om, "w:0")},
                    {param("b"), parse_position(om, "w:1")}};
    CHECK(!eval_fo(om, pf("exists z. (@a < z & z < @b)"), asg2));
    // adjacency of 0 and 1 in omega
    CHECK(eval_fo(om, adj(param("a"), param("b")), asg2));
}

TEST_CASE("rank cap on infinite terms") {
    EvalOptions opts;
    opts.rank_cap = 2;
    CHECK_THROWS_AS(eval_fo(t_omega(), dense_sentence(), {}, opts), RankCapError);
    // counting formulas stay under the cap: theta_9 has effective rank 0
    CHECK(eval_fo(t_omega(), theta(9), {}, opts));
    CHECK(effective_rank(theta(9)) == 0);
    CHECK(effective_rank(dense_sentence()) == 3);
    CHECK(max_count_constant(theta(9)) == 9);
}

TEST_CASE("unbound variable reported at evaluation time") {
    CHECK_THROWS_AS(eval_fo(t_fin(2), pf("x <= y")), DomainError);
}

TEST_CASE("end-extension coding formulas on displayed tails") {
    // base L = fin(1); W + eta + C2: the final block has exactly one point above
    // its bottom's predecessor gap, so FinalBlock_1 holds
    TermId w1 = t_sum({t_fin(1), t_eta(), t_fin(2)});
    FormulaId d1 = f_exists("b", f_exists("u", final_block(1, 1, var("b"), var("u"))));
    EvalOptions opts;
    opts.rank_cap = 12;
    CHECK(eval_fo(w1, d1, {}, opts));
    // W + eta has no maximum, so no final block
    CHECK(!eval_fo(t_sum({t_fin(1), t_eta()}), d1, {}, opts));

    // P_n points: W + eta + C3 has P_1 and P_2 points but no P_3 point
    TermId w2 = t_sum({t_fin(1), t_eta(), t_fin(3)});
    CHECK(!eval_fo(w2, empty_n(1, 1), {}, opts));
    CHECK(!eval_fo(w2, empty_n(2, 1), {}, opts));
    CHECK(eval_fo(w2, empty_n(3, 1), {}, opts));
}
