#include "doctest.h"

#include "lomodal/named.hpp"
#include "lomodal/sat_oracle.hpp"

using namespace lomodal;

namespace {

Catalog cat() { return Catalog::standard(); }

EvalOptions hi_cap() {
    EvalOptions o;
    o.rank_cap = 10;
    return o;
}

} // namespace

TEST_CASE("dense sentence gets the 1+eta+1 witness") {
    SatQuery q{dense_sentence(), {}, {}};
    auto r = satisfiable(q, cat(), hi_cap());
    REQUIRE(r.found());
    CHECK(r.witness->world == t_sum({t_fin(1), t_eta(), t_fin(1)}));
    CHECK(eval_fo(r.witness->world, dense_sentence(), {}, hi_cap()));
}

TEST_CASE("one-point model") {
    SatQuery q{f_and(theta(1), f_not(theta(2))), {}, {}};
    auto r = satisfiable(q, cat(), hi_cap());
    REQUIRE(r.found());
    CHECK(r.witness->world == t_fin(1));
}

TEST_CASE("pattern with interval constraints") {
    FormulaId psi = parse_formula("exists z. (x0 < z & z < x1)");
    SatQuery q{psi,
               {var("x0"), var("x1")},
               {IntervalConstraint::exactly(0), IntervalConstraint::at_least(1),
                IntervalConstraint::exactly(0)}};
    auto r = satisfiable(q, cat(), hi_cap());
    REQUIRE(r.found());
    CHECK(r.witness->world == t_fin(3));
    REQUIRE(r.witness->tuple.size() == 2);
    auto vec = interval_vector(r.witness->world, r.witness->tuple);
    CHECK(vec == std::vector<long long>{0, 1, 0});
}

TEST_CASE("unsatisfiable queries give NoneInCatalog without budget blame") {
    SatQuery q{f_and(theta(2), f_not(theta(2))), {}, {}};
    auto r = satisfiable(q, cat(), hi_cap());
    CHECK(!r.found());
    CHECK(!r.budget_exhausted);
}

TEST_CASE("infinite constraint needs an infinite filling") {
    SatQuery q{theta(1), {}, {IntervalConstraint::infinite()}};
    auto r = satisfiable(q, cat(), hi_cap());
    REQUIRE(r.found());
    CHECK(term_size(r.witness->world) == kInfinite);
}

TEST_CASE("witnesses are deterministic and verified") {
    // smallest finite witness first: theta_3 finds fin(3)
    SatQuery q{theta(3), {}, {}};
    auto r = satisfiable(q, cat(), hi_cap());
    REQUIRE(r.found());
    CHECK(r.witness->world == t_fin(3));
}

TEST_CASE("finite completeness against brute force") {
    // rank <= 2 sentences satisfiable in small finite orders are always found
    std::vector<FormulaId> sentences = {
        parse_formula("exists x. forall y. x <= y"),
        parse_formula("exists x. exists y. x < y"),
        f_and(theta(2), f_not(theta(4))),
        parse_formula("forall x. exists y. x <= y"),
        f_not(disc(2)),
    };
    for (FormulaId s : sentences) {
        bool finite_sat = false;
        for (int n = 0; n <= 5 && !finite_sat; ++n) finite_sat = eval_fo(t_fin(n), s);
        if (!finite_sat) continue;
        auto r = satisfiable(SatQuery{s, {}, {}}, cat(), hi_cap());
        CHECK(r.found());
    }
}

TEST_CASE("soundness: every witness passes re-verification") {
    std::vector<SatQuery> queries = {
        {dense_sentence(), {}, {}},
        {adj(var("x0"), var("x1")), {var("x0"), var("x1")}, {}},
        {f_not(theta(1)), {}, {}},
        {parse_formula("forall z. (z <= x0 | x1 <= z)"),
         {var("x0"), var("x1")},
         {IntervalConstraint::at_least(2), IntervalConstraint::exactly(0),
          IntervalConstraint::unconstrained()}},
    };
    for (const auto& q : queries) {
        auto r = satisfiable(q, cat(), hi_cap());
        if (!r.found()) continue;
        Assignment asg;
        for (std::size_t j = 0; j < q.pattern_vars.size(); ++j)
            asg[q.pattern_vars[j]] = r.witness->tuple[j];
        CHECK(eval_fo(r.witness->world, q.psi, asg, hi_cap()));
        auto vec = interval_vector(r.witness->world, r.witness->tuple);
        for (std::size_t j = 0; j < q.constraints.size(); ++j) {
            const auto& c = q.constraints[j];
            bool ok = true;
            switch (c.kind) {
                case IntervalConstraintKind::Exactly: ok = vec[j] == c.n; break;
                case IntervalConstraintKind::AtLeast:
                    ok = vec[j] == kInfinite || vec[j] >= c.n;
                    break;
                case IntervalConstraintKind::Unconstrained: break;
                case IntervalConstraintKind::Infinite: ok = vec[j] == kInfinite; break;
            }
            CHECK(ok);
        }
    }
}

TEST_CASE("modal formulas are rejected") {
    SatQuery q{parse_formula("dia true"), {}, {}};
    CHECK_THROWS_AS(satisfiable(q, cat()), DomainError);
}

TEST_CASE("malformed constraint lists are rejected") {
    SatQuery q{theta(1), {}, {IntervalConstraint::exactly(0), IntervalConstraint::exactly(0)}};
    CHECK_THROWS_AS(satisfiable(q, cat()), DomainError);
}
