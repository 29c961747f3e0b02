#include "doctest.h"

#include <set>

#include "lomodal/order_term.hpp"

using namespace lomodal;

TEST_CASE("term grammar") {
    CHECK(parse_term("sum(fin(1), eta, fin(1))") == t_sum({t_fin(1), t_eta(), t_fin(1)}));
    CHECK(parse_term("etasum(zeta)") == t_eta_sum(t_zeta()));
    CHECK(parse_term("fin(0)") == t_fin(0));
    CHECK(parse_term("omega*") == t_omega_star());
    CHECK(parse_term("omegastarsum(fin(2))") == t_omega_star_sum(t_fin(2)));
    CHECK_THROWS_AS(parse_term("sum()"), ParseError);
    CHECK_THROWS_AS(parse_term("fin(-1)"), ParseError);
    // nested sums flatten
    CHECK(parse_term("sum(sum(fin(1), fin(2)), fin(3))") == t_sum({t_fin(1), t_fin(2), t_fin(3)}));
    for (const char* s : {"fin(3)", "sum(fin(2), eta)", "omegasum(fin(2))", "zeta"})
        CHECK(render_term(parse_term(s)) == s);
}

TEST_CASE("structural facts") {
    CHECK(term_size(t_fin(5)) == 5);
    CHECK(term_size(t_sum({t_fin(2), t_fin(3)})) == 5);
    CHECK(term_size(t_omega()) == kInfinite);
    CHECK(is_finite(t_sum({t_fin(2), t_fin(0)})));
    CHECK(!is_finite(t_eta()));
    CHECK(is_empty(t_eta_sum(t_fin(0))));
    CHECK(has_min(t_omega()));
    CHECK(!has_max(t_omega()));
    CHECK(has_max(t_omega_star()));
    CHECK(!has_min(t_eta()));
    CHECK(has_min(t_sum({t_fin(0), t_fin(2)})));
    CHECK(adjacent_pair_count(t_fin(4)) == 3);
    CHECK(adjacent_pair_count(t_eta()) == 0);
    CHECK(adjacent_pair_count(t_omega()) == kInfinite);
    CHECK(adjacent_pair_count(t_eta_sum(t_fin(2))) == kInfinite);
    CHECK(adjacent_pair_count(t_eta_sum(t_fin(1))) == 0);
    CHECK(adjacent_pair_count(t_sum({t_eta(), t_fin(1)})) == 0);
    CHECK(adjacent_pair_count(t_sum({t_fin(1), t_fin(1)})) == 1);
    CHECK(is_dense_without_endpoints(t_eta()));
    CHECK(!is_dense_without_endpoints(t_sum({t_fin(1), t_eta()})));
    CHECK(is_dense_without_endpoints(t_eta_sum(t_eta())));
}

TEST_CASE("scatteredness is structural") {
    CHECK(is_scattered(t_zeta()));
    CHECK(!is_scattered(t_eta_sum(t_zeta())));
    CHECK(is_scattered(t_omega_sum(t_fin(2))));
    CHECK(is_scattered(t_eta_sum(t_fin(0))));
    CHECK(!is_scattered(t_sum({t_fin(3), t_eta()})));
    // finite nonempty terms are always scattered
    for (int n = 1; n <= 6; ++n) CHECK(is_scattered(t_fin(n)));
}

TEST_CASE("positions: parse, compare, intervals") {
    TermId w = parse_term("sum(fin(3), omega, eta)");
    Position a = parse_position(w, "0.1");
    Position b = parse_position(w, "1.w:4");
    Position c = parse_position(w, "2.q:-1/2");
    CHECK(compare_positions(w, a, b) < 0);
    CHECK(compare_positions(w, b, c) < 0);
    CHECK(compare_positions(w, a, a) == 0);
    CHECK(render_position(b) == "1.w:4");
    CHECK_THROWS_AS(parse_position(w, "0.7"), ParseError);
    CHECK_THROWS_AS(parse_position(w, "3.0"), ParseError);

    // omega* copies are counted from the top
    TermId ws = t_omega_star();
    Position p0 = parse_position(ws, "w*:0");
    Position p3 = parse_position(ws, "w*:3");
    CHECK(compare_positions(ws, p3, p0) < 0);
}

TEST_CASE("prefix, suffix and between extraction") {
    TermId w = t_omega();
    Position p = parse_position(w, "w:3");
    CHECK(term_size(prefix_term(w, p)) == 3);
    CHECK(term_size(suffix_term(w, p)) == kInfinite);

    TermId z = t_zeta();
    Position zp = parse_position(z, "z:0");
    CHECK(term_size(prefix_term(z, zp)) == kInfinite);
    CHECK(!has_min(prefix_term(z, zp)));
    CHECK(has_max(t_omega_star()));

    TermId es = t_eta_sum(t_fin(2));
    Position e1 = parse_position(es, "q:0.0");
    Position e2 = parse_position(es, "q:0.1");
    Position e3 = parse_position(es, "q:1.0");
    CHECK(term_size(between_term(es, e1, e2)) == 0);
    CHECK(term_size(between_term(es, e2, e3)) == kInfinite);
    CHECK(!is_scattered(between_term(es, e2, e3)));
}

TEST_CASE("interval vectors") {
    TermId w5 = t_fin(5);
    auto v = interval_vector(w5, {parse_position(w5, "1"), parse_position(w5, "3")});
    CHECK(v == std::vector<long long>{1, 1, 1});
    TermId om = t_omega();
    auto v2 = interval_vector(om, {parse_position(om, "w:3")});
    CHECK(v2 == std::vector<long long>{3, kInfinite});
    auto v3 = interval_vector(t_fin(4), {});
    CHECK(v3 == std::vector<long long>{4});
    TermId w3 = t_fin(3);
    CHECK_THROWS_AS(interval_vector(w3, {parse_position(w3, "2"), parse_position(w3, "1")}),
                    DomainError);
}

TEST_CASE("embedding monotonicity of interval vectors") {
    // w = fin(3) embeds into v = fin(6) at positions 1,3,5
    TermId w = t_fin(3), v = t_fin(6);
    auto vw = interval_vector(w, {parse_position(w, "0"), parse_position(w, "2")});
    auto vv = interval_vector(v, {parse_position(v, "1"), parse_position(v, "5")});
    for (std::size_t i = 0; i < vw.size(); ++i) {
        bool le = vv[i] == kInfinite || (vw[i] != kInfinite && vw[i] <= vv[i]);
        CHECK(le);
    }
}

TEST_CASE("ordered partitions: counts and contents") {
    CHECK(ordered_partitions(0).size() == 1);
    CHECK(ordered_partitions(1).size() == 1);
    CHECK(ordered_partitions(2).size() == 3);
    CHECK(ordered_partitions(3).size() == 13);
    CHECK(ordered_partitions(4).size() == 75);
    // independent brute force for n <= 5: count surjections onto initial segments
    auto fubini = [](int n) {
        long long count = 0;
        std::vector<int> f(n, 0);
        if (n == 0) return 1LL;
        while (true) {
            int mx = 0;
            for (int v : f) mx = std::max(mx, v);
            std::set<int> seen(f.begin(), f.end());
            if (static_cast<int>(seen.size()) == mx + 1) ++count;
            int i = n - 1;
            while (i >= 0 && f[i] == n - 1) f[i--] = 0;
            if (i < 0) break;
            ++f[i];
        }
        return count;
    };
    for (int n = 0; n <= 5; ++n)
        CHECK(static_cast<long long>(ordered_partitions(n).size()) == fubini(n));
}

TEST_CASE("coarsens") {
    // ({0,1},{2},{3}) merges to ({0,1,2},{3})
    OrderedPartition p{{{0, 1}, {2}, {3}}};
    OrderedPartition q{{{0, 1, 2}, {3}}};
    CHECK(coarsens(p, q));
    CHECK(coarsens(p, p));
    OrderedPartition a{{{0}, {1}}};
    OrderedPartition b{{{1}, {0}}};
    CHECK(!coarsens(a, b)); // order reversal is not merging
    OrderedPartition c{{{0, 1}}};
    CHECK(coarsens(a, c));
    CHECK(coarsens(b, c));
    OrderedPartition bad{{{0}}};
    CHECK_THROWS_AS(coarsens(a, bad), DomainError);
}

TEST_CASE("coarsens is a partial order for n <= 4") {
    for (int n = 1; n <= 4; ++n) {
        auto ps = ordered_partitions(n);
        for (const auto& p : ps) CHECK(coarsens(p, p));
        for (const auto& p : ps)
            for (const auto& q : ps) {
                if (coarsens(p, q) && coarsens(q, p)) CHECK(p == q);
                for (const auto& r : ps)
                    if (coarsens(p, q) && coarsens(q, r)) CHECK(coarsens(p, r));
            }
    }
}

TEST_CASE("realized partitions") {
    TermId w = t_fin(3);
    auto pos = [&](const char* s) { return parse_position(w, s); };
    OrderedPartition p = realized_partition(w, {pos("1"), pos("1"), pos("2")});
    CHECK(p == OrderedPartition{{{0, 1}, {2}}});
    TermId e = t_eta();
    OrderedPartition q =
        realized_partition(e, {parse_position(e, "q:1"), parse_position(e, "q:0")});
    CHECK(q == OrderedPartition{{{1}, {0}}});
    CHECK(realized_partition(w, {pos("0")}) == OrderedPartition{{{0}}});
}

TEST_CASE("convex quotients") {
    CHECK(convex_quotients(t_fin(2)).size() == 2);
    CHECK(convex_quotients(t_fin(3)).size() == 4);
    CHECK(convex_quotients(t_fin(1)).size() == 1);
    CHECK_THROWS_AS(convex_quotients(t_fin(0)), DomainError);
    CHECK_THROWS_AS(convex_quotients(t_eta()), DomainError);
    // maps are monotone surjections onto the quotient chain
    for (const auto& q : convex_quotients(t_fin(4))) {
        int blocks = static_cast<int>(q.block_sizes.size());
        CHECK(term_size(q.quotient) == blocks);
        for (std::size_t i = 0; i + 1 < q.map.size(); ++i) {
            CHECK(q.map[i] <= q.map[i + 1]);
            CHECK(q.map[i + 1] - q.map[i] <= 1);
        }
        CHECK(q.map.front() == 0);
        CHECK(q.map.back() == blocks - 1);
    }
}

TEST_CASE("ordered sum") {
    CHECK(term_size(ordered_sum(t_fin(2), t_fin(3))) == 5);
    CHECK(ordered_sum(t_fin(2), t_eta()) == t_sum({t_fin(2), t_eta()}));
    CHECK(term_size(ordered_sum(t_fin(3), t_fin(0))) == 3);
}
