#include "doctest.h"

#include <random>

#include "lomodal/frames.hpp"

using namespace lomodal;

TEST_CASE("canonical frame sizes and shapes") {
    CHECK(canonical_frame('F', 2, 3).n == 12);
    CHECK(canonical_frame('E', 1, 2).n == 5);
    Frame c23 = canonical_frame('C', 2, 3);
    auto q = cluster_quotient(c23);
    CHECK(q.num_clusters == 3);
    CHECK(q.clusters[0].size() == 1);
    CHECK(q.clusters[1].size() == 1);
    CHECK(q.clusters[2].size() == 3);
}

TEST_CASE("frame file round trip") {
    Frame f = canonical_frame('C', 1, 2);
    Frame g = parse_frame(render_frame(f));
    CHECK(g.n == f.n);
    CHECK(g.reach == f.reach);
    CHECK(g.root == f.root);
    CHECK_THROWS_AS(parse_frame("worlds 2 root 0\n01\n10\n"), DomainError); // irreflexive
}

TEST_CASE("frame construction validates reflexivity and transitivity") {
    CHECK_THROWS_AS(make_frame(2, {0b01, 0b01}), DomainError);            // not reflexive
    CHECK_THROWS_AS(make_frame(3, {0b011, 0b110, 0b100}), DomainError);   // not transitive
}

TEST_CASE("cluster quotients") {
    Frame c12 = canonical_frame('C', 1, 2);
    auto q = cluster_quotient(c12);
    CHECK(q.num_clusters == 2);
    CHECK(q.clusters[0].size() == 1);
    CHECK(q.clusters[1].size() == 2);

    auto q2 = cluster_quotient(canonical_frame('F', 1, 1));
    CHECK(q2.num_clusters == 2);

    Frame complete = make_frame(3, {0b111, 0b111, 0b111});
    CHECK(cluster_quotient(complete).num_clusters == 1);
}

TEST_CASE("classification flags") {
    auto c32 = classify_frame(canonical_frame('C', 3, 2));
    CHECK(c32.capped_chain);
    CHECK(c32.pretree);
    CHECK(c32.rooted);
    CHECK(!c32.regular); // branching 1 but mixed cluster sizes

    auto f22 = classify_frame(canonical_frame('F', 2, 2));
    CHECK(f22.pre_boolean);
    CHECK(f22.rooted);
    CHECK(!f22.pretree); // diamond

    auto e22 = classify_frame(canonical_frame('E', 2, 2));
    CHECK(e22.topped_pre_boolean);

    auto one_cluster = classify_frame(make_frame(3, {0b111, 0b111, 0b111}));
    CHECK(one_cluster.complete);
    CHECK(one_cluster.regular);
    CHECK(one_cluster.regular_m == 3);
}

TEST_CASE("generated subframes") {
    Frame c22 = canonical_frame('C', 2, 2);
    Frame whole = generated_subframe(c22, 0);
    CHECK(whole.n == c22.n);
    Frame top = generated_subframe(c22, 2);
    CHECK(top.n == 2);
    CHECK(classify_frame(top).complete);
    Frame pt = make_frame(1, {1u});
    CHECK(generated_subframe(pt, 0).n == 1);
    CHECK_THROWS_AS(generated_subframe(pt, 3), DomainError);
}

TEST_CASE("bounded morphisms") {
    // collapse of a 2-cluster onto a point
    Frame two = make_frame(2, {0b11, 0b11});
    Frame pt = make_frame(1, {1u});
    CHECK(is_bounded_morphism(two, pt, {0, 0}));
    // constant map from C_{1,2} to a point
    CHECK(is_bounded_morphism(canonical_frame('C', 1, 2), pt, {0, 0, 0}));
    // breaking the back condition: map the diamond F_{1,1} bottom and one top
    // into a 2-chain so the other top cannot be lifted
    Frame f11 = canonical_frame('F', 1, 1); // 2-chain of singletons 0 < 1
    Frame chain3 = canonical_frame('C', 2, 1);
    CHECK(!is_bounded_morphism(f11, chain3, {0, 2}));
}

TEST_CASE("regularize pretrees") {
    // chain of 2 singleton clusters: already regular, k=1, m=1
    Frame chain = canonical_frame('C', 1, 1);
    auto r = regularize_pretree(chain, 0);
    CHECK(r.k == 1);
    CHECK(r.m == 1);
    CHECK(classify_frame(r.frame).regular);
    CHECK(is_bounded_morphism(r.frame, chain, r.morphism));
    CHECK(r.morphism[r.root] == 0);

    // quotient tree root{a(leaf), b{c}} with root cluster of size 2:
    // k=2, m=2, |T*|=5, |F*|=10
    // worlds: 0,1 root cluster; 2 = a; 3 = b; 4 = c (above b)
    std::vector<std::uint32_t> reach(5, 0);
    auto set = [&](int i, int j) { reach[i] |= 1u << j; };
    for (int i = 0; i < 5; ++i) set(i, i);
    set(0, 1); set(1, 0);
    for (int j : {2, 3, 4}) { set(0, j); set(1, j); }
    set(3, 4);
    Frame f = make_frame(5, reach, 0);
    REQUIRE(classify_frame(f).pretree);
    auto r2 = regularize_pretree(f, 0);
    CHECK(r2.k == 2);
    CHECK(r2.m == 2);
    CHECK(r2.frame.n == 10);
    auto cls = classify_frame(r2.frame);
    CHECK(cls.regular);
    CHECK(cls.regular_k == 2);
    CHECK(cls.regular_m == 2);
    CHECK(is_bounded_morphism(r2.frame, f, r2.morphism));
    CHECK(r2.morphism[r2.root] == 0);
}

TEST_CASE("model check basics") {
    Frame pt = make_frame(1, {1u}, 0);
    KripkeModel m{pt, {1u}}; // p true at the point
    CHECK(model_check(m, 0, p_dia(p_var(0))));
    CHECK(!model_check(m, 0, p_box(p_not(p_var(0)))));

    Frame c12 = canonical_frame('C', 1, 2);
    KripkeModel m2{c12, {0, 0b110}}; // q := p1 true exactly on the top cluster
    CHECK(model_check(m2, 0, p_dia(p_var(1))));
}

TEST_CASE("McKinsey on E frames by exhaustive valuations") {
    PropId mk = axiom_formula(".1");
    CHECK(frame_valid(canonical_frame('E', 1, 1), mk));
    CHECK(frame_valid(canonical_frame('E', 1, 2), mk));
    CHECK(frame_valid(canonical_frame('E', 2, 2), mk));
    // F_{1,2} validates S4.2 but McKinsey fails
    Frame f12 = canonical_frame('F', 1, 2);
    CHECK(frame_valid(f12, axiom_formula(".2")));
    CHECK(!frame_valid(f12, mk));
    CHECK(frame_valid(canonical_frame('F', 2, 2), axiom_formula(".2")));
}

TEST_CASE("chi2 validity on specific frames") {
    PropId chi2 = axiom_formula("chi2");
    CHECK(frame_valid(canonical_frame('C', 1, 2), chi2));
    // a frame with a 2-element non-maximal cluster
    std::vector<std::uint32_t> reach(3, 0);
    reach[0] = 0b111;
    reach[1] = 0b111;
    reach[2] = 0b100;
    Frame bad = make_frame(3, reach, 0);
    CHECK(!frame_valid(bad, chi2));
    // diamond frame: .3 fails
    CHECK(!frame_valid(canonical_frame('F', 2, 1), axiom_formula(".3")));
    // chains validate .3
    CHECK(frame_valid(canonical_frame('C', 2, 1), axiom_formula(".3")));
}

TEST_CASE("rooted S4.3 characterization (<= 4 worlds)") {
    PropId ax3 = axiom_formula(".3");
    for (int n = 1; n <= 4; ++n) {
        for (const Frame& f : all_preorders(n)) {
            if (!classify_frame(f).rooted) continue;
            bool valid = frame_valid(f, ax3);
            CHECK(valid == classify_frame(f).linear_clusters);
        }
    }
}

TEST_CASE("jankov-fine fails at the root under the identity valuation") {
    for (Frame f : {make_frame(1, {1u}, 0), canonical_frame('F', 1, 1), canonical_frame('C', 1, 2)}) {
        PropId chi = jankov_fine(f);
        KripkeModel m{f, {}};
        m.valuation.resize(f.n);
        for (int w = 0; w < f.n; ++w) m.valuation[w] = 1u << w;
        CHECK(!model_check(m, *f.root, chi));
    }
}

TEST_CASE("jankov-fine valid where no bounded-morphic route exists") {
    // chi of the 2-chain: frames whose generated subframes have no 2-chain
    // image (single clusters) validate it
    Frame chain2 = canonical_frame('C', 1, 1);
    PropId chi = jankov_fine(chain2);
    CHECK(frame_valid(make_frame(1, {1u}), chi));
    Frame cluster2 = make_frame(2, {0b11, 0b11});
    CHECK(frame_valid(cluster2, chi));
    // but the 2-chain itself does not validate it
    CHECK(!frame_valid(chain2, chi));
}

TEST_CASE("generated-subframe and bounded-morphism invariance on random models") {
    std::mt19937 rng(7);
    auto rnd_formula = [&](auto&& self, int depth) -> PropId {
        int pick = static_cast<int>(rng() % (depth == 0 ? 2 : 8));
        switch (pick) {
            case 0: return p_var(static_cast<int>(rng() % 2));
            case 1: return p_true();
            case 2: return p_not(self(self, depth - 1));
            case 3: return p_and(self(self, depth - 1), self(self, depth - 1));
            case 4: return p_or(self(self, depth - 1), self(self, depth - 1));
            case 5: return p_dia(self(self, depth - 1));
            case 6: return p_box(self(self, depth - 1));
            default: return p_implies(self(self, depth - 1), self(self, depth - 1));
        }
    };
    auto frames4 = all_preorders(4);
    for (int trial = 0; trial < 40; ++trial) {
        const Frame& f = frames4[rng() % frames4.size()];
        KripkeModel m{f, {static_cast<std::uint32_t>(rng() % 16), static_cast<std::uint32_t>(rng() % 16)}};
        PropId phi = rnd_formula(rnd_formula, 3);
        int w = static_cast<int>(rng() % f.n);
        // generated subframe preserves truth
        Frame sub = generated_subframe(f, w);
        std::vector<int> back;
        for (int u = 0; u < f.n; ++u)
            if (f.le(w, u)) back.push_back(u);
        KripkeModel msub{sub, {0, 0}};
        for (std::size_t i = 0; i < back.size(); ++i)
            for (int v = 0; v < 2; ++v)
                if ((m.valuation[v] >> back[i]) & 1u) msub.valuation[v] |= 1u << i;
        CHECK(model_check(m, w, phi) == model_check(msub, *sub.root, phi));
    }
    // bounded-morphism invariance: pull back valuations along the 2-cluster collapse
    Frame two = make_frame(2, {0b11, 0b11});
    Frame pt = make_frame(1, {1u});
    std::vector<int> collapse{0, 0};
    REQUIRE(is_bounded_morphism(two, pt, collapse));
    for (std::uint32_t val = 0; val < 2; ++val) {
        KripkeModel target{pt, {val}};
        KripkeModel pulled{two, {0}};
        for (int u = 0; u < 2; ++u)
            if ((val >> collapse[u]) & 1u) pulled.valuation[0] |= 1u << u;
        for (int trial = 0; trial < 10; ++trial) {
            PropId phi = rnd_formula(rnd_formula, 3);
            for (int u = 0; u < 2; ++u)
                CHECK(model_check(pulled, u, phi) == model_check(target, collapse[u], phi));
        }
    }
}

TEST_CASE("prop parser round trip") {
    for (const char* s : {"box dia p0 -> dia box p0", "p0 & ~p1 | p2", "dia (p0 -> p1)"}) {
        PropId f = parse_prop(s);
        CHECK(parse_prop(render_prop(f)) == f);
    }
    CHECK(parse_prop("box p -> p") == axiom_formula("T"));
}
