#pragma once

// Test-side brute-force cone semantics, independent of the elimination
// compilers.  The embedding oracle searches genuine extension worlds built by
// inserting single blocks at the cuts of the current world: before everything,
// after everything, and immediately after each sampled point (all points, for
// finite worlds).  Finite blocks run up to the saturation budget; infinite
// blocks come from a fixed catalog sample.  The monotone oracle enumerates the
// (convex partition x increasing injection) factorization into finite chains.

#include <functional>
#include <map>
#include <set>

#include "lomodal/fo_eval.hpp"
#include "lomodal/named.hpp"
#include "lomodal/order_term.hpp"

namespace lomodal::testing {

inline EvalOptions oracle_opts() {
    EvalOptions o;
    o.rank_cap = 16;
    return o;
}

struct MarkedWorld {
    TermId world;
    Assignment asg;
};

// Insert `block` into `mw.world` at every cut determined by the sampled
// points plus the marked points, transporting the marked positions.
inline std::vector<MarkedWorld> insert_candidates(const MarkedWorld& mw,
                                                  const std::vector<TermId>& blocks) {
    // cut points: sampled points of the world plus all marked points
    std::vector<Position> cuts = sample_positions(mw.world, 2);
    for (const auto& [t, p] : mw.asg) cuts.push_back(p);
    std::sort(cuts.begin(), cuts.end(), [&](const Position& a, const Position& b) {
        return compare_positions(mw.world, a, b) < 0;
    });
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](const Position& a, const Position& b) {
                               return compare_positions(mw.world, a, b) == 0;
                           }),
               cuts.end());

    int k = static_cast<int>(cuts.size());
    std::vector<TermId> segs;
    if (cuts.empty()) {
        segs.push_back(mw.world);
    } else {
        segs.push_back(prefix_term(mw.world, cuts.front()));
        for (int i = 0; i + 1 < k; ++i) segs.push_back(between_term(mw.world, cuts[i], cuts[i + 1]));
        segs.push_back(suffix_term(mw.world, cuts.back()));
    }

    std::vector<MarkedWorld> out;
    // gap g in 0..k: before cut point g (g = k: after the last cut point)
    auto rebuild = [&](int gap, TermId block) {
        std::vector<TermId> parts;
        std::vector<int> cut_summand(k, -1);
        for (int i = 0; i <= k; ++i) {
            if (i == gap) parts.push_back(block);
            if (!is_empty(segs[i])) parts.push_back(segs[i]);
            if (i < k) {
                cut_summand[i] = static_cast<int>(parts.size());
                parts.push_back(t_fin(1));
            }
        }
        if (gap == k + 1) parts.push_back(block); // append at the very end
        TermId world = parts.empty() ? t_fin(0) : t_sum(parts);
        bool single = parts.size() == 1;
        MarkedWorld ext;
        ext.world = world;
        for (const auto& [t, p] : mw.asg) {
            int mi = 0;
            while (compare_positions(mw.world, cuts[mi], p) != 0) ++mi;
            Position np;
            if (!single) np.steps.push_back({PosStep::Summand, cut_summand[mi], {}});
            np.steps.push_back({PosStep::FinIndex, 0, {}});
            ext.asg[t] = np;
        }
        out.push_back(std::move(ext));
    };

    for (TermId b : blocks) {
        for (int gap = 0; gap <= k; ++gap) rebuild(gap, b);
        rebuild(k + 1, b);
    }
    return out;
}

inline std::vector<TermId> oracle_blocks(int fin_budget) {
    std::vector<TermId> blocks;
    for (int c = 1; c <= fin_budget; ++c) blocks.push_back(t_fin(c));
    blocks.push_back(t_omega());
    blocks.push_back(t_omega_star());
    blocks.push_back(t_zeta());
    blocks.push_back(t_eta());
    blocks.push_back(t_sum({t_eta(), t_fin(2), t_eta()}));
    blocks.push_back(t_sum({t_eta(), t_fin(3), t_eta()}));
    return blocks;
}

// Brute-force embedding semantics; memoized across calls.
inline bool brute_eval_embed(const MarkedWorld& mw, FormulaId f, int fin_budget,
                             int insert_budget = 2) {
    static std::map<std::tuple<TermId, FormulaId, std::string, int, int>, bool> memo;
    std::string key;
    for (const auto& [t, p] : mw.asg) key += t.str() + "=" + render_position(p) + ";";
    auto memo_key = std::make_tuple(mw.world, f, key, fin_budget, insert_budget);
    auto it = memo.find(memo_key);
    if (it != memo.end()) return it->second;

    bool result;
    const FormulaNode& n = node(f);
    switch (n.tag) {
        case FTag::Dia:
        case FTag::Box: {
            bool is_dia = n.tag == FTag::Dia;
            auto blocks = oracle_blocks(fin_budget);
            std::vector<MarkedWorld> layer{mw};
            std::set<TermId> seen{mw.world};
            result = !is_dia;
            bool decided = false;
            for (int round = 0; round <= insert_budget && !decided; ++round) {
                for (const auto& ext : layer) {
                    bool v = brute_eval_embed(ext, n.kids[0], fin_budget, insert_budget);
                    if (is_dia && v) { result = true; decided = true; break; }
                    if (!is_dia && !v) { result = false; decided = true; break; }
                }
                if (decided || round == insert_budget) break;
                std::vector<MarkedWorld> next;
                for (const auto& ext : layer)
                    for (auto& cand : insert_candidates(ext, blocks))
                        if (seen.insert(cand.world).second) next.push_back(std::move(cand));
                layer = std::move(next);
            }
            break;
        }
        case FTag::Not: result = !brute_eval_embed(mw, n.kids[0], fin_budget, insert_budget); break;
        case FTag::And:
            result = brute_eval_embed(mw, n.kids[0], fin_budget, insert_budget) &&
                     brute_eval_embed(mw, n.kids[1], fin_budget, insert_budget);
            break;
        case FTag::Or:
            result = brute_eval_embed(mw, n.kids[0], fin_budget, insert_budget) ||
                     brute_eval_embed(mw, n.kids[1], fin_budget, insert_budget);
            break;
        case FTag::Implies:
            result = !brute_eval_embed(mw, n.kids[0], fin_budget, insert_budget) ||
                     brute_eval_embed(mw, n.kids[1], fin_budget, insert_budget);
            break;
        case FTag::Iff:
            result = brute_eval_embed(mw, n.kids[0], fin_budget, insert_budget) ==
                     brute_eval_embed(mw, n.kids[1], fin_budget, insert_budget);
            break;
        default: result = eval_fo(mw.world, f, mw.asg, oracle_opts()); break;
    }
    memo.emplace(std::move(memo_key), result);
    return result;
}

// ---- monotone brute force -------------------------------------------------------

inline std::vector<std::vector<int>> monotone_maps(int src_n, int tgt_n) {
    std::vector<std::vector<int>> out;
    if (src_n == 0) {
        out.push_back({});
        return out;
    }
    if (tgt_n == 0) return out;
    std::vector<int> img(src_n, 0);
    while (true) {
        bool mono = true;
        for (int i = 0; i + 1 < src_n; ++i)
            if (img[i] > img[i + 1]) mono = false;
        if (mono) out.push_back(img);
        int i = src_n - 1;
        while (i >= 0 && img[i] == tgt_n - 1) img[i--] = 0;
        if (i < 0) break;
        ++img[i];
    }
    return out;
}

// Brute-force monotone semantics at finite worlds: dia ranges over all
// monotone maps into all chains of size <= |W| + extra.
inline bool brute_eval_mono(TermId w, FormulaId f, const std::map<Term, int>& asg, int extra = 2) {
    static std::map<std::tuple<TermId, FormulaId, std::string, int>, bool> memo;
    std::string key;
    for (const auto& [t, p] : asg) key += t.str() + "=" + std::to_string(p) + ";";
    auto memo_key = std::make_tuple(w, f, key, extra);
    auto it = memo.find(memo_key);
    if (it != memo.end()) return it->second;

    bool result;
    const FormulaNode& n = node(f);
    int wn = static_cast<int>(term_size(w));
    switch (n.tag) {
        case FTag::Dia:
        case FTag::Box: {
            bool is_dia = n.tag == FTag::Dia;
            result = !is_dia;
            bool decided = false;
            for (int t = 0; t <= wn + extra && !decided; ++t) {
                if (wn > 0 && t == 0) continue; // no map from nonempty into empty
                for (const auto& img : monotone_maps(wn, t)) {
                    std::map<Term, int> pushed;
                    for (const auto& [term, p] : asg) pushed[term] = img[p];
                    bool v = brute_eval_mono(t_fin(t), n.kids[0], pushed, extra);
                    if (is_dia && v) { result = true; decided = true; break; }
                    if (!is_dia && !v) { result = false; decided = true; break; }
                }
            }
            break;
        }
        case FTag::Not: result = !brute_eval_mono(w, n.kids[0], asg, extra); break;
        case FTag::And:
            result = brute_eval_mono(w, n.kids[0], asg, extra) &&
                     brute_eval_mono(w, n.kids[1], asg, extra);
            break;
        case FTag::Or:
            result = brute_eval_mono(w, n.kids[0], asg, extra) ||
                     brute_eval_mono(w, n.kids[1], asg, extra);
            break;
        case FTag::Implies:
            result = !brute_eval_mono(w, n.kids[0], asg, extra) ||
                     brute_eval_mono(w, n.kids[1], asg, extra);
            break;
        case FTag::Iff:
            result = brute_eval_mono(w, n.kids[0], asg, extra) ==
                     brute_eval_mono(w, n.kids[1], asg, extra);
            break;
        default: {
            Assignment positions;
            auto all = all_positions(w);
            for (const auto& [term, p] : asg) positions[term] = all[p];
            result = eval_fo(w, f, positions, oracle_opts());
            break;
        }
    }
    memo.emplace(std::move(memo_key), result);
    return result;
}

} // namespace lomodal::testing
