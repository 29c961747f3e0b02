#include "lomodal/mod_embed.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <set>

#include "lomodal/named.hpp"
#include "lomodal/type_engine.hpp"

namespace lomodal {

namespace {

// fresh merge variables for the block-collapsed probe formula
Term probe_var(int j) { return var("y" + std::to_string(j)); }

// psi with every free term of block j replaced by the probe variable y_j
FormulaId collapse_blocks(FormulaId psi, const std::vector<Term>& frees,
                          const OrderedPartition& p) {
    FormulaId out = psi;
    for (std::size_t j = 0; j < p.blocks.size(); ++j)
        for (int idx : p.blocks[j]) out = substitute_term(out, frees[idx], probe_var(static_cast<int>(j)));
    return out;
}

// the pattern formula P(x): block equalities plus strict order of consecutive
// block representatives
FormulaId pattern_formula(const std::vector<Term>& frees, const OrderedPartition& p) {
    std::vector<FormulaId> parts;
    for (const auto& block : p.blocks)
        for (std::size_t i = 1; i < block.size(); ++i)
            parts.push_back(f_eq(frees[block[0]], frees[block[i]]));
    for (std::size_t j = 0; j + 1 < p.blocks.size(); ++j)
        parts.push_back(f_lt(frees[p.blocks[j][0]], frees[p.blocks[j + 1][0]]));
    return f_and_all(parts);
}

// interval bound #I_j <= b over the block representatives
FormulaId interval_upper_bound(const std::vector<Term>& frees, const OrderedPartition& p, int j,
                               int bound) {
    IntervalShape iv;
    int k = static_cast<int>(p.blocks.size());
    if (j > 0) iv.lo = frees[p.blocks[j - 1][0]];
    if (j < k) iv.hi = frees[p.blocks[j][0]];
    return count_atmost(iv, bound, "i" + std::to_string(j) + "c");
}

bool leq_vec(const std::vector<long long>& a, const std::vector<long long>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] == kInfinite) continue;
        if (a[i] == kInfinite || a[i] > b[i]) return false;
    }
    return true;
}

struct DiaAnalysis {
    EmbedNormalForm nf;
    FormulaId formula; // the eliminated equivalent
};

DiaAnalysis analyze_dia(FormulaId psi, const Config& cfg) {
    DiaAnalysis out;
    std::vector<Term> frees = free_terms(psi);
    out.nf.free_order = frees;
    int n = static_cast<int>(frees.size());

    Catalog cat = Catalog::standard(cfg);
    EvalOptions opts;
    opts.rank_cap = cfg.rank_cap;

    std::vector<FormulaId> disjuncts;
    std::set<std::size_t> true_patterns;
    auto patterns = ordered_partitions(n);

    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        const OrderedPartition& p = patterns[pi];
        PatternNormalForm pnf;
        pnf.pattern = p;
        int k = static_cast<int>(p.blocks.size());

        FormulaId psi_p = collapse_blocks(psi, frees, p);
        std::vector<Term> pattern_vars;
        for (int j = 0; j < k; ++j) pattern_vars.push_back(probe_var(j));

        if (effective_rank(psi_p) > cfg.rank_cap)
            throw RankCapError("elimination stage rank " + std::to_string(effective_rank(psi_p)) +
                               " exceeds cap " + std::to_string(cfg.rank_cap));

        // saturation bound: exact stabilization point of the chain types at
        // this stage's effective rank and count cap
        int kcap = max_count_constant(psi_p) > 0 ? max_count_constant(psi_p) + 1 : 0;
        // counting atoms see sizes up to their largest constant, so chains
        // stabilize in the counting-extended type hierarchy
        TypeEngine& eng = TypeEngine::shared(kcap > 0 ? kcap : 0);
        int sat_bound = eng.chain_stabilization(std::max(1, effective_rank(psi_p)));

        // probe the grid {0..sat_bound, inf}^(k+1)
        std::vector<long long> probe_values;
        for (int v = 0; v <= sat_bound; ++v) probe_values.push_back(v);
        probe_values.push_back(kInfinite);

        std::vector<std::vector<long long>> members;
        bool relative = false;
        std::vector<long long> vec(k + 1, 0);
        std::map<std::vector<long long>, bool> memo;

        auto probe = [&](const std::vector<long long>& v) -> bool {
            auto it = memo.find(v);
            if (it != memo.end()) return it->second;
            SatQuery q;
            q.psi = psi_p;
            q.pattern_vars = pattern_vars;
            for (long long coord : v)
                q.constraints.push_back(coord == kInfinite
                                            ? IntervalConstraint::infinite()
                                            : IntervalConstraint::exactly(static_cast<int>(coord)));
            SatResult r = satisfiable(q, cat, opts);
            if (!r.found() && r.budget_exhausted) relative = true;
            memo.emplace(v, r.found());
            return r.found();
        };

        std::vector<int> idx(k + 1, 0);
        while (true) {
            for (int j = 0; j <= k; ++j) vec[j] = probe_values[idx[j]];
            if (probe(vec)) members.push_back(vec);
            int j = k;
            while (j >= 0 && idx[j] == static_cast<int>(probe_values.size()) - 1) idx[j--] = 0;
            if (j < 0) break;
            ++idx[j];
        }

        // catalog-relativity: an inf-coordinate probe that failed although its
        // finite-saturated counterpart is a member was blocked only by the
        // catalog (the suprema-closure of S would promote it)
        for (const auto& m : members) {
            bool saturated = false;
            for (long long c : m)
                if (c == sat_bound) saturated = true;
            if (!saturated) continue;
            auto promoted = m;
            for (auto& c : promoted)
                if (c == sat_bound) c = kInfinite;
            if (!memo[promoted]) relative = true;
        }

        pnf.satisfiable = !members.empty();
        // antichain of maximal probed vectors
        for (const auto& m : members) {
            bool dominated = false;
            for (const auto& other : members)
                if (&other != &m && leq_vec(m, other) && m != other) dominated = true;
            if (!dominated) pnf.max_vectors.push_back(m);
        }
        std::sort(pnf.max_vectors.begin(), pnf.max_vectors.end());

        if (relative) out.nf.catalog_relative = true;

        // assemble this pattern's disjunct
        if (pnf.satisfiable) {
            std::vector<FormulaId> betas;
            bool top = false;
            for (const auto& mv : pnf.max_vectors) {
                std::vector<FormulaId> bounds;
                for (int j = 0; j <= k; ++j)
                    if (mv[j] != kInfinite)
                        bounds.push_back(interval_upper_bound(frees, p, j, static_cast<int>(mv[j])));
                if (bounds.empty()) top = true;
                betas.push_back(f_and_all(bounds));
            }
            FormulaId beta = top ? f_true() : f_or_all(betas);
            if (top) true_patterns.insert(pi);
            disjuncts.push_back(simplify(f_and(pattern_formula(frees, p), beta)));
        }
        out.nf.cases.push_back(std::move(pnf));
    }

    if (disjuncts.empty())
        out.formula = f_false();
    else if (true_patterns.size() == patterns.size())
        out.formula = f_true(); // every pattern possible with no bound
    else
        out.formula = simplify(f_or_all(disjuncts));
    return out;
}

FormulaId eliminate_embed_rec(FormulaId f, const Config& cfg, bool& relative) {
    const FormulaNode& fn = node(f);
    switch (fn.tag) {
        case FTag::True:
        case FTag::False:
        case FTag::Leq:
        case FTag::Eq: return f;
        case FTag::Not: return f_not(eliminate_embed_rec(fn.kids[0], cfg, relative));
        case FTag::And:
            return f_and(eliminate_embed_rec(fn.kids[0], cfg, relative),
                         eliminate_embed_rec(fn.kids[1], cfg, relative));
        case FTag::Or:
            return f_or(eliminate_embed_rec(fn.kids[0], cfg, relative),
                        eliminate_embed_rec(fn.kids[1], cfg, relative));
        case FTag::Implies:
            return f_implies(eliminate_embed_rec(fn.kids[0], cfg, relative),
                             eliminate_embed_rec(fn.kids[1], cfg, relative));
        case FTag::Iff:
            return f_iff(eliminate_embed_rec(fn.kids[0], cfg, relative),
                         eliminate_embed_rec(fn.kids[1], cfg, relative));
        case FTag::Exists: return f_exists(fn.var, eliminate_embed_rec(fn.kids[0], cfg, relative));
        case FTag::Forall: return f_forall(fn.var, eliminate_embed_rec(fn.kids[0], cfg, relative));
        case FTag::Dia: {
            FormulaId inner = eliminate_embed_rec(fn.kids[0], cfg, relative);
            DiaAnalysis a = analyze_dia(simplify(inner), cfg);
            if (a.nf.catalog_relative) relative = true;
            return a.formula;
        }
        case FTag::Box: {
            FormulaId inner = eliminate_embed_rec(fn.kids[0], cfg, relative);
            DiaAnalysis a = analyze_dia(simplify(f_not(inner)), cfg);
            if (a.nf.catalog_relative) relative = true;
            return simplify(f_not(a.formula));
        }
    }
    return f;
}

} // namespace

EmbedNormalForm embed_dia_normal_form(FormulaId psi, const Config& cfg) {
    if (has_modality(psi)) throw DomainError("normal form requires a modality-free body");
    return analyze_dia(psi, cfg).nf;
}

EliminationResult eliminate_embed(FormulaId f, const Config& cfg) {
    bool relative = false;
    // memoized per (formula, config fingerprint)
    static std::mutex mtx;
    static std::map<std::tuple<FormulaId, int, int, int>, EliminationResult> cache;
    auto key = std::make_tuple(f, cfg.rank_cap, cfg.catalog_max_blocks, cfg.catalog_eta_fin_max);
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    FormulaId out = simplify(eliminate_embed_rec(f, cfg, relative));
    EliminationResult res{out, relative};
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(key, res);
    return res;
}

ModalEvalResult eval_modal_embed(TermId w, FormulaId f, const Assignment& asg, const Config& cfg) {
    EliminationResult e = eliminate_embed(f, cfg);
    EvalOptions opts;
    opts.rank_cap = cfg.rank_cap * 4; // eliminated forms are counting-heavy, not rank-heavy
    return {eval_fo(w, e.formula, asg, opts), e.catalog_relative};
}

UpwardClassification classify_upward_sentence(FormulaId b, TermId w, const Config& cfg) {
    if (!free_terms(b).empty()) throw DomainError("classification requires a parameter-free sentence");
    EliminationResult eb = eliminate_embed(b, cfg);
    EvalOptions opts;
    opts.rank_cap = cfg.rank_cap * 4;

    // desk-scale upward-absoluteness check over catalog extension pairs
    std::vector<TermId> bases{t_fin(0), t_fin(1), t_fin(2), t_fin(3), w};
    std::vector<TermId> tails{t_fin(1), t_fin(2), t_omega(), t_omega_star(), t_eta()};
    for (TermId base : bases) {
        bool base_val = eval_fo(base, eb.formula, {}, opts);
        if (!base_val) continue;
        for (TermId tail : tails) {
            for (TermId ext : {t_sum({base, tail}), t_sum({tail, base}),
                               t_sum({t_fin(1), base, t_fin(1)})}) {
                if (!eval_fo(ext, eb.formula, {}, opts))
                    throw DomainError("not upward absolute: true at " + render_term(base) +
                                      " but false at " + render_term(ext));
            }
        }
    }

    // dichotomy through the sentence-case normal form of dia ~beta
    EmbedNormalForm nf = embed_dia_normal_form(simplify(f_not(eb.formula)), cfg);
    // k = 0: single pattern (the empty one), vectors have one coordinate
    const PatternNormalForm& c = nf.cases.at(0);
    UpwardClassification out;
    if (!c.satisfiable) {
        out.threshold = 0; // dia ~b false everywhere: b is a tautology on the cone
        return out;
    }
    const auto& mv = c.max_vectors;
    if (mv.size() == 1 && mv[0][0] == kInfinite) {
        out.false_everywhere = true; // dia ~b true everywhere: b never holds
        return out;
    }
    out.threshold = static_cast<int>(mv[0][0]) + 1; // b <-> theta_{m+1}
    return out;
}

std::string logic_tag_name(LogicTag t) {
    switch (t) {
        case LogicTag::S43Chi2: return "S4.3+chi2";
        case LogicTag::S5: return "S5";
        case LogicTag::S42: return "S4.2";
        case LogicTag::UnclassifiedByPaper: return "Unclassified-by-paper";
    }
    return "?";
}

LogicTag exact_logic_embed(TermId w, SubstitutionMode mode) {
    if (mode == SubstitutionMode::Sentential)
        return is_finite(w) ? LogicTag::S43Chi2 : LogicTag::S5;
    if (is_dense_without_endpoints(w)) return LogicTag::S5;
    if (adjacent_pair_count(w) == kInfinite) return LogicTag::S42;
    return LogicTag::UnclassifiedByPaper;
}

// ============================================================================
// Capped-chain labeling
// ============================================================================

Labeling capped_chain_labeling(TermId base, int n, int m) {
    if (!is_finite(base)) throw DomainError("capped_chain_labeling requires a finite base");
    if (n < 1 || m < 2) throw DomainError("capped chains use n >= 1, m >= 2");
    int k = static_cast<int>(term_size(base));

    Labeling lab;
    lab.category = Category::Emb;
    lab.base_world = base;
    lab.frame = canonical_frame('C', n, m);

    // chain labels theta_{k+i} & ~theta_{k+i+1}
    for (int i = 0; i < n; ++i) lab.labels.push_back(f_and(theta(k + i), f_not(theta(k + i + 1))));
    // cap labels theta_{k+n} & d_{j+1} with the Disc dial
    auto dial = disc_dial(m);
    for (int j = 0; j < m; ++j) lab.labels.push_back(f_and(theta(k + n), dial[j]));

    // battery: one world per label, arrows where the frame order allows
    for (int i = 0; i < n; ++i)
        lab.battery.worlds.push_back(
            {t_fin(k + i), {}, "finite chain of size " + std::to_string(k + i)});
    // cap worlds: eta realizes d_1 (no discrete pair); eta + fin(r) + eta
    // realizes the dial value r
    lab.battery.worlds.push_back({t_eta(), {}, "eta: no discrete interval, dial value 1"});
    for (int r = 2; r <= m; ++r)
        lab.battery.worlds.push_back({t_sum({t_eta(), t_fin(r), t_eta()}),
                                      {},
                                      "eta + fin(" + std::to_string(r) + ") + eta: largest discrete interval " +
                                          std::to_string(r)});
    for (int i = 0; i < n + m; ++i) lab.battery_label.push_back(i);

    // arrows: chain -> larger chain, chain -> any cap, cap <-> cap (everything
    // countable embeds into eta)
    for (int i = 0; i < n + m; ++i)
        for (int j = 0; j < n + m; ++j) {
            if (i == j) continue;
            bool i_chain = i < n, j_chain = j < n;
            if (i_chain && j_chain && i < j)
                lab.battery.arrows.push_back({i, j, "initial embedding of chains"});
            else if (i_chain && !j_chain)
                lab.battery.arrows.push_back({i, j, "embed the chain into the eta part"});
            else if (!i_chain && !j_chain)
                lab.battery.arrows.push_back({i, j, "countable order embeds into eta"});
        }

    // negative cases: shrinking is impossible (theta thresholds) and caps are
    // infinite while chain labels pin a finite size
    for (int i = 0; i < n + m; ++i)
        for (int j = 0; j < n; ++j) {
            if (i < n && i <= j) continue;
            lab.negative_facts[{i, j}] =
                PersistenceFact{"theta-threshold",
                                "embeddings never decrease size; label " + std::to_string(j) +
                                    " pins size " + std::to_string(k + j) + " below the source"};
        }
    return lab;
}

// ============================================================================
// Finite amalgamation
// ============================================================================

bool is_finite_embedding(const FiniteEmbedding& e) {
    if (!is_finite(e.dom) || !is_finite(e.cod)) return false;
    long long dn = term_size(e.dom), cn = term_size(e.cod);
    if (static_cast<long long>(e.map.size()) != dn) return false;
    for (std::size_t i = 0; i < e.map.size(); ++i) {
        if (e.map[i] < 0 || e.map[i] >= cn) return false;
        if (i > 0 && e.map[i] <= e.map[i - 1]) return false;
    }
    return true;
}

Amalgam amalgamate_finite(const FiniteEmbedding& f0, const FiniteEmbedding& f1) {
    if (f0.dom != f1.dom) throw DomainError("amalgamate_finite requires a common span domain");
    if (!is_finite_embedding(f0) || !is_finite_embedding(f1))
        throw DomainError("amalgamate_finite requires finite embeddings");
    int wn = static_cast<int>(term_size(f0.dom));
    int n0 = static_cast<int>(term_size(f0.cod));
    int n1 = static_cast<int>(term_size(f1.cod));

    // walk the w-gaps; in each gap the new points of U0 precede those of U1
    Amalgam out;
    out.g0.dom = f0.cod;
    out.g1.dom = f1.cod;
    out.g0.map.resize(n0);
    out.g1.map.resize(n1);
    int v = 0;
    int i0 = 0, i1 = 0; // next unplaced point of U0 / U1
    for (int g = 0; g <= wn; ++g) {
        int stop0 = g < wn ? f0.map[g] : n0;
        int stop1 = g < wn ? f1.map[g] : n1;
        while (i0 < stop0) out.g0.map[i0++] = v++;
        while (i1 < stop1) out.g1.map[i1++] = v++;
        if (g < wn) {
            out.g0.map[i0++] = v;
            out.g1.map[i1++] = v;
            ++v;
        }
    }
    out.world = t_fin(v);
    out.g0.cod = out.world;
    out.g1.cod = out.world;
    return out;
}

} // namespace lomodal
