#include "lomodal/sat_oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace lomodal {

Catalog Catalog::standard(const Config& cfg) {
    Catalog cat;
    cat.max_blocks = cfg.catalog_max_blocks;
    cat.budget = cfg.sat_budget;
    cat.fin_max = std::max(cfg.catalog_fin_max, 1 << cfg.rank_cap);
    for (int n = 1; n <= cat.fin_max; ++n) cat.blocks.push_back(t_fin(n));
    cat.blocks.push_back(t_omega());
    cat.blocks.push_back(t_omega_star());
    cat.blocks.push_back(t_zeta());
    cat.blocks.push_back(t_eta());
    for (int r = 2; r <= cfg.catalog_eta_fin_max; ++r) cat.blocks.push_back(t_eta_sum(t_fin(r)));
    return cat;
}

namespace {

// canonical form for a filler sum: drop empties, merge adjacent Fins and
// adjacent plain etas
TermId canonical_sum(const std::vector<TermId>& parts) {
    std::vector<TermId> out;
    for (TermId p : parts) {
        if (is_empty(p)) continue;
        if (!out.empty()) {
            const auto& prev = term_node(out.back());
            const auto& cur = term_node(p);
            if (prev.tag == OTag::Fin && cur.tag == OTag::Fin) {
                out.back() = t_fin(prev.fin_n + cur.fin_n);
                continue;
            }
            if (prev.tag == OTag::Eta && cur.tag == OTag::Eta) continue; // eta + eta = eta
        }
        out.push_back(p);
    }
    if (out.empty()) return t_fin(0);
    return t_sum(out);
}

bool constraint_ok(const IntervalConstraint& c, long long size) {
    switch (c.kind) {
        case IntervalConstraintKind::Exactly: return size == c.n;
        case IntervalConstraintKind::AtLeast: return size == kInfinite || size >= c.n;
        case IntervalConstraintKind::Unconstrained: return true;
        case IntervalConstraintKind::Infinite: return size == kInfinite;
    }
    return false;
}

struct Candidate {
    TermId world;
    std::vector<Position> tuple;
};

Candidate assemble(const std::vector<std::vector<TermId>>& fillings,
                   const std::vector<std::size_t>& idx, int k) {
    // pieces are filler blocks plus marked singleton points; adjacent Fin
    // blocks merge so e.g. fin(1)+pt+fin(1) comes out as fin(3)
    std::vector<TermId> merged;
    std::vector<std::pair<int, int>> mark_addr; // (summand, inner index)
    auto push = [&](TermId t, bool marked) {
        const auto& n = term_node(t);
        if (!merged.empty() && n.tag == OTag::Fin && term_node(merged.back()).tag == OTag::Fin) {
            int offset = term_node(merged.back()).fin_n;
            if (marked) mark_addr.emplace_back(static_cast<int>(merged.size()) - 1, offset);
            merged.back() = t_fin(offset + n.fin_n);
        } else {
            if (marked) mark_addr.emplace_back(static_cast<int>(merged.size()), 0);
            merged.push_back(t);
        }
    };
    for (int j = 0; j <= k; ++j) {
        TermId fill = fillings[j][idx[j]];
        if (!is_empty(fill)) {
            if (term_node(fill).tag == OTag::Sum)
                for (TermId kid : term_node(fill).kids) push(kid, false);
            else
                push(fill, false);
        }
        if (j < k) push(t_fin(1), true);
    }
    Candidate c;
    c.world = merged.empty() ? t_fin(0) : t_sum(merged);
    bool single = merged.size() == 1;
    for (auto [summand, inner] : mark_addr) {
        Position p;
        if (!single) p.steps.push_back({PosStep::Summand, summand, {}});
        p.steps.push_back({PosStep::FinIndex, inner, {}});
        c.tuple.push_back(p);
    }
    return c;
}

} // namespace

std::vector<TermId> catalog_fillings(const Catalog& cat, const IntervalConstraint& c) {
    if (c.kind == IntervalConstraintKind::Exactly) {
        // every finite linear order of size n is the n-chain
        return {t_fin(c.n)};
    }
    std::vector<TermId> out;
    std::set<TermId> seen;
    // sequences over the block list, by block count then lexicographic order
    std::vector<std::vector<TermId>> layer{{}};
    for (int len = 0; len <= cat.max_blocks; ++len) {
        for (const auto& seq : layer) {
            TermId t = canonical_sum(seq);
            if (!seen.insert(t).second) continue;
            if (constraint_ok(c, term_size(t))) out.push_back(t);
        }
        if (len == cat.max_blocks) break;
        std::vector<std::vector<TermId>> next;
        next.reserve(layer.size() * cat.blocks.size());
        for (const auto& seq : layer)
            for (TermId b : cat.blocks) {
                auto s = seq;
                s.push_back(b);
                next.push_back(std::move(s));
            }
        layer = std::move(next);
    }
    return out;
}

SatResult satisfiable(const SatQuery& query, const Catalog& cat, const EvalOptions& opts) {
    if (has_modality(query.psi)) throw DomainError("sat oracle requires a modality-free formula");
    const int k = static_cast<int>(query.pattern_vars.size());
    std::vector<IntervalConstraint> cons = query.constraints;
    if (cons.empty()) cons.assign(k + 1, IntervalConstraint::unconstrained());
    if (static_cast<int>(cons.size()) != k + 1)
        throw DomainError("constraint list must have length k+1");

    for (const Term& t : free_terms(query.psi)) {
        if (std::find(query.pattern_vars.begin(), query.pattern_vars.end(), t) ==
            query.pattern_vars.end())
            throw DomainError("free term " + t.str() + " is not a pattern variable");
    }

    std::vector<std::vector<TermId>> fillings;
    for (const auto& c : cons) fillings.push_back(catalog_fillings(cat, c));
    for (const auto& f : fillings)
        if (f.empty()) return {};

    long long total_limit = 0;
    for (const auto& f : fillings) total_limit += static_cast<long long>(f.size()) - 1;

    long budget = cat.budget;
    bool exhausted = false;
    std::vector<std::size_t> v(k + 1, 0);
    std::optional<Candidate> found;

    std::function<bool(int, long long)> go = [&](int pos, long long remaining) -> bool {
        if (exhausted) return false;
        if (pos == k) {
            if (remaining >= static_cast<long long>(fillings[pos].size())) return false;
            v[pos] = static_cast<std::size_t>(remaining);
            if (--budget < 0) {
                exhausted = true;
                return false;
            }
            Candidate c = assemble(fillings, v, k);
            Assignment asg;
            for (int j = 0; j < k; ++j) asg[query.pattern_vars[j]] = c.tuple[j];
            if (!eval_fo(c.world, query.psi, asg, opts)) return false;
            auto vec = interval_vector(c.world, c.tuple);
            for (int j = 0; j <= k; ++j)
                if (!constraint_ok(cons[j], vec[j])) return false;
            found = std::move(c);
            return true;
        }
        for (std::size_t i = 0;
             i <= static_cast<std::size_t>(remaining) && i < fillings[pos].size(); ++i) {
            v[pos] = i;
            if (go(pos + 1, remaining - static_cast<long long>(i))) return true;
            if (exhausted) return false;
        }
        return false;
    };

    // by total enumeration depth (block-count-ordered filling lists), then lex
    for (long long total = 0; total <= total_limit && !exhausted; ++total) {
        if (go(0, total)) return {SatWitness{found->world, found->tuple}, false};
    }
    return {std::nullopt, exhausted};
}

} // namespace lomodal
