#include "lomodal/fo_eval.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <mutex>

namespace lomodal {

// ============================================================================
// Compilation: AST -> evaluator IR with counting atoms
// ============================================================================

namespace {

enum class CTag : std::uint8_t {
    True, False, Leq, Eq, CountGeq, CountLeq, Not, And, Or, Implies, Iff, Exists, Forall
};

struct CNode {
    CTag tag{};
    int lhs = -1, rhs = -1;          // term-table indices (Leq/Eq)
    int lo = -1, hi = -1;            // Count*: -1 = open end
    bool lo_strict = true, hi_strict = true;
    int count = 0;                   // Count*
    int bind = -1;                   // Exists/Forall: bound variable's table index
    std::vector<std::uint32_t> kids;
    int erank = 0;
    int max_const = 0;
};

struct Compiled {
    std::vector<CNode> nodes;
    std::uint32_t root = 0;
    std::vector<Term> terms;          // variables and parameters, by table index
    std::vector<int> free_terms;      // table indices that occur free
};

struct CompileCtx {
    Compiled& out;
    bool use_registry;

    int term_index(const Term& t) {
        for (std::size_t i = 0; i < out.terms.size(); ++i)
            if (out.terms[i] == t) return static_cast<int>(i);
        out.terms.push_back(t);
        return static_cast<int>(out.terms.size() - 1);
    }

    std::uint32_t add(CNode n) {
        out.nodes.push_back(std::move(n));
        return static_cast<std::uint32_t>(out.nodes.size() - 1);
    }

    std::uint32_t compile(FormulaId f) {
        if (use_registry) {
            if (auto cs = count_spec(f)) {
                CNode n;
                n.tag = cs->atleast ? CTag::CountGeq : CTag::CountLeq;
                if (cs->iv.lo) { n.lo = term_index(*cs->iv.lo); n.lo_strict = cs->iv.lo_strict; }
                if (cs->iv.hi) { n.hi = term_index(*cs->iv.hi); n.hi_strict = cs->iv.hi_strict; }
                n.count = cs->n;
                n.erank = 0;
                n.max_const = cs->n;
                return add(std::move(n));
            }
        }
        const FormulaNode& fn = node(f);
        CNode n;
        switch (fn.tag) {
            case FTag::True: n.tag = CTag::True; break;
            case FTag::False: n.tag = CTag::False; break;
            case FTag::Leq:
            case FTag::Eq:
                n.tag = fn.tag == FTag::Leq ? CTag::Leq : CTag::Eq;
                n.lhs = term_index(fn.lhs);
                n.rhs = term_index(fn.rhs);
                break;
            case FTag::Not: n.tag = CTag::Not; break;
            case FTag::And: n.tag = CTag::And; break;
            case FTag::Or: n.tag = CTag::Or; break;
            case FTag::Implies: n.tag = CTag::Implies; break;
            case FTag::Iff: n.tag = CTag::Iff; break;
            case FTag::Exists:
            case FTag::Forall:
                n.tag = fn.tag == FTag::Exists ? CTag::Exists : CTag::Forall;
                n.bind = term_index(var(fn.var));
                break;
            case FTag::Dia:
            case FTag::Box:
                throw DomainError("eval_fo: formula contains a modality");
        }
        for (FormulaId k : fn.kids) n.kids.push_back(compile(k));
        for (auto k : n.kids) {
            n.erank = std::max(n.erank, out.nodes[k].erank);
            n.max_const = std::max(n.max_const, out.nodes[k].max_const);
        }
        if (n.tag == CTag::Exists || n.tag == CTag::Forall) n.erank += 1;
        return add(std::move(n));
    }
};

std::shared_ptr<const Compiled> compile_cached(FormulaId f, bool use_registry) {
    static std::mutex mtx;
    static std::map<std::pair<FormulaId, bool>, std::shared_ptr<const Compiled>> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find({f, use_registry});
        if (it != cache.end()) return it->second;
    }
    auto c = std::make_shared<Compiled>();
    CompileCtx ctx{*c, use_registry};
    c->root = ctx.compile(f);
    for (const Term& t : free_terms(f)) {
        for (std::size_t i = 0; i < c->terms.size(); ++i)
            if (c->terms[i] == t) c->free_terms.push_back(static_cast<int>(i));
    }
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(std::make_pair(f, use_registry), c);
    return c;
}

} // namespace

int effective_rank(FormulaId f) {
    if (auto cs = count_spec(f)) { (void)cs; return 0; }
    const FormulaNode& n = node(f);
    switch (n.tag) {
        case FTag::True:
        case FTag::False:
        case FTag::Leq:
        case FTag::Eq: return 0;
        case FTag::Exists:
        case FTag::Forall: return 1 + effective_rank(n.kids[0]);
        default: {
            int r = 0;
            for (auto k : n.kids) r = std::max(r, effective_rank(k));
            return r;
        }
    }
}

int max_count_constant(FormulaId f) {
    if (auto cs = count_spec(f)) return cs->n;
    const FormulaNode& n = node(f);
    int m = 0;
    for (auto k : n.kids) m = std::max(m, max_count_constant(k));
    return m;
}

// ============================================================================
// Direct evaluation on finite terms
// ============================================================================

namespace {

struct DirectEval {
    const Compiled& c;
    int npoints;
    std::vector<int> env; // table index -> point index, -1 unassigned

    bool eval(std::uint32_t id) {
        const CNode& n = c.nodes[id];
        switch (n.tag) {
            case CTag::True: return true;
            case CTag::False: return false;
            case CTag::Leq: return point(n.lhs) <= point(n.rhs);
            case CTag::Eq: return point(n.lhs) == point(n.rhs);
            case CTag::CountGeq: return count_interval(n) >= n.count;
            case CTag::CountLeq: return count_interval(n) <= n.count;
            case CTag::Not: return !eval(n.kids[0]);
            case CTag::And: return eval(n.kids[0]) && eval(n.kids[1]);
            case CTag::Or: return eval(n.kids[0]) || eval(n.kids[1]);
            case CTag::Implies: return !eval(n.kids[0]) || eval(n.kids[1]);
            case CTag::Iff: return eval(n.kids[0]) == eval(n.kids[1]);
            case CTag::Exists:
            case CTag::Forall: {
                int save = env[n.bind];
                bool result = n.tag == CTag::Forall;
                for (int p = 0; p < npoints; ++p) {
                    env[n.bind] = p;
                    bool v = eval(n.kids[0]);
                    if (n.tag == CTag::Exists && v) { result = true; break; }
                    if (n.tag == CTag::Forall && !v) { result = false; break; }
                }
                env[n.bind] = save;
                return result;
            }
        }
        return false;
    }

    int point(int term_idx) {
        int p = env[term_idx];
        if (p < 0) throw DomainError("unbound variable: " + c.terms[term_idx].str());
        return p;
    }

    int count_interval(const CNode& n) {
        int from = 0, to = npoints - 1;
        if (n.lo >= 0) {
            int a = point(n.lo);
            from = n.lo_strict ? a + 1 : a;
        }
        if (n.hi >= 0) {
            int b = point(n.hi);
            to = n.hi_strict ? b - 1 : b;
        }
        return std::max(0, to - from + 1);
    }
};

} // namespace

bool eval_fo_direct(TermId w, FormulaId f, const Assignment& asg, bool use_count_registry) {
    if (!is_finite(w)) throw DomainError("eval_fo_direct requires a finite term");
    auto c = compile_cached(f, use_count_registry);
    auto positions = all_positions(w);
    DirectEval ev{*c, static_cast<int>(positions.size()), std::vector<int>(c->terms.size(), -1)};
    for (int ti : c->free_terms) {
        auto it = asg.find(c->terms[ti]);
        if (it == asg.end()) throw DomainError("unbound variable: " + c->terms[ti].str());
        // locate the index of the assigned position
        int idx = -1;
        for (std::size_t i = 0; i < positions.size(); ++i)
            if (compare_positions(w, positions[i], it->second) == 0) { idx = static_cast<int>(i); break; }
        if (idx < 0) throw DomainError("invalid position for " + c->terms[ti].str());
        ev.env[ti] = idx;
    }
    return ev.eval(c->root);
}

// ============================================================================
// Typed evaluation on decorated states
// ============================================================================

namespace {

struct TypedEval {
    const Compiled& c;
    TypeEngine& eng;

    // memo across calls: key is (compiled identity, node, segments, env)
    using Key = std::tuple<const Compiled*, std::uint32_t, std::vector<TypeEngine::Ref>, std::vector<int>>;
    static std::map<Key, bool>& memo() {
        static std::map<Key, bool> m;
        return m;
    }
    static std::mutex& memo_mtx() {
        static std::mutex m;
        return m;
    }

    struct State {
        std::vector<TypeEngine::Ref> segs; // maintained at the current node's erank
        std::vector<int> env;              // table index -> slot, -1 unassigned
    };

    void lower_to(State& s, int rank) {
        for (auto& r : s.segs)
            while (eng.rank_of(r) > rank) r = eng.project(r);
    }

    bool eval(std::uint32_t id, State s) {
        const CNode& n = c.nodes[id];
        lower_to(s, n.erank);
        Key key{&c, id, s.segs, s.env};
        {
            std::lock_guard<std::mutex> lock(memo_mtx());
            auto it = memo().find(key);
            if (it != memo().end()) return it->second;
        }
        bool result = eval_raw(n, s);
        std::lock_guard<std::mutex> lock(memo_mtx());
        memo().emplace(std::move(key), result);
        return result;
    }

    int slot(const State& s, int term_idx) {
        int p = s.env[term_idx];
        if (p < 0) throw DomainError("unbound variable: " + c.terms[term_idx].str());
        return p;
    }

    bool eval_raw(const CNode& n, State& s) {
        switch (n.tag) {
            case CTag::True: return true;
            case CTag::False: return false;
            case CTag::Leq: return slot(s, n.lhs) <= slot(s, n.rhs);
            case CTag::Eq: return slot(s, n.lhs) == slot(s, n.rhs);
            case CTag::CountGeq:
            case CTag::CountLeq: {
                // cardinality of the interval across segments and marked slots;
                // segment i = (slot i-1, slot i)
                int nslots = static_cast<int>(s.segs.size()) - 1;
                int lo_slot = n.lo >= 0 ? slot(s, n.lo) : -1;
                int hi_slot = n.hi >= 0 ? slot(s, n.hi) : -1;
                auto slot_allowed = [&](int p) {
                    if (n.lo >= 0 && !(p > lo_slot || (p == lo_slot && !n.lo_strict))) return false;
                    if (n.hi >= 0 && !(p < hi_slot || (p == hi_slot && !n.hi_strict))) return false;
                    return true;
                };
                auto seg_allowed = [&](int i) {
                    if (n.lo >= 0 && i < lo_slot + 1) return false;
                    if (n.hi >= 0 && i > hi_slot) return false;
                    return true;
                };
                long long card = 0;
                bool big = false;
                for (int i = 0; i <= nslots && !big; ++i) {
                    if (!seg_allowed(i)) continue;
                    int sz = eng.size_of(s.segs[i]);
                    if (sz == TypeEngine::kBigSize) big = true;
                    else card += sz;
                }
                for (int p = 0; p < nslots; ++p)
                    if (slot_allowed(p)) ++card;
                if (n.tag == CTag::CountGeq) return big || card >= n.count;
                return !big && card <= n.count;
            }
            case CTag::Not: return !eval(n.kids[0], s);
            case CTag::And: return eval(n.kids[0], s) && eval(n.kids[1], s);
            case CTag::Or: return eval(n.kids[0], s) || eval(n.kids[1], s);
            case CTag::Implies: return !eval(n.kids[0], s) || eval(n.kids[1], s);
            case CTag::Iff: return eval(n.kids[0], s) == eval(n.kids[1], s);
            case CTag::Exists:
            case CTag::Forall: {
                bool is_exists = n.tag == CTag::Exists;
                // (a) existing marked points
                int nslots = static_cast<int>(s.segs.size()) - 1;
                for (int p = 0; p < nslots; ++p) {
                    State child = s;
                    child.env[n.bind] = p;
                    bool v = eval(n.kids[0], std::move(child));
                    if (is_exists && v) return true;
                    if (!is_exists && !v) return false;
                }
                // (b) one representative per split class of each segment
                for (std::size_t seg = 0; seg < s.segs.size(); ++seg) {
                    auto seg_splits = eng.splits_of(s.segs[seg]); // copy: engine grows
                    for (const auto& [pre, suf] : seg_splits) {
                        State child;
                        child.segs.reserve(s.segs.size() + 1);
                        for (std::size_t i = 0; i < seg; ++i) child.segs.push_back(eng.project(s.segs[i]));
                        child.segs.push_back(pre);
                        child.segs.push_back(suf);
                        for (std::size_t i = seg + 1; i < s.segs.size(); ++i)
                            child.segs.push_back(eng.project(s.segs[i]));
                        child.env = s.env;
                        for (auto& e : child.env)
                            if (e >= static_cast<int>(seg)) ++e;
                        child.env[n.bind] = static_cast<int>(seg);
                        bool v = eval(n.kids[0], std::move(child));
                        if (is_exists && v) return true;
                        if (!is_exists && !v) return false;
                    }
                }
                return !is_exists;
            }
        }
        return false;
    }
};

} // namespace

bool eval_fo_typed(TermId w, FormulaId f, const Assignment& asg, const EvalOptions& opts) {
    auto c = compile_cached(f, !opts.raw_counts);
    bool has_counts = false;
    int maxconst = 0;
    for (const auto& n : c->nodes)
        if (n.tag == CTag::CountGeq || n.tag == CTag::CountLeq) {
            has_counts = true;
            maxconst = std::max(maxconst, n.count);
        }
    int cap = has_counts ? maxconst + 1 : 0;
    TypeEngine& eng = TypeEngine::shared(cap);
    int erank = c->nodes[c->root].erank;
    if (!is_finite(w) && erank > opts.rank_cap)
        throw RankCapError("effective rank " + std::to_string(erank) + " exceeds cap " +
                           std::to_string(opts.rank_cap));

    // build the decorated state: sort and dedup the assigned positions
    std::vector<std::pair<Position, std::vector<int>>> marked; // position + term indices
    for (int ti : c->free_terms) {
        auto it = asg.find(c->terms[ti]);
        if (it == asg.end()) throw DomainError("unbound variable: " + c->terms[ti].str());
        if (!valid_position(w, it->second)) throw DomainError("invalid position for " + c->terms[ti].str());
        bool placed = false;
        for (auto& [p, tis] : marked) {
            if (compare_positions(w, p, it->second) == 0) {
                tis.push_back(ti);
                placed = true;
                break;
            }
        }
        if (!placed) marked.push_back({it->second, {ti}});
    }
    std::sort(marked.begin(), marked.end(), [&](const auto& a, const auto& b) {
        return compare_positions(w, a.first, b.first) < 0;
    });

    TypedEval::State st;
    st.env.assign(c->terms.size(), -1);
    for (std::size_t i = 0; i < marked.size(); ++i)
        for (int ti : marked[i].second) st.env[ti] = static_cast<int>(i);

    std::vector<TermId> segs;
    if (marked.empty()) {
        segs.push_back(w);
    } else {
        segs.push_back(prefix_term(w, marked.front().first));
        for (std::size_t i = 0; i + 1 < marked.size(); ++i)
            segs.push_back(between_term(w, marked[i].first, marked[i + 1].first));
        segs.push_back(suffix_term(w, marked.back().first));
    }
    for (TermId sgt : segs) st.segs.push_back(eng.type_of(sgt, erank));

    TypedEval ev{*c, eng};
    return ev.eval(c->root, std::move(st));
}

bool eval_fo(TermId w, FormulaId f, const Assignment& asg, const EvalOptions& opts) {
    if (opts.force_typed) return eval_fo_typed(w, f, asg, opts);
    if (is_finite(w)) {
        long long n = term_size(w);
        auto c = compile_cached(f, true);
        int erank = c->nodes[c->root].erank;
        double cost = 1;
        for (int i = 0; i < erank && cost < 2e6; ++i) cost *= static_cast<double>(n + 1);
        if (opts.force_direct || cost < 2e6) return eval_fo_direct(w, f, asg);
        return eval_fo_typed(w, f, asg, opts);
    }
    if (opts.force_direct) throw DomainError("eval_fo_direct requires a finite term");
    return eval_fo_typed(w, f, asg, opts);
}

// ============================================================================
// QType facade
// ============================================================================

QType qtype(TermId w, int q) {
    if (q < 0) throw DomainError("qtype requires q >= 0");
    TypeEngine& eng = TypeEngine::shared(0);
    return QType{eng.type_of(w, q), q};
}

QType compose_qtype(SumOp op, const std::vector<QType>& args, int q) {
    TypeEngine& eng = TypeEngine::shared(0);
    for (const auto& a : args)
        if (a.rank != q) throw DomainError("compose_qtype: rank mismatch");
    switch (op) {
        case SumOp::Sum: {
            if (args.empty()) return QType{eng.type_of(t_fin(0), q), q};
            TypeEngine::Ref acc = args[0].ref;
            for (std::size_t i = 1; i < args.size(); ++i) acc = eng.compose_sum(acc, args[i].ref);
            return QType{acc, q};
        }
        case SumOp::OmegaSum:
            if (args.size() != 1) throw DomainError("omegasum takes one argument");
            return QType{eng.omega_sum_of(args[0].ref), q};
        case SumOp::OmegaStarSum:
            if (args.size() != 1) throw DomainError("omegastarsum takes one argument");
            return QType{eng.omega_star_sum_of(args[0].ref), q};
        case SumOp::EtaSum:
            if (args.size() != 1) throw DomainError("etasum takes one argument");
            return QType{eng.eta_sum_of(args[0].ref), q};
    }
    throw DomainError("compose_qtype: bad op");
}

} // namespace lomodal
