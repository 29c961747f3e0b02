#include "lomodal/named.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace lomodal {

// ============================================================================
// Counting registry
// ============================================================================

namespace {

struct Registries {
    std::map<FormulaId, CountSpec> counts;
    std::map<FormulaId, std::pair<ModalShortcut, Term>> modal;
    std::mutex mtx;
};

Registries& regs() {
    static Registries r;
    return r;
}

void register_count(FormulaId f, const IntervalShape& iv, int n, bool atleast, const std::string& prefix) {
    std::lock_guard<std::mutex> lock(regs().mtx);
    regs().counts.emplace(f, CountSpec{iv, n, atleast, prefix});
}

FormulaId rho_at(const IntervalShape& iv, const Term& z) {
    std::vector<FormulaId> parts;
    if (iv.lo) parts.push_back(iv.lo_strict ? f_lt(*iv.lo, z) : f_leq(*iv.lo, z));
    if (iv.hi) parts.push_back(iv.hi_strict ? f_lt(z, *iv.hi) : f_leq(z, *iv.hi));
    return f_and_all(parts);
}

} // namespace

std::optional<CountSpec> count_spec(FormulaId f) {
    std::lock_guard<std::mutex> lock(regs().mtx);
    auto it = regs().counts.find(f);
    if (it == regs().counts.end()) return std::nullopt;
    return it->second;
}

FormulaId count_atleast(const IntervalShape& iv, int n, const std::string& prefix) {
    if (n < 0) throw DomainError("count_atleast requires n >= 0");
    if (n == 0) return f_true();
    std::vector<Term> zs;
    for (int i = 0; i < n; ++i) zs.push_back(var(prefix + std::to_string(i)));
    std::vector<FormulaId> parts;
    for (int i = 0; i < n; ++i) {
        FormulaId r = rho_at(iv, zs[i]);
        if (r != f_true()) parts.push_back(r);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) parts.push_back(f_not(f_eq(zs[i], zs[j])));
    FormulaId body = f_and_all(parts);
    for (int i = n - 1; i >= 0; --i) body = f_exists(zs[i].name, body);
    register_count(body, iv, n, true, prefix);
    return body;
}

FormulaId count_atmost(const IntervalShape& iv, int n, const std::string& prefix) {
    if (n < 0) throw DomainError("count_atmost requires n >= 0");
    std::vector<Term> zs;
    for (int i = 0; i <= n; ++i) zs.push_back(var(prefix + std::to_string(i)));
    std::vector<FormulaId> hyp;
    for (int i = 0; i <= n; ++i) {
        FormulaId r = rho_at(iv, zs[i]);
        if (r != f_true()) hyp.push_back(r);
    }
    std::vector<FormulaId> eqs;
    for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) eqs.push_back(f_eq(zs[i], zs[j]));
    FormulaId body = hyp.empty() ? f_or_all(eqs) : f_implies(f_and_all(hyp), f_or_all(eqs));
    for (int i = n; i >= 0; --i) body = f_forall(zs[i].name, body);
    register_count(body, iv, n, false, prefix);
    return body;
}

FormulaId count_exactly(const IntervalShape& iv, int n, const std::string& prefix) {
    return f_and(count_atleast(iv, n, prefix), count_atmost(iv, n, prefix));
}

// ============================================================================
// Named family
// ============================================================================

FormulaId theta(int n) {
    if (n < 0) throw DomainError("theta requires n >= 0");
    if (n == 0) return f_true();
    return count_atleast(IntervalShape{}, n, "x");
}

FormulaId adj(const Term& a, const Term& b) {
    // a < b and the open interval (a, b) is empty
    return f_and(f_lt(a, b), count_atmost(IntervalShape{a, true, b, true}, 0, "z"));
}

FormulaId succ(const Term& a, const Term& b) { return adj(a, b); }

FormulaId disc(int n) {
    if (n < 2) throw DomainError("disc requires n >= 2");
    std::vector<Term> xs;
    for (int i = 0; i < n; ++i) xs.push_back(var("x" + std::to_string(i)));
    std::vector<FormulaId> parts;
    for (int i = 0; i + 1 < n; ++i) parts.push_back(adj(xs[i], xs[i + 1]));
    FormulaId body = f_and_all(parts);
    for (int i = n - 1; i >= 0; --i) body = f_exists(xs[i].name, body);
    return body;
}

FormulaId dense_sentence() {
    Term l = var("l"), r = var("r"), x = var("x"), y = var("y"), z = var("z");
    FormulaId hasmin = f_exists("l", f_forall("x", f_leq(l, x)));
    FormulaId hasmax = f_exists("r", f_forall("x", f_leq(x, r)));
    FormulaId dense_body =
        f_forall("x", f_forall("y", f_implies(f_lt(x, y), f_exists("z", f_and(f_lt(x, z), f_lt(z, y))))));
    return f_and(f_and(f_and(theta(2), hasmin), hasmax), dense_body);
}

FormulaId max_of(const Term& x) {
    // no point above x
    return count_atmost(IntervalShape{x, true, std::nullopt, true}, 0, "m");
}

FormulaId has_pred(const Term& x) {
    Term y = var("hp");
    return f_exists("hp", succ(y, x));
}

FormulaId no_pred(const Term& x) { return f_not(has_pred(x)); }

FormulaId no_succ(const Term& x) {
    Term y = var("hs");
    return f_not(f_exists("hs", succ(x, y)));
}

std::vector<FormulaId> disc_dial(int m) {
    if (m < 2) throw DomainError("disc_dial requires m >= 2");
    std::vector<FormulaId> out;
    out.push_back(f_not(disc(2))); // d_1
    for (int r = 2; r < m; ++r) out.push_back(f_and(disc(r), f_not(disc(r + 1))));
    out.push_back(disc(m)); // d_{>=m}
    return out;
}

// ---- end-extension coding ----------------------------------------------------

FormulaId top_base(const Term& x, int base_n) {
    if (base_n <= 0) throw DomainError("top_base requires a nonempty base");
    return count_exactly(IntervalShape{std::nullopt, true, x, true}, base_n - 1, "t");
}

FormulaId anch(const Term& x, int base_n) {
    if (base_n == 0) return f_true();
    Term y = var("an");
    return f_exists("an", f_and(top_base(y, base_n), f_leq(y, x)));
}

FormulaId above_base(const Term& x, int base_n) {
    if (base_n == 0) return f_true();
    Term y = var("ab");
    return f_exists("ab", f_and(top_base(y, base_n), f_lt(y, x)));
}

FormulaId p_point(int n, int base_n, const Term& z) {
    if (n < 1) throw DomainError("p_point requires n >= 1");
    if (n == 1) {
        Term y = var("py1");
        return f_exists("py1", f_and(anch(y, base_n), succ(y, z)));
    }
    Term y = var("py" + std::to_string(n));
    return f_exists(y.name, f_and(p_point(n - 1, base_n, y), succ(y, z)));
}

FormulaId empty_n(int n, int base_n) {
    Term z = var("ez");
    return f_forall("ez", f_not(p_point(n, base_n, z)));
}

FormulaId min_n(int n, int base_n) {
    Term z = var("mz"), w = var("mw");
    return f_exists("mz", f_and(p_point(n, base_n, z),
                                f_forall("mw", f_implies(p_point(n, base_n, w), f_leq(z, w)))));
}

FormulaId nomin_n(int n, int base_n) {
    Term z = var("nz"), w = var("nw");
    FormulaId some = f_exists("nz", p_point(n, base_n, z));
    FormulaId below = f_forall(
        "nz", f_implies(p_point(n, base_n, z),
                        f_exists("nw", f_and(p_point(n, base_n, w), f_lt(w, z)))));
    return f_and(some, below);
}

FormulaId exactly_between(int r, const Term& b, const Term& u) {
    return count_exactly(IntervalShape{b, true, u, false}, r, "e");
}

FormulaId final_block(int r, int base_n, const Term& b, const Term& u) {
    Term x = var("fb");
    FormulaId all_have_pred =
        f_forall("fb", f_implies(f_and(f_lt(b, x), f_leq(x, u)), has_pred(x)));
    std::vector<FormulaId> parts{above_base(b, base_n), max_of(u), no_pred(b), all_have_pred,
                                 exactly_between(r, b, u)};
    return f_and_all(parts);
}

FormulaId chain_of(int b_size, const Term& b) {
    if (b_size < 1) throw DomainError("chain_of requires size >= 1");
    std::vector<Term> cs;
    for (int i = 0; i < b_size; ++i) cs.push_back(var("c" + std::to_string(i)));
    std::vector<FormulaId> parts;
    parts.push_back(f_eq(cs[b_size - 1], b));
    parts.push_back(no_pred(cs[0]));
    for (int i = 0; i + 1 < b_size; ++i) parts.push_back(succ(cs[i], cs[i + 1]));
    FormulaId body = f_and_all(parts);
    for (int i = b_size - 1; i >= 0; --i) body = f_exists(cs[i].name, body);
    return body;
}

FormulaId max_succ_below(const Term& y, const Term& b) {
    Term c = var("msb");
    FormulaId none_above = f_forall("msb", f_implies(f_and(f_lt(b, c), f_lt(c, y)), f_not(has_pred(c))));
    return f_and(f_and(f_lt(b, y), has_pred(b)), none_above);
}

FormulaId code(int b_size, const Term& y) {
    Term b = var("cb");
    return f_exists("cb", f_and(f_and(max_succ_below(y, b), chain_of(b_size, b)), no_succ(b)));
}

FormulaId min_p(int n, int base_n, const Term& x) {
    Term z = var("mp");
    return f_and(p_point(n, base_n, x),
                 f_forall("mp", f_implies(p_point(n, base_n, z), f_leq(x, z))));
}

FormulaId branch(int n, int a, int k, int base_n) {
    if (k < 1 || a < 0 || a >= k) throw DomainError("branch requires 0 <= a < k");
    if (n < 1) throw DomainError("branch requires n >= 1");
    if (k == 1) return f_not(empty_n(n, base_n));
    if (a <= k - 2) {
        int b_code = a + 2;
        Term x = var("bx");
        std::vector<Term> ys;
        for (int i = 0; i <= n; ++i) ys.push_back(var("by" + std::to_string(i)));
        std::vector<FormulaId> parts;
        parts.push_back(min_p(n, base_n, x));
        for (int i = 0; i < n; ++i) parts.push_back(f_lt(ys[i], ys[i + 1]));
        parts.push_back(f_eq(ys[n], x));
        for (int i = 0; i < n; ++i) parts.push_back(succ(ys[i], ys[i + 1]));
        parts.push_back(code(b_code, ys[0]));
        FormulaId body = f_and_all(parts);
        for (int i = n; i >= 0; --i) body = f_exists(ys[i].name, body);
        return f_exists("bx", body);
    }
    // residual branch
    std::vector<FormulaId> parts{f_not(empty_n(n, base_n))};
    for (int j = 0; j < k - 1; ++j) parts.push_back(f_not(branch(n, j, k, base_n)));
    return f_and_all(parts);
}

// ---- condensation machinery ---------------------------------------------------

namespace {

void register_modal(FormulaId f, ModalShortcut kind, const Term& t) {
    std::lock_guard<std::mutex> lock(regs().mtx);
    regs().modal.emplace(f, std::make_pair(kind, t));
}

} // namespace

std::optional<std::pair<ModalShortcut, Term>> modal_shortcut(FormulaId f) {
    std::lock_guard<std::mutex> lock(regs().mtx);
    auto it = regs().modal.find(f);
    if (it == regs().modal.end()) return std::nullopt;
    return it->second;
}

FormulaId scatt_sentence() {
    FormulaId s = f_not(f_dia(dense_sentence()));
    register_modal(s, ModalShortcut::Scatt, Term{});
    return s;
}

FormulaId scatt_below_formula(const Term& x) {
    FormulaId s = f_not(f_dia(f_and(max_of(x), f_not(scatt_sentence()))));
    register_modal(s, ModalShortcut::ScattBelow, x);
    return s;
}

FormulaId chain_below(int n, const Term& x) {
    if (n < 1) throw DomainError("chain_below requires n >= 1");
    std::vector<Term> ys;
    for (int i = 0; i < n; ++i) ys.push_back(var("ch" + std::to_string(i)));
    std::vector<FormulaId> parts;
    for (int i = 0; i + 1 < n; ++i) parts.push_back(f_lt(ys[i], ys[i + 1]));
    parts.push_back(f_lt(ys[n - 1], x));
    for (int i = 0; i + 1 < n; ++i) parts.push_back(adj(ys[i], ys[i + 1]));
    FormulaId body = f_and_all(parts);
    for (int i = n - 1; i >= 0; --i) body = f_exists(ys[i].name, body);
    return body;
}

FormulaId delta_below(int n, const Term& x) {
    return f_and(chain_below(n, x), f_not(chain_below(n + 1, x)));
}

// ---- monotone buttons -----------------------------------------------------------

FormulaId mono_rho(int n_buttons) {
    std::vector<FormulaId> parts;
    for (int j = 1; j <= n_buttons; ++j)
        for (int k = 1; k <= n_buttons; ++k) {
            if (j == k) continue;
            Term uj = param("u" + std::to_string(j)), uk = param("u" + std::to_string(k));
            Term vj = param("v" + std::to_string(j)), vk = param("v" + std::to_string(k));
            parts.push_back(f_or(f_or(f_eq(uj, uk), f_eq(uj, vk)), f_eq(vj, vk)));
        }
    return f_or_all(parts);
}

FormulaId mono_button(int i, int n_buttons) {
    Term ui = param("u" + std::to_string(i)), vi = param("v" + std::to_string(i));
    return f_or(f_eq(ui, vi), mono_rho(n_buttons));
}

// ============================================================================
// Registry-aware substitution and simplification
// ============================================================================

FormulaId substitute_term(FormulaId f, const Term& from, const Term& repl) {
    if (from == repl) return f;
    // registered counting formulas: substitute in the interval bounds and
    // rebuild, so the result stays registered
    if (auto cs = count_spec(f)) {
        bool touched = (cs->iv.lo && *cs->iv.lo == from) || (cs->iv.hi && *cs->iv.hi == from);
        if (touched) {
            IntervalShape iv = cs->iv;
            if (iv.lo && *iv.lo == from) iv.lo = repl;
            if (iv.hi && *iv.hi == from) iv.hi = repl;
            return cs->atleast ? count_atleast(iv, cs->n, cs->prefix)
                               : count_atmost(iv, cs->n, cs->prefix);
        }
        return f;
    }
    const FormulaNode& n = node(f);
    auto sub = [&](const Term& t) { return t == from ? repl : t; };
    switch (n.tag) {
        case FTag::True:
        case FTag::False: return f;
        case FTag::Leq: return f_leq(sub(n.lhs), sub(n.rhs));
        case FTag::Eq: return f_eq(sub(n.lhs), sub(n.rhs));
        case FTag::Exists:
        case FTag::Forall:
            if (!from.param && n.var == from.name) return f; // rebound below
            // builders use fresh bound names, so capture does not arise here
            return n.tag == FTag::Exists ? f_exists(n.var, substitute_term(n.kids[0], from, repl))
                                         : f_forall(n.var, substitute_term(n.kids[0], from, repl));
        case FTag::Not: return f_not(substitute_term(n.kids[0], from, repl));
        case FTag::Dia: return f_dia(substitute_term(n.kids[0], from, repl));
        case FTag::Box: return f_box(substitute_term(n.kids[0], from, repl));
        case FTag::And:
            return f_and(substitute_term(n.kids[0], from, repl), substitute_term(n.kids[1], from, repl));
        case FTag::Or:
            return f_or(substitute_term(n.kids[0], from, repl), substitute_term(n.kids[1], from, repl));
        case FTag::Implies:
            return f_implies(substitute_term(n.kids[0], from, repl),
                             substitute_term(n.kids[1], from, repl));
        case FTag::Iff:
            return f_iff(substitute_term(n.kids[0], from, repl), substitute_term(n.kids[1], from, repl));
    }
    return f;
}

namespace {

void flatten_into(FTag t, FormulaId f, std::vector<FormulaId>& out) {
    const FormulaNode& n = node(f);
    if (n.tag == t && !count_spec(f)) {
        flatten_into(t, n.kids[0], out);
        flatten_into(t, n.kids[1], out);
    } else {
        out.push_back(f);
    }
}

} // namespace

FormulaId simplify(FormulaId f) {
    if (count_spec(f) || modal_shortcut(f)) return f; // keep registered shapes intact
    const FormulaNode& n = node(f);
    switch (n.tag) {
        case FTag::True:
        case FTag::False:
        case FTag::Leq:
        case FTag::Eq: return f;
        case FTag::Not: {
            FormulaId a = simplify(n.kids[0]);
            if (a == f_true()) return f_false();
            if (a == f_false()) return f_true();
            if (node(a).tag == FTag::Not && !count_spec(a) && !modal_shortcut(a)) return node(a).kids[0];
            return f_not(a);
        }
        case FTag::And:
        case FTag::Or: {
            bool is_and = n.tag == FTag::And;
            std::vector<FormulaId> parts;
            flatten_into(n.tag, f, parts);
            std::vector<FormulaId> keep;
            for (auto p : parts) {
                FormulaId s = simplify(p);
                if (is_and) {
                    if (s == f_false()) return f_false();
                    if (s == f_true()) continue;
                } else {
                    if (s == f_true()) return f_true();
                    if (s == f_false()) continue;
                }
                if (std::find(keep.begin(), keep.end(), s) == keep.end()) keep.push_back(s);
            }
            if (keep.empty()) return is_and ? f_true() : f_false();
            return is_and ? f_and_all(keep) : f_or_all(keep);
        }
        case FTag::Implies: {
            FormulaId a = simplify(n.kids[0]);
            FormulaId b = simplify(n.kids[1]);
            if (a == f_true()) return b;
            if (a == f_false()) return f_true();
            if (b == f_true()) return f_true();
            if (b == f_false()) return simplify(f_not(a));
            return f_implies(a, b);
        }
        case FTag::Iff: {
            FormulaId a = simplify(n.kids[0]);
            FormulaId b = simplify(n.kids[1]);
            if (a == b) return f_true();
            if (a == f_true()) return b;
            if (b == f_true()) return a;
            if (a == f_false()) return simplify(f_not(b));
            if (b == f_false()) return simplify(f_not(a));
            return f_iff(a, b);
        }
        case FTag::Exists: return f_exists(n.var, simplify(n.kids[0]));
        case FTag::Forall: return f_forall(n.var, simplify(n.kids[0]));
        case FTag::Dia: return f_dia(simplify(n.kids[0]));
        case FTag::Box: return f_box(simplify(n.kids[0]));
    }
    return f;
}

// ---- string dispatcher -----------------------------------------------------------

FormulaId named_formula(const std::string& spec) {
    auto open = spec.find('(');
    std::string name = open == std::string::npos ? spec : spec.substr(0, open);
    std::vector<std::string> args;
    if (open != std::string::npos) {
        if (spec.back() != ')') throw ParseError("expected ')' in named formula", spec.size());
        std::string inner = spec.substr(open + 1, spec.size() - open - 2);
        std::istringstream ss(inner);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            while (!piece.empty() && piece.front() == ' ') piece.erase(piece.begin());
            while (!piece.empty() && piece.back() == ' ') piece.pop_back();
            if (!piece.empty()) args.push_back(piece);
        }
    }
    auto num = [&](std::size_t i) -> int {
        if (i >= args.size()) throw DomainError("named formula " + name + ": missing argument");
        return std::stoi(args[i]);
    };
    auto trm = [&](std::size_t i) -> Term {
        if (i >= args.size()) throw DomainError("named formula " + name + ": missing argument");
        if (args[i].front() == '@') return param(args[i].substr(1));
        return var(args[i]);
    };
    if (name == "theta") return theta(num(0));
    if (name == "disc") return disc(num(0));
    if (name == "dense") return dense_sentence();
    if (name == "adj") return adj(trm(0), trm(1));
    if (name == "succ") return succ(trm(0), trm(1));
    if (name == "max") return max_of(trm(0));
    if (name == "haspred") return has_pred(trm(0));
    if (name == "nopred") return no_pred(trm(0));
    if (name == "nosucc") return no_succ(trm(0));
    if (name == "top") return top_base(trm(0), num(1));
    if (name == "anch") return anch(trm(0), num(1));
    if (name == "above") return above_base(trm(0), num(1));
    if (name == "p") return p_point(num(0), num(1), trm(2));
    if (name == "empty") return empty_n(num(0), num(1));
    if (name == "min") return min_n(num(0), num(1));
    if (name == "nomin") return nomin_n(num(0), num(1));
    if (name == "finalblock") return final_block(num(0), num(1), trm(2), trm(3));
    if (name == "exactly") return exactly_between(num(0), trm(1), trm(2));
    if (name == "chain") return chain_of(num(0), trm(1));
    if (name == "code") return code(num(0), trm(1));
    if (name == "minp") return min_p(num(0), num(1), trm(2));
    if (name == "branch") return branch(num(0), num(1), num(2), num(3));
    if (name == "scatt") return scatt_sentence();
    if (name == "scattbelow") return scatt_below_formula(trm(0));
    if (name == "chainbelow") return chain_below(num(0), trm(1));
    if (name == "delta") return delta_below(num(0), trm(1));
    if (name == "monorho") return mono_rho(num(0));
    if (name == "monobutton") return mono_button(num(0), num(1));
    throw DomainError("unknown named formula: " + name);
}

} // namespace lomodal
