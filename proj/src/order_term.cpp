#include "lomodal/order_term.hpp"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace lomodal {

// ============================================================================
// Interning
// ============================================================================

namespace {

struct TPool {
    std::vector<OrderTermNode> nodes;
    std::map<std::pair<int, std::vector<TermId>>, TermId> index; // (tag*2^24+fin_n, kids)
    std::mutex mtx;

    TermId intern(OrderTermNode n) {
        auto key = std::make_pair(static_cast<int>(n.tag) * (1 << 24) + n.fin_n, n.kids);
        std::lock_guard<std::mutex> lock(mtx);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        TermId id = static_cast<TermId>(nodes.size());
        nodes.push_back(std::move(n));
        index.emplace(std::move(key), id);
        return id;
    }
};

TPool& tpool() {
    static TPool p;
    return p;
}

} // namespace

const OrderTermNode& term_node(TermId t) { return tpool().nodes[t]; }

TermId t_fin(int n) {
    if (n < 0) throw DomainError("fin(n) requires n >= 0");
    return tpool().intern({OTag::Fin, n, {}});
}
TermId t_omega() { return tpool().intern({OTag::Omega, 0, {}}); }
TermId t_omega_star() { return tpool().intern({OTag::OmegaStar, 0, {}}); }
TermId t_zeta() { return tpool().intern({OTag::Zeta, 0, {}}); }
TermId t_eta() { return tpool().intern({OTag::Eta, 0, {}}); }

TermId t_sum(const std::vector<TermId>& parts) {
    if (parts.empty()) throw DomainError("empty sum; write fin(0)");
    std::vector<TermId> flat;
    for (TermId p : parts) {
        if (term_node(p).tag == OTag::Sum) {
            for (TermId k : term_node(p).kids) flat.push_back(k);
        } else {
            flat.push_back(p);
        }
    }
    if (flat.size() == 1) return flat[0];
    return tpool().intern({OTag::Sum, 0, flat});
}
TermId t_omega_sum(TermId inner) { return tpool().intern({OTag::OmegaSum, 0, {inner}}); }
TermId t_omega_star_sum(TermId inner) { return tpool().intern({OTag::OmegaStarSum, 0, {inner}}); }
TermId t_eta_sum(TermId inner) { return tpool().intern({OTag::EtaSum, 0, {inner}}); }

TermId ordered_sum(TermId a, TermId b) { return t_sum({a, b}); }

// ============================================================================
// Parse / render
// ============================================================================

namespace {

struct TermParser {
    const std::string& src;
    std::size_t i = 0;

    explicit TermParser(const std::string& s) : src(s) {}

    void skip() {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    }

    bool word(const char* w) {
        skip();
        std::size_t n = std::strlen(w);
        if (src.compare(i, n, w) == 0) { i += n; return true; }
        return false;
    }

    void expect(char c) {
        skip();
        if (i >= src.size() || src[i] != c)
            throw ParseError(std::string("expected '") + c + "'", i);
        ++i;
    }

    int number() {
        skip();
        std::size_t start = i;
        while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        if (i == start) throw ParseError("expected number", start);
        return std::stoi(src.substr(start, i - start));
    }

    TermId term() {
        skip();
        if (word("fin")) {
            expect('(');
            int n = number();
            expect(')');
            return t_fin(n);
        }
        if (word("omegasum")) {
            expect('(');
            TermId k = term();
            expect(')');
            return t_omega_sum(k);
        }
        if (word("omegastarsum")) {
            expect('(');
            TermId k = term();
            expect(')');
            return t_omega_star_sum(k);
        }
        if (word("omega*")) return t_omega_star();
        if (word("omega")) return t_omega();
        if (word("zeta")) return t_zeta();
        if (word("etasum")) {
            expect('(');
            TermId k = term();
            expect(')');
            return t_eta_sum(k);
        }
        if (word("eta")) return t_eta();
        if (word("sum")) {
            expect('(');
            std::vector<TermId> parts;
            parts.push_back(term());
            skip();
            while (i < src.size() && src[i] == ',') {
                ++i;
                parts.push_back(term());
                skip();
            }
            expect(')');
            return t_sum(parts);
        }
        throw ParseError("expected term", i);
    }
};

} // namespace

TermId parse_term(const std::string& text) {
    TermParser p(text);
    TermId t = p.term();
    p.skip();
    if (p.i != text.size()) throw ParseError("trailing input", p.i);
    return t;
}

std::string render_term(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin: return "fin(" + std::to_string(n.fin_n) + ")";
        case OTag::Omega: return "omega";
        case OTag::OmegaStar: return "omega*";
        case OTag::Zeta: return "zeta";
        case OTag::Eta: return "eta";
        case OTag::OmegaSum: return "omegasum(" + render_term(n.kids[0]) + ")";
        case OTag::OmegaStarSum: return "omegastarsum(" + render_term(n.kids[0]) + ")";
        case OTag::EtaSum: return "etasum(" + render_term(n.kids[0]) + ")";
        case OTag::Sum: {
            std::string s = "sum(";
            for (std::size_t i = 0; i < n.kids.size(); ++i) {
                if (i) s += ", ";
                s += render_term(n.kids[i]);
            }
            return s + ")";
        }
    }
    return "";
}

// ============================================================================
// Structural facts
// ============================================================================

bool is_empty(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin: return n.fin_n == 0;
        case OTag::Omega:
        case OTag::OmegaStar:
        case OTag::Zeta:
        case OTag::Eta: return false;
        case OTag::Sum: {
            for (TermId k : n.kids)
                if (!is_empty(k)) return false;
            return true;
        }
        case OTag::OmegaSum:
        case OTag::OmegaStarSum:
        case OTag::EtaSum: return is_empty(n.kids[0]);
    }
    return false;
}

bool is_finite(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin: return true;
        case OTag::Sum:
            for (TermId k : n.kids)
                if (!is_finite(k)) return false;
            return true;
        case OTag::OmegaSum:
        case OTag::OmegaStarSum:
        case OTag::EtaSum: return is_empty(n.kids[0]);
        default: return false;
    }
}

long long term_size(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin: return n.fin_n;
        case OTag::Sum: {
            long long total = 0;
            for (TermId k : n.kids) {
                long long s = term_size(k);
                if (s == kInfinite) return kInfinite;
                total += s;
            }
            return total;
        }
        case OTag::OmegaSum:
        case OTag::OmegaStarSum:
        case OTag::EtaSum: return is_empty(n.kids[0]) ? 0 : kInfinite;
        default: return kInfinite;
    }
}

bool has_min(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin: return n.fin_n > 0;
        case OTag::Omega: return true;
        case OTag::OmegaStar:
        case OTag::Zeta:
        case OTag::Eta: return false;
        case OTag::Sum:
            for (TermId k : n.kids)
                if (!is_empty(k)) return has_min(k);
            return false;
        case OTag::OmegaSum: return !is_empty(n.kids[0]) && has_min(n.kids[0]);
        case OTag::OmegaStarSum:
        case OTag::EtaSum: return false; // copies descend without end / densely
    }
    return false;
}

bool has_max(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin: return n.fin_n > 0;
        case OTag::OmegaStar: return true;
        case OTag::Omega:
        case OTag::Zeta:
        case OTag::Eta: return false;
        case OTag::Sum:
            for (auto it = n.kids.rbegin(); it != n.kids.rend(); ++it)
                if (!is_empty(*it)) return has_max(*it);
            return false;
        case OTag::OmegaStarSum: return !is_empty(n.kids[0]) && has_max(n.kids[0]);
        case OTag::OmegaSum:
        case OTag::EtaSum: return false;
    }
    return false;
}

long long adjacent_pair_count(TermId t) {
    const OrderTermNode& n = term_node(t);
    auto add = [](long long a, long long b) -> long long {
        if (a == kInfinite || b == kInfinite) return kInfinite;
        return a + b;
    };
    switch (n.tag) {
        case OTag::Fin: return n.fin_n > 1 ? n.fin_n - 1 : 0;
        case OTag::Omega:
        case OTag::OmegaStar:
        case OTag::Zeta: return kInfinite;
        case OTag::Eta: return 0;
        case OTag::Sum: {
            long long total = 0;
            TermId prev = 0;
            bool have_prev = false;
            for (TermId k : n.kids) {
                if (is_empty(k)) continue;
                total = add(total, adjacent_pair_count(k));
                if (have_prev && has_max(prev) && has_min(k)) total = add(total, 1);
                prev = k;
                have_prev = true;
            }
            return total;
        }
        case OTag::OmegaSum:
        case OTag::OmegaStarSum: {
            TermId inner = n.kids[0];
            if (is_empty(inner)) return 0;
            long long in = adjacent_pair_count(inner);
            if (in == kInfinite || in > 0) return kInfinite;
            // cross-copy pairs exist iff consecutive copies meet
            if (has_max(inner) && has_min(inner)) return kInfinite;
            return 0;
        }
        case OTag::EtaSum: {
            TermId inner = n.kids[0];
            if (is_empty(inner)) return 0;
            long long in = adjacent_pair_count(inner);
            if (in == kInfinite || in > 0) return kInfinite; // eta-many copies
            return 0; // dense index: no cross-copy adjacency
        }
    }
    return 0;
}

bool is_scattered(TermId t) {
    const OrderTermNode& n = term_node(t);
    switch (n.tag) {
        case OTag::Fin:
        case OTag::Omega:
        case OTag::OmegaStar:
        case OTag::Zeta: return true;
        case OTag::Eta: return false;
        case OTag::Sum:
            for (TermId k : n.kids)
                if (!is_scattered(k)) return false;
            return true;
        case OTag::OmegaSum:
        case OTag::OmegaStarSum: return is_scattered(n.kids[0]);
        case OTag::EtaSum: return is_empty(n.kids[0]);
    }
    return true;
}

bool is_dense_without_endpoints(TermId t) {
    return !is_empty(t) && adjacent_pair_count(t) == 0 && !has_min(t) && !has_max(t);
}

// ============================================================================
// Positions
// ============================================================================

std::string Position::str() const { return render_position(*this); }

std::string render_position(const Position& p) {
    std::string out;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (i) out += ".";
        const PosStep& s = p.steps[i];
        switch (s.kind) {
            case PosStep::FinIndex:
            case PosStep::Summand: out += std::to_string(s.index); break;
            case PosStep::OmegaCopy: out += "w:" + std::to_string(s.index); break;
            case PosStep::OmegaStarCopy: out += "w*:" + std::to_string(s.index); break;
            case PosStep::ZetaInt: out += "z:" + std::to_string(s.index); break;
            case PosStep::EtaTag: out += "q:" + s.tag.str(); break;
        }
    }
    return out;
}

namespace {

// Parse one path component against the expected term constructor.
PosStep parse_step(const OrderTermNode& n, const std::string& comp, std::size_t pos) {
    auto as_ll = [&](const std::string& s) -> long long {
        try {
            std::size_t used = 0;
            long long v = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ParseError("bad position component '" + comp + "'", pos);
        }
    };
    auto as_rational = [&](const std::string& s) -> Rational {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(as_ll(s));
        return Rational(as_ll(s.substr(0, slash)), as_ll(s.substr(slash + 1)));
    };
    switch (n.tag) {
        case OTag::Fin: return {PosStep::FinIndex, as_ll(comp), {}};
        case OTag::Sum: return {PosStep::Summand, as_ll(comp), {}};
        case OTag::Omega:
        case OTag::OmegaSum: {
            if (comp.rfind("w:", 0) != 0) throw ParseError("expected w:k for omega position", pos);
            return {PosStep::OmegaCopy, as_ll(comp.substr(2)), {}};
        }
        case OTag::OmegaStar:
        case OTag::OmegaStarSum: {
            if (comp.rfind("w*:", 0) != 0) throw ParseError("expected w*:k for omega* position", pos);
            return {PosStep::OmegaStarCopy, as_ll(comp.substr(3)), {}};
        }
        case OTag::Zeta: {
            if (comp.rfind("z:", 0) != 0) throw ParseError("expected z:k for zeta position", pos);
            return {PosStep::ZetaInt, as_ll(comp.substr(2)), {}};
        }
        case OTag::Eta:
        case OTag::EtaSum: {
            if (comp.rfind("q:", 0) != 0) throw ParseError("expected q:tag for eta position", pos);
            return {PosStep::EtaTag, 0, as_rational(comp.substr(2))};
        }
    }
    throw ParseError("bad position", pos);
}

// Descend one step from term t; returns the inner term (or nullopt if the
// step consumes the whole address, as for Fin/Zeta/Eta atoms).
std::optional<TermId> step_inner(TermId t, const PosStep& s, bool& ok) {
    const OrderTermNode& n = term_node(t);
    ok = false;
    switch (n.tag) {
        case OTag::Fin:
            ok = s.kind == PosStep::FinIndex && s.index >= 0 && s.index < n.fin_n;
            return std::nullopt;
        case OTag::Omega:
            ok = s.kind == PosStep::OmegaCopy && s.index >= 0;
            return std::nullopt;
        case OTag::OmegaStar:
            ok = s.kind == PosStep::OmegaStarCopy && s.index >= 0;
            return std::nullopt;
        case OTag::Zeta:
            ok = s.kind == PosStep::ZetaInt;
            return std::nullopt;
        case OTag::Eta:
            ok = s.kind == PosStep::EtaTag;
            return std::nullopt;
        case OTag::Sum:
            ok = s.kind == PosStep::Summand && s.index >= 0 &&
                 s.index < static_cast<long long>(n.kids.size());
            return ok ? std::optional<TermId>(n.kids[s.index]) : std::nullopt;
        case OTag::OmegaSum:
            ok = s.kind == PosStep::OmegaCopy && s.index >= 0;
            return ok ? std::optional<TermId>(n.kids[0]) : std::nullopt;
        case OTag::OmegaStarSum:
            ok = s.kind == PosStep::OmegaStarCopy && s.index >= 0;
            return ok ? std::optional<TermId>(n.kids[0]) : std::nullopt;
        case OTag::EtaSum:
            ok = s.kind == PosStep::EtaTag;
            return ok ? std::optional<TermId>(n.kids[0]) : std::nullopt;
    }
    return std::nullopt;
}

} // namespace

bool valid_position(TermId t, const Position& p) {
    TermId cur = t;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        bool ok = false;
        auto inner = step_inner(cur, p.steps[i], ok);
        if (!ok) return false;
        bool last = i + 1 == p.steps.size();
        if (inner.has_value()) {
            if (last) return false; // path must continue into the inner term
            cur = *inner;
        } else {
            return last; // atoms terminate the path
        }
    }
    return false; // empty path addresses nothing
}

Position parse_position(TermId t, const std::string& text) {
    Position p;
    TermId cur = t;
    std::size_t i = 0;
    bool done = false;
    while (i <= text.size()) {
        auto dot = text.find('.', i);
        std::string comp = text.substr(i, dot == std::string::npos ? std::string::npos : dot - i);
        if (comp.empty()) throw ParseError("empty position component", i);
        PosStep s = parse_step(term_node(cur), comp, i);
        p.steps.push_back(s);
        bool ok = false;
        auto inner = step_inner(cur, s, ok);
        if (!ok) throw ParseError("position out of range: " + comp, i);
        if (!inner.has_value()) {
            done = true;
            if (dot != std::string::npos) throw ParseError("position continues past a point", dot);
            break;
        }
        if (dot == std::string::npos) throw ParseError("position ends before reaching a point", text.size());
        cur = *inner;
        i = dot + 1;
    }
    if (!done) throw ParseError("bad position", 0);
    return p;
}

namespace {

int cmp_ll(long long a, long long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare_steps(TermId t, const Position& a, const Position& b, std::size_t depth) {
    const PosStep& sa = a.steps[depth];
    const PosStep& sb = b.steps[depth];
    const OrderTermNode& n = term_node(t);
    int outer = 0;
    switch (sa.kind) {
        case PosStep::FinIndex:
        case PosStep::Summand:
        case PosStep::OmegaCopy:
        case PosStep::ZetaInt: outer = cmp_ll(sa.index, sb.index); break;
        case PosStep::OmegaStarCopy: outer = cmp_ll(sb.index, sa.index); break; // counted from top
        case PosStep::EtaTag: outer = sa.tag < sb.tag ? -1 : (sb.tag < sa.tag ? 1 : 0); break;
    }
    if (outer != 0) return outer;
    bool ok = false;
    auto inner = step_inner(t, sa, ok);
    if (!inner.has_value()) return 0;
    return compare_steps(*inner, a, b, depth + 1);
}

} // namespace

int compare_positions(TermId t, const Position& a, const Position& b) {
    if (!valid_position(t, a) || !valid_position(t, b))
        throw DomainError("invalid position for term " + render_term(t));
    return compare_steps(t, a, b, 0);
}

// ============================================================================
// Prefix / suffix / between extraction
// ============================================================================

namespace {

TermId repeat_term(TermId t, long long count) {
    if (count <= 0 || is_empty(t)) return t_fin(0);
    std::vector<TermId> parts;
    for (long long i = 0; i < count; ++i) parts.push_back(t);
    return t_sum(parts);
}

TermId prefix_at(TermId t, const Position& p, std::size_t depth);
TermId suffix_at(TermId t, const Position& p, std::size_t depth);

TermId prefix_at(TermId t, const Position& p, std::size_t depth) {
    const OrderTermNode& n = term_node(t);
    const PosStep& s = p.steps[depth];
    switch (n.tag) {
        case OTag::Fin: return t_fin(static_cast<int>(s.index));
        case OTag::Omega: return t_fin(static_cast<int>(s.index));
        case OTag::OmegaStar: return t_omega_star();
        case OTag::Zeta: return t_omega_star();
        case OTag::Eta: return t_eta();
        case OTag::Sum: {
            std::vector<TermId> parts;
            for (long long i = 0; i < s.index; ++i) parts.push_back(n.kids[i]);
            parts.push_back(prefix_at(n.kids[s.index], p, depth + 1));
            return t_sum(parts);
        }
        case OTag::OmegaSum:
            return t_sum({repeat_term(n.kids[0], s.index), prefix_at(n.kids[0], p, depth + 1)});
        case OTag::OmegaStarSum:
            return t_sum({t_omega_star_sum(n.kids[0]), prefix_at(n.kids[0], p, depth + 1)});
        case OTag::EtaSum:
            return t_sum({t_eta_sum(n.kids[0]), prefix_at(n.kids[0], p, depth + 1)});
    }
    return t_fin(0);
}

TermId suffix_at(TermId t, const Position& p, std::size_t depth) {
    const OrderTermNode& n = term_node(t);
    const PosStep& s = p.steps[depth];
    switch (n.tag) {
        case OTag::Fin: return t_fin(static_cast<int>(n.fin_n - 1 - s.index));
        case OTag::Omega: return t_omega();
        case OTag::OmegaStar: return t_fin(static_cast<int>(s.index));
        case OTag::Zeta: return t_omega();
        case OTag::Eta: return t_eta();
        case OTag::Sum: {
            std::vector<TermId> parts;
            parts.push_back(suffix_at(n.kids[s.index], p, depth + 1));
            for (std::size_t i = s.index + 1; i < n.kids.size(); ++i) parts.push_back(n.kids[i]);
            return t_sum(parts);
        }
        case OTag::OmegaSum:
            return t_sum({suffix_at(n.kids[0], p, depth + 1), t_omega_sum(n.kids[0])});
        case OTag::OmegaStarSum:
            return t_sum({suffix_at(n.kids[0], p, depth + 1), repeat_term(n.kids[0], s.index)});
        case OTag::EtaSum:
            return t_sum({suffix_at(n.kids[0], p, depth + 1), t_eta_sum(n.kids[0])});
    }
    return t_fin(0);
}

TermId between_at(TermId t, const Position& a, const Position& b, std::size_t depth) {
    const OrderTermNode& n = term_node(t);
    const PosStep& sa = a.steps[depth];
    const PosStep& sb = b.steps[depth];
    switch (n.tag) {
        case OTag::Fin: return t_fin(static_cast<int>(sb.index - sa.index - 1));
        case OTag::Omega: return t_fin(static_cast<int>(sb.index - sa.index - 1));
        case OTag::OmegaStar: return t_fin(static_cast<int>(sa.index - sb.index - 1));
        case OTag::Zeta: return t_fin(static_cast<int>(sb.index - sa.index - 1));
        case OTag::Eta: return t_eta();
        case OTag::Sum: {
            if (sa.index == sb.index) return between_at(n.kids[sa.index], a, b, depth + 1);
            std::vector<TermId> parts;
            parts.push_back(suffix_at(n.kids[sa.index], a, depth + 1));
            for (long long i = sa.index + 1; i < sb.index; ++i) parts.push_back(n.kids[i]);
            parts.push_back(prefix_at(n.kids[sb.index], b, depth + 1));
            return t_sum(parts);
        }
        case OTag::OmegaSum: {
            if (sa.index == sb.index) return between_at(n.kids[0], a, b, depth + 1);
            return t_sum({suffix_at(n.kids[0], a, depth + 1),
                          repeat_term(n.kids[0], sb.index - sa.index - 1),
                          prefix_at(n.kids[0], b, depth + 1)});
        }
        case OTag::OmegaStarSum: {
            if (sa.index == sb.index) return between_at(n.kids[0], a, b, depth + 1);
            // copy indices count from the top, so a's index exceeds b's
            return t_sum({suffix_at(n.kids[0], a, depth + 1),
                          repeat_term(n.kids[0], sa.index - sb.index - 1),
                          prefix_at(n.kids[0], b, depth + 1)});
        }
        case OTag::EtaSum: {
            if (sa.kind == PosStep::EtaTag && sa.tag == sb.tag)
                return between_at(n.kids[0], a, b, depth + 1);
            return t_sum({suffix_at(n.kids[0], a, depth + 1), t_eta_sum(n.kids[0]),
                          prefix_at(n.kids[0], b, depth + 1)});
        }
    }
    return t_fin(0);
}

} // namespace

TermId prefix_term(TermId t, const Position& p) {
    if (!valid_position(t, p)) throw DomainError("invalid position");
    return prefix_at(t, p, 0);
}

TermId suffix_term(TermId t, const Position& p) {
    if (!valid_position(t, p)) throw DomainError("invalid position");
    return suffix_at(t, p, 0);
}

TermId between_term(TermId t, const Position& a, const Position& b) {
    if (compare_positions(t, a, b) >= 0) throw DomainError("between_term requires a < b");
    return between_at(t, a, b, 0);
}

// ============================================================================
// Position enumeration
// ============================================================================

namespace {

void push_prefixed(std::vector<Position>& out, const PosStep& head, const std::vector<Position>& inner) {
    for (const Position& q : inner) {
        Position p;
        p.steps.push_back(head);
        for (const PosStep& s : q.steps) p.steps.push_back(s);
        out.push_back(p);
    }
}

std::vector<Position> sample_impl(TermId t, int k, bool finite_only) {
    const OrderTermNode& n = term_node(t);
    std::vector<Position> out;
    switch (n.tag) {
        case OTag::Fin:
            for (int i = 0; i < n.fin_n; ++i) out.push_back({{{PosStep::FinIndex, i, {}}}});
            break;
        case OTag::Omega:
            for (int i = 0; i <= k; ++i) out.push_back({{{PosStep::OmegaCopy, i, {}}}});
            break;
        case OTag::OmegaStar:
            for (int i = k; i >= 0; --i) out.push_back({{{PosStep::OmegaStarCopy, i, {}}}});
            break;
        case OTag::Zeta:
            for (int i = -k; i <= k; ++i) out.push_back({{{PosStep::ZetaInt, i, {}}}});
            break;
        case OTag::Eta:
            for (int i = -k; i <= k; ++i) out.push_back({{{PosStep::EtaTag, 0, Rational(i)}}});
            break;
        case OTag::Sum:
            for (std::size_t s = 0; s < n.kids.size(); ++s)
                push_prefixed(out, {PosStep::Summand, static_cast<long long>(s), {}},
                              sample_impl(n.kids[s], k, finite_only));
            break;
        case OTag::OmegaSum: {
            auto inner = sample_impl(n.kids[0], k, finite_only);
            int copies = is_empty(n.kids[0]) ? 0 : k;
            for (int c = 0; c <= copies; ++c)
                push_prefixed(out, {PosStep::OmegaCopy, c, {}}, inner);
            break;
        }
        case OTag::OmegaStarSum: {
            auto inner = sample_impl(n.kids[0], k, finite_only);
            int copies = is_empty(n.kids[0]) ? 0 : k;
            for (int c = copies; c >= 0; --c)
                push_prefixed(out, {PosStep::OmegaStarCopy, c, {}}, inner);
            break;
        }
        case OTag::EtaSum: {
            auto inner = sample_impl(n.kids[0], k, finite_only);
            if (!is_empty(n.kids[0]))
                for (int c = -k; c <= k; ++c)
                    push_prefixed(out, {PosStep::EtaTag, 0, Rational(c)}, inner);
            break;
        }
    }
    return out;
}

} // namespace

std::vector<Position> all_positions(TermId t) {
    if (!is_finite(t)) throw DomainError("all_positions requires a finite term");
    return sample_impl(t, 0, true);
}

std::vector<Position> sample_positions(TermId t, int k) { return sample_impl(t, k, false); }

// ============================================================================
// Ordered partitions
// ============================================================================

int OrderedPartition::arity() const {
    int n = 0;
    for (const auto& b : blocks) n += static_cast<int>(b.size());
    return n;
}

std::string OrderedPartition::str() const {
    std::string s;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) s += " < ";
        s += "{";
        for (std::size_t j = 0; j < blocks[i].size(); ++j) {
            if (j) s += ",";
            s += std::to_string(blocks[i][j]);
        }
        s += "}";
    }
    return s.empty() ? "{}" : s;
}

std::vector<OrderedPartition> ordered_partitions(int n) {
    if (n < 0) throw DomainError("ordered_partitions requires n >= 0");
    std::vector<OrderedPartition> out;
    if (n == 0) {
        out.push_back(OrderedPartition{});
        return out;
    }
    // enumerate block-index vectors f : {0..n-1} -> {0..n-1}, surjective onto
    // an initial segment, in lexicographic order
    std::vector<int> f(n, 0);
    while (true) {
        int maxv = *std::max_element(f.begin(), f.end());
        std::vector<bool> hit(maxv + 1, false);
        for (int v : f) hit[v] = true;
        if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
            OrderedPartition p;
            p.blocks.assign(maxv + 1, {});
            for (int i = 0; i < n; ++i) p.blocks[f[i]].push_back(i);
            out.push_back(std::move(p));
        }
        int i = n - 1;
        while (i >= 0 && f[i] == n - 1) f[i--] = 0;
        if (i < 0) break;
        ++f[i];
    }
    return out;
}

bool coarsens(const OrderedPartition& p, const OrderedPartition& q) {
    if (p.arity() != q.arity()) throw DomainError("coarsens: mismatched index sets");
    // q must partition p's blocks into consecutive runs, in order
    std::size_t pi = 0;
    for (const auto& qb : q.blocks) {
        std::vector<int> merged;
        while (merged.size() < qb.size()) {
            if (pi >= p.blocks.size()) return false;
            for (int v : p.blocks[pi]) merged.push_back(v);
            ++pi;
        }
        std::sort(merged.begin(), merged.end());
        if (merged != qb) return false;
    }
    return pi == p.blocks.size();
}

OrderedPartition realized_partition(TermId w, const std::vector<Position>& tuple) {
    for (const auto& p : tuple)
        if (!valid_position(w, p)) throw DomainError("invalid position in tuple");
    int n = static_cast<int>(tuple.size());
    // sort indices by position, group equals
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return compare_positions(w, tuple[a], tuple[b]) < 0;
    });
    OrderedPartition out;
    for (int i = 0; i < n;) {
        std::vector<int> block{idx[i]};
        int j = i + 1;
        while (j < n && compare_positions(w, tuple[idx[i]], tuple[idx[j]]) == 0) block.push_back(idx[j++]);
        std::sort(block.begin(), block.end());
        out.blocks.push_back(std::move(block));
        i = j;
    }
    return out;
}

std::vector<long long> interval_vector(TermId w, const std::vector<Position>& tuple) {
    for (std::size_t i = 0; i + 1 < tuple.size(); ++i)
        if (compare_positions(w, tuple[i], tuple[i + 1]) >= 0)
            throw DomainError("interval_vector requires a strictly increasing tuple");
    std::vector<long long> v;
    if (tuple.empty()) {
        v.push_back(term_size(w));
        return v;
    }
    v.push_back(term_size(prefix_term(w, tuple.front())));
    for (std::size_t i = 0; i + 1 < tuple.size(); ++i)
        v.push_back(term_size(between_term(w, tuple[i], tuple[i + 1])));
    v.push_back(term_size(suffix_term(w, tuple.back())));
    return v;
}

std::vector<ConvexQuotient> convex_quotients(TermId w) {
    long long sz = term_size(w);
    if (sz == kInfinite) throw DomainError("convex_quotients requires a finite term");
    if (sz == 0) throw DomainError("convex_quotients requires a nonempty term");
    int n = static_cast<int>(sz);
    std::vector<ConvexQuotient> out;
    // compositions of n via subsets of the n-1 internal cut points
    for (unsigned long cuts = 0; cuts < (1UL << (n - 1)); ++cuts) {
        ConvexQuotient q;
        q.map.resize(n);
        int block = 0, len = 0;
        std::vector<int> sizes;
        for (int i = 0; i < n; ++i) {
            q.map[i] = block;
            ++len;
            bool cut_here = i < n - 1 && (cuts & (1UL << i));
            if (cut_here) {
                sizes.push_back(len);
                len = 0;
                ++block;
            }
        }
        sizes.push_back(len);
        q.block_sizes = std::move(sizes);
        q.quotient = t_fin(block + 1);
        out.push_back(std::move(q));
    }
    // deterministic: coarsest (fewest blocks) first, identity last? keep cut-mask
    // order but put identity (all cuts) in a stable place by sorting on blocks
    std::stable_sort(out.begin(), out.end(), [](const ConvexQuotient& a, const ConvexQuotient& b) {
        return a.block_sizes.size() < b.block_sizes.size();
    });
    return out;
}

} // namespace lomodal
