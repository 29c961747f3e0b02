#include "lomodal/formula.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

namespace lomodal {

// ============================================================================
// Interning pool
// ============================================================================

namespace {

struct NodeKey {
    FTag tag;
    std::string a, b; // encoded terms or var
    bool ap = false, bp = false;
    std::vector<FormulaId> kids;

    bool operator==(const NodeKey& o) const {
        return tag == o.tag && a == o.a && b == o.b && ap == o.ap && bp == o.bp && kids == o.kids;
    }
};

struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const {
        std::size_t h = static_cast<std::size_t>(k.tag);
        auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        mix(std::hash<std::string>{}(k.a));
        mix(std::hash<std::string>{}(k.b));
        mix(k.ap ? 3 : 7);
        mix(k.bp ? 11 : 13);
        for (auto kid : k.kids) mix(kid);
        return h;
    }
};

struct Pool {
    std::vector<FormulaNode> nodes;
    std::unordered_map<NodeKey, FormulaId, NodeKeyHash> index;
    std::mutex mtx;

    FormulaId intern(FormulaNode n) {
        NodeKey key{n.tag, {}, {}, false, false, n.kids};
        if (n.tag == FTag::Leq || n.tag == FTag::Eq) {
            key.a = n.lhs.name; key.ap = n.lhs.param;
            key.b = n.rhs.name; key.bp = n.rhs.param;
        } else if (n.tag == FTag::Exists || n.tag == FTag::Forall) {
            key.a = n.var;
        }
        std::lock_guard<std::mutex> lock(mtx);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        FormulaId id = static_cast<FormulaId>(nodes.size());
        nodes.push_back(std::move(n));
        index.emplace(std::move(key), id);
        return id;
    }
};

Pool& pool() {
    static Pool p;
    return p;
}

} // namespace

const FormulaNode& node(FormulaId f) { return pool().nodes[f]; }

FormulaId f_true() { return pool().intern({FTag::True, {}, {}, {}, {}}); }
FormulaId f_false() { return pool().intern({FTag::False, {}, {}, {}, {}}); }
FormulaId f_leq(const Term& a, const Term& b) { return pool().intern({FTag::Leq, a, b, {}, {}}); }
FormulaId f_eq(const Term& a, const Term& b) { return pool().intern({FTag::Eq, a, b, {}, {}}); }
FormulaId f_lt(const Term& a, const Term& b) { return f_and(f_leq(a, b), f_not(f_eq(a, b))); }
FormulaId f_not(FormulaId a) { return pool().intern({FTag::Not, {}, {}, {}, {a}}); }
FormulaId f_and(FormulaId a, FormulaId b) { return pool().intern({FTag::And, {}, {}, {}, {a, b}}); }
FormulaId f_or(FormulaId a, FormulaId b) { return pool().intern({FTag::Or, {}, {}, {}, {a, b}}); }
FormulaId f_implies(FormulaId a, FormulaId b) { return pool().intern({FTag::Implies, {}, {}, {}, {a, b}}); }
FormulaId f_iff(FormulaId a, FormulaId b) { return pool().intern({FTag::Iff, {}, {}, {}, {a, b}}); }
FormulaId f_exists(const std::string& v, FormulaId body) { return pool().intern({FTag::Exists, {}, {}, v, {body}}); }
FormulaId f_forall(const std::string& v, FormulaId body) { return pool().intern({FTag::Forall, {}, {}, v, {body}}); }
FormulaId f_dia(FormulaId a) { return pool().intern({FTag::Dia, {}, {}, {}, {a}}); }
FormulaId f_box(FormulaId a) { return pool().intern({FTag::Box, {}, {}, {}, {a}}); }

FormulaId f_and_all(const std::vector<FormulaId>& fs) {
    if (fs.empty()) return f_true();
    FormulaId acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = f_and(acc, fs[i]);
    return acc;
}

FormulaId f_or_all(const std::vector<FormulaId>& fs) {
    if (fs.empty()) return f_false();
    FormulaId acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = f_or(acc, fs[i]);
    return acc;
}

// ============================================================================
// Parser
// ============================================================================

namespace {

struct Token {
    enum Kind { Ident, Param, Leq, Lt, Eq, Tilde, Amp, Pipe, Arrow, DArrow, LParen, RParen, Dot, End } kind;
    std::string text;
    std::size_t pos;
};

struct Lexer {
    const std::string& src;
    std::size_t i = 0;

    explicit Lexer(const std::string& s) : src(s) {}

    Token next() {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
        std::size_t start = i;
        if (i >= src.size()) return {Token::End, "", start};
        char c = src[i];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            Token t{Token::Ident, src.substr(i, j - i), start};
            i = j;
            return t;
        }
        if (c == '@') {
            std::size_t j = i + 1;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            if (j == i + 1) throw ParseError("expected name after '@'", start);
            Token t{Token::Param, src.substr(i + 1, j - i - 1), start};
            i = j;
            return t;
        }
        auto two = src.substr(i, 2);
        auto three = src.substr(i, 3);
        if (three == "<->") { i += 3; return {Token::DArrow, "<->", start}; }
        if (two == "<=") { i += 2; return {Token::Leq, "<=", start}; }
        if (two == "->") { i += 2; return {Token::Arrow, "->", start}; }
        switch (c) {
            case '<': ++i; return {Token::Lt, "<", start};
            case '=': ++i; return {Token::Eq, "=", start};
            case '~': ++i; return {Token::Tilde, "~", start};
            case '&': ++i; return {Token::Amp, "&", start};
            case '|': ++i; return {Token::Pipe, "|", start};
            case '(': ++i; return {Token::LParen, "(", start};
            case ')': ++i; return {Token::RParen, ")", start};
            case '.': ++i; return {Token::Dot, ".", start};
            default: throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
    }
};

bool is_keyword(const std::string& s) {
    return s == "dia" || s == "box" || s == "exists" || s == "forall" || s == "true" || s == "false";
}

struct Parser {
    Lexer lex;
    Token cur;
    std::set<std::string> bound; // variables bound in the current scope

    explicit Parser(const std::string& s) : lex(s) { cur = lex.next(); }

    void advance() { cur = lex.next(); }

    bool accept(Token::Kind k) {
        if (cur.kind == k) { advance(); return true; }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, cur.pos); }

    FormulaId formula() {
        FormulaId lhs = imp();
        if (cur.kind == Token::DArrow) {
            advance();
            return f_iff(lhs, formula()); // right associative
        }
        return lhs;
    }

    FormulaId imp() {
        FormulaId lhs = disj();
        if (cur.kind == Token::Arrow) {
            advance();
            return f_implies(lhs, imp()); // right associative
        }
        return lhs;
    }

    FormulaId disj() {
        FormulaId acc = conj();
        while (cur.kind == Token::Pipe) {
            advance();
            acc = f_or(acc, conj());
        }
        return acc;
    }

    FormulaId conj() {
        FormulaId acc = unary();
        while (cur.kind == Token::Amp) {
            advance();
            acc = f_and(acc, unary());
        }
        return acc;
    }

    FormulaId unary() {
        if (accept(Token::Tilde)) return f_not(unary());
        if (cur.kind == Token::Ident && cur.text == "dia") { advance(); return f_dia(unary()); }
        if (cur.kind == Token::Ident && cur.text == "box") { advance(); return f_box(unary()); }
        if (cur.kind == Token::Ident && (cur.text == "exists" || cur.text == "forall")) {
            bool ex = cur.text == "exists";
            advance();
            if (cur.kind != Token::Ident || is_keyword(cur.text)) fail("expected variable after quantifier");
            std::string v = cur.text;
            if (bound.count(v)) fail("variable '" + v + "' rebound inside its own scope");
            advance();
            if (!accept(Token::Dot)) fail("expected '.' after quantified variable");
            bound.insert(v);
            FormulaId body = unary();
            bound.erase(v);
            return ex ? f_exists(v, body) : f_forall(v, body);
        }
        return atom();
    }

    Term term() {
        if (cur.kind == Token::Param) {
            Term t{true, cur.text};
            advance();
            return t;
        }
        if (cur.kind == Token::Ident && !is_keyword(cur.text)) {
            Term t{false, cur.text};
            advance();
            return t;
        }
        fail("expected term");
    }

    FormulaId atom() {
        if (accept(Token::LParen)) {
            FormulaId f = formula();
            if (!accept(Token::RParen)) fail("expected ')'");
            return f;
        }
        if (cur.kind == Token::Ident && cur.text == "true") { advance(); return f_true(); }
        if (cur.kind == Token::Ident && cur.text == "false") { advance(); return f_false(); }
        Term a = term();
        if (accept(Token::Leq)) return f_leq(a, term());
        if (accept(Token::Lt)) return f_lt(a, term());
        if (accept(Token::Eq)) return f_eq(a, term());
        fail("expected '<=', '<' or '=' after term");
    }
};

} // namespace

FormulaId parse_formula(const std::string& text) {
    Parser p(text);
    FormulaId f = p.formula();
    if (p.cur.kind != Token::End) throw ParseError("trailing input", p.cur.pos);
    return f;
}

// ============================================================================
// Printer
// ============================================================================

namespace {

// precedence levels: 1 iff, 2 imp, 3 or, 4 and, 5 unary, 6 atom
int level(FTag t) {
    switch (t) {
        case FTag::Iff: return 1;
        case FTag::Implies: return 2;
        case FTag::Or: return 3;
        case FTag::And: return 4;
        case FTag::Not:
        case FTag::Dia:
        case FTag::Box:
        case FTag::Exists:
        case FTag::Forall: return 5;
        default: return 6;
    }
}

void print(FormulaId f, int min_level, std::ostringstream& out) {
    const FormulaNode& n = node(f);
    int lv = level(n.tag);
    bool parens = lv < min_level;
    if (parens) out << "(";
    switch (n.tag) {
        case FTag::True: out << "true"; break;
        case FTag::False: out << "false"; break;
        case FTag::Leq: out << n.lhs.str() << " <= " << n.rhs.str(); break;
        case FTag::Eq: out << n.lhs.str() << " = " << n.rhs.str(); break;
        case FTag::Not:
            out << "~";
            print(n.kids[0], 6, out); // argument must be unary-or-tighter; ~~f needs no parens
            break;
        case FTag::Dia:
            out << "dia ";
            print(n.kids[0], 5, out);
            break;
        case FTag::Box:
            out << "box ";
            print(n.kids[0], 5, out);
            break;
        case FTag::Exists:
        case FTag::Forall:
            out << (n.tag == FTag::Exists ? "exists " : "forall ") << n.var << ". ";
            print(n.kids[0], 5, out);
            break;
        case FTag::And:
            print(n.kids[0], 4, out);
            out << " & ";
            print(n.kids[1], 5, out);
            break;
        case FTag::Or:
            print(n.kids[0], 3, out);
            out << " | ";
            print(n.kids[1], 4, out);
            break;
        case FTag::Implies:
            print(n.kids[0], 3, out);
            out << " -> ";
            print(n.kids[1], 2, out);
            break;
        case FTag::Iff:
            print(n.kids[0], 2, out);
            out << " <-> ";
            print(n.kids[1], 1, out);
            break;
    }
    if (parens) out << ")";
}

} // namespace

std::string render(FormulaId f) {
    std::ostringstream out;
    // ~ binds its argument at atom level in the grammar (unary := "~" unary
    // allows nested unaries though), so print unary arguments at level 5.
    print(f, 0, out);
    return out.str();
}

// ============================================================================
// Analysis
// ============================================================================

int quantifier_rank(FormulaId f) {
    const FormulaNode& n = node(f);
    switch (n.tag) {
        case FTag::True:
        case FTag::False:
        case FTag::Leq:
        case FTag::Eq: return 0;
        case FTag::Exists:
        case FTag::Forall: return 1 + quantifier_rank(n.kids[0]);
        default: {
            int r = 0;
            for (auto k : n.kids) r = std::max(r, quantifier_rank(k));
            return r;
        }
    }
}

namespace {

void collect_free(FormulaId f, std::set<std::string>& boundvars, std::vector<Term>& out,
                  std::set<std::pair<bool, std::string>>& seen) {
    const FormulaNode& n = node(f);
    auto visit_term = [&](const Term& t) {
        if (!t.param && boundvars.count(t.name)) return;
        auto key = std::make_pair(t.param, t.name);
        if (seen.insert(key).second) out.push_back(t);
    };
    switch (n.tag) {
        case FTag::Leq:
        case FTag::Eq:
            visit_term(n.lhs);
            visit_term(n.rhs);
            break;
        case FTag::Exists:
        case FTag::Forall: {
            bool added = boundvars.insert(n.var).second;
            collect_free(n.kids[0], boundvars, out, seen);
            if (added) boundvars.erase(n.var);
            break;
        }
        default:
            for (auto k : n.kids) collect_free(k, boundvars, out, seen);
            break;
    }
}

} // namespace

std::vector<Term> free_terms(FormulaId f) {
    std::set<std::string> bound;
    std::vector<Term> out;
    std::set<std::pair<bool, std::string>> seen;
    collect_free(f, bound, out, seen);
    return out;
}

bool has_modality(FormulaId f) {
    const FormulaNode& n = node(f);
    if (n.tag == FTag::Dia || n.tag == FTag::Box) return true;
    for (auto k : n.kids)
        if (has_modality(k)) return true;
    return false;
}

// substitute_term and simplify live in named.cpp, next to the counting
// registry they must preserve.

// ============================================================================
// Config
// ============================================================================

namespace {

void apply_kv(Config& c, const std::string& key, const std::string& value) {
    auto as_int = [&]() { return std::stoi(value); };
    auto as_long = [&]() { return std::stol(value); };
    if (key == "rank_cap") c.rank_cap = as_int();
    else if (key == "catalog_fin_max") c.catalog_fin_max = as_int();
    else if (key == "catalog_eta_fin_max") c.catalog_eta_fin_max = as_int();
    else if (key == "catalog_max_blocks") c.catalog_max_blocks = as_int();
    else if (key == "sat_budget") c.sat_budget = as_long();
    else if (key == "frame_worlds_max") c.frame_worlds_max = as_int();
    else if (key == "frame_vars_max") c.frame_vars_max = as_int();
    else if (key == "frame_valuation_bits_max") c.frame_valuation_bits_max = as_int();
    else throw DomainError("unknown config key: " + key);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    std::size_t b = s.find_last_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

} // namespace

Config Config::load(const std::string& path) {
    Config c;
    FILE* fp = std::fopen(path.c_str(), "r");
    if (!fp) throw DomainError("cannot open config file: " + path);
    char buf[512];
    while (std::fgets(buf, sizeof buf, fp)) {
        std::string line = trim(buf);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::fclose(fp);
            throw DomainError("malformed config line: " + line);
        }
        apply_kv(c, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    std::fclose(fp);
    return from_environment(c);
}

Config Config::from_environment(Config c) {
    static const char* keys[] = {"rank_cap", "catalog_fin_max", "catalog_eta_fin_max",
                                 "catalog_max_blocks", "sat_budget", "frame_worlds_max",
                                 "frame_vars_max", "frame_valuation_bits_max"};
    for (const char* k : keys) {
        std::string env = "LOMODAL_";
        for (const char* p = k; *p; ++p) env += static_cast<char>(std::toupper(*p));
        if (const char* v = std::getenv(env.c_str())) apply_kv(c, k, v);
    }
    return c;
}

} // namespace lomodal
