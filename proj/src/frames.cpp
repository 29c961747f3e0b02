#include "lomodal/frames.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace lomodal {

// ============================================================================
// Propositional formulas
// ============================================================================

namespace {

struct PropPool {
    std::vector<PropNode> nodes;
    std::map<std::tuple<int, int, std::vector<PropId>>, PropId> index;
    std::mutex mtx;

    PropId intern(PropNode n) {
        auto key = std::make_tuple(static_cast<int>(n.tag), n.var, n.kids);
        std::lock_guard<std::mutex> lock(mtx);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        PropId id = static_cast<PropId>(nodes.size());
        nodes.push_back(std::move(n));
        index.emplace(std::move(key), id);
        return id;
    }
};

PropPool& ppool() {
    static PropPool p;
    return p;
}

} // namespace

const PropNode& prop_node(PropId f) { return ppool().nodes[f]; }
PropId p_var(int i) { return ppool().intern({PTag::Var, i, {}}); }
PropId p_true() { return ppool().intern({PTag::True, -1, {}}); }
PropId p_false() { return ppool().intern({PTag::False, -1, {}}); }
PropId p_not(PropId a) { return ppool().intern({PTag::Not, -1, {a}}); }
PropId p_and(PropId a, PropId b) { return ppool().intern({PTag::And, -1, {a, b}}); }
PropId p_or(PropId a, PropId b) { return ppool().intern({PTag::Or, -1, {a, b}}); }
PropId p_implies(PropId a, PropId b) { return ppool().intern({PTag::Implies, -1, {a, b}}); }
PropId p_iff(PropId a, PropId b) { return ppool().intern({PTag::Iff, -1, {a, b}}); }
PropId p_dia(PropId a) { return ppool().intern({PTag::Dia, -1, {a}}); }
PropId p_box(PropId a) { return ppool().intern({PTag::Box, -1, {a}}); }

PropId p_and_all(const std::vector<PropId>& fs) {
    if (fs.empty()) return p_true();
    PropId acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = p_and(acc, fs[i]);
    return acc;
}

PropId p_or_all(const std::vector<PropId>& fs) {
    if (fs.empty()) return p_false();
    PropId acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = p_or(acc, fs[i]);
    return acc;
}

int prop_var_count(PropId f) {
    const PropNode& n = prop_node(f);
    if (n.tag == PTag::Var) return n.var + 1;
    int m = 0;
    for (auto k : n.kids) m = std::max(m, prop_var_count(k));
    return m;
}

namespace {

int prop_level(PTag t) {
    switch (t) {
        case PTag::Iff: return 1;
        case PTag::Implies: return 2;
        case PTag::Or: return 3;
        case PTag::And: return 4;
        case PTag::Not:
        case PTag::Dia:
        case PTag::Box: return 5;
        default: return 6;
    }
}

void print_prop(PropId f, int min_level, std::ostringstream& out) {
    const PropNode& n = prop_node(f);
    int lv = prop_level(n.tag);
    bool parens = lv < min_level;
    if (parens) out << "(";
    switch (n.tag) {
        case PTag::Var: out << "p" << n.var; break;
        case PTag::True: out << "true"; break;
        case PTag::False: out << "false"; break;
        case PTag::Not:
            out << "~";
            print_prop(n.kids[0], 6, out);
            break;
        case PTag::Dia:
            out << "dia ";
            print_prop(n.kids[0], 5, out);
            break;
        case PTag::Box:
            out << "box ";
            print_prop(n.kids[0], 5, out);
            break;
        case PTag::And:
            print_prop(n.kids[0], 4, out);
            out << " & ";
            print_prop(n.kids[1], 5, out);
            break;
        case PTag::Or:
            print_prop(n.kids[0], 3, out);
            out << " | ";
            print_prop(n.kids[1], 4, out);
            break;
        case PTag::Implies:
            print_prop(n.kids[0], 3, out);
            out << " -> ";
            print_prop(n.kids[1], 2, out);
            break;
        case PTag::Iff:
            print_prop(n.kids[0], 2, out);
            out << " <-> ";
            print_prop(n.kids[1], 1, out);
            break;
    }
    if (parens) out << ")";
}

struct PropParser {
    const std::string& src;
    std::size_t i = 0;
    std::vector<std::string>* names;

    void skip() {
        while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    }

    bool word(const char* w) {
        skip();
        std::size_t n = std::strlen(w);
        if (src.compare(i, n, w) == 0 &&
            (i + n >= src.size() || !std::isalnum(static_cast<unsigned char>(src[i + n])))) {
            i += n;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& m) { throw ParseError(m, i); }

    PropId formula() {
        PropId a = imp();
        skip();
        if (src.compare(i, 3, "<->") == 0) {
            i += 3;
            return p_iff(a, formula());
        }
        return a;
    }

    PropId imp() {
        PropId a = disj();
        skip();
        if (src.compare(i, 2, "->") == 0) {
            i += 2;
            return p_implies(a, imp());
        }
        return a;
    }

    PropId disj() {
        PropId a = conj();
        skip();
        while (i < src.size() && src[i] == '|') {
            ++i;
            a = p_or(a, conj());
            skip();
        }
        return a;
    }

    PropId conj() {
        PropId a = unary();
        skip();
        while (i < src.size() && src[i] == '&') {
            ++i;
            a = p_and(a, unary());
            skip();
        }
        return a;
    }

    PropId unary() {
        skip();
        if (i < src.size() && src[i] == '~') {
            ++i;
            return p_not(unary());
        }
        if (word("dia")) return p_dia(unary());
        if (word("box")) return p_box(unary());
        return atom();
    }

    PropId atom() {
        skip();
        if (i < src.size() && src[i] == '(') {
            ++i;
            PropId a = formula();
            skip();
            if (i >= src.size() || src[i] != ')') fail("expected ')'");
            ++i;
            return a;
        }
        if (word("true")) return p_true();
        if (word("false")) return p_false();
        std::size_t start = i;
        while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
        if (i == start) fail("expected propositional variable");
        std::string name = src.substr(start, i - start);
        if (!names) {
            // default scheme: p0, p1, ...; also accept p/q as p0/p1
            if (name.size() > 1 && name[0] == 'p' &&
                std::all_of(name.begin() + 1, name.end(),
                            [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
                return p_var(std::stoi(name.substr(1)));
            if (name == "p") return p_var(0);
            if (name == "q") return p_var(1);
            fail("variables must be named p0, p1, ... (or p/q)");
        }
        auto it = std::find(names->begin(), names->end(), name);
        if (it == names->end()) {
            names->push_back(name);
            return p_var(static_cast<int>(names->size()) - 1);
        }
        return p_var(static_cast<int>(it - names->begin()));
    }
};

} // namespace

std::string render_prop(PropId f) {
    std::ostringstream out;
    print_prop(f, 0, out);
    return out.str();
}

PropId parse_prop(const std::string& text, std::vector<std::string>* var_names) {
    PropParser p{text, 0, var_names};
    PropId f = p.formula();
    p.skip();
    if (p.i != text.size()) throw ParseError("trailing input", p.i);
    return f;
}

// ============================================================================
// Frames
// ============================================================================

Frame make_frame(int n, const std::vector<std::uint32_t>& reach, std::optional<int> root) {
    if (n < 0 || n > 31) throw DomainError("frame size out of range");
    if (static_cast<int>(reach.size()) != n) throw DomainError("reachability matrix size mismatch");
    Frame f{n, reach, root};
    for (int i = 0; i < n; ++i) {
        if (!f.le(i, i)) throw DomainError("frame not reflexive at " + std::to_string(i));
        for (int j = 0; j < n; ++j)
            if (f.le(i, j) && (f.reach[j] & ~f.reach[i]))
                throw DomainError("frame not transitive at " + std::to_string(i) + "," +
                                  std::to_string(j));
    }
    if (root && (*root < 0 || *root >= n)) throw DomainError("root out of range");
    return f;
}

Frame parse_frame(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    in >> word;
    if (word != "worlds") throw DomainError("frame file must start with 'worlds'");
    int n;
    in >> n;
    in >> word;
    if (word != "root") throw DomainError("expected 'root'");
    std::string r;
    in >> r;
    std::optional<int> root;
    if (r != "-") root = std::stoi(r);
    std::vector<std::uint32_t> reach(n, 0);
    for (int i = 0; i < n; ++i) {
        std::string row;
        in >> row;
        if (static_cast<int>(row.size()) != n) throw DomainError("bad matrix row");
        for (int j = 0; j < n; ++j)
            if (row[j] == '1') reach[i] |= 1u << j;
    }
    return make_frame(n, reach, root);
}

std::string render_frame(const Frame& f) {
    std::ostringstream out;
    out << "worlds " << f.n << " root " << (f.root ? std::to_string(*f.root) : "-") << "\n";
    for (int i = 0; i < f.n; ++i) {
        for (int j = 0; j < f.n; ++j) out << (f.le(i, j) ? '1' : '0');
        out << "\n";
    }
    return out.str();
}

Frame canonical_frame(char kind, int n, int m) {
    if (n < 1 || m < 1) throw DomainError("canonical frames require n, m >= 1");
    switch (kind) {
        case 'F':
        case 'E': {
            int base = (1 << n) * m;
            int total = kind == 'E' ? base + 1 : base;
            if (total > 31) throw DomainError("canonical frame too large");
            std::vector<std::uint32_t> reach(total, 0);
            for (int s = 0; s < (1 << n); ++s)
                for (int i = 0; i < m; ++i) {
                    int w = s * m + i;
                    for (int t = 0; t < (1 << n); ++t)
                        if ((s & ~t) == 0)
                            for (int j = 0; j < m; ++j) reach[w] |= 1u << (t * m + j);
                    if (kind == 'E') reach[w] |= 1u << base;
                }
            if (kind == 'E') reach[base] = 1u << base;
            return make_frame(total, reach, 0);
        }
        case 'C': {
            int total = n + m;
            if (total > 31) throw DomainError("canonical frame too large");
            std::vector<std::uint32_t> reach(total, 0);
            for (int i = 0; i < n; ++i)
                for (int j = i; j < total; ++j) reach[i] |= 1u << j;
            for (int i = n; i < total; ++i)
                for (int j = n; j < total; ++j) reach[i] |= 1u << j;
            return make_frame(total, reach, 0);
        }
        default: throw DomainError("canonical frame kind must be F, E or C");
    }
}

// ============================================================================
// Structure theory
// ============================================================================

ClusterQuotient cluster_quotient(const Frame& f) {
    ClusterQuotient q;
    q.cluster_of.assign(f.n, -1);
    for (int i = 0; i < f.n; ++i) {
        if (q.cluster_of[i] >= 0) continue;
        int c = q.num_clusters++;
        q.clusters.push_back({});
        for (int j = 0; j < f.n; ++j)
            if (f.le(i, j) && f.le(j, i)) {
                q.cluster_of[j] = c;
                q.clusters[c].push_back(j);
            }
    }
    q.order.assign(q.num_clusters, 0);
    for (int a = 0; a < q.num_clusters; ++a)
        for (int b = 0; b < q.num_clusters; ++b)
            if (f.le(q.clusters[a][0], q.clusters[b][0])) q.order[a] |= 1u << b;
    return q;
}

namespace {

// cluster quotient is a rooted tree: least element and linearly ordered
// strict predecessors
bool quotient_is_tree(const ClusterQuotient& q, int* root_out) {
    int root = -1;
    for (int a = 0; a < q.num_clusters; ++a) {
        bool least = true;
        for (int b = 0; b < q.num_clusters; ++b)
            if (!q.le(a, b)) least = false;
        if (least) { root = a; break; }
    }
    if (root < 0) return false;
    for (int a = 0; a < q.num_clusters; ++a) {
        std::vector<int> preds;
        for (int b = 0; b < q.num_clusters; ++b)
            if (b != a && q.le(b, a)) preds.push_back(b);
        for (int x : preds)
            for (int y : preds)
                if (!q.le(x, y) && !q.le(y, x)) return false;
    }
    if (root_out) *root_out = root;
    return true;
}

std::vector<std::vector<int>> quotient_children(const ClusterQuotient& q) {
    // immediate successors in the cluster order
    std::vector<std::vector<int>> kids(q.num_clusters);
    for (int a = 0; a < q.num_clusters; ++a)
        for (int b = 0; b < q.num_clusters; ++b) {
            if (a == b || !q.le(a, b)) continue;
            bool immediate = true;
            for (int c = 0; c < q.num_clusters; ++c)
                if (c != a && c != b && q.le(a, c) && q.le(c, b)) immediate = false;
            if (immediate) kids[a].push_back(b);
        }
    return kids;
}

bool quotient_is_boolean(const ClusterQuotient& q) {
    int n = q.num_clusters;
    if (n == 1) return true; // 2^0
    int bits = 0;
    while ((1 << bits) < n) ++bits;
    if ((1 << bits) != n) return false;
    int bottom = -1;
    for (int a = 0; a < n; ++a) {
        bool least = true;
        for (int b = 0; b < n; ++b)
            if (!q.le(a, b)) least = false;
        if (least) bottom = a;
    }
    if (bottom < 0) return false;
    auto kids = quotient_children(q);
    std::vector<int> atoms = kids[bottom];
    if (static_cast<int>(atoms.size()) != bits) return false;
    // map each cluster to its atom set; check order-isomorphism with subsets
    std::vector<int> atom_set(n, 0);
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < bits; ++i)
            if (q.le(atoms[i], a)) atom_set[a] |= 1 << i;
    std::vector<bool> seen(1u << bits, false);
    for (int a = 0; a < n; ++a) {
        if (seen[atom_set[a]]) return false;
        seen[atom_set[a]] = true;
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (q.le(a, b) != ((atom_set[a] & ~atom_set[b]) == 0)) return false;
    return true;
}

} // namespace

FrameClass classify_frame(const Frame& f) {
    FrameClass out;
    ClusterQuotient q = cluster_quotient(f);
    out.complete = q.num_clusters == 1;

    std::uint32_t all = f.n == 31 ? ~0u : ((1u << f.n) - 1);
    for (int w = 0; w < f.n && !out.rooted; ++w)
        if (f.reach[w] == all) out.rooted = true;

    out.linear_clusters = true;
    for (int a = 0; a < q.num_clusters; ++a)
        for (int b = 0; b < q.num_clusters; ++b)
            if (!q.le(a, b) && !q.le(b, a)) out.linear_clusters = false;

    int tree_root = -1;
    out.pretree = quotient_is_tree(q, &tree_root);

    if (out.pretree) {
        auto kids = quotient_children(q);
        int k = -1, m = -1;
        bool regular = true;
        for (int a = 0; a < q.num_clusters; ++a) {
            int sz = static_cast<int>(q.clusters[a].size());
            if (m < 0) m = sz;
            if (sz != m) regular = false;
            if (!kids[a].empty()) {
                if (k < 0) k = static_cast<int>(kids[a].size());
                if (static_cast<int>(kids[a].size()) != k) regular = false;
            }
        }
        if (k < 0) k = 1; // single-node tree: vacuously k-ary
        out.regular = regular;
        if (regular) {
            out.regular_k = k;
            out.regular_m = m;
        }
    }

    out.pre_boolean = quotient_is_boolean(q);

    // topped: a unique largest point whose deletion leaves a pre-Boolean algebra
    if (f.n >= 2) {
        int top = -1;
        for (int w = 0; w < f.n; ++w) {
            bool largest = true;
            for (int u = 0; u < f.n; ++u)
                if (!f.le(u, w)) largest = false;
            bool strict = true;
            for (int u = 0; u < f.n; ++u)
                if (u != w && f.le(w, u)) strict = false;
            if (largest && strict) top = w;
        }
        if (top >= 0) {
            std::vector<std::uint32_t> reach;
            std::vector<int> keep;
            for (int w = 0; w < f.n; ++w)
                if (w != top) keep.push_back(w);
            for (int w : keep) {
                std::uint32_t row = 0;
                for (std::size_t j = 0; j < keep.size(); ++j)
                    if (f.le(w, keep[j])) row |= 1u << j;
                reach.push_back(row);
            }
            Frame sub{static_cast<int>(keep.size()), reach, {}};
            out.topped_pre_boolean = quotient_is_boolean(cluster_quotient(sub));
        }
    }

    // capped chain: rooted, linear cluster quotient, non-maximal clusters
    // singletons
    if (out.rooted && out.linear_clusters) {
        bool ok = true;
        for (int a = 0; a < q.num_clusters; ++a) {
            bool maximal = true;
            for (int b = 0; b < q.num_clusters; ++b)
                if (b != a && q.le(a, b)) maximal = false;
            if (!maximal && q.clusters[a].size() != 1) ok = false;
        }
        out.capped_chain = ok;
    }
    return out;
}

Frame generated_subframe(const Frame& f, int w) {
    if (w < 0 || w >= f.n) throw DomainError("invalid world");
    std::vector<int> keep;
    for (int u = 0; u < f.n; ++u)
        if (f.le(w, u)) keep.push_back(u);
    std::vector<std::uint32_t> reach;
    for (int u : keep) {
        std::uint32_t row = 0;
        for (std::size_t j = 0; j < keep.size(); ++j)
            if (f.le(u, keep[j])) row |= 1u << j;
        reach.push_back(row);
    }
    int new_root = static_cast<int>(std::find(keep.begin(), keep.end(), w) - keep.begin());
    return make_frame(static_cast<int>(keep.size()), reach, new_root);
}

bool is_bounded_morphism(const Frame& f, const Frame& g, const std::vector<int>& map) {
    if (static_cast<int>(map.size()) != f.n) return false;
    for (int v : map)
        if (v < 0 || v >= g.n) return false;
    for (int u = 0; u < f.n; ++u)
        for (int v = 0; v < f.n; ++v)
            if (f.le(u, v) && !g.le(map[u], map[v])) return false;
    for (int u = 0; u < f.n; ++u)
        for (int y = 0; y < g.n; ++y) {
            if (!g.le(map[u], y)) continue;
            bool lifted = false;
            for (int v = 0; v < f.n && !lifted; ++v)
                if (f.le(u, v) && map[v] == y) lifted = true;
            if (!lifted) return false;
        }
    return true;
}

Regularization regularize_pretree(const Frame& f, int w0) {
    FrameClass cls = classify_frame(f);
    if (!cls.pretree) throw DomainError("regularize_pretree requires a pretree");
    ClusterQuotient q = cluster_quotient(f);
    int root_cluster = -1;
    quotient_is_tree(q, &root_cluster);
    if (w0 < 0 || w0 >= f.n || q.cluster_of[w0] != root_cluster)
        throw DomainError("w0 must lie in the root cluster");
    auto kids = quotient_children(q);

    int k = 1, m = 1;
    for (int a = 0; a < q.num_clusters; ++a) {
        if (!kids[a].empty()) k = std::max(k, static_cast<int>(kids[a].size()));
        m = std::max(m, static_cast<int>(q.clusters[a].size()));
    }

    // unfold the quotient tree into a k-ary tree; the surjections rho_t and
    // sigma_t pad with the last child / last cluster element
    struct TNode {
        int image;
        std::vector<int> kids;
    };
    std::vector<TNode> tree;
    std::vector<int> stack;
    tree.push_back({root_cluster, {}});
    stack.push_back(0);
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        int t = tree[s].image;
        if (kids[t].empty()) continue;
        for (int i = 0; i < k; ++i) {
            int child_cluster = kids[t][std::min<std::size_t>(i, kids[t].size() - 1)];
            tree.push_back({child_cluster, {}});
            int idx = static_cast<int>(tree.size()) - 1;
            tree[s].kids.push_back(idx);
            stack.push_back(idx);
        }
    }

    int tn = static_cast<int>(tree.size());
    std::vector<std::uint32_t> tree_le(tn, 0);
    for (int s = tn - 1; s >= 0; --s) {
        tree_le[s] = 1u << s;
        for (int c : tree[s].kids) tree_le[s] |= tree_le[c];
    }

    // F* = T* x m, (s,i) <= (u,j) iff s <= u in T*
    int total = tn * m;
    if (total > 31) throw DomainError("regularization exceeds the frame size bound");
    std::vector<std::uint32_t> reach(total, 0);
    for (int s = 0; s < tn; ++s)
        for (int i = 0; i < m; ++i)
            for (int u = 0; u < tn; ++u) {
                if (!((tree_le[s] >> u) & 1u)) continue;
                for (int j = 0; j < m; ++j) reach[s * m + i] |= 1u << (u * m + j);
            }

    Regularization out;
    out.k = k;
    out.m = m;
    out.morphism.resize(total);
    for (int s = 0; s < tn; ++s) {
        const auto& cluster = q.clusters[tree[s].image];
        for (int i = 0; i < m; ++i)
            out.morphism[s * m + i] = cluster[std::min<std::size_t>(i, cluster.size() - 1)];
    }
    int i0 = -1;
    const auto& rc = q.clusters[root_cluster];
    for (int i = 0; i < m; ++i)
        if (rc[std::min<std::size_t>(i, rc.size() - 1)] == w0) { i0 = i; break; }
    out.root = i0;
    out.frame = make_frame(total, reach, out.root);
    return out;
}

// ============================================================================
// Semantics
// ============================================================================

namespace {

std::uint32_t extension(const KripkeModel& m, PropId phi) {
    const PropNode& n = prop_node(phi);
    std::uint32_t all = m.frame.n == 31 ? ~0u : ((1u << m.frame.n) - 1);
    switch (n.tag) {
        case PTag::Var:
            return n.var < static_cast<int>(m.valuation.size()) ? m.valuation[n.var] : 0;
        case PTag::True: return all;
        case PTag::False: return 0;
        case PTag::Not: return all & ~extension(m, n.kids[0]);
        case PTag::And: return extension(m, n.kids[0]) & extension(m, n.kids[1]);
        case PTag::Or: return extension(m, n.kids[0]) | extension(m, n.kids[1]);
        case PTag::Implies: return (all & ~extension(m, n.kids[0])) | extension(m, n.kids[1]);
        case PTag::Iff: {
            std::uint32_t a = extension(m, n.kids[0]), b = extension(m, n.kids[1]);
            return all & ~(a ^ b);
        }
        case PTag::Dia: {
            std::uint32_t e = extension(m, n.kids[0]);
            std::uint32_t out = 0;
            for (int w = 0; w < m.frame.n; ++w)
                if (m.frame.reach[w] & e) out |= 1u << w;
            return out;
        }
        case PTag::Box: {
            std::uint32_t e = extension(m, n.kids[0]);
            std::uint32_t out = 0;
            for (int w = 0; w < m.frame.n; ++w)
                if ((m.frame.reach[w] & ~e) == 0) out |= 1u << w;
            return out;
        }
    }
    return 0;
}

} // namespace

bool model_check(const KripkeModel& m, int world, PropId phi) {
    if (world < 0 || world >= m.frame.n) throw DomainError("invalid world");
    return (extension(m, phi) >> world) & 1u;
}

bool frame_valid(const Frame& f, PropId phi, const Config& cfg) {
    int v = prop_var_count(phi);
    if (f.n > cfg.frame_worlds_max) throw DomainError("frame exceeds the world guard");
    if (v > cfg.frame_vars_max) throw DomainError("formula exceeds the variable guard");
    long long bits = static_cast<long long>(f.n) * v;
    if (bits > cfg.frame_valuation_bits_max) throw DomainError("2^(n*v) guard exceeded");
    std::uint32_t all = f.n == 31 ? ~0u : ((1u << f.n) - 1);
    KripkeModel m{f, std::vector<std::uint32_t>(v, 0)};
    std::uint64_t count = 1ull << bits;
    for (std::uint64_t val = 0; val < count; ++val) {
        std::uint64_t x = val;
        for (int i = 0; i < v; ++i) {
            m.valuation[i] = static_cast<std::uint32_t>(x) & all;
            x >>= f.n;
        }
        if (extension(m, phi) != all) return false;
    }
    return true;
}

PropId axiom_formula(const std::string& name) {
    PropId p = p_var(0);
    if (name == "T") return p_implies(p_box(p), p);
    if (name == "4") return p_implies(p_box(p), p_box(p_box(p)));
    if (name == ".2") return p_implies(p_dia(p_box(p)), p_box(p_dia(p)));
    if (name == ".3") {
        PropId q = p_var(1);
        return p_or(p_box(p_implies(p_box(p), q)), p_box(p_implies(p_box(q), p)));
    }
    if (name == ".1" || name == "McKinsey" || name == "mckinsey")
        return p_implies(p_box(p_dia(p)), p_dia(p_box(p)));
    if (name == "5") return p_implies(p_dia(p_box(p)), p);
    if (name == "Top" || name == "top") return p_or(p_dia(p_box(p)), p_dia(p_box(p_not(p))));
    if (name == "Phi2" || name == "phi2") {
        PropId q = p_var(2), p0 = p_var(0), p1 = p_var(1);
        PropId c1 = p_box(p_and_all({p_or_all({q, p0, p1}), p_not(p_and(p0, p1)),
                                     p_not(p_and(p0, q)), p_not(p_and(p1, q))}));
        PropId c2 = p_box(p_and(p_implies(p0, p_dia(p1)), p_implies(p1, p_dia(p0))));
        PropId c3 = p_box(p_and(p_implies(p0, p_dia(q)), p_implies(p1, p_dia(q))));
        PropId c4 = p_box(p_implies(q, p_and(p_not(p_dia(p0)), p_not(p_dia(p1)))));
        return p_and_all({c1, c2, c3, c4});
    }
    if (name == "chi2") return p_implies(axiom_formula("Phi2"), p_not(p_var(0)));
    throw DomainError("unknown axiom: " + name);
}

PropId jankov_fine(const Frame& f) {
    if (!f.root) throw DomainError("jankov_fine requires a rooted frame");
    if (f.n > 8) throw DomainError("jankov_fine size guard exceeded");
    int r = *f.root;
    std::vector<PropId> vars;
    for (int w = 0; w < f.n; ++w) vars.push_back(p_var(w));
    std::vector<PropId> conj;
    conj.push_back(vars[r]);
    conj.push_back(p_box(p_or_all(vars)));
    for (int i = 0; i < f.n; ++i)
        for (int j = i + 1; j < f.n; ++j) conj.push_back(p_box(p_not(p_and(vars[i], vars[j]))));
    for (int i = 0; i < f.n; ++i)
        for (int j = 0; j < f.n; ++j) {
            if (f.le(i, j))
                conj.push_back(p_box(p_implies(vars[i], p_dia(vars[j]))));
            else
                conj.push_back(p_box(p_implies(vars[i], p_not(p_dia(vars[j])))));
        }
    return p_not(p_and_all(conj));
}

std::vector<Frame> all_preorders(int n) {
    std::vector<Frame> out;
    if (n == 0) return out;
    int bits = n * n - n;
    for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
        std::vector<std::uint32_t> reach(n, 0);
        int b = 0;
        for (int i = 0; i < n; ++i) {
            reach[i] |= 1u << i;
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if ((mask >> b) & 1ull) reach[i] |= 1u << j;
                ++b;
            }
        }
        bool trans = true;
        for (int i = 0; i < n && trans; ++i)
            for (int j = 0; j < n && trans; ++j)
                if ((reach[i] >> j) & 1u)
                    if (reach[j] & ~reach[i]) trans = false;
        if (!trans) continue;
        out.push_back(Frame{n, reach, {}});
    }
    return out;
}

} // namespace lomodal
