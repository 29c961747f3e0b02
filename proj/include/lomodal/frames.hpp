#pragma once

// Finite Kripke frames (reflexive transitive, <= 20 worlds), Kripke models,
// propositional modal formulas, validity by exhaustive valuation search,
// cluster structure, bounded morphisms, pretree regularization, the named
// axioms, and Jankov-Fine formulas.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lomodal/config.hpp"

namespace lomodal {

// ---- propositional modal formulas ---------------------------------------------

using PropId = std::uint32_t;

enum class PTag : std::uint8_t { Var, True, False, Not, And, Or, Implies, Iff, Dia, Box };

struct PropNode {
    PTag tag;
    int var = -1; // Var
    std::vector<PropId> kids;
};

const PropNode& prop_node(PropId f);
PropId p_var(int i);
PropId p_true();
PropId p_false();
PropId p_not(PropId a);
PropId p_and(PropId a, PropId b);
PropId p_or(PropId a, PropId b);
PropId p_implies(PropId a, PropId b);
PropId p_iff(PropId a, PropId b);
PropId p_dia(PropId a);
PropId p_box(PropId a);
PropId p_and_all(const std::vector<PropId>& fs);
PropId p_or_all(const std::vector<PropId>& fs);

int prop_var_count(PropId f); // 1 + max variable index (0 if none)
std::string render_prop(PropId f);
// Grammar mirrors the order-formula connectives with variables p0, p1, ...
// (any identifier); dia/box/~/&/|/->/<->.
PropId parse_prop(const std::string& text, std::vector<std::string>* var_names = nullptr);

// ---- frames ----------------------------------------------------------------------

struct Frame {
    int n = 0;
    std::vector<std::uint32_t> reach; // row bitmask: reach[i] bit j <=> i <= j
    std::optional<int> root;

    bool le(int i, int j) const { return (reach[i] >> j) & 1u; }
};

// Validates reflexivity and transitivity.
Frame make_frame(int n, const std::vector<std::uint32_t>& reach, std::optional<int> root = {});

// File format: first line `worlds n root r` (r = `-` for none), then n lines
// of n characters `1`/`0` (the reachability matrix).
Frame parse_frame(const std::string& text);
std::string render_frame(const Frame& f);

struct KripkeModel {
    Frame frame;
    std::vector<std::uint32_t> valuation; // per variable: world bitmask
};

// ---- canonical frames ------------------------------------------------------------

// F: the pre-Boolean algebra P(n) x m, (S,i) <= (T,j) iff S subset T;
//    world (S,i) has index S*m + i; root (empty,0) = 0.
// E: F plus a singleton top node (last index).
// C: capped chain, n singleton clusters c_0 < ... < c_{n-1} indexed 0..n-1,
//    capped by an m-cluster t_0..t_{m-1} indexed n..n+m-1; root c_0.
Frame canonical_frame(char kind, int n, int m);

// ---- structure theory --------------------------------------------------------------

struct ClusterQuotient {
    int num_clusters = 0;
    std::vector<int> cluster_of;            // world -> cluster
    std::vector<std::vector<int>> clusters; // cluster -> worlds (sorted)
    std::vector<std::uint32_t> order;       // cluster partial order bitmask
    bool le(int a, int b) const { return (order[a] >> b) & 1u; }
};

ClusterQuotient cluster_quotient(const Frame& f);

struct FrameClass {
    bool rooted = false;
    bool pretree = false;
    bool regular = false;
    int regular_k = 0, regular_m = 0;
    bool pre_boolean = false;
    bool topped_pre_boolean = false;
    bool capped_chain = false;
    bool complete = false; // single cluster
    bool linear_clusters = false;
};

FrameClass classify_frame(const Frame& f);

Frame generated_subframe(const Frame& f, int w);

bool is_bounded_morphism(const Frame& f, const Frame& g, const std::vector<int>& map);

struct Regularization {
    Frame frame;     // regular (k, m)
    int root = 0;
    std::vector<int> morphism; // bounded morphism onto the input
    int k = 0, m = 0;
};

// The unfolding construction: quotient tree -> k-ary tree unfolding x m-cluster,
// with a root-preserving bounded morphism back onto the input pretree.
Regularization regularize_pretree(const Frame& f, int w0);

// ---- semantics -----------------------------------------------------------------------

bool model_check(const KripkeModel& m, int world, PropId phi);

// Exhaustive over all valuations of phi's variables; guarded by the config
// bounds (worlds, variables, 2^(n*v)).
bool frame_valid(const Frame& f, PropId phi, const Config& cfg = Config{});

// T, 4, .2, .3, .1 (McKinsey), 5 (maximality form), Top, Phi2, chi2.
PropId axiom_formula(const std::string& name);

// One variable per world; fails at (F, root) under the identity valuation.
PropId jankov_fine(const Frame& f);

// All preorders on n labeled points (reachability matrices), used by the
// exhaustive frame-theory checks.
std::vector<Frame> all_preorders(int n);

} // namespace lomodal
