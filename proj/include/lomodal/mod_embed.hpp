#pragma once

// The embedding category: modality elimination, modal evaluation, the
// upward-absolute sentence dichotomy, exact-logic classification, the
// capped-chain labeling construction, and finite amalgamation.
//
// Eliminating dia psi splits over the ordered partitions of the free terms;
// for each pattern, membership of an interval-size vector in the witness set
// S is decided by the catalog oracle with exact finite coordinates (probed up
// to the chain-type stabilization point of the stage) and catalog fillings
// for the infinite coordinates.  The normal form keeps, per pattern, the
// antichain of maximal probed vectors, denoting P(x) and a finite disjunction
// of interval upper bounds.

#include "lomodal/control.hpp"

namespace lomodal {

struct PatternNormalForm {
    OrderedPartition pattern;                        // over the free terms
    bool satisfiable = false;
    std::vector<std::vector<long long>> max_vectors; // kInfinite marks infinity
};

struct EmbedNormalForm {
    std::vector<Term> free_order; // pattern variable indexing, first occurrence
    std::vector<PatternNormalForm> cases;
    bool catalog_relative = false;
};

struct EliminationResult {
    FormulaId formula;
    bool catalog_relative = false;
};

// Innermost-first elimination; Box is eliminated as ~dia~.
EliminationResult eliminate_embed(FormulaId f, const Config& cfg = Config{});

// The per-dia analysis, exposed for the normal-form invariant tests.
EmbedNormalForm embed_dia_normal_form(FormulaId psi, const Config& cfg = Config{});

struct ModalEvalResult {
    bool value = false;
    bool catalog_relative = false;
};

ModalEvalResult eval_modal_embed(TermId w, FormulaId f, const Assignment& asg = {},
                                 const Config& cfg = Config{});

// Lemma dichotomy for upward-absolute parameter-free sentences on the cone:
// false everywhere, or equivalent to a single size threshold theta_n.
struct UpwardClassification {
    bool false_everywhere = false;
    int threshold = 0; // valid when !false_everywhere
};

UpwardClassification classify_upward_sentence(FormulaId b, TermId w, const Config& cfg = Config{});

enum class LogicTag { S43Chi2, S5, S42, UnclassifiedByPaper };
std::string logic_tag_name(LogicTag t);

enum class SubstitutionMode { Sentential, Parameters };

LogicTag exact_logic_embed(TermId w, SubstitutionMode mode);

// Labeling of the capped chain C_{n,m} above a finite world of size k:
// chain labels theta_{k+i} & ~theta_{k+i+1}, cap labels theta_{k+n} & d_j
// with the discrete-interval dial.
Labeling capped_chain_labeling(TermId base, int n, int m);

// Finite spans of embeddings, amalgamated deterministically (new points of
// the left leg precede those of the right in each gap).
struct FiniteEmbedding {
    TermId dom = 0, cod = 0;
    std::vector<int> map; // strictly increasing point indices
};

struct Amalgam {
    TermId world;
    FiniteEmbedding g0, g1; // commuting with the span on its common domain
};

Amalgam amalgamate_finite(const FiniteEmbedding& f0, const FiniteEmbedding& f1);

bool is_finite_embedding(const FiniteEmbedding& e);

} // namespace lomodal
