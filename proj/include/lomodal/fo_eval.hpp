#pragma once

// Exact evaluation of modality-free formulas on order terms.
//
// Finite terms are evaluated by direct enumeration.  Infinite terms are
// evaluated on the decorated type of (world, assignment): the world is cut
// at the assigned positions into segment terms, each segment carries its
// EF type at the formula's effective rank, and a quantifier ranges over the
// marked points plus one representative per split class of each segment.
// Registered counting subformulas (theta_n, Exactly_r, #I bounds, the
// empty-interval core of Succ/Adj) evaluate by cardinality reasoning and
// contribute nothing to the effective rank.

#include <map>

#include "lomodal/formula.hpp"
#include "lomodal/named.hpp"
#include "lomodal/order_term.hpp"
#include "lomodal/type_engine.hpp"

namespace lomodal {

using Assignment = std::map<Term, Position>;

struct EvalOptions {
    int rank_cap = 4;         // applies to the effective rank on infinite terms
    bool force_typed = false; // evaluate via the type engine even on finite terms
    bool force_direct = false;
    bool raw_counts = false;  // ignore counting registrations (cross-check oracle)
};

// Effective quantifier rank: counting subformulas count as 0.
int effective_rank(FormulaId f);
// Largest counting constant (the engine's size cap is one more).
int max_count_constant(FormulaId f);

// Exact truth value.  Throws RankCapError when the term is infinite and the
// effective rank exceeds the cap; DomainError on unbound variables, invalid
// positions, or modalities.
bool eval_fo(TermId w, FormulaId f, const Assignment& asg = {}, const EvalOptions& opts = {});

// The two paths, exposed for cross-checking.
bool eval_fo_direct(TermId w, FormulaId f, const Assignment& asg,
                    bool use_count_registry = true); // finite terms only
bool eval_fo_typed(TermId w, FormulaId f, const Assignment& asg, const EvalOptions& opts = {});

// ---- QType facade (K = 0 classical EF types) --------------------------------

struct QType {
    TypeEngine::Ref ref;
    int rank;
    friend bool operator==(const QType& a, const QType& b) { return a.ref == b.ref && a.rank == b.rank; }
};

enum class SumOp { Sum, OmegaSum, OmegaStarSum, EtaSum };

QType qtype(TermId w, int q);
// Sum takes any number of arguments; the indexed sums take exactly one.
QType compose_qtype(SumOp op, const std::vector<QType>& args, int q);

} // namespace lomodal
