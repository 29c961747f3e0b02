#pragma once

// Catalog-bounded satisfiability for modality-free formulas over linear
// orders: the oracle searches structures of shape I_0 + pt + I_1 + ... +
// pt + I_k where each interval is a sum of at most L catalog blocks meeting
// its constraint.  A witness is re-verified by eval_fo and interval_vector
// before being returned; NoneInCatalog is not a proof of unsatisfiability
// and is reported as such.

#include <optional>

#include "lomodal/config.hpp"
#include "lomodal/fo_eval.hpp"

namespace lomodal {

enum class IntervalConstraintKind { Exactly, AtLeast, Unconstrained, Infinite };

struct IntervalConstraint {
    IntervalConstraintKind kind = IntervalConstraintKind::Unconstrained;
    int n = 0;
    static IntervalConstraint exactly(int n) { return {IntervalConstraintKind::Exactly, n}; }
    static IntervalConstraint at_least(int n) { return {IntervalConstraintKind::AtLeast, n}; }
    static IntervalConstraint unconstrained() { return {IntervalConstraintKind::Unconstrained, 0}; }
    static IntervalConstraint infinite() { return {IntervalConstraintKind::Infinite, 0}; }
};

struct SatQuery {
    FormulaId psi;                   // modality-free
    std::vector<Term> pattern_vars;  // required strictly increasing, in order
    std::vector<IntervalConstraint> constraints; // size k+1 (defaults to unconstrained)
};

struct Catalog {
    std::vector<TermId> blocks; // fixed deterministic order
    int max_blocks = 3;         // L: summands per interval
    long budget = 200000;       // global candidate cap per query
    int fin_max = 16;           // largest Fin block in `blocks`

    // Fin(0..B), Omega, OmegaStar, Zeta, Eta, EtaSum(Fin(2..r_max)).
    static Catalog standard(const Config& cfg = Config{});
};

struct SatWitness {
    TermId world;
    std::vector<Position> tuple;
};

struct SatResult {
    std::optional<SatWitness> witness;
    bool budget_exhausted = false; // NoneInCatalog came from the budget, not exhaustion
    bool found() const { return witness.has_value(); }
};

// Deterministic: candidates are enumerated by total block count, then
// lexicographically in the fixed block order, and the first verified witness
// is returned.
SatResult satisfiable(const SatQuery& query, const Catalog& cat, const EvalOptions& opts = {});

// The canonical filler sums of at most max_blocks catalog blocks (adjacent
// Fin blocks merged, empty blocks dropped, adjacent plain etas merged),
// deduplicated, grouped by block count.  Exposed for the end-extension tail
// search.
std::vector<TermId> catalog_fillings(const Catalog& cat, const IntervalConstraint& c);

} // namespace lomodal
