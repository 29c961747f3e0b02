#pragma once

// Rank-q Ehrenfeucht-Fraisse types of linear orders, composable under ordered
// sums and omega-/omega*-/eta-indexed sums.  A type of rank q >= 1 is the set
// of one-point splits, each recorded as the pair of rank-(q-1) types of the
// two sides; the rank-0 type carries a capped cardinality.
//
// The engine is parameterized by a counting cap K: sizes are tracked exactly
// up to K-1 and collapsed to BIG beyond.  K = 0 tracks no sizes at all and
// gives the classical EF types (two finite orders get equal types at rank q
// exactly when no rank-q sentence separates them).  K >= 1 refines the types
// just enough to evaluate cardinality atoms with constants < K, which is how
// counting formulas stay out of the quantifier rank.
//
// Types are hash-consed; all compositions are memoized.  The fixpoints for
// the infinite-index sums follow the split structure of the orders:
//   - T*omega: a point in copy n splits into T*n + prefix and suffix + T*omega;
//     the finite powers are eventually periodic at each rank.
//   - eta-indexed sums: both sides of any split are again eta-sums, giving a
//     rank-descending recursion.

#include <cstdint>
#include <vector>

#include "lomodal/order_term.hpp"

namespace lomodal {

class TypeEngine {
public:
    using Ref = std::uint32_t;
    static constexpr int kBigSize = -1; // >= K, or infinite

    explicit TypeEngine(int count_cap);
    ~TypeEngine();
    TypeEngine(const TypeEngine&) = delete;
    TypeEngine& operator=(const TypeEngine&) = delete;

    int count_cap() const { return cap_; }

    // Type of a term at the given rank (memoized structural recursion).
    Ref type_of(TermId t, int rank);

    Ref compose_sum(Ref a, Ref b);
    Ref omega_sum_of(Ref t);      // type of the omega-indexed sum of T
    Ref omega_star_sum_of(Ref t);
    Ref eta_sum_of(Ref t);

    // Rank-lowering projection (rank >= 1).
    Ref project(Ref t);

    int rank_of(Ref r) const { return nodes_[r].rank; }
    int size_of(Ref r) const { return nodes_[r].size; } // capped; kBigSize beyond
    const std::vector<std::pair<Ref, Ref>>& splits_of(Ref r) const { return nodes_[r].splits; }

    // Emptiness is readable from a type of rank >= 1 (no splits) and, when
    // K >= 1, from the rank-0 size.
    bool empty_type(Ref r) const;

    // Least s with type(Fin(s)) == type(Fin(s+1)) at this rank; the chain
    // type sequence is an iterated function of the previous value, so the
    // first repeat is permanent.  Bounds the finite probing of interval
    // contents.
    int chain_stabilization(int rank);

    // Shared engines, one per counting cap.
    static TypeEngine& shared(int count_cap);

private:
    struct Node {
        int rank;
        int size; // capped size, kBigSize for >= cap or infinite
        std::vector<std::pair<Ref, Ref>> splits; // sorted, deduped
    };

    int cap_;
    std::vector<Node> nodes_;
    Ref intern(int rank, int size, std::vector<std::pair<Ref, Ref>> splits);
    int cap_size(long long sz) const;
    int add_sizes(int a, int b) const;

    struct Impl; // memo tables
    Impl* impl_;
};

} // namespace lomodal
