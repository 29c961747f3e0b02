#pragma once

// Worlds as finitely presented linear orders: finite chains, omega, omega*,
// zeta, eta, finite ordered sums, and omega-/omega*-/eta-indexed sums of a
// single term.  Points are addressed by structural paths (Position), and the
// combinatorics of tuples lives here: ordered partitions, coarseness,
// interval vectors, scatteredness, convex quotients.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lomodal/config.hpp"
#include "lomodal/rational.hpp"

namespace lomodal {

using TermId = std::uint32_t;

enum class OTag : std::uint8_t { Fin, Omega, OmegaStar, Zeta, Eta, Sum, OmegaSum, OmegaStarSum, EtaSum };

struct OrderTermNode {
    OTag tag;
    int fin_n = 0;             // Fin
    std::vector<TermId> kids;  // Sum (>=1), OmegaSum/OmegaStarSum/EtaSum (1)
};

const OrderTermNode& term_node(TermId t);

TermId t_fin(int n);
TermId t_omega();
TermId t_omega_star();
TermId t_zeta();
TermId t_eta();
TermId t_sum(const std::vector<TermId>& parts); // flattens nested sums; rejects empty list
TermId t_omega_sum(TermId inner);
TermId t_omega_star_sum(TermId inner);
TermId t_eta_sum(TermId inner);

// Ordered sum of two terms; Sum normal form (flattened).
TermId ordered_sum(TermId a, TermId b);

// Term grammar:
//   term := "fin(" NAT ")" | "omega" | "omega*" | "zeta" | "eta"
//         | "sum(" term ("," term)* ")" | "omegasum(" term ")"
//         | "omegastarsum(" term ")" | "etasum(" term ")"
TermId parse_term(const std::string& text); // throws ParseError
std::string render_term(TermId t);

// ---- structural facts -------------------------------------------------------

constexpr long long kInfinite = -1;

bool is_empty(TermId t);
bool is_finite(TermId t);
long long term_size(TermId t); // kInfinite for infinite terms
bool has_min(TermId t);
bool has_max(TermId t);
// Number of adjacent pairs: exact finite count or kInfinite.
long long adjacent_pair_count(TermId t);
// No copy of Q: Fin/Omega/OmegaStar/Zeta scattered; Eta not; Sum iff all
// summands; OmegaSum/OmegaStarSum iff inner; EtaSum(t) iff t empty.
bool is_scattered(TermId t);
// Nonempty, no adjacent pairs, no endpoints.
bool is_dense_without_endpoints(TermId t);

// ---- positions ---------------------------------------------------------------

// One step of a position path, matching the constructor of the term level it
// addresses.  omega* copies are counted from the top (copy 0 is the last).
struct PosStep {
    enum Kind { FinIndex, Summand, OmegaCopy, OmegaStarCopy, ZetaInt, EtaTag } kind;
    long long index = 0; // FinIndex / Summand / OmegaCopy / OmegaStarCopy / ZetaInt
    Rational tag;        // EtaTag
};

struct Position {
    std::vector<PosStep> steps;
    std::string str() const;
};

// CLI syntax: dotted path; `2.0` = summand 2 then index 0; omega copies
// `w:k`, omega* copies `w*:k`, zeta `z:k`, eta tags `q:3/2`.
Position parse_position(TermId t, const std::string& text); // validates
std::string render_position(const Position& p);

bool valid_position(TermId t, const Position& p);
// Total order on positions of one term: -1 / 0 / +1.
int compare_positions(TermId t, const Position& a, const Position& b);

// The open intervals cut out by positions (exclusive bounds; absent bound =
// that end of the order).
TermId prefix_term(TermId t, const Position& p);                      // (-inf, p)
TermId suffix_term(TermId t, const Position& p);                      // (p, +inf)
TermId between_term(TermId t, const Position& a, const Position& b);  // (a, b), a < b

// All positions of a finite term, in increasing order.
std::vector<Position> all_positions(TermId t);
// Finitely many sample positions of any term: all of each Fin part, copies
// 0..k of omega-like parts, integer tags -k..k of eta parts.  Used by
// brute-force search; for finite terms equals all_positions.
std::vector<Position> sample_positions(TermId t, int k);

// ---- ordered partitions ------------------------------------------------------

// Blocks of variable indices {0..n-1} in block order; the quantifier-free
// pattern of a tuple in a linear order.
struct OrderedPartition {
    std::vector<std::vector<int>> blocks; // each sorted; disjoint; cover 0..n-1

    int arity() const;
    friend bool operator==(const OrderedPartition& a, const OrderedPartition& b) {
        return a.blocks == b.blocks;
    }
    std::string str() const;
};

// All ordered partitions of {0..n-1}; deterministic enumeration (lexicographic
// in the block-index vector f with f surjective onto an initial segment).
// Counts are the Fubini numbers: 1, 1, 3, 13, 75, 541, ...
std::vector<OrderedPartition> ordered_partitions(int n);

// P <= Q iff Q is obtained from P by merging adjacent blocks (reflexive).
bool coarsens(const OrderedPartition& p, const OrderedPartition& q); // throws on arity mismatch

// Pattern of equalities and strict order realized by a tuple of positions.
OrderedPartition realized_partition(TermId w, const std::vector<Position>& tuple);

// ---- interval vectors ----------------------------------------------------------

// Sizes of the k+1 consecutive intervals cut by a strictly increasing k-tuple
// (the whole order when k = 0); kInfinite marks infinite intervals.
std::vector<long long> interval_vector(TermId w, const std::vector<Position>& tuple);

// ---- convex quotients (condensations of a finite order) -----------------------

struct ConvexQuotient {
    std::vector<int> block_sizes; // composition of |w|, in order
    TermId quotient;              // Fin(#blocks)
    std::vector<int> map;         // point i of w -> block index
};

// All partitions of a finite nonempty order into consecutive convex blocks,
// each with its chain quotient and induced surjection; includes the identity.
// There are 2^(n-1) of them.
std::vector<ConvexQuotient> convex_quotients(TermId w);

} // namespace lomodal
