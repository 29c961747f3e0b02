#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lomodal {

// Tunables shared across the library.  Loaded from a plain-text config file
// of `key = value` lines; every key can be overridden by an environment
// variable with the LOMODAL_ prefix (e.g. LOMODAL_RANK_CAP).
struct Config {
    // Maximum effective quantifier rank admitted when evaluating or
    // eliminating user formulas over infinite terms.  Counting subformulas
    // contribute 0 (they are evaluated by cardinality reasoning), so this
    // bounds the genuine quantifier nesting.
    int rank_cap = 4;

    // Catalog parameters for the satisfiability oracle.
    int catalog_fin_max = 16;    // Fin(0..B) available as filler blocks
    int catalog_eta_fin_max = 2; // EtaSum(Fin(r)) for 2 <= r <= this
    int catalog_max_blocks = 3;  // max summands per interval (L)
    long sat_budget = 200000;    // global candidate cap per query

    // Frame guards.
    int frame_worlds_max = 20;
    int frame_vars_max = 4;
    int frame_valuation_bits_max = 24; // 2^(worlds*vars) exhaustive bound

    static Config load(const std::string& path); // throws on malformed file
    static Config from_environment(Config base);
    static Config from_environment() { return from_environment(Config{}); }
};

// Error types used across modules.
struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
};

struct RankCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lomodal
