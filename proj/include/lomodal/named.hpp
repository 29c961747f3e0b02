#pragma once

// Builders for the named formulas of the modal order theory: size thresholds,
// discrete-interval sentences, density, successor/adjacency machinery, the
// end-extension coding formulas, scatteredness, and the monotone buttons.
// Each builder returns the interned AST; counting-shaped formulas are
// registered so evaluators can use exact cardinality reasoning instead of
// raw quantifier expansion.

#include <optional>
#include <string>
#include <vector>

#include "lomodal/formula.hpp"

namespace lomodal {

// rho(z) for counting: an open/half-open interval cut by terms; absent bound
// means that end of the order.
struct IntervalShape {
    std::optional<Term> lo;
    bool lo_strict = true; // lo < z (false: lo <= z)
    std::optional<Term> hi;
    bool hi_strict = true; // z < hi (false: z <= hi)

    friend bool operator==(const IntervalShape& a, const IntervalShape& b) {
        return a.lo == b.lo && a.lo_strict == b.lo_strict && a.hi == b.hi && a.hi_strict == b.hi_strict;
    }
};

// #rho >= n and #rho <= n as displayed, with fresh bound variables from
// `prefix`.  n = 0: atleast is true.
FormulaId count_atleast(const IntervalShape& iv, int n, const std::string& prefix = "z");
FormulaId count_atmost(const IntervalShape& iv, int n, const std::string& prefix = "z");
FormulaId count_exactly(const IntervalShape& iv, int n, const std::string& prefix = "z");

// Looks up counting registration (populated by the builders above).
struct CountSpec {
    IntervalShape iv;
    int n;
    bool atleast; // false: atmost
    std::string prefix;
};
std::optional<CountSpec> count_spec(FormulaId f);

// ---- the named family -------------------------------------------------------

FormulaId theta(int n);                       // at least n points; theta_0 = true
FormulaId adj(const Term& a, const Term& b);  // a < b with nothing between
FormulaId succ(const Term& a, const Term& b); // same formula as adj
FormulaId disc(int n);                        // n >= 2: a discrete interval of size n
FormulaId dense_sentence();                   // dense with min and max (rank 3)
FormulaId max_of(const Term& x);
FormulaId has_pred(const Term& x);
FormulaId no_pred(const Term& x);
FormulaId no_succ(const Term& x);

// Disc dial d_1, ..., d_{m-1}, d_{>=m} (m >= 2), in list order.
std::vector<FormulaId> disc_dial(int m);

// End-extension coding relative to a finite base order of size base_n.
FormulaId top_base(const Term& x, int base_n);   // x has exactly base_n - 1 predecessors
FormulaId anch(const Term& x, int base_n);       // tautology when base_n = 0
FormulaId above_base(const Term& x, int base_n); // tautology when base_n = 0
FormulaId p_point(int n, int base_n, const Term& z); // P_n(z)
FormulaId empty_n(int n, int base_n);
FormulaId min_n(int n, int base_n);
FormulaId nomin_n(int n, int base_n);
FormulaId exactly_between(int r, const Term& b, const Term& u); // r points x, b < x <= u
FormulaId final_block(int r, int base_n, const Term& b, const Term& u);
FormulaId chain_of(int b_size, const Term& b);   // b tops a successor chain of size b_size
FormulaId max_succ_below(const Term& y, const Term& b);
FormulaId code(int b_size, const Term& y);
FormulaId min_p(int n, int base_n, const Term& x);
// Branch_{n,a} for a k-branching tree; codes B_a = a + 2.
FormulaId branch(int n, int a, int k, int base_n);

// Condensation machinery (modal; Scatt via dia Dense).
FormulaId scatt_sentence();              // ~dia Dense
FormulaId scatt_below_formula(const Term& x); // ~dia(Max(x) & ~Scatt)
// Registered modal shortcuts for the evaluators.
enum class ModalShortcut { Scatt, ScattBelow };
std::optional<std::pair<ModalShortcut, Term>> modal_shortcut(FormulaId f);

// Adjacency chains strictly below x, and the delta dial values.
FormulaId chain_below(int n, const Term& x); // Chain^<_n(x)
FormulaId delta_below(int n, const Term& x); // Chain^<_n & ~Chain^<_{n+1}

// Monotone buttons: parameters u1,v1,...,uN,vN.
FormulaId mono_rho(int n_buttons);
FormulaId mono_button(int i, int n_buttons); // 1-based i

// String dispatcher for the named family, e.g. "theta(3)", "disc(2)",
// "adj(x,y)", "branch(2,0,2,1)"; used by the CLI's --named option.
FormulaId named_formula(const std::string& spec);

} // namespace lomodal
