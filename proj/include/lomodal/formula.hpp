#pragma once

// Formulas of the modal order language: terms are variables or parameter
// constants (@name), atoms are t1 <= t2 and t1 = t2, and the connectives
// are ~ & | -> <-> exists forall dia box.  Strict < is parser sugar for
// x <= y & ~(x = y).
//
// Formulas are interned into a global DAG: structurally equal formulas share
// one FormulaId, so equality is O(1) and evaluators can memoize on ids.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lomodal/config.hpp"

namespace lomodal {

using FormulaId = std::uint32_t;

enum class FTag : std::uint8_t {
    True, False,
    Leq, Eq,          // atoms on two terms
    Not, And, Or, Implies, Iff,
    Exists, Forall,   // binder in `var`
    Dia, Box,
};

// A term of the order language: a variable x or a parameter constant @a.
struct Term {
    bool param = false;
    std::string name;

    friend bool operator==(const Term& a, const Term& b) {
        return a.param == b.param && a.name == b.name;
    }
    friend bool operator<(const Term& a, const Term& b) {
        if (a.param != b.param) return a.param < b.param;
        return a.name < b.name;
    }
    std::string str() const { return param ? "@" + name : name; }
};

struct FormulaNode {
    FTag tag;
    Term lhs, rhs;                 // Leq / Eq
    std::string var;               // Exists / Forall
    std::vector<FormulaId> kids;   // children (binary connectives have 2)
};

const FormulaNode& node(FormulaId f);

// ---- constructors (interning) ----------------------------------------------
FormulaId f_true();
FormulaId f_false();
FormulaId f_leq(const Term& a, const Term& b);
FormulaId f_eq(const Term& a, const Term& b);
FormulaId f_lt(const Term& a, const Term& b); // sugar: a <= b & ~(a = b)
FormulaId f_not(FormulaId a);
FormulaId f_and(FormulaId a, FormulaId b);
FormulaId f_or(FormulaId a, FormulaId b);
FormulaId f_implies(FormulaId a, FormulaId b);
FormulaId f_iff(FormulaId a, FormulaId b);
FormulaId f_exists(const std::string& var, FormulaId body);
FormulaId f_forall(const std::string& var, FormulaId body);
FormulaId f_dia(FormulaId a);
FormulaId f_box(FormulaId a);

// Left fold; empty conjunction is true, empty disjunction is false.
FormulaId f_and_all(const std::vector<FormulaId>& fs);
FormulaId f_or_all(const std::vector<FormulaId>& fs);

inline Term var(const std::string& name) { return Term{false, name}; }
inline Term param(const std::string& name) { return Term{true, name}; }

// ---- parsing and printing ---------------------------------------------------
// Grammar (bit-exact):
//   formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" or)* ;
//   or := and ("|" and)* ; and := unary ("&" unary)* ;
//   unary := "~" unary | "dia" unary | "box" unary
//          | "exists" VAR "." unary | "forall" VAR "." unary | atom ;
//   atom := term ("<=" | "<" | "=") term | "(" formula ")" | "true" | "false" ;
//   term := VAR | "@"NAME .
// "->" and "<->" associate to the right; "&" and "|" to the left.
// Rebinding a variable already bound in scope is rejected.
FormulaId parse_formula(const std::string& text); // throws ParseError

// Canonical printing with minimal parentheses; parse_formula(render(f)) == f.
std::string render(FormulaId f);

// ---- analysis ----------------------------------------------------------------
// Standard quantifier rank; Dia/Box contribute 0.
int quantifier_rank(FormulaId f);

// Free terms (variables not in scope of a binder, plus all parameters),
// in order of first occurrence.
std::vector<Term> free_terms(FormulaId f);

bool has_modality(FormulaId f);

// Capture-free substitution of a term for a free variable or parameter.
// Counting-shaped subformulas keep their registration (defined in named.cpp,
// next to the registry).
FormulaId substitute_term(FormulaId f, const Term& from, const Term& replacement);

// Simplifier used to present elimination results: constant folding,
// double negation, flattening of & and |.  Registered counting formulas are
// left intact.  Purely syntactic.  (Defined in named.cpp.)
FormulaId simplify(FormulaId f);

} // namespace lomodal
