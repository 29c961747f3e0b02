#pragma once

// Buttons, dials, and labelings as first-class verified objects.  Batteries
// are finite samples of accessible worlds with certified arrows between
// them; verification checks the control conditions exactly on finite cones
// and battery-plus-persistence elsewhere, citing the invariant that closes
// each negative case.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lomodal/fo_eval.hpp"
#include "lomodal/frames.hpp"
#include "lomodal/order_term.hpp"
#include "lomodal/sat_oracle.hpp"

namespace lomodal {

enum class Category { Emb, Mon, Cond, End };

std::string category_name(Category c);
Category category_from_name(const std::string& s);

struct BatteryWorld {
    TermId world;
    Assignment params;       // transported parameter positions
    std::string description; // construction certificate, human-readable
};

struct BatteryArrow {
    int src = 0, dst = 0;
    std::string kind; // e.g. "append-tail", "convex-collapse", "embed-into-eta"
};

struct ControlBattery {
    std::vector<BatteryWorld> worlds;
    std::vector<BatteryArrow> arrows;
};

struct PersistenceFact {
    std::string name;   // e.g. "theta-threshold", "branch-persistence"
    std::string detail;
};

struct ConditionReport {
    enum Verdict { Pass, Fail, JustifiedByPersistence } verdict = Pass;
    std::string condition;
    std::string detail; // witness description or cited invariant
};

struct ControlReport {
    std::vector<ConditionReport> conditions;
    bool passed() const {
        for (const auto& c : conditions)
            if (c.verdict == ConditionReport::Fail) return false;
        return true;
    }
    std::string str() const;
};

struct Labeling {
    Frame frame;
    std::vector<FormulaId> labels; // one per frame world
    Category category = Category::Emb;
    TermId base_world = 0;
    Assignment base_params;
    ControlBattery battery;
    std::vector<int> battery_label; // expected frame node per battery world
    // Justifications for the negative accessibility cases (u cannot reach v),
    // keyed by (frame node of u's label, frame node of v's label).
    std::map<std::pair<int, int>, PersistenceFact> negative_facts;
};

// Truth of control formulas at a world of a category: modality-free parts by
// eval_fo; the registered modal shortcuts Scatt / Scatt_< evaluate by the
// scatteredness theorems (condensation category only).
bool eval_control_formula(Category cat, TermId world, FormulaId f, const Assignment& asg,
                          const EvalOptions& opts = {});

// exactly one d_i everywhere on the battery, every value reachable
ControlReport verify_dial(Category cat, TermId world, const std::vector<FormulaId>& dial,
                          const Assignment& base_params, const ControlBattery& battery,
                          const EvalOptions& opts = {});

struct ButtonChecks {
    bool unpushed = true;
    bool pure = true;
    bool independent = true;
};

ControlReport verify_buttons(Category cat, TermId world, const std::vector<FormulaId>& buttons,
                             const Assignment& base_params, const ControlBattery& battery,
                             const ButtonChecks& checks, const EvalOptions& opts = {});

ControlReport verify_labeling(const Labeling& lab, const EvalOptions& opts = {});

struct RefutationResult {
    std::vector<std::pair<int, FormulaId>> substitution; // variable -> label disjunction
    bool frame_value = false;    // at the frame root under the model (must be false)
    bool instance_value = false; // at the base world through the category semantics
};

// Substitutes each variable by the disjunction of the labels of the worlds
// where the model makes it true, then evaluates the instance at the base
// world.  The embedding category evaluates through the exact elimination
// semantics; end/cond evaluate through the verified labeling's finite state
// abstraction (the labeling lemma's transfer).
RefutationResult simulate_refutation(const Labeling& lab, const KripkeModel& km, PropId phi,
                                     const EvalOptions& opts = {});

struct UpsetIndependenceReport {
    bool upward_closed = true;
    bool independent = false;
    int n = 0;        // family size
    int bound = 0;    // |C|, the number of chains
    std::string detail;
};

// Brute-force check of necessary independence of upward-closed subsets of a
// finite product of chains above p0, and of the n <= |C| bound.
UpsetIndependenceReport upset_independence(const std::vector<int>& chain_lengths,
                                           const std::vector<std::vector<int>>& upsets,
                                           const std::vector<int>& p0);

} // namespace lomodal
