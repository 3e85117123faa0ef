// Discourse representation structures: the `sem` payload of input nodes and
// tree nodes. Flat condition multisets; `negation` is the only nesting
// construct. Rule applicability is multiset pattern matching over the
// conditions, order-insensitive, with an optional rest variable taking the
// unmatched remainder.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mnlg/feature.hpp"

namespace mnlg {

struct PlanError : MnlgError {
  using MnlgError::MnlgError;
};

// functor -> arity for the condition forms a grammar accepts
using ConditionRegistry = std::map<std::string, int>;
const ConditionRegistry& builtin_conditions();

struct Drs {
  std::vector<std::string> referents;
  std::vector<Value> conditions;  // terms, multiset in file order
};

struct DrsPattern {
  Value referents_pattern;            // list, var, or anonymous
  std::vector<Value> cond_patterns;   // condition terms, may contain vars
  std::optional<std::string> rest;    // tail variable, at most one
};

// drs([r,...],[cond,...]) text -> Drs. Concrete only: variables and `_` are
// rejected here (they belong to patterns, which come in via grammar trees).
Drs parse_drs(std::string_view text,
              const ConditionRegistry& reg = builtin_conditions());

Value drs_to_term(const Drs& d);
std::string print_drs(const Drs& d);

// Views over term values (daughter sems are terms carrying matched pieces).
std::optional<Drs> drs_from_term(const Value& v, const Bindings& b);
std::optional<DrsPattern> pattern_from_term(const Value& v, const Bindings& b);
bool is_drs_term(const Value& v, const Bindings& b);

struct MatchSolution {
  Bindings binds;
  // target conditions (recursively, for nested negations) that were matched
  // into explicit pattern slots; rest-variable remainders are not consumed
  std::vector<Value> consumed;
};

// One solution per way of selecting target conditions for the pattern slots.
std::vector<MatchSolution> match_pattern(const TypeHierarchy& h,
                                         const DrsPattern& pattern,
                                         const Drs& target,
                                         const Bindings& binds);

// Properties predicated of a referent in the common ground: direct
// predications p(r,...) plus the type(C,P) clusters linked by argN(C,r).
// Negations excluded. Throws PlanError if the referent is not declared.
std::vector<Value> conditions_about(const std::string& referent, const Drs& cg);

// Referents that act as property clusters / eventualities: first argument of
// some argN condition. These are not describable objects.
std::set<std::string> cluster_referents(const Drs& cg);

// Unbound variables reachable from a value (the spec's free_variables).
std::set<std::string> free_variables(const Value& v, const Bindings& b);

}  // namespace mnlg
