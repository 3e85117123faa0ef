#include "mnlg/drs.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "mnlg/reader.hpp"

namespace mnlg {

const ConditionRegistry& builtin_conditions() {
  static const ConditionRegistry reg{
      {"type", 2}, {"arg1", 2}, {"arg2", 2}, {"negation", 1}};
  return reg;
}

// ---------------------------------------------------------------------------
// Parsing and validation

namespace {

void reject_vars(const Value& v) {
  std::set<std::string> vars;
  collect_vars(v, vars);
  if (!vars.empty())
    throw GrammarError("variables are not allowed in a concrete drs (found ?" +
                       *vars.begin() + ")");
}

Drs drs_from_checked_term(const Value& v, const ConditionRegistry& reg);

void check_condition(const Value& c, const ConditionRegistry& reg) {
  const TermPtr* t = as_term(c);
  if (!t) throw GrammarError("drs condition is not a term: " + print_value(c));
  const Term& term = **t;
  auto it = reg.find(term.functor);
  if (it == reg.end())
    throw GrammarError("unregistered condition functor '" + term.functor + "'");
  if (static_cast<int>(term.args.size()) != it->second)
    throw GrammarError("condition '" + term.functor + "' expects " +
                       std::to_string(it->second) + " arguments");
  if (term.functor == "negation") {
    drs_from_checked_term(term.args[0], reg);  // recurse for validation
  } else if (term.args.empty()) {
    throw GrammarError("predication must have at least one argument");
  }
}

Drs drs_from_checked_term(const Value& v, const ConditionRegistry& reg) {
  const TermPtr* t = as_term(v);
  if (!t || (*t)->functor != "drs" || (*t)->args.size() != 2)
    throw GrammarError("expected drs(referents, conditions)");
  Drs out;
  const ListPtr* refs = as_list((*t)->args[0]);
  if (!refs) throw GrammarError("drs referents must be a list");
  for (const Value& r : (*refs)->items) {
    const Atom* a = as_atom(r);
    if (!a) throw GrammarError("drs referent must be a name");
    if (std::find(out.referents.begin(), out.referents.end(), a->text) !=
        out.referents.end())
      throw GrammarError("duplicate referent '" + a->text + "'");
    out.referents.push_back(a->text);
  }
  const ListPtr* conds = as_list((*t)->args[1]);
  if (!conds || (*conds)->tail)
    throw GrammarError("drs conditions must be a closed list");
  for (const Value& c : (*conds)->items) {
    check_condition(c, reg);
    out.conditions.push_back(c);
  }
  return out;
}

}  // namespace

Drs parse_drs(std::string_view text, const ConditionRegistry& reg) {
  TypeHierarchy h;  // notation only; no node types occur in a drs
  Value v = parse_value_text(text, h);
  reject_vars(v);
  return drs_from_checked_term(v, reg);
}

Value drs_to_term(const Drs& d) {
  std::vector<Value> refs;
  refs.reserve(d.referents.size());
  for (const std::string& r : d.referents) refs.push_back(Value{Atom{r}});
  return make_term("drs", {make_list(std::move(refs)),
                           make_list(d.conditions)});
}

std::string print_drs(const Drs& d) { return print_value(drs_to_term(d)); }

// ---------------------------------------------------------------------------
// Term views

bool is_drs_term(const Value& v, const Bindings& b) {
  Deref d = deref(v, b);
  const TermPtr* t = as_term(d.value);
  return t && (*t)->functor == "drs" && (*t)->args.size() == 2;
}

std::optional<Drs> drs_from_term(const Value& v, const Bindings& b) {
  Deref d = deref(v, b);
  const TermPtr* t = as_term(d.value);
  if (!t || (*t)->functor != "drs" || (*t)->args.size() != 2) return std::nullopt;
  Drs out;
  Deref refs = deref((*t)->args[0], b);
  if (const ListPtr* rl = as_list(refs.value)) {
    FlatList fl = flatten_list(**rl, b);
    for (const Value& r : fl.items) {
      Deref rd = deref(r, b);
      if (const Atom* a = as_atom(rd.value)) out.referents.push_back(a->text);
    }
  }
  // an unbound referent slot (pattern `_`) simply contributes no names
  Deref conds = deref((*t)->args[1], b);
  const ListPtr* cl = as_list(conds.value);
  if (!cl) return std::nullopt;
  FlatList fl = flatten_list(**cl, b);
  if (fl.tail) return std::nullopt;  // open condition list is not concrete
  for (const Value& c : fl.items) {
    Deref cd = deref(c, b);
    if (!as_term(cd.value)) return std::nullopt;
    out.conditions.push_back(cd.value);
  }
  return out;
}

std::optional<DrsPattern> pattern_from_term(const Value& v, const Bindings& b) {
  Deref d = deref(v, b);
  const TermPtr* t = as_term(d.value);
  if (!t || (*t)->functor != "drs" || (*t)->args.size() != 2) return std::nullopt;
  DrsPattern out;
  out.referents_pattern = (*t)->args[0];
  Deref conds = deref((*t)->args[1], b);
  if (const Var* open = as_var(conds.value)) {
    // whole condition list is a variable: zero slots, everything is rest
    out.rest = open->name;
    return out;
  }
  const ListPtr* cl = as_list(conds.value);
  if (!cl) return std::nullopt;
  FlatList fl = flatten_list(**cl, b);
  out.cond_patterns = std::move(fl.items);
  if (fl.tail) out.rest = *fl.tail;
  return out;
}

// ---------------------------------------------------------------------------
// Multiset matching

namespace {

struct Matcher {
  const TypeHierarchy& hier;
  const Drs& target;
  const std::vector<Value>& pats;
  std::optional<std::string> rest;
  std::vector<MatchSolution>* out;

  // one pattern condition against one target condition; several solutions
  // possible when negations nest
  void match_cond(const Value& pat, const Value& tgt, const Bindings& binds,
                  const std::vector<Value>& consumed,
                  const std::function<void(Bindings, std::vector<Value>)>& k) {
    Deref pd = deref(pat, binds);
    Deref td = deref(tgt, binds);
    const TermPtr* pt = as_term(pd.value);
    const TermPtr* tt = as_term(td.value);
    if (pt && tt && (*pt)->functor == "negation" && (*tt)->functor == "negation" &&
        (*pt)->args.size() == 1 && (*tt)->args.size() == 1 &&
        is_drs_term((*pt)->args[0], binds) && is_drs_term((*tt)->args[0], binds)) {
      auto inner_pat = pattern_from_term((*pt)->args[0], binds);
      auto inner_tgt = drs_from_term((*tt)->args[0], binds);
      if (!inner_pat || !inner_tgt) return;
      for (MatchSolution& sol : match_pattern(hier, *inner_pat, *inner_tgt, binds)) {
        std::vector<Value> c2 = consumed;
        c2.push_back(resolve(tgt, sol.binds));
        for (Value& cc : sol.consumed) c2.push_back(std::move(cc));
        k(std::move(sol.binds), std::move(c2));
      }
      return;
    }
    Bindings b2 = binds;
    Value ignored;
    if (!unify_value(hier, pat, tgt, b2, ignored)) return;
    std::vector<Value> c2 = consumed;
    c2.push_back(resolve(tgt, b2));
    k(std::move(b2), std::move(c2));
  }

  void recurse(size_t i, std::vector<bool>& used, const Bindings& binds,
               const std::vector<Value>& consumed) {
    if (i == pats.size()) {
      Bindings final = binds;
      std::vector<Value> remainder;
      for (size_t j = 0; j < target.conditions.size(); ++j)
        if (!used[j]) remainder.push_back(target.conditions[j]);
      if (rest) {
        Value rv{Var{*rest}};
        Value ignored;
        if (!unify_value(hier, rv, make_list(std::move(remainder)), final,
                         ignored))
          return;
      } else if (!remainder.empty()) {
        return;  // no rest variable: the pattern must cover everything
      }
      out->push_back(MatchSolution{std::move(final), consumed});
      return;
    }
    for (size_t j = 0; j < target.conditions.size(); ++j) {
      if (used[j]) continue;
      used[j] = true;
      match_cond(pats[i], target.conditions[j], binds, consumed,
                 [&](Bindings b2, std::vector<Value> c2) {
                   recurse(i + 1, used, b2, c2);
                 });
      used[j] = false;
    }
  }
};

}  // namespace

std::vector<MatchSolution> match_pattern(const TypeHierarchy& h,
                                         const DrsPattern& pattern,
                                         const Drs& target,
                                         const Bindings& binds) {
  std::vector<MatchSolution> out;
  if (pattern.cond_patterns.size() > target.conditions.size()) return out;
  Bindings b0 = binds;
  Value ignored;
  std::vector<Value> ref_atoms;
  for (const std::string& r : target.referents) ref_atoms.push_back(Value{Atom{r}});
  if (!unify_value(h, pattern.referents_pattern, make_list(std::move(ref_atoms)),
                   b0, ignored))
    return out;
  Matcher m{h, target, pattern.cond_patterns, pattern.rest, &out};
  std::vector<bool> used(target.conditions.size(), false);
  m.recurse(0, used, b0, {});
  return out;
}

// ---------------------------------------------------------------------------
// Common-ground queries

namespace {

bool is_arg_functor(const std::string& f) {
  if (f.size() < 4 || f.rfind("arg", 0) != 0) return false;
  for (size_t i = 3; i < f.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(f[i]))) return false;
  return true;
}

}  // namespace

std::vector<Value> conditions_about(const std::string& referent, const Drs& cg) {
  if (std::find(cg.referents.begin(), cg.referents.end(), referent) ==
      cg.referents.end())
    throw PlanError("unknown referent '" + referent + "' in common ground");

  // cluster ids C with argN(C, referent)
  std::set<std::string> clusters;
  for (const Value& c : cg.conditions) {
    const TermPtr* t = as_term(c);
    if (!t) continue;
    const Term& term = **t;
    if (is_arg_functor(term.functor) && term.args.size() == 2) {
      const Atom* subj = as_atom(term.args[1]);
      const Atom* cluster = as_atom(term.args[0]);
      if (subj && cluster && subj->text == referent) clusters.insert(cluster->text);
    }
  }
  std::vector<Value> out;
  for (const Value& c : cg.conditions) {
    const TermPtr* t = as_term(c);
    if (!t) continue;
    const Term& term = **t;
    if (term.functor == "negation") continue;
    if (is_arg_functor(term.functor)) continue;  // linking conditions
    if (term.args.empty()) continue;
    const Atom* first = as_atom(term.args[0]);
    if (!first) continue;
    if (first->text == referent || clusters.count(first->text))
      out.push_back(c);
  }
  return out;
}

std::set<std::string> cluster_referents(const Drs& cg) {
  std::set<std::string> out;
  for (const Value& c : cg.conditions) {
    const TermPtr* t = as_term(c);
    if (!t) continue;
    if (is_arg_functor((*t)->functor) && !(*t)->args.empty())
      if (const Atom* a = as_atom((*t)->args[0])) out.insert(a->text);
  }
  return out;
}

std::set<std::string> free_variables(const Value& v, const Bindings& b) {
  std::set<std::string> out;
  free_vars(v, b, out);
  return out;
}

}  // namespace mnlg
