// Shared test fixtures: a small fixed hierarchy, random structure
// generators, and the independent oracles the engine is checked against
// (exhaustive DRS-match enumeration, brute-force derivation enumeration).
#pragma once

#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mnlg/generator.hpp"
#include "mnlg/pipeline.hpp"
#include "mnlg/reader.hpp"
#include "mnlg/referring.hpp"

namespace mnlg_test {

using namespace mnlg;

inline std::string source_dir() { return MNLG_SOURCE_DIR; }
inline std::string demo_grammar_path() {
  return source_dir() + "/grammars/car_demo.gram";
}

inline TypeHierarchy test_hierarchy() {
  return TypeHierarchy::from_edges({
      {"phrase", "top"}, {"s", "phrase"}, {"np", "phrase"}, {"vp", "phrase"},
      {"word", "top"},   {"v", "word"},   {"n", "word"},    {"pol", "top"},
      {"true", "pol"},   {"false", "pol"}, {"none", "top"},
  });
}

struct Rng {
  std::mt19937_64 g;
  explicit Rng(uint64_t seed) : g(seed) {}
  int below(int n) { return static_cast<int>(g() % static_cast<uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[static_cast<size_t>(below(static_cast<int>(xs.size())))];
  }
};

// ---------------------------------------------------------------------------
// Random feature structures (for the unification law suite)

inline Value random_value(Rng& r, const TypeHierarchy& h, int depth);

inline FsPtr random_fs(Rng& r, const TypeHierarchy& h, int depth) {
  static const std::vector<std::string> types{"top", "phrase", "s",   "np",
                                              "vp",  "word",   "pol", "true"};
  static const std::vector<std::string> attrs{"f", "g", "k", "sem"};
  TypeId t = h.require(r.pick(types));
  std::vector<std::pair<std::string, Value>> feats;
  int n = depth <= 0 ? 0 : r.below(3);
  std::vector<std::string> pool = attrs;
  for (int i = 0; i < n; ++i) {
    int ai = r.below(static_cast<int>(pool.size()));
    std::string a = pool[static_cast<size_t>(ai)];
    pool.erase(pool.begin() + ai);
    feats.emplace_back(a, random_value(r, h, depth - 1));
  }
  return make_fs(t, std::move(feats));
}

inline Value random_value(Rng& r, const TypeHierarchy& h, int depth) {
  static const std::vector<std::string> atoms{"a", "b", "c", "hi there!"};
  static const std::vector<std::string> vars{"X", "Y", "Z", "W"};
  const int kind = depth <= 0 ? r.below(2) : r.below(6);
  switch (kind) {
    case 0:
      return Value{Atom{r.pick(atoms)}};
    case 1:
      return Value{Var{r.pick(vars)}};
    case 2:
      return Value{random_fs(r, h, depth - 1)};
    case 3:
      return make_term("p", {random_value(r, h, depth - 1)});
    case 4:
      return make_term("q", {random_value(r, h, depth - 1),
                             random_value(r, h, depth - 1)});
    default: {
      // tails draw from their own pool: list tails stand for lists, and
      // mixing them into item positions makes improper lists
      static const std::vector<std::string> tails{"T1", "T2"};
      int n = r.below(3);
      std::vector<Value> items;
      for (int i = 0; i < n; ++i) items.push_back(random_value(r, h, depth - 1));
      std::optional<Var> tail;
      if (n > 0 && r.chance(30)) tail = Var{r.pick(tails)};
      return make_list(std::move(items), std::move(tail));
    }
  }
}

// ---------------------------------------------------------------------------
// Random DRS patterns and targets

inline Drs random_target(Rng& r, int max_conditions) {
  static const std::vector<std::string> preds{"type", "arg1", "arg2"};
  static const std::vector<std::string> names{"c_1", "c_2", "e_1", "x_1",
                                              "x_2", "fast", "red", "safe"};
  Drs d;
  d.referents = {"c_1", "e_1"};
  const int n = 1 + r.below(max_conditions);
  for (int i = 0; i < n; ++i) {
    if (r.chance(20)) {
      Drs inner;
      const int m = 1 + r.below(2);
      for (int j = 0; j < m; ++j)
        inner.conditions.push_back(make_term(
            r.pick(preds), {Value{Atom{r.pick(names)}}, Value{Atom{r.pick(names)}}}));
      d.conditions.push_back(make_term("negation", {drs_to_term(inner)}));
    } else {
      d.conditions.push_back(make_term(
          r.pick(preds), {Value{Atom{r.pick(names)}}, Value{Atom{r.pick(names)}}}));
    }
  }
  return d;
}

// a pattern loosely derived from the target: some conditions copied with
// atoms replaced by (sometimes shared) variables, order shuffled, sometimes
// a foreign condition mixed in, an optional rest variable
inline DrsPattern random_pattern(Rng& r, const Drs& target, uint64_t& anon) {
  static const std::vector<std::string> pvars{"A", "B", "C"};
  DrsPattern p;
  p.referents_pattern = Value{Var{"_P" + std::to_string(++anon)}};
  std::vector<Value> pool = target.conditions;
  const int k = std::min<int>(static_cast<int>(pool.size()), r.below(3) + (pool.empty() ? 0 : 1));
  for (int i = 0; i < k && !pool.empty(); ++i) {
    int j = r.below(static_cast<int>(pool.size()));
    Value cond = pool[static_cast<size_t>(j)];
    pool.erase(pool.begin() + j);
    // abstract some atoms into variables
    std::function<Value(const Value&, int)> abstract = [&](const Value& v,
                                                           int d) -> Value {
      if (const TermPtr* t = as_term(v)) {
        std::vector<Value> args;
        for (const Value& a : (*t)->args) args.push_back(abstract(a, d + 1));
        return make_term((*t)->functor, std::move(args));
      }
      if (const ListPtr* l = as_list(v)) {
        std::vector<Value> items;
        for (const Value& it : (*l)->items) items.push_back(abstract(it, d + 1));
        if (r.chance(25))
          return make_list(std::move(items),
                           Var{"_R" + std::to_string(++anon)});
        return make_list(std::move(items), (*l)->tail);
      }
      if (as_atom(v) && d > 0 && r.chance(45)) return Value{Var{r.pick(pvars)}};
      return v;
    };
    p.cond_patterns.push_back(abstract(cond, 0));
  }
  if (r.chance(25))
    p.cond_patterns.push_back(
        make_term("type", {Value{Atom{"zz"}}, Value{Var{r.pick(pvars)}}}));
  if (r.chance(60)) p.rest = "Rest";
  return p;
}

// ---------------------------------------------------------------------------
// Oracle 1: exhaustive DRS matching by injective assignment enumeration

inline std::vector<Bindings> oracle_match(const TypeHierarchy& h,
                                          const DrsPattern& pat, const Drs& tgt,
                                          const Bindings& b0);

inline std::vector<Bindings> oracle_cond(const TypeHierarchy& h, const Value& p,
                                         const Value& t, const Bindings& b) {
  Deref pd = deref(p, b);
  Deref td = deref(t, b);
  const TermPtr* pt = as_term(pd.value);
  const TermPtr* tt = as_term(td.value);
  if (pt && tt && (*pt)->functor == "negation" && (*tt)->functor == "negation" &&
      (*pt)->args.size() == 1 && (*tt)->args.size() == 1 &&
      is_drs_term((*pt)->args[0], b) && is_drs_term((*tt)->args[0], b)) {
    auto ip = pattern_from_term((*pt)->args[0], b);
    auto it = drs_from_term((*tt)->args[0], b);
    if (!ip || !it) return {};
    return oracle_match(h, *ip, *it, b);
  }
  Bindings b2 = b;
  Value ign;
  if (!unify_value(h, p, t, b2, ign)) return {};
  return {std::move(b2)};
}

inline std::vector<Bindings> oracle_match(const TypeHierarchy& h,
                                          const DrsPattern& pat, const Drs& tgt,
                                          const Bindings& b0) {
  std::vector<Bindings> out;
  const size_t k = pat.cond_patterns.size();
  const size_t n = tgt.conditions.size();
  if (k > n) return out;
  Bindings start = b0;
  {
    Value ign;
    std::vector<Value> refs;
    for (const std::string& r : tgt.referents) refs.push_back(Value{Atom{r}});
    if (!unify_value(h, pat.referents_pattern, make_list(std::move(refs)), start,
                     ign))
      return out;
  }
  // enumerate every ordered selection of k distinct target indices
  std::vector<size_t> sel(k, 0);
  std::function<void(size_t, std::vector<bool>&)> tuples =
      [&](size_t i, std::vector<bool>& used) {
        if (i == k) {
          std::vector<Bindings> states{start};
          for (size_t s = 0; s < k; ++s) {
            std::vector<Bindings> next;
            for (const Bindings& st : states)
              for (Bindings& b2 :
                   oracle_cond(h, pat.cond_patterns[s], tgt.conditions[sel[s]], st))
                next.push_back(std::move(b2));
            states = std::move(next);
            if (states.empty()) return;
          }
          std::vector<Value> rest_conds;
          for (size_t j = 0; j < n; ++j)
            if (!used[j]) rest_conds.push_back(tgt.conditions[j]);
          for (Bindings& st : states) {
            if (pat.rest) {
              Value ign;
              if (!unify_value(h, Value{Var{*pat.rest}}, make_list(rest_conds),
                               st, ign))
                continue;
            } else if (!rest_conds.empty()) {
              continue;
            }
            out.push_back(std::move(st));
          }
          return;
        }
        for (size_t j = 0; j < n; ++j) {
          if (used[j]) continue;
          used[j] = true;
          sel[i] = j;
          tuples(i + 1, used);
          used[j] = false;
        }
      };
  std::vector<bool> used(n, false);
  tuples(0, used);
  return out;
}

// comparable signature of one match solution: every pattern variable with
// its resolved value
inline std::string solution_signature(const DrsPattern& pat, const Bindings& b) {
  std::set<std::string> vars;
  collect_vars(pat.referents_pattern, vars);
  for (const Value& c : pat.cond_patterns) collect_vars(c, vars);
  if (pat.rest) vars.insert(*pat.rest);
  std::string sig;
  for (const std::string& v : vars)
    sig += v + "=" + print_value(resolve(Value{Var{v}}, b)) + ";";
  return sig;
}

// ---------------------------------------------------------------------------
// Oracle 2: brute-force derivation enumeration (eager, no candidate index,
// no laziness; shares only the separately-tested primitives)

struct OracleGen {
  const Repository& repo;
  const CgState* cg = nullptr;
  int depth_limit = 32;
  uint64_t fresh = 900000;  // far away from anything the engine hands out

  using State = std::pair<Bindings, std::vector<std::string>>;

  std::vector<State> node(const FsPtr& fs, const Bindings& b, int depth) {
    switch (is_complete(fs, b, repo.hierarchy)) {
      case Completeness::complete_form: {
        std::string leaf;
        if (auto f = get_path(fs, {"form"}, b))
          leaf = as_atom(*f)->text;
        else if (auto l = get_path(fs, {"lemma"}, b))
          leaf = "lemma:" + as_atom(*l)->text;
        return {{b, {leaf}}};
      }
      case Completeness::complete_np_open: {
        if (!cg) return {};
        std::string referent;
        Description d;
        try {
          referent = resolve_referent(*fs->get("sem"), b, *cg);
          d = build_description(referent, *cg, repo.lexicon);
        } catch (const RealizeError&) {
          return {};
        }
        auto u = unify(repo.hierarchy, fs, description_request(d, repo.hierarchy), b);
        if (!u) return {};
        return via_repo(u->fs, u->binds, depth + 1);
      }
      case Completeness::incomplete:
        return via_repo(fs, b, depth);
    }
    return {};
  }

  std::vector<State> tree_node(const TreeNode& tn, const Bindings& b, int depth) {
    if (tn.children.empty()) return node(tn.fs, b, depth);
    std::vector<State> states{{b, {}}};
    for (const TreeNode& c : tn.children) states = sequence(states, c, depth);
    return states;
  }

  std::vector<State> sequence(const std::vector<State>& states, const TreeNode& c,
                              int depth) {
    std::vector<State> next;
    for (const State& st : states) {
      for (State& got : tree_node(c, st.first, depth)) {
        std::vector<std::string> seq = st.second;
        seq.insert(seq.end(), got.second.begin(), got.second.end());
        next.emplace_back(std::move(got.first), std::move(seq));
      }
    }
    return next;
  }

  std::vector<State> via_repo(const FsPtr& fs, const Bindings& b, int depth) {
    std::vector<State> out;
    if (depth >= depth_limit) return out;
    for (const GenTree& t : repo.trees) {  // every tree, no index
      const uint64_t sfx = ++fresh;
      TreeNode root = rename_whole(t.root, sfx);
      Bindings b0 = b;
      b0.merge_disjoint(rename_fresh(t.binds, sfx));

      const Value* node_sem = fs->get("sem");
      const Value* mother_sem = root.fs->get("sem");
      const bool pattern_mode = node_sem && mother_sem &&
                                is_drs_term(*node_sem, b0) &&
                                is_drs_term(*mother_sem, b0);
      std::vector<Bindings> starts;
      FsPtr merged;
      if (pattern_mode) {
        std::vector<std::pair<std::string, Value>> keep;
        for (const auto& [a, v] : root.fs->feats)
          if (a != "sem") keep.emplace_back(a, v);
        auto u = unify(repo.hierarchy, fs, make_fs(root.fs->type, std::move(keep)), b0);
        if (!u) continue;
        merged = u->fs;
        auto target = drs_from_term(*node_sem, u->binds);
        auto pattern = pattern_from_term(*mother_sem, u->binds);
        if (!target || !pattern) continue;
        for (MatchSolution& m : match_pattern(repo.hierarchy, *pattern, *target, u->binds))
          starts.push_back(std::move(m.binds));
      } else {
        auto u = unify(repo.hierarchy, fs, root.fs, b0);
        if (!u) continue;
        merged = u->fs;
        starts.push_back(u->binds);
      }
      for (const Bindings& st : starts) {
        if (root.children.empty()) {
          // single-node tree: the matched node is itself the leaf
          std::string leaf = "?leaf";
          if (auto f = get_path(merged, {"form"}, st); f && as_atom(*f))
            leaf = as_atom(*f)->text;
          else if (auto l = get_path(merged, {"lemma"}, st); l && as_atom(*l))
            leaf = "lemma:" + as_atom(*l)->text;
          out.push_back({st, {leaf}});
          continue;
        }
        std::vector<State> states{{st, {}}};
        for (const TreeNode& c : root.children)
          states = sequence(states, c, depth + 1);
        for (State& s : states) out.push_back(std::move(s));
      }
    }
    return out;
  }

  static TreeNode rename_whole(const TreeNode& n, uint64_t sfx) {
    TreeNode out{rename_fresh(n.fs, sfx), {}};
    for (const TreeNode& c : n.children) out.children.push_back(rename_whole(c, sfx));
    return out;
  }
};

inline std::vector<std::string> leaf_strings(const DerivationNode& d) {
  std::vector<const DerivationNode*> leaves;
  collect_leaves(d, leaves);
  std::vector<std::string> out;
  Bindings none;
  for (const DerivationNode* l : leaves) {
    if (auto f = get_path(l->fs, {"form"}, none); f && as_atom(*f))
      out.push_back(as_atom(*f)->text);
    else if (auto m = get_path(l->fs, {"lemma"}, none); m && as_atom(*m))
      out.push_back("lemma:" + as_atom(*m)->text);
    else
      out.push_back("?leaf");
  }
  return out;
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string s;
  for (const auto& x : xs) {
    s += x;
    s += '\x1f';
  }
  return s;
}

}  // namespace mnlg_test
